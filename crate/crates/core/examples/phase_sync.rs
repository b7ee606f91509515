//! Step through the synchronization stage by hand on noisy data: invert the
//! lifted system, normalize to unit-modulus phases, take the top
//! eigenvector and compare the frustration with that of the true phases.

use blockpr::harness::synthesize_noise;
use blockpr::metrics::relative_error;
use blockpr::prelude::*;
use blockpr::spectral::frustration;
use blockpr::sync::{
    assemble, estimate_magnitudes, normalize_phases, top_phase_eigenvector, EigenConfig, EigenMethod,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<()> {
    let (d, delta) = (128, 6);
    let x = Signal::random_gaussian(d, &mut ChaCha20Rng::seed_from_u64(3));
    let masks = build_masks(MaskKind::UnitPair, d, delta)?;
    let solver = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed)?;

    for snr in [f64::INFINITY, 60.0, 40.0, 20.0] {
        let y = synthesize_noise(&forward_measure(&x, &masks)?, snr, 11)?;
        let inv = solver.invert(&y)?;
        let phases = normalize_phases(&inv.matrix);
        println!("SNR {snr} dB, least-squares residual {:.3e}", inv.residual);
        for method in [EigenMethod::ShiftedInversePower, EigenMethod::RayleighQuotient] {
            let cfg = EigenConfig { method, ..EigenConfig::default() };
            let eig = top_phase_eigenvector(&phases, &cfg)?;
            let mags = estimate_magnitudes(&inv.matrix, MagnitudeMethod::Diagonal)?;
            let est = assemble(&mags, &eig)?;
            let unit: Vec<_> = eig.vector.iter().map(|z| z / z.norm()).collect();
            println!(
                "  {method:?}: {} iterations, residual {:.1e}, frustration {:.4} (truth {:.4}), error {:.3e}",
                eig.iterations,
                eig.residual,
                frustration(phases.as_banded(), &unit)?,
                frustration(phases.as_banded(), x.phase_signal().entries())?,
                relative_error(&est, &x)?
            );
        }
    }
    Ok(())
}
