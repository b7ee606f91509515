//! Compare magnitude estimates read from the diagonal of the recovered band
//! with ones from the leading eigenvectors of small principal blocks.

use blockpr::harness::synthesize_noise;
use blockpr::metrics::error_db;
use blockpr::prelude::*;
use blockpr::sync::{assemble, estimate_magnitudes, normalize_phases, top_phase_eigenvector, Combine, EigenConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<()> {
    let (d, delta, snr) = (128, 4, 20.0);
    let masks = build_masks(MaskKind::UnitPair, d, delta)?;
    let solver = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed)?;
    let methods = [
        MagnitudeMethod::Diagonal,
        MagnitudeMethod::blocks(delta),
        MagnitudeMethod::Blocks { gamma: delta, shift: 1, combine: Combine::Median },
        MagnitudeMethod::Blocks { gamma: 2, shift: 1, combine: Combine::Mean },
    ];
    let trials = 50;
    let mut totals = vec![0.0; methods.len()];
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for t in 0..trials {
        let x = Signal::random_gaussian(d, &mut rng);
        let y = synthesize_noise(&forward_measure(&x, &masks)?, snr, t)?;
        let inv = solver.invert(&y)?;
        let eig = top_phase_eigenvector(&normalize_phases(&inv.matrix), &EigenConfig::default())?;
        for (m, total) in methods.iter().zip(&mut totals) {
            let est = assemble(&estimate_magnitudes(&inv.matrix, *m)?, &eig)?;
            *total += error_db(&est, &x)? / trials as f64;
        }
    }
    for (m, total) in methods.iter().zip(totals) {
        println!("{total:>8.2} dB  {m:?}");
    }
    Ok(())
}
