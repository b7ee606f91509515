//! Alternating-projection baseline against the direct method at a few noise
//! levels, plus the direct estimate polished by a short alternating run.

use blockpr::baselines::{gerchberg_saxton, gs_refine, GsConfig, GsInit, REFINE_ITERS};
use blockpr::harness::synthesize_noise;
use blockpr::metrics::error_db;
use blockpr::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const RESTARTS: u64 = 5;

fn main() -> Result<()> {
    let (d, delta) = (64, 4);
    let masks = build_masks(MaskKind::UnitPair, d, delta)?;
    let solver = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed)?;
    let x = Signal::random_gaussian(d, &mut ChaCha20Rng::seed_from_u64(1));
    let clean = forward_measure(&x, &masks)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "SNR", "direct", "+refine", "alt-proj", "mean its");
    for snr in [20.0, 40.0, 60.0] {
        let y = synthesize_noise(&clean, snr, 2)?;
        let direct = recover(&y, &solver, &RecoveryConfig::default(), Some(&x))?;
        let refined = gs_refine(&direct.estimate, &y, &masks, REFINE_ITERS)?;
        // random starts can stall at poor fixed points, so average a few
        let (mut gs_db, mut iters) = (0.0, 0);
        for seed in 0..RESTARTS {
            let cfg = GsConfig { init: GsInit::RandomGaussian { seed }, ..GsConfig::default() };
            let gs = gerchberg_saxton(&y, &masks, &cfg, Some(&x))?;
            gs_db += gs.report.error_db.unwrap() / RESTARTS as f64;
            iters += gs.residuals.len() / RESTARTS as usize;
        }
        println!(
            "{snr:>6} {:>10.2} {:>10.2} {:>10.2} {:>8}",
            direct.error_db.unwrap(),
            error_db(&refined.report.estimate, &x)?,
            gs_db,
            iters
        );
    }
    Ok(())
}
