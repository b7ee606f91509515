//! Recover a random signal from noiseless measurements with both solver
//! strategies and report the stage timings.
//!
//! `cargo run --release --example noiseless_recovery -- [d] [delta]`

use blockpr::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let d = args.next().unwrap_or(256);
    let delta = args.next().unwrap_or(8);

    let x = Signal::random_gaussian(d, &mut ChaCha20Rng::seed_from_u64(7));
    for (kind, strategy) in [
        (MaskKind::UnitPair, SolverStrategy::UnitPairClosed),
        (MaskKind::UnitPair, SolverStrategy::BlockCirculantFft),
        (MaskKind::exponential(delta), SolverStrategy::BlockCirculantFft),
    ] {
        let masks = build_masks(kind, d, delta)?;
        let y = forward_measure(&x, &masks)?;
        let solver = LiftedSolver::build(&masks, strategy)?;
        let r = recover(&y, &solver, &RecoveryConfig::default(), Some(&x))?;
        let t = r.stage_times_ms;
        println!(
            "{kind:?} / {strategy:?}: error {:.1} dB, kappa {:.2}, {:.3} ms (invert {:.3}, eigen {:.3})",
            r.error_db.unwrap(),
            solver.kappa(),
            t.total,
            t.invert,
            t.eigen
        );
    }
    Ok(())
}
