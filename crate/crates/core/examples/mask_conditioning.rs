//! Condition numbers of the lifted operator for the two deterministic mask
//! families, next to the closed-form upper bounds they satisfy.

use blockpr::lifting::{lifted_conditioning, Parametrization};
use blockpr::masks::default_decay;
use blockpr::prelude::*;
use std::f64::consts::E;

fn main() -> Result<()> {
    let d = 64;
    println!("exponential masks, complex-linear extension");
    println!("{:>5} {:>10} {:>10} {:>12} {:>12}", "delta", "kappa", "bound", "sigma_min", "lower");
    for delta in 3..=8 {
        let a = default_decay(delta);
        let c = lifted_conditioning(&build_masks(MaskKind::Exponential { a }, d, delta)?, Parametrization::Elementary)?;
        let bound = f64::max(144.0 * E * E, 2.25 * E * E * ((delta - 1) as f64).powi(2));
        let lower = 7.0 / (20.0 * a) * (-((delta + 1) as f64) / a).exp();
        println!("{delta:>5} {:>10.2} {bound:>10.1} {:>12.3e} {lower:>12.3e}", c.kappa, c.sigma_min);
    }

    println!("\nunit-pair masks, coefficient parametrization");
    println!("{:>5} {:>10} {:>10} {:>10}", "delta", "kappa", "isometric", "bound");
    for delta in 2..=16 {
        let masks = build_masks(MaskKind::UnitPair, d, delta)?;
        let closed = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed)?.kappa();
        let iso = lifted_conditioning(&masks, Parametrization::Isometric)?.kappa;
        let s = (2.0 * delta as f64).sqrt();
        println!("{delta:>5} {closed:>10.2} {iso:>10.2} {:>10.2}", (2.0 + 2.0 * s) * (0.5 + s));
    }
    Ok(())
}
