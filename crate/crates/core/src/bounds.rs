//! Randomized checks of the perturbation inequalities behind the method.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::banded::{lifted_outer, BandedHermitian};
use crate::error::{Error, Result};
use crate::signal::{sgn, Signal};
use crate::spectral::{
    cheeger_check, frustration, frustration_sum_form, phase_perturbation, rank1_bound, sin_theta_bound,
    spectral_gap, SpectrumReport,
};
use crate::sync::normalize_phases;

/// Largest perturbation size drawn, relative to the unperturbed matrix.
pub const MAX_ETA: f64 = 0.3;

/// Rounding constant of the Cheeger-type inequality.
pub const CHEEGER_CONSTANT: f64 = 44.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub instances: usize,
    /// Largest `measured / bound` seen.
    pub worst_ratio: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub d: usize,
    pub delta: usize,
    pub seed: u64,
    pub spectrum: SpectrumReport,
    pub rank1: BoundSummary,
    pub sin_theta: BoundSummary,
    pub cheeger: BoundSummary,
    /// Largest `|quadratic form - pair sum|` of the frustration.
    pub frustration_identity_gap: f64,
    /// Largest `measured / (eta d^{5/2} / delta^2)` for the phase error.
    pub phase_ratio_sgn: f64,
    pub phase_ratio_scaled: f64,
    pub all_hold: bool,
}

fn gaussian_c<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
}

fn dense_hermitian<R: Rng>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian_c(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

fn band_hermitian<R: Rng>(d: usize, delta: usize, rng: &mut R) -> BandedHermitian {
    let mut e = BandedHermitian::zeros(d, delta);
    for i in 0..d {
        e.set(i, i, Complex64::new(rng.sample(rand_distr::StandardNormal), 0.0));
        for k in 1..e.stored() {
            let j = (i + k) % d;
            if j != i && !(2 * k == d && i > j) {
                e.set(i, j, gaussian_c(rng));
            }
        }
    }
    e
}

fn summary(ratios: &[f64], limit: f64) -> BoundSummary {
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    BoundSummary {
        instances: ratios.len(),
        worst_ratio: worst,
        holds: worst <= limit,
    }
}

/// Draw `trials` instances of each inequality at `(d, delta)` with
/// perturbation sizes uniform in `(0, MAX_ETA]`.
pub fn check_bounds(d: usize, delta: usize, trials: usize, seed: u64) -> Result<BoundsReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let spectrum = spectral_gap(d, delta)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut r1, mut st, mut ch) = (Vec::new(), Vec::new(), Vec::new());
    let (mut ident, mut ps, mut pc) = (0.0f64, 0.0f64, 0.0f64);

    for _ in 0..trials {
        let x0 = Signal::random_gaussian(d, &mut rng);
        let eta = rng.random_range(0.0..MAX_ETA).max(1e-6);

        // rank-one extraction from a dense perturbation
        let e = x0.entries();
        let outer = DMatrix::from_fn(d, d, |i, j| e[i] * e[j].conj());
        let noise = dense_hermitian(d, &mut rng);
        let noise = &noise * Complex64::new(eta * x0.norm_sqr() / noise.norm(), 0.0);
        let c = rank1_bound(&x0, &(&outer + noise))?;
        r1.push(c.measured / c.bound);

        // top eigenvector of a perturbed phase band
        let truth = x0.phase_signal();
        let x0t = lifted_outer(&truth, delta);
        let pert = band_hermitian(d, delta, &mut rng);
        let pert = pert.scale(eta * x0t.frobenius_norm() / pert.frobenius_norm());
        let noisy = x0t.add(&pert)?;
        let s = sin_theta_bound(&x0t.to_dense(), &noisy.to_dense())?;
        st.push(if s.rhs > 0.0 { s.lhs / s.rhs } else { 0.0 });

        let phases = normalize_phases(&noisy);
        let p = phase_perturbation(&x0, phases.as_banded())?;
        ps = ps.max(p.ratio_sgn);
        pc = pc.max(p.ratio_scaled);

        let cc = cheeger_check(phases.as_banded())?;
        ch.push(cc.ratio);

        let w: Vec<Complex64> = (0..d).map(|_| sgn(gaussian_c(&mut rng))).collect();
        let q = frustration(phases.as_banded(), &w)?;
        let sum = frustration_sum_form(phases.as_banded(), &w)?;
        ident = ident.max((q - sum).abs());
    }

    let rank1 = summary(&r1, 1.0);
    let sin_theta = summary(&st, 1.0 + 1e-9);
    let cheeger = summary(&ch, CHEEGER_CONSTANT);
    let all_hold = rank1.holds && sin_theta.holds && cheeger.holds && ident <= 1e-10;
    Ok(BoundsReport {
        d,
        delta,
        seed,
        spectrum,
        rank1,
        sin_theta,
        cheeger,
        frustration_identity_gap: ident,
        phase_ratio_sgn: ps,
        phase_ratio_scaled: pc,
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_holds() {
        let r = check_bounds(16, 3, 10, 1).unwrap();
        assert!(r.all_hold, "{r:?}");
        assert_eq!(r.rank1.instances, 10);
        assert!(r.frustration_identity_gap < 1e-10);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(check_bounds(16, 3, 0, 1).is_err());
    }
}
