//! Phase synchronization and magnitude estimation: from the lifted band
//! estimate `X` to a signal estimate `x`.
//!
//! 1. `X~ = sgn(X)` entrywise on the band.
//! 2. `u` = top eigenvector of `X~` by shifted inverse iteration starting
//!    from `e_0` with shift `mu = 2 delta - 1`. Every eigenvalue of `X~` is
//!    at most `mu` (Gershgorin), so the iteration always targets the top one.
//! 3. Magnitudes from the diagonal of `X` or from rank-one fits of local
//!    blocks of `|X|`.
//! 4. `x_j = mags_j sgn(u_j)`.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::banded::{band_row_count, BandedHermitian};
use crate::cyclic::ShiftedBandSolver;
use crate::error::{check_dim, Error, Result};
use crate::lifting::{LiftedSolver, MeasurementGrid, SolverStrategy};
use crate::metrics::{error_db, relative_error};
use crate::signal::{sgn, Signal};
use crate::spectral::{frustration, spectral_gap};

/// A band matrix whose in-band entries all have unit modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatrix {
    inner: BandedHermitian,
}

impl PhaseMatrix {
    /// Wrap a band matrix after checking that every in-band entry has unit
    /// modulus to within `1e-12`.
    pub fn from_banded(m: BandedHermitian) -> Result<Self> {
        for dg in m.diagonals() {
            if let Some(z) = dg.iter().find(|z| (z.norm() - 1.0).abs() > 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "phase matrix entry {z} does not have unit modulus"
                )));
            }
        }
        Ok(Self { inner: m })
    }

    pub fn as_banded(&self) -> &BandedHermitian {
        &self.inner
    }

    pub fn into_banded(self) -> BandedHermitian {
        self.inner
    }

    pub fn d(&self) -> usize {
        self.inner.d()
    }

    pub fn delta(&self) -> usize {
        self.inner.delta()
    }
}

/// Entrywise `sgn` on the band; exact zeros map to `1`.
pub fn normalize_phases(x: &BandedHermitian) -> PhaseMatrix {
    PhaseMatrix {
        inner: x.map(sgn),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    #[default]
    ShiftedInversePower,
    /// Fixed shift for `warmup` steps, then the Rayleigh quotient.
    RayleighQuotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    pub method: EigenMethod,
    /// Stop once `||X u - lambda u|| <= tol` for unit `u`.
    pub tol: f64,
    pub max_iter: usize,
    pub warmup: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            method: EigenMethod::ShiftedInversePower,
            tol: 1e-12,
            max_iter: 200,
            warmup: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Unit-norm eigenvector estimate.
    pub vector: Vec<Complex64>,
    /// Rayleigh quotient of `vector`.
    pub value: f64,
    pub iterations: usize,
    /// `||X u - value u||_2` with `||u||_2 = 1`.
    pub residual: f64,
    pub method: EigenMethod,
    pub converged: bool,
    /// The initial shift was singular and had to be nudged.
    pub shift_perturbed: bool,
}

impl EigenResult {
    /// The eigenvector scaled to norm `sqrt(d)`.
    pub fn scaled_phase_vector(&self) -> Vec<Complex64> {
        let s = (self.vector.len() as f64).sqrt();
        self.vector.iter().map(|z| z * s).collect()
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rayleigh(a: &BandedHermitian, u: &[Complex64]) -> (f64, f64) {
    let au = a.matvec(u);
    let lambda: f64 = u.iter().zip(&au).map(|(x, y)| (x.conj() * y).re).sum();
    let r = au
        .iter()
        .zip(u)
        .map(|(y, x)| (y - x * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (lambda, r)
}

/// Top eigenvector of a phase matrix by shifted inverse iteration. Returns
/// the best iterate with `converged = false` when `max_iter` is exhausted.
pub fn top_phase_eigenvector(phases: &PhaseMatrix, cfg: &EigenConfig) -> Result<EigenResult> {
    top_eigenvector(phases.as_banded(), cfg)
}

/// As [`top_phase_eigenvector`] for any Hermitian band matrix whose
/// eigenvalues are bounded by its row count.
pub fn top_eigenvector(a: &BandedHermitian, cfg: &EigenConfig) -> Result<EigenResult> {
    if cfg.max_iter == 0 || !(cfg.tol >= 0.0) {
        return Err(Error::InvalidParameter("need max_iter >= 1 and tol >= 0".into()));
    }
    let d = a.d();
    let mu = band_row_count(d, a.delta()) as f64;
    let nudge = 1e-8 * mu;

    let mut shift = mu;
    let mut perturbed = false;
    let mut solver = match ShiftedBandSolver::new(a, shift) {
        Ok(s) => s,
        Err(Error::Singular) => {
            shift += nudge;
            perturbed = true;
            ShiftedBandSolver::new(a, shift)?
        }
        Err(e) => return Err(e),
    };

    let mut w = vec![Complex64::new(0.0, 0.0); d];
    w[0] = Complex64::new(1.0, 0.0);
    let (mut value, mut residual) = rayleigh(a, &w);
    let mut best = (residual, w.clone(), value);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        let mut next = w.clone();
        solver.solve_in_place(&mut next);
        let n = norm(&next);
        if !(n.is_finite() && n > 0.0) {
            if perturbed {
                break;
            }
            shift += nudge;
            perturbed = true;
            solver = ShiftedBandSolver::new(a, shift)?;
            continue;
        }
        iterations += 1;
        w = next.into_iter().map(|z| z / n).collect();
        (value, residual) = rayleigh(a, &w);
        if residual < best.0 {
            best = (residual, w.clone(), value);
        }
        if residual <= cfg.tol {
            converged = true;
            break;
        }
        if cfg.method == EigenMethod::RayleighQuotient && iterations >= cfg.warmup {
            match ShiftedBandSolver::new(a, value) {
                Ok(s) => solver = s,
                // the quotient is an eigenvalue to working precision
                Err(Error::Singular) => match ShiftedBandSolver::new(a, value + nudge) {
                    Ok(s) => solver = s,
                    Err(_) => break,
                },
                Err(e) => return Err(e),
            }
        }
    }

    let (residual, vector, value) = if converged { (residual, w, value) } else { best };
    Ok(EigenResult {
        vector,
        value,
        iterations,
        residual,
        method: cfg.method,
        converged,
        shift_perturbed: perturbed,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    #[default]
    Mean,
    Median,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MagnitudeMethod {
    /// `sqrt(max(X_jj, 0))`.
    #[default]
    Diagonal,
    /// Rank-one fits of the `gamma x gamma` blocks of `|X|` starting at every
    /// multiple of `shift`.
    Blocks {
        gamma: usize,
        shift: usize,
        combine: Combine,
    },
}

impl MagnitudeMethod {
    /// Blocks of full band width at every index, averaged.
    pub fn blocks(delta: usize) -> Self {
        MagnitudeMethod::Blocks {
            gamma: delta,
            shift: 1,
            combine: Combine::Mean,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeEstimate {
    pub mags: Vec<f64>,
    pub method: MagnitudeMethod,
    /// Indices that received no block estimate and fell back to the diagonal.
    pub fallbacks: usize,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn estimate_magnitudes(x: &BandedHermitian, method: MagnitudeMethod) -> Result<MagnitudeEstimate> {
    let d = x.d();
    let diagonal: Vec<f64> = x.diagonal(0).iter().map(|z| z.re.max(0.0).sqrt()).collect();
    let (gamma, shift, combine) = match method {
        MagnitudeMethod::Diagonal => {
            return Ok(MagnitudeEstimate {
                mags: diagonal,
                method,
                fallbacks: 0,
            })
        }
        MagnitudeMethod::Blocks { gamma, shift, combine } => (gamma, shift, combine),
    };
    if gamma < 1 || gamma > x.delta() || shift < 1 || shift > gamma || !d.is_multiple_of(shift) {
        return Err(Error::InvalidParameter(format!(
            "block magnitudes need 1 <= shift <= gamma <= delta and shift | d \
             (gamma = {gamma}, shift = {shift}, delta = {}, d = {d})",
            x.delta()
        )));
    }

    let mut estimates: Vec<Vec<f64>> = vec![Vec::new(); d];
    let mut block = DMatrix::<f64>::zeros(gamma, gamma);
    for start in (0..d).step_by(shift) {
        for k in 0..gamma {
            for h in 0..gamma {
                block[(k, h)] = x.get((start + k) % d, (start + h) % d).norm();
            }
        }
        let eig = SymmetricEigen::new(block.clone());
        let top = eig.eigenvalues.imax();
        let lambda = eig.eigenvalues[top];
        if !(lambda > 0.0) {
            continue;
        }
        let s = lambda.sqrt();
        for k in 0..gamma {
            estimates[(start + k) % d].push(s * eig.eigenvectors[(k, top)].abs());
        }
    }

    let mut fallbacks = 0;
    let mags = estimates
        .iter_mut()
        .zip(&diagonal)
        .map(|(e, &fallback)| {
            if e.is_empty() {
                fallbacks += 1;
                fallback
            } else {
                match combine {
                    Combine::Mean => e.iter().sum::<f64>() / e.len() as f64,
                    Combine::Median => median(e),
                }
            }
        })
        .collect();
    Ok(MagnitudeEstimate {
        mags,
        method,
        fallbacks,
    })
}

/// `x_j = mags_j sgn(u_j)`.
pub fn assemble(mags: &MagnitudeEstimate, phases: &EigenResult) -> Result<Signal> {
    check_dim("eigenvector", mags.mags.len(), phases.vector.len())?;
    Signal::new(
        mags.mags
            .iter()
            .zip(&phases.vector)
            .map(|(&m, &u)| sgn(u) * m)
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub eigen: EigenConfig,
    pub magnitudes: MagnitudeMethod,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub invert: f64,
    pub normalize: f64,
    pub eigen: f64,
    pub magnitudes: f64,
    pub assemble: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryParams {
    pub d: usize,
    pub delta: usize,
    pub masks: usize,
    pub strategy: Option<SolverStrategy>,
    pub eigen_method: EigenMethod,
    pub magnitudes: MagnitudeMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub iters: usize,
    pub residual: f64,
    pub value: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub kappa: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub params: RecoveryParams,
    pub seed: Option<u64>,
    pub error_db: Option<f64>,
    pub relative_error: Option<f64>,
    pub stage_times_ms: StageTimes,
    pub eigen: Option<EigenSummary>,
    pub solver: SolverSummary,
    /// Frustration of the synchronized phases with respect to `X~`.
    pub frustration: Option<f64>,
    /// Spectral gap of the all-ones band.
    pub spectral_gap: Option<f64>,
    /// Iteration count for iterative baselines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub estimate: Signal,
}

impl RecoveryReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }

    /// Fill in the error fields against a ground truth.
    pub fn score(&mut self, truth: &Signal) -> Result<()> {
        self.error_db = Some(error_db(&self.estimate, truth)?);
        self.relative_error = Some(relative_error(&self.estimate, truth)?);
        Ok(())
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Full pipeline: lifted inversion, phase normalization, eigenvector
/// synchronization, magnitude estimation and assembly. Errors carry the name
/// of the failing stage.
pub fn recover(
    y: &MeasurementGrid,
    solver: &LiftedSolver,
    cfg: &RecoveryConfig,
    truth: Option<&Signal>,
) -> Result<RecoveryReport> {
    let start = Instant::now();

    let t = Instant::now();
    let inv = solver.invert(y).map_err(Error::in_stage("invert"))?;
    let t_invert = ms(t);

    let mut report = recover_from_lifted(&inv.matrix, cfg, truth)?;
    report.params.masks = y.masks();
    report.params.strategy = Some(solver.strategy());
    report.seed = y.noise().map(|n| n.seed);
    report.solver = SolverSummary {
        kappa: Some(solver.kappa()),
        residual: Some(inv.residual),
    };
    report.stage_times_ms.invert = t_invert;
    report.stage_times_ms.total = ms(start);
    Ok(report)
}

/// Everything after the lifted inversion, starting from a band estimate.
pub fn recover_from_lifted(
    x: &BandedHermitian,
    cfg: &RecoveryConfig,
    truth: Option<&Signal>,
) -> Result<RecoveryReport> {
    let start = Instant::now();
    let mut times = StageTimes::default();

    let t = Instant::now();
    let phases = normalize_phases(x);
    times.normalize = ms(t);

    let t = Instant::now();
    let eig = top_phase_eigenvector(&phases, &cfg.eigen).map_err(Error::in_stage("eigen"))?;
    times.eigen = ms(t);

    let t = Instant::now();
    let mags = estimate_magnitudes(x, cfg.magnitudes).map_err(Error::in_stage("magnitudes"))?;
    times.magnitudes = ms(t);

    let t = Instant::now();
    let estimate = assemble(&mags, &eig).map_err(Error::in_stage("assemble"))?;
    times.assemble = ms(t);

    let synced: Vec<Complex64> = eig.vector.iter().copied().map(sgn).collect();
    let frustration = frustration(phases.as_banded(), &synced).ok();
    let gap = spectral_gap(x.d(), x.delta()).ok().map(|r| r.gap);
    times.total = ms(start);

    let mut report = RecoveryReport {
        params: RecoveryParams {
            d: x.d(),
            delta: x.delta(),
            masks: 2 * x.delta() - 1,
            strategy: None,
            eigen_method: cfg.eigen.method,
            magnitudes: cfg.magnitudes,
        },
        seed: None,
        error_db: None,
        relative_error: None,
        stage_times_ms: times,
        eigen: Some(EigenSummary {
            iters: eig.iterations,
            residual: eig.residual,
            value: eig.value,
            converged: eig.converged,
        }),
        solver: SolverSummary {
            kappa: None,
            residual: None,
        },
        frustration,
        spectral_gap: gap,
        iterations: None,
        estimate,
    };
    if let Some(x0) = truth {
        report.score(x0).map_err(Error::in_stage("score"))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::{lifted_outer, ones_band};
    use crate::lifting::forward_measure;
    use crate::masks::{build_masks, MaskKind};
    use crate::metrics::phase_aligned_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn positive_matrix_normalizes_to_ones_band() {
        let x = ones_band(10, 3).scale(2.5);
        assert_eq!(normalize_phases(&x).into_banded(), ones_band(10, 3));
    }

    #[test]
    fn zero_entry_maps_to_one() {
        let mut x = ones_band(8, 2);
        x.set(2, 3, c(0.0, 0.0));
        x.set(4, 5, c(0.0, -3.0));
        let p = normalize_phases(&x);
        assert_eq!(p.as_banded().get(2, 3), c(1.0, 0.0));
        assert_eq!(p.as_banded().get(5, 4), c(0.0, 1.0));
        assert!(PhaseMatrix::from_banded(p.into_banded()).is_ok());
        assert!(PhaseMatrix::from_banded(ones_band(8, 2).scale(2.0)).is_err());
    }

    #[test]
    fn rank_one_phases_cancel_magnitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x0 = Signal::random_gaussian(12, &mut rng);
        let p = normalize_phases(&lifted_outer(&x0, 3));
        let expect = lifted_outer(&x0.phase_signal(), 3);
        assert!(p.as_banded().sub(&expect).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn noiseless_eigenvector_is_the_phase_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x0 = Signal::random_gaussian(64, &mut rng);
        let p = normalize_phases(&lifted_outer(&x0, 4));
        let eig = top_phase_eigenvector(&p, &EigenConfig::default()).unwrap();
        assert!(eig.converged);
        assert!((eig.value - 7.0).abs() < 1e-10);
        let u = Signal::new(eig.vector.iter().copied().map(sgn).collect()).unwrap();
        let (dist, _) = phase_aligned_distance(&x0.phase_signal(), &u).unwrap();
        assert!(dist < 1e-8);
    }

    #[test]
    fn ones_band_has_flat_eigenvector() {
        for d in [5, 16, 64] {
            let u = ones_band(d, 3);
            let eig = top_eigenvector(&u, &EigenConfig::default()).unwrap();
            let expect = 1.0 / (d as f64).sqrt();
            let phase = eig.vector[0] / eig.vector[0].norm();
            for z in &eig.vector {
                assert!((z / phase - c(expect, 0.0)).norm() < 1e-10);
            }
            assert!((eig.value - 5.0).abs() < 1e-10);
        }
    }

    fn noisy_phases(d: usize, delta: usize, spread: f64, seed: u64) -> PhaseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = Signal::random_gaussian(d, &mut rng);
        let mut x = lifted_outer(&x0.phase_signal(), delta);
        for i in 0..d {
            for k in 1..delta {
                let j = (i + k) % d;
                let v = x.get(i, j) * Complex64::from_polar(1.0, rng.random_range(-spread..spread));
                x.set(i, j, v);
            }
        }
        PhaseMatrix::from_banded(x).unwrap()
    }

    #[test]
    fn both_methods_find_the_dense_top_eigenvector() {
        let p = noisy_phases(40, 3, 0.4, 3);
        let (vals, vecs) = crate::spectral::sorted_eigen(&p.as_banded().to_dense());
        for method in [EigenMethod::ShiftedInversePower, EigenMethod::RayleighQuotient] {
            let cfg = EigenConfig {
                method,
                max_iter: 2000,
                ..EigenConfig::default()
            };
            let eig = top_phase_eigenvector(&p, &cfg).unwrap();
            assert!(eig.converged && eig.residual <= cfg.tol, "{method:?}");
            assert!((eig.value - vals[0]).abs() < 1e-9, "{method:?}");
            let overlap: Complex64 = vecs.column(0).iter().zip(&eig.vector).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let p = noisy_phases(64, 3, 0.6, 4);
        let cfg = EigenConfig {
            max_iter: 1,
            ..EigenConfig::default()
        };
        let eig = top_phase_eigenvector(&p, &cfg).unwrap();
        assert!(!eig.converged && eig.iterations == 1);
    }

    #[test]
    fn diagonal_magnitudes_are_exact_and_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x0 = Signal::random_gaussian(10, &mut rng);
        let mut x = lifted_outer(&x0, 3);
        let m = estimate_magnitudes(&x, MagnitudeMethod::Diagonal).unwrap();
        for (a, b) in m.mags.iter().zip(x0.magnitudes()) {
            assert!((a - b).abs() < 1e-14);
        }
        x.set(4, 4, c(-1.0, 0.0));
        assert_eq!(estimate_magnitudes(&x, MagnitudeMethod::Diagonal).unwrap().mags[4], 0.0);
    }

    #[test]
    fn block_magnitudes_exact_on_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x0 = Signal::random_gaussian(24, &mut rng);
        let x = lifted_outer(&x0, 4);
        for method in [
            MagnitudeMethod::blocks(4),
            MagnitudeMethod::Blocks {
                gamma: 3,
                shift: 2,
                combine: Combine::Median,
            },
        ] {
            let m = estimate_magnitudes(&x, method).unwrap();
            assert_eq!(m.fallbacks, 0);
            for (a, b) in m.mags.iter().zip(x0.magnitudes()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn block_parameters_are_validated() {
        let x = ones_band(12, 3);
        for (gamma, shift) in [(4, 1), (2, 3), (3, 5), (0, 1)] {
            let m = MagnitudeMethod::Blocks {
                gamma,
                shift,
                combine: Combine::Mean,
            };
            assert!(estimate_magnitudes(&x, m).is_err(), "gamma={gamma} shift={shift}");
        }
    }

    #[test]
    fn negative_blocks_fall_back_to_diagonal() {
        let x = ones_band(6, 2).scale(0.0);
        let m = estimate_magnitudes(&x, MagnitudeMethod::blocks(2)).unwrap();
        assert_eq!(m.fallbacks, 6);
        assert!(m.mags.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn assemble_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x0 = Signal::random_gaussian(6, &mut rng);
        let mags = MagnitudeEstimate {
            mags: x0.magnitudes(),
            method: MagnitudeMethod::Diagonal,
            fallbacks: 0,
        };
        let g = Complex64::from_polar(1.0, 0.7);
        let eig = EigenResult {
            vector: x0.phases().iter().map(|z| z * g * 0.3).collect(),
            value: 0.0,
            iterations: 0,
            residual: 0.0,
            method: EigenMethod::ShiftedInversePower,
            converged: true,
            shift_perturbed: false,
        };
        let x = assemble(&mags, &eig).unwrap();
        for (a, b) in x.entries().iter().zip(x0.entries()) {
            assert!((a - b * g).norm() < 1e-14);
        }
        let mut zero = mags.clone();
        zero.mags[2] = 0.0;
        assert_eq!(assemble(&zero, &eig).unwrap()[2], c(0.0, 0.0));
    }

    #[test]
    fn end_to_end_noiseless_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x0 = Signal::random_gaussian(64, &mut rng);
        let masks = build_masks(MaskKind::UnitPair, 64, 4).unwrap();
        let solver = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed).unwrap();
        let y = forward_measure(&x0, &masks).unwrap();
        let cfg = RecoveryConfig::default();
        let r = recover(&y, &solver, &cfg, Some(&x0)).unwrap();
        assert!(r.relative_error.unwrap() <= 1e-8);
        let scaled = recover(&y.scaled(4.0), &solver, &cfg, None).unwrap();
        for (a, b) in scaled.estimate.entries().iter().zip(r.estimate.entries()) {
            assert!((a - b * 2.0).norm() < 1e-10);
        }
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["params", "error_db", "stage_times_ms", "eigen", "solver"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn global_phase_is_killed_by_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x0 = Signal::random_gaussian(16, &mut rng);
        let masks = build_masks(MaskKind::exponential(3), 16, 3).unwrap();
        let a = forward_measure(&x0, &masks).unwrap();
        let b = forward_measure(&x0.scaled(Complex64::from_polar(1.0, 1.234)), &masks).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            assert!((u - v).abs() < 1e-12 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn stage_errors_are_labelled() {
        let masks = build_masks(MaskKind::UnitPair, 8, 2).unwrap();
        let solver = LiftedSolver::build(&masks, SolverStrategy::BlockCirculantFft).unwrap();
        let cfg = RecoveryConfig {
            magnitudes: MagnitudeMethod::Blocks {
                gamma: 5,
                shift: 1,
                combine: Combine::Mean,
            },
            ..RecoveryConfig::default()
        };
        let y = MeasurementGrid::zeros(8, 2, 3);
        let err = recover(&y, &solver, &cfg, None).unwrap_err();
        assert!(err.to_string().starts_with("magnitudes stage failed"), "{err}");
    }
}
