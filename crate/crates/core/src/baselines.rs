//! Gerchberg-Saxton alternating projections for local correlation
//! measurements.
//!
//! The linear frame `v_{l,j} = <S_l x, m_j>` is diagonal in the DFT over
//! shifts: `V_j(f) = G_j(f) xhat(f)` with `G_j(f) = sum_n conj(m_{j,n})
//! e^{2 pi i f n / d}`, so its pseudoinverse is
//! `xhat(f) = sum_j conj(G_j(f)) V_j(f) / sum_j |G_j(f)|^2`.
//!
//! Each iteration is `x <- A^+(sqrt(y) . sgn(A x))`. Since `A A^+` is the
//! orthogonal projection onto the range of `A`, the magnitude residual
//! `|| |A x| - sqrt(y) ||` never increases.

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dft::{root_of_unity, Dft};
use crate::error::{check_dim, Error, Result};
use crate::lifting::MeasurementGrid;
use crate::masks::MaskFamily;
use crate::signal::{sgn, Signal};
use crate::sync::{MagnitudeMethod, RecoveryParams, RecoveryReport, SolverSummary, StageTimes};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative threshold on `sum_j |G_j(f)|^2` below which the frame misses a
/// frequency.
pub const FRAME_TOL: f64 = 1e-10;

/// The linear frame operator of a mask family, in the Fourier domain.
#[derive(Clone, Debug)]
pub struct Frame {
    d: usize,
    dft: Dft,
    /// `g[j][f] = G_j(f)`.
    g: Vec<Vec<Complex64>>,
    /// `sum_j |G_j(f)|^2`.
    gram: Vec<f64>,
}

impl Frame {
    pub fn new(masks: &MaskFamily) -> Result<Self> {
        let d = masks.d();
        let g: Vec<Vec<Complex64>> = masks
            .masks()
            .iter()
            .map(|m| {
                (0..d)
                    .map(|f| {
                        m.iter()
                            .enumerate()
                            .take(masks.delta())
                            .map(|(n, c)| c.conj() * root_of_unity(((f * n) % d) as i64, d))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let gram: Vec<f64> = (0..d).map(|f| g.iter().map(|gj| gj[f].norm_sqr()).sum()).collect();
        let top = gram.iter().copied().fold(0.0, f64::max);
        if let Some(frequency) = gram.iter().position(|&s| s <= FRAME_TOL * top) {
            return Err(Error::FrameRankDeficient { frequency });
        }
        Ok(Self {
            d,
            dft: Dft::new(d),
            g,
            gram,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn masks(&self) -> usize {
        self.g.len()
    }

    /// `v[l * K + j] = <S_l x, m_j>`, the layout of [`MeasurementGrid`].
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (d, k) = (self.d, self.g.len());
        let xh = self.dft.forward(x);
        let mut out = vec![ZERO; d * k];
        let mut buf = vec![ZERO; d];
        for (j, gj) in self.g.iter().enumerate() {
            for f in 0..d {
                buf[f] = gj[f] * xh[f];
            }
            self.dft.inverse_in_place(&mut buf);
            for l in 0..d {
                out[l * k + j] = buf[l];
            }
        }
        out
    }

    /// Least-squares preimage of `v` under [`Frame::apply`].
    pub fn pinv(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (d, k) = (self.d, self.g.len());
        let mut acc = vec![ZERO; d];
        let mut buf = vec![ZERO; d];
        for (j, gj) in self.g.iter().enumerate() {
            for l in 0..d {
                buf[l] = v[l * k + j];
            }
            self.dft.forward_in_place(&mut buf);
            for f in 0..d {
                acc[f] += gj[f].conj() * buf[f];
            }
        }
        for f in 0..d {
            acc[f] /= self.gram[f];
        }
        self.dft.inverse_in_place(&mut acc);
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GsInit {
    RandomGaussian { seed: u64 },
    Warm { signal: Signal },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GsConfig {
    pub max_iter: usize,
    /// Stop once `||x_{t+1} - x_t|| <= tol ||x_t||`; zero disables it.
    pub tol: f64,
    pub init: GsInit,
}

impl Default for GsConfig {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            tol: 1e-10,
            init: GsInit::RandomGaussian { seed: 0 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GsOutcome {
    pub report: RecoveryReport,
    /// `|| |A x_t| - sqrt(y) || / ||sqrt(y)||` before each update and once
    /// after the last.
    pub residuals: Vec<f64>,
    /// Whether the residual trajectory is non-increasing up to rounding.
    pub monotone: bool,
    pub converged: bool,
}

fn magnitude_residual(v: &[Complex64], amp: &[f64]) -> f64 {
    v.iter()
        .zip(amp)
        .map(|(z, a)| (z.norm() - a).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Run alternating projections from the configured start.
pub fn gerchberg_saxton(
    y: &MeasurementGrid,
    masks: &MaskFamily,
    cfg: &GsConfig,
    truth: Option<&Signal>,
) -> Result<GsOutcome> {
    let start = Instant::now();
    let d = masks.d();
    check_dim("grid dimension", d, y.d())?;
    check_dim("mask count", masks.count(), y.masks())?;
    let frame = Frame::new(masks)?;
    let amp: Vec<f64> = y.values().iter().map(|v| v.max(0.0).sqrt()).collect();
    let scale = amp.iter().map(|a| a * a).sum::<f64>().sqrt();
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let mut x = match &cfg.init {
        GsInit::RandomGaussian { seed } => {
            Signal::random_gaussian(d, &mut ChaCha20Rng::seed_from_u64(*seed)).into_entries()
        }
        GsInit::Warm { signal } => {
            check_dim("warm start length", d, signal.len())?;
            signal.entries().to_vec()
        }
    };

    let mut v = frame.apply(&x);
    let mut residuals = vec![magnitude_residual(&v, &amp) / scale];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        for (z, a) in v.iter_mut().zip(&amp) {
            *z = sgn(*z) * *a;
        }
        let next = frame.pinv(&v);
        iterations += 1;
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let size: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x = next;
        v = frame.apply(&x);
        residuals.push(magnitude_residual(&v, &amp) / scale);
        if cfg.tol > 0.0 && change <= cfg.tol * size {
            converged = true;
            break;
        }
    }
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14);

    let mut report = RecoveryReport {
        params: RecoveryParams {
            d,
            delta: masks.delta(),
            masks: masks.count(),
            strategy: None,
            eigen_method: Default::default(),
            magnitudes: MagnitudeMethod::Diagonal,
        },
        seed: match cfg.init {
            GsInit::RandomGaussian { seed } => Some(seed),
            GsInit::Warm { .. } => None,
        },
        error_db: None,
        relative_error: None,
        stage_times_ms: StageTimes::default(),
        eigen: None,
        solver: SolverSummary {
            kappa: None,
            residual: residuals.last().copied(),
        },
        frustration: None,
        spectral_gap: None,
        iterations: Some(iterations),
        estimate: Signal::new(x)?,
    };
    report.stage_times_ms.total = start.elapsed().as_secs_f64() * 1e3;
    if let Some(x0) = truth {
        report.score(x0)?;
    }
    Ok(GsOutcome {
        report,
        residuals,
        monotone,
        converged,
    })
}

/// Default iteration count of [`gs_refine`].
pub const REFINE_ITERS: usize = 100;

/// Polish an estimate with a fixed number of alternating projections.
pub fn gs_refine(x: &Signal, y: &MeasurementGrid, masks: &MaskFamily, iters: usize) -> Result<GsOutcome> {
    let cfg = GsConfig {
        max_iter: iters,
        tol: 0.0,
        init: GsInit::Warm { signal: x.clone() },
    };
    gerchberg_saxton(y, masks, &cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::forward_measure;
    use crate::masks::{build_masks, MaskKind};
    use crate::metrics::relative_error;
    use rand_chacha::ChaCha8Rng;

    fn family(d: usize, delta: usize) -> MaskFamily {
        build_masks(MaskKind::UnitPair, d, delta).unwrap()
    }

    #[test]
    fn frame_matches_direct_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let masks = family(10, 3);
        let x = Signal::random_gaussian(10, &mut rng);
        let v = Frame::new(&masks).unwrap().apply(x.entries());
        for l in 0..10 {
            for j in 0..masks.count() {
                let direct: Complex64 = (0..3).map(|n| x[(n + l) % 10] * masks.mask(j)[n].conj()).sum();
                assert!((v[l * masks.count() + j] - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pinv_inverts_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let masks = family(16, 4);
        let frame = Frame::new(&masks).unwrap();
        let x = Signal::random_gaussian(16, &mut rng);
        let back = frame.pinv(&frame.apply(x.entries()));
        for (u, v) in back.iter().zip(x.entries()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn missing_frequency_is_rank_deficient() {
        // m = (1, -1) has G(0) = 0
        let m = vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), ZERO, ZERO];
        let masks = MaskFamily::custom(vec![m.clone(), m.clone(), m], 2, MaskKind::Custom).unwrap();
        assert!(matches!(Frame::new(&masks), Err(Error::FrameRankDeficient { frequency: 0 })));
    }

    #[test]
    fn residual_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let masks = family(24, 3);
        let x = Signal::random_gaussian(24, &mut rng);
        let y = forward_measure(&x, &masks).unwrap();
        let cfg = GsConfig {
            max_iter: 300,
            tol: 0.0,
            init: GsInit::RandomGaussian { seed: 9 },
        };
        let out = gerchberg_saxton(&y, &masks, &cfg, Some(&x)).unwrap();
        assert!(out.monotone);
        assert_eq!(out.residuals.len(), 301);
        assert_eq!(out.report.iterations, Some(300));
    }

    #[test]
    fn truth_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let masks = family(20, 4);
        let x = Signal::random_gaussian(20, &mut rng);
        let y = forward_measure(&x, &masks).unwrap();
        let out = gs_refine(&x, &y, &masks, 5).unwrap();
        assert!(relative_error(&out.report.estimate, &x).unwrap() < 1e-12);
        assert!(out.residuals.iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn refinement_polishes_a_perturbed_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let masks = family(32, 4);
        let x = Signal::random_gaussian(32, &mut rng);
        let y = forward_measure(&x, &masks).unwrap();
        let noise = Signal::random_gaussian(32, &mut rng).scaled(Complex64::new(1e-3, 0.0));
        let start: Vec<Complex64> = x.entries().iter().zip(noise.entries()).map(|(a, b)| a + b).collect();
        let start = Signal::new(start).unwrap();
        let before = relative_error(&start, &x).unwrap();
        let out = gs_refine(&start, &y, &masks, REFINE_ITERS).unwrap();
        assert!(out.monotone);
        assert!(relative_error(&out.report.estimate, &x).unwrap() < before);
    }

    #[test]
    fn zero_measurements_stay_at_zero() {
        let masks = family(8, 2);
        let y = MeasurementGrid::zeros(8, 2, 3);
        let out = gerchberg_saxton(&y, &masks, &GsConfig::default(), None).unwrap();
        assert!(out.converged);
        assert_eq!(out.report.estimate.norm(), 0.0);
    }
}
