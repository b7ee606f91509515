//! Ptychographic and windowed-Fourier (STFT) measurements, and their exact
//! rewriting as local correlation measurements.
//!
//! Ptychography with illumination `m~` supported on `0..delta`:
//! `y_{l,j} = |FFT(m~ . S_l x)_j|^2`, which is the correlation model with
//! masks `(m_j)_n = conj(m~_n) e^{2 pi i j n / d}`.
//!
//! STFT with window `m`: `y_{l,k} = |sum_n x_n m_{n-l} e^{-2 pi i k n / d}|^2`.
//! When `g = FFT(conj m)` is supported on `0..delta` this equals
//! `|<S_k xhat, mu_l>|^2` with `mu_l[s] = g_s e^{-2 pi i s l / d} / d`, a
//! correlation measurement of `xhat = FFT(x)` with shift `k` and mask `l`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft::{root_of_unity, Dft};
use crate::error::{check_dim, Error, Result};
use crate::lifting::{LiftedSolver, MeasurementGrid, SolverStrategy};
use crate::masks::{MaskFamily, MaskKind};
use crate::signal::Signal;
use crate::sync::{recover, RecoveryConfig, RecoveryReport};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest tolerated out-of-support energy fraction.
pub const SUPPORT_TOL: f64 = 1e-12;

fn support_check(values: &[Complex64], delta: usize) -> Result<()> {
    let total: f64 = values.iter().map(|z| z.norm_sqr()).sum();
    let outside: f64 = values[delta..].iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    let fraction = outside / total;
    if fraction > SUPPORT_TOL {
        return Err(Error::SupportViolation { fraction });
    }
    Ok(())
}

/// A ptychographic illumination `m~` supported on `0..delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Illumination {
    delta: usize,
    values: Signal,
}

impl Illumination {
    /// Entries beyond `delta` are dropped after checking that they carry a
    /// negligible energy fraction.
    pub fn new(values: Signal, delta: usize) -> Result<Self> {
        if delta == 0 || delta > values.len() {
            return Err(Error::InvalidParameter(format!(
                "support width {delta} does not fit length {}",
                values.len()
            )));
        }
        support_check(values.entries(), delta)?;
        let mut e = values.into_entries();
        e[delta..].fill(ZERO);
        Ok(Self {
            delta,
            values: Signal::new(e)?,
        })
    }

    /// `m~_n = e^{-(n+1)/a} / (2 delta - 1)^{1/4}` on `0..delta`.
    pub fn exponential(d: usize, delta: usize, a: f64) -> Result<Self> {
        if delta == 0 || delta > d || !(a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= delta <= d and a > 0 (d = {d}, delta = {delta}, a = {a})"
            )));
        }
        let scale = ((2 * delta - 1) as f64).powf(-0.25);
        let mut e = vec![ZERO; d];
        for (n, v) in e.iter_mut().enumerate().take(delta) {
            *v = Complex64::new((-((n + 1) as f64) / a).exp() * scale, 0.0);
        }
        Self::new(Signal::new(e)?, delta)
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn values(&self) -> &Signal {
        &self.values
    }
}

/// Correlation masks of a ptychography system. With `subsample = Some(k)`
/// and `d = k (2 delta - 1)` only the modes `j = p k` are kept, giving
/// `2 delta - 1` masks; otherwise all `d` modes.
pub fn ptycho_masks(illum: &Illumination, subsample: Option<usize>) -> Result<MaskFamily> {
    let d = illum.d();
    let delta = illum.delta();
    let modes: Vec<usize> = match subsample {
        None => (0..d).collect(),
        Some(k) => {
            let count = 2 * delta - 1;
            if k == 0 || k * count != d {
                return Err(Error::InvalidParameter(format!(
                    "subsampling by {k} needs d = {k} (2 delta - 1), got d = {d}"
                )));
            }
            (0..count).map(|p| p * k).collect()
        }
    };
    let m = illum.values().entries();
    let masks = modes
        .iter()
        .map(|&j| {
            let mut mask = vec![ZERO; d];
            for n in 0..delta {
                mask[n] = m[n].conj() * root_of_unity(((j * n) % d) as i64, d);
            }
            mask
        })
        .collect();
    MaskFamily::custom(masks, delta, MaskKind::Ptycho)
}

/// `y_{l,j} = |FFT(m~ . S_l x)_j|^2` over all shifts and all `d` modes.
pub fn ptycho_measure(x: &Signal, illum: &Illumination) -> Result<MeasurementGrid> {
    let d = illum.d();
    check_dim("signal length", d, x.len())?;
    let dft = Dft::new(d);
    let m = illum.values().entries();
    let xe = x.entries();
    let mut y = Vec::with_capacity(d * d);
    let mut buf = vec![ZERO; d];
    for l in 0..d {
        for n in 0..d {
            buf[n] = m[n] * xe[(n + l) % d];
        }
        dft.forward_in_place(&mut buf);
        y.extend(buf.iter().map(|z| z.norm_sqr()));
    }
    MeasurementGrid::new(d, illum.delta(), d, y)
}

/// Ptychography with non-circular shifts of a short specimen of length `N`:
/// the specimen is zero outside `0..N` and each illuminated window is
/// transformed at length `d >= N + delta - 1`. Row `r < N` holds shift `r`
/// and row `r >= N` holds the negative shift `r - d`.
pub fn ptycho_measure_noncircular(x: &Signal, illum: &[Complex64], d: usize) -> Result<MeasurementGrid> {
    let delta = illum.len();
    if delta == 0 || x.len() + delta - 1 > d {
        return Err(Error::InvalidParameter(format!(
            "transform length {d} is shorter than specimen plus illumination"
        )));
    }
    let dft = Dft::new(d);
    let xe = x.entries();
    let mut y = Vec::with_capacity(d * d);
    let mut buf = vec![ZERO; d];
    let len = x.len() as i64;
    for r in 0..d as i64 {
        let l = if r < len { r } else { r - d as i64 };
        buf.fill(ZERO);
        for (n, m) in illum.iter().enumerate() {
            let i = n as i64 + l;
            if (0..len).contains(&i) {
                buf[n] = m * xe[i as usize];
            }
        }
        dft.forward_in_place(&mut buf);
        y.extend(buf.iter().map(|z| z.norm_sqr()));
    }
    MeasurementGrid::new(d, delta, d, y)
}

/// An STFT window whose conjugate has a spectrum supported on `0..delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    delta: usize,
    values: Signal,
    /// `FFT(conj m)`, truncated to `0..delta`.
    spectrum: Signal,
}

impl Window {
    pub fn new(values: Signal, delta: usize) -> Result<Self> {
        let d = values.len();
        if delta == 0 || delta > d {
            return Err(Error::InvalidParameter(format!(
                "band limit {delta} does not fit length {d}"
            )));
        }
        let conj: Vec<Complex64> = values.entries().iter().map(|z| z.conj()).collect();
        let mut g = Dft::new(d).forward(&conj);
        support_check(&g, delta)?;
        g[delta..].fill(ZERO);
        Ok(Self {
            delta,
            values,
            spectrum: Signal::new(g)?,
        })
    }

    /// The window with `FFT(conj m) = g` for a spectrum `g` of length `d`.
    pub fn from_spectrum(g: Signal, delta: usize) -> Result<Self> {
        let d = g.len();
        let m: Vec<Complex64> = Dft::new(d).inverse(g.entries()).iter().map(|z| z.conj()).collect();
        Self::new(Signal::new(m)?, delta)
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn values(&self) -> &Signal {
        &self.values
    }

    pub fn spectrum(&self) -> &Signal {
        &self.spectrum
    }
}

/// STFT intensities `y[l][k]` for a list of window shifts `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StftGrid {
    pub d: usize,
    pub shifts: Vec<usize>,
    /// Row-major by shift: `y[i * d + k]` belongs to `shifts[i]`.
    pub y: Vec<f64>,
}

impl StftGrid {
    pub fn get(&self, shift_index: usize, k: usize) -> f64 {
        self.y[shift_index * self.d + k]
    }

    /// The same numbers in correlation layout over `xhat`: shift `k`,
    /// mask index `i` (the `i`-th window shift).
    pub fn to_correlation(&self, delta: usize) -> Result<MeasurementGrid> {
        let (d, nl) = (self.d, self.shifts.len());
        let mut y = vec![0.0; d * nl];
        for i in 0..nl {
            for k in 0..d {
                y[k * nl + i] = self.get(i, k);
            }
        }
        MeasurementGrid::new(d, delta, nl, y)
    }

    pub fn from_correlation(grid: &MeasurementGrid, shifts: Vec<usize>) -> Result<Self> {
        let d = grid.d();
        check_dim("window shift count", shifts.len(), grid.masks())?;
        let mut y = vec![0.0; d * shifts.len()];
        for k in 0..d {
            for (i, v) in grid.row(k).iter().enumerate() {
                y[i * d + k] = *v;
            }
        }
        Ok(Self { d, shifts, y })
    }
}

fn check_shifts(shifts: &[usize], d: usize) -> Result<()> {
    if shifts.is_empty() {
        return Err(Error::InvalidParameter("window shift list is empty".into()));
    }
    if let Some(&l) = shifts.iter().find(|&&l| l >= d) {
        return Err(Error::InvalidParameter(format!("window shift {l} is not below d = {d}")));
    }
    Ok(())
}

/// `y_{l,k} = |FFT(x . S_{-l} m)_k|^2`, computed by FFT of the windowed
/// product.
pub fn stft_measure(x: &Signal, window: &Window, shifts: &[usize]) -> Result<StftGrid> {
    let d = window.d();
    check_dim("signal length", d, x.len())?;
    check_shifts(shifts, d)?;
    let dft = Dft::new(d);
    let (xe, m) = (x.entries(), window.values().entries());
    let mut y = Vec::with_capacity(d * shifts.len());
    let mut buf = vec![ZERO; d];
    for &l in shifts {
        for n in 0..d {
            buf[n] = xe[n] * m[(n + d - l) % d];
        }
        dft.forward_in_place(&mut buf);
        y.extend(buf.iter().map(|z| z.norm_sqr()));
    }
    Ok(StftGrid {
        d,
        shifts: shifts.to_vec(),
        y,
    })
}

/// Correlation masks `mu_l[s] = g_s e^{-2 pi i s l / d} / d` acting on `xhat`.
pub fn stft_masks(window: &Window, shifts: &[usize]) -> Result<MaskFamily> {
    let d = window.d();
    check_shifts(shifts, d)?;
    let g = window.spectrum().entries();
    let masks = shifts
        .iter()
        .map(|&l| {
            let mut mask = vec![ZERO; d];
            for s in 0..window.delta() {
                mask[s] = g[s] * root_of_unity(-((s * l) as i64), d) / d as f64;
            }
            mask
        })
        .collect();
    MaskFamily::custom(masks, window.delta(), MaskKind::Custom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StftRecovery {
    /// Pipeline report for the spectrum `xhat`; its error fields compare
    /// against `FFT(x0)` when a truth is given.
    pub spectral: RecoveryReport,
    pub estimate: Signal,
    pub error_db: Option<f64>,
    pub relative_error: Option<f64>,
}

/// Recover `x` from STFT intensities: rewrite them as correlation
/// measurements of `xhat`, run the pipeline, and invert the DFT.
pub fn stft_recover(
    y: &StftGrid,
    window: &Window,
    cfg: &RecoveryConfig,
    truth: Option<&Signal>,
) -> Result<StftRecovery> {
    let d = window.d();
    check_dim("grid dimension", d, y.d)?;
    let masks = stft_masks(window, &y.shifts)?;
    let solver = LiftedSolver::build(&masks, SolverStrategy::BlockCirculantFft)?;
    let grid = y.to_correlation(window.delta())?;
    let dft = Dft::new(d);
    let truth_hat = truth
        .map(|x| Signal::new(dft.forward(x.entries())))
        .transpose()?;
    let spectral = recover(&grid, &solver, cfg, truth_hat.as_ref())?;
    let estimate = Signal::new(dft.inverse(spectral.estimate.entries()))?;
    let (error_db, relative_error) = match truth {
        Some(x0) => (
            Some(crate::metrics::error_db(&estimate, x0)?),
            Some(crate::metrics::relative_error(&estimate, x0)?),
        ),
        None => (None, None),
    };
    Ok(StftRecovery {
        spectral,
        estimate,
        error_db,
        relative_error,
    })
}
