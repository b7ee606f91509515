//! The lifted measurement operator `A(X)_{l,j} = <X, S_l^* m_j m_j^* S_l>` on
//! the band `T_delta`, and two inverses for it.
//!
//! # Real parametrization
//!
//! A band matrix is described by `2 delta - 1` real channels per row index `i`:
//!
//! | channel `c`              | value                    |
//! |--------------------------|--------------------------|
//! | `0`                      | `X[i, i]`                |
//! | `k` for `1 <= k < delta` | `Re X[i, i + k]`         |
//! | `delta - 1 + k`          | `Im X[i, i + k]`         |
//!
//! With `w = conj(m_n) m_{n+k}` the measurement becomes a circular correlation
//! `y_{l,j} = sum_c sum_n z_c[n + l] h_{j,c}[n]` whose kernels are
//! `|m_n|^2`, `2 Re w` and `-2 Im w`. A DFT over `l` turns this into one
//! `K x (2 delta - 1)` complex system per frequency `f`:
//! `Y_j(f) = sum_c G_{j,c}(f) Z_c(f)` with `G(f) = sum_n h[n] e^{2 pi i f n / d}`.
//!
//! Both solvers need `d >= 2 delta - 1` so that no two channels alias.

use std::io::{Read, Write};
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::banded::BandedHermitian;
use crate::dft::Dft;
use crate::error::{check_dim, Error, Result};
use crate::masks::{build_masks, MaskFamily, MaskKind};
use crate::signal::Signal;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative singular-value threshold below which a frequency block counts
/// as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseInfo {
    pub sigma2: f64,
    pub snr_db: f64,
    pub seed: u64,
    /// `10 log10(sum y_clean^2 / sum noise^2)` of the actual draw.
    pub realized_snr_db: f64,
}

/// Real measurements `y[l][j]` over all shifts `l in 0..d` and masks
/// `j in 0..K`, stored row-major by shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementGrid {
    d: usize,
    delta: usize,
    k: usize,
    y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseInfo>,
}

impl MeasurementGrid {
    pub fn new(d: usize, delta: usize, k: usize, y: Vec<f64>) -> Result<Self> {
        if d == 0 || k == 0 || delta == 0 || delta > d {
            return Err(Error::InvalidParameter(format!(
                "invalid grid shape d = {d}, delta = {delta}, K = {k}"
            )));
        }
        check_dim("measurement count", d * k, y.len())?;
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "measurement ({}, {}) is not finite",
                i / k,
                i % k
            )));
        }
        Ok(Self {
            d,
            delta,
            k,
            y,
            noise: None,
        })
    }

    pub fn zeros(d: usize, delta: usize, k: usize) -> Self {
        Self::new(d, delta, k, vec![0.0; d * k]).expect("valid shape")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Number of masks `K`.
    pub fn masks(&self) -> usize {
        self.k
    }

    /// Total number of measurements `D = d K`.
    pub fn total(&self) -> usize {
        self.y.len()
    }

    pub fn get(&self, shift: usize, mask: usize) -> f64 {
        self.y[shift * self.k + mask]
    }

    pub fn row(&self, shift: usize) -> &[f64] {
        &self.y[shift * self.k..(shift + 1) * self.k]
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn noise(&self) -> Option<&NoiseInfo> {
        self.noise.as_ref()
    }

    pub fn with_noise_info(mut self, info: NoiseInfo) -> Self {
        self.noise = Some(info);
        self
    }

    /// A grid with the same shape and metadata but different values.
    pub fn with_values(&self, y: Vec<f64>) -> Result<Self> {
        let mut g = Self::new(self.d, self.delta, self.k, y)?;
        g.noise = self.noise;
        Ok(g)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            y: self.y.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn norm(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn check_masks(&self, masks: &MaskFamily) -> Result<()> {
        check_dim("grid dimension", masks.d(), self.d)?;
        check_dim("grid mask count", masks.count(), self.k)?;
        check_dim("grid band width", masks.delta(), self.delta)
    }

    /// CSV with header `shift,mask,y`. Noise metadata is not written.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for shift in 0..self.d {
            for mask in 0..self.k {
                wr.serialize(GridRow {
                    shift,
                    mask,
                    y: self.get(shift, mask),
                })?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Read the CSV layout written by [`write_csv`](Self::write_csv). `d` and
    /// `K` are inferred from the largest indices and `delta = (K + 1) / 2`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut rows: Vec<GridRow> = Vec::new();
        for row in rd.deserialize() {
            rows.push(row?);
        }
        let d = rows.iter().map(|r| r.shift + 1).max().unwrap_or(0);
        let k = rows.iter().map(|r| r.mask + 1).max().unwrap_or(0);
        if d == 0 || k % 2 == 0 || rows.len() != d * k {
            return Err(Error::Parse(format!(
                "grid CSV must hold a full d x K grid with odd K ({} rows, d = {d}, K = {k})",
                rows.len()
            )));
        }
        let mut y = vec![f64::NAN; d * k];
        for r in &rows {
            y[r.shift * k + r.mask] = r.y;
        }
        if y.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("grid CSV has duplicated (shift, mask) rows".into()));
        }
        Self::new(d, k.div_ceil(2), k, y)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite floats always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: MeasurementGrid = serde_json::from_str(s)?;
        let noise = g.noise;
        let mut checked = Self::new(g.d, g.delta, g.k, g.y)?;
        checked.noise = noise;
        Ok(checked)
    }
}

#[derive(Serialize, Deserialize)]
struct GridRow {
    shift: usize,
    mask: usize,
    y: f64,
}

/// `y_{l,j} = |sum_{n < delta} x_{n + l} conj(m_{j,n})|^2`, computed directly
/// in `O(d K delta)`.
pub fn forward_measure(x: &Signal, masks: &MaskFamily) -> Result<MeasurementGrid> {
    let d = masks.d();
    check_dim("signal length", d, x.len())?;
    let (delta, k) = (masks.delta(), masks.count());
    let xe = x.entries();
    let mut y = Vec::with_capacity(d * k);
    for l in 0..d {
        for j in 0..k {
            let s: Complex64 = masks
                .support(j)
                .iter()
                .enumerate()
                .map(|(n, m)| xe[(n + l) % d] * m.conj())
                .sum();
            y.push(s.norm_sqr());
        }
    }
    MeasurementGrid::new(d, delta, k, y)
}

/// `A(X)_{l,j} = sum_{n, n' < delta} X[n + l, n' + l] conj(m_{j,n}) m_{j,n'}`.
pub fn forward_apply_lifted(x: &BandedHermitian, masks: &MaskFamily) -> Result<MeasurementGrid> {
    let d = masks.d();
    check_dim("matrix dimension", d, x.d())?;
    let (delta, k) = (masks.delta(), masks.count());
    if x.delta() < delta {
        return Err(Error::InvalidParameter(format!(
            "matrix band {} is narrower than the mask support {delta}",
            x.delta()
        )));
    }
    let mut y = Vec::with_capacity(d * k);
    for l in 0..d {
        for j in 0..k {
            let m = masks.support(j);
            let mut s = 0.0;
            for (n, mn) in m.iter().enumerate() {
                let a = (n + l) % d;
                s += x.get(a, a).re * mn.norm_sqr();
                for (np, mnp) in m.iter().enumerate().skip(n + 1) {
                    let w = mn.conj() * mnp;
                    s += 2.0 * (x.get(a, (np + l) % d) * w).re;
                }
            }
            y.push(s);
        }
    }
    MeasurementGrid::new(d, delta, k, y)
}

/// Largest absolute difference between [`forward_measure`] and
/// [`forward_apply_lifted`] applied to `T_delta(x x^*)`.
pub fn lifted_discrepancy(x: &Signal, masks: &MaskFamily) -> Result<f64> {
    let direct = forward_measure(x, masks)?;
    let lifted = forward_apply_lifted(&crate::banded::lifted_outer(x, masks.delta()), masks)?;
    Ok(direct
        .values()
        .iter()
        .zip(lifted.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStrategy {
    BlockCirculantFft,
    UnitPairClosed,
}

/// Coordinates in which the lifted operator's singular values are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    /// Orthonormal for the Frobenius inner product on Hermitian band
    /// matrices: off-diagonal channels carry a factor `sqrt(2)`.
    Isometric,
    /// The raw channel vector `z` (diagonal, real parts, imaginary parts).
    Coefficients,
    /// The operator extended complex-linearly to all (not necessarily
    /// Hermitian) band matrices, in the elementary basis `E_ij`.
    Elementary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conditioning {
    pub parametrization: Parametrization,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub kappa: f64,
    /// Frequency at which `sigma_min` is attained.
    pub worst_frequency: usize,
}

/// Channel count `2 delta - 1`.
#[inline]
fn channels(delta: usize) -> usize {
    2 * delta - 1
}

fn check_shape(masks: &MaskFamily) -> Result<()> {
    let (d, delta) = (masks.d(), masks.delta());
    if d < channels(delta) {
        return Err(Error::InvalidParameter(format!(
            "lifted solvers need d >= 2 delta - 1 (d = {d}, delta = {delta})"
        )));
    }
    if masks.count() < channels(delta) {
        return Err(Error::InvalidParameter(format!(
            "{} masks cannot determine {} real channels",
            masks.count(),
            channels(delta)
        )));
    }
    Ok(())
}

/// Real correlation kernels `h[j][c][n]` for `n < delta`.
fn kernels(masks: &MaskFamily) -> Vec<Vec<Vec<f64>>> {
    let delta = masks.delta();
    let nc = channels(delta);
    (0..masks.count())
        .map(|j| {
            let m = masks.support(j);
            let mut h = vec![vec![0.0; delta]; nc];
            for n in 0..delta {
                h[0][n] = m[n].norm_sqr();
            }
            for k in 1..delta {
                for n in 0..delta - k {
                    let w = m[n].conj() * m[n + k];
                    h[k][n] = 2.0 * w.re;
                    h[delta - 1 + k][n] = -2.0 * w.im;
                }
            }
            h
        })
        .collect()
}

/// Frequency blocks `M_f` for `f = 0..=d/2`, each `K x (2 delta - 1)`.
fn frequency_blocks(masks: &MaskFamily, dft: &Dft) -> Vec<DMatrix<Complex64>> {
    let d = masks.d();
    let nc = channels(masks.delta());
    let nk = masks.count();
    let half = d / 2 + 1;
    let mut blocks = vec![DMatrix::from_element(nk, nc, ZERO); half];
    let mut buf = vec![ZERO; d];
    for (j, hj) in kernels(masks).iter().enumerate() {
        for (c, h) in hj.iter().enumerate() {
            buf.fill(ZERO);
            for (n, &v) in h.iter().enumerate() {
                buf[n] = Complex64::new(v, 0.0);
            }
            // G(f) = sum_n h[n] e^{+2 pi i f n / d} = d * inverse DFT
            dft.inverse_in_place(&mut buf);
            for (f, block) in blocks.iter_mut().enumerate() {
                block[(j, c)] = buf[f] * d as f64;
            }
        }
    }
    blocks
}

fn scale_isometric(block: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut b = block.clone();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for c in 1..b.ncols() {
        for v in b.column_mut(c).iter_mut() {
            *v *= s;
        }
    }
    b
}

/// Blocks of the complex-linear extension: column `k` holds offset `k`,
/// column `delta - 1 + k` offset `-k`, with kernel `conj(m_n) m_{n + offset}`.
fn elementary_blocks(masks: &MaskFamily, dft: &Dft) -> Vec<DMatrix<Complex64>> {
    let d = masks.d();
    let delta = masks.delta();
    let nc = channels(delta);
    // complex kernels: no conjugate symmetry, so every frequency is needed
    let mut blocks = vec![DMatrix::from_element(masks.count(), nc, ZERO); d];
    let mut buf = vec![ZERO; d];
    for j in 0..masks.count() {
        let m = masks.support(j);
        for c in 0..nc {
            buf.fill(ZERO);
            for n in 0..delta {
                let partner = match c {
                    0 => Some(n),
                    c if c < delta => (n + c < delta).then_some(n + c),
                    c => n.checked_sub(c + 1 - delta),
                };
                if let Some(p) = partner {
                    buf[n] = m[n].conj() * m[p];
                }
            }
            dft.inverse_in_place(&mut buf);
            for (f, block) in blocks.iter_mut().enumerate() {
                block[(j, c)] = buf[f] * d as f64;
            }
        }
    }
    blocks
}

/// Singular values of `b`, largest first, read off the Hermitian dilation
/// `[[0, b], [b^*, 0]]` whose eigenvalues are `+-sigma_i`. nalgebra's complex
/// SVD can return wrong factors when singular values repeat (the zero
/// frequency of some exponential families does); its symmetric eigensolver
/// does not, and the dilation keeps absolute accuracy `eps sigma_max`.
fn singular_values(b: &DMatrix<Complex64>) -> Vec<f64> {
    let (m, n) = b.shape();
    let mut h = DMatrix::from_element(m + n, m + n, ZERO);
    h.view_mut((0, m), (m, n)).copy_from(b);
    h.view_mut((m, 0), (n, m)).copy_from(&b.adjoint());
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.truncate(m.min(n));
    let mut sv: Vec<f64> = ev.into_iter().map(|v| v.max(0.0)).collect();
    // a wide block cannot have full column rank
    sv.resize(n, 0.0);
    sv
}

/// `(b^* b)^{-1} b^*` by Householder QR; `b` must have full column rank.
fn left_inverse(b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = b.clone().qr();
    qr.r()
        .solve_upper_triangular(&qr.q().adjoint())
        .expect("full column rank is checked before factorizing")
}

fn conditioning_of(blocks: &[DMatrix<Complex64>], p: Parametrization) -> Result<Conditioning> {
    let mut sigma_min = f64::INFINITY;
    let mut sigma_max = 0.0f64;
    let mut worst = 0;
    for (f, block) in blocks.iter().enumerate() {
        let b = match p {
            Parametrization::Isometric => scale_isometric(block),
            Parametrization::Coefficients | Parametrization::Elementary => block.clone(),
        };
        let sv = singular_values(&b);
        let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sv.iter().copied().fold(0.0, f64::max);
        if lo < sigma_min {
            sigma_min = lo;
            worst = f;
        }
        sigma_max = sigma_max.max(hi);
    }
    if !(sigma_min > RANK_TOL * sigma_max) {
        return Err(Error::RankDeficient {
            frequency: worst,
            sigma_min,
        });
    }
    Ok(Conditioning {
        parametrization: p,
        sigma_min,
        sigma_max,
        kappa: sigma_max / sigma_min,
        worst_frequency: worst,
    })
}

/// Singular-value extremes of the lifted operator restricted to the band.
pub fn lifted_conditioning(masks: &MaskFamily, p: Parametrization) -> Result<Conditioning> {
    check_shape(masks)?;
    let dft = Dft::new(masks.d());
    let blocks = match p {
        Parametrization::Elementary => elementary_blocks(masks, &dft),
        _ => frequency_blocks(masks, &dft),
    };
    conditioning_of(&blocks, p)
}

#[derive(Clone, Debug)]
enum Factorization {
    Fft {
        /// Pseudoinverses of `M_f` for `f = 0..=d/2`.
        pinv: Vec<DMatrix<Complex64>>,
        blocks: Vec<DMatrix<Complex64>>,
    },
    Closed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverReport {
    pub strategy: SolverStrategy,
    pub d: usize,
    pub delta: usize,
    pub masks: usize,
    pub kappa: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub parametrization: Parametrization,
    pub build_time_ms: f64,
}

/// A factorized inverse of the lifted operator. Immutable once built.
#[derive(Clone, Debug)]
pub struct LiftedSolver {
    masks: MaskFamily,
    strategy: SolverStrategy,
    dft: Dft,
    factorization: Factorization,
    conditioning: Conditioning,
    build_time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct Inversion {
    pub matrix: BandedHermitian,
    /// Least-squares residual `||A(X) - y||_2`.
    pub residual: f64,
}

impl LiftedSolver {
    /// Factorize the lifted operator for `masks`. Fails with
    /// [`Error::RankDeficient`] naming the worst frequency when the masks do
    /// not determine the band.
    ///
    /// `BlockCirculantFft` reports conditioning in the isometric
    /// parametrization; `UnitPairClosed` reports it for the coefficient
    /// vector, which is the matrix its closed inverse acts on.
    pub fn build(masks: &MaskFamily, strategy: SolverStrategy) -> Result<Self> {
        let start = Instant::now();
        check_shape(masks)?;
        let d = masks.d();
        let dft = Dft::new(d);
        let blocks = frequency_blocks(masks, &dft);
        let (factorization, conditioning) = match strategy {
            SolverStrategy::BlockCirculantFft => {
                let cond = conditioning_of(&blocks, Parametrization::Isometric)?;
                let pinv = blocks.iter().map(left_inverse).collect();
                (Factorization::Fft { pinv, blocks }, cond)
            }
            SolverStrategy::UnitPairClosed => {
                let reference = build_masks(MaskKind::UnitPair, d, masks.delta())?;
                if masks.kind() != MaskKind::UnitPair || reference.masks() != masks.masks() {
                    return Err(Error::InvalidParameter(
                        "the closed-form solver only accepts the UnitPair mask family".into(),
                    ));
                }
                let cond = conditioning_of(&blocks, Parametrization::Coefficients)?;
                (Factorization::Closed, cond)
            }
        };
        Ok(Self {
            masks: masks.clone(),
            strategy,
            dft,
            factorization,
            conditioning,
            build_time_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    pub fn masks(&self) -> &MaskFamily {
        &self.masks
    }

    pub fn strategy(&self) -> SolverStrategy {
        self.strategy
    }

    pub fn conditioning(&self) -> Conditioning {
        self.conditioning
    }

    pub fn kappa(&self) -> f64 {
        self.conditioning.kappa
    }

    pub fn sigma_min(&self) -> f64 {
        self.conditioning.sigma_min
    }

    pub fn report(&self) -> SolverReport {
        SolverReport {
            strategy: self.strategy,
            d: self.masks.d(),
            delta: self.masks.delta(),
            masks: self.masks.count(),
            kappa: self.conditioning.kappa,
            sigma_min: self.conditioning.sigma_min,
            sigma_max: self.conditioning.sigma_max,
            parametrization: self.conditioning.parametrization,
            build_time_ms: self.build_time_ms,
        }
    }

    /// Least-squares estimate of the band matrix behind `y`. The result is
    /// Hermitian by construction.
    pub fn invert(&self, y: &MeasurementGrid) -> Result<Inversion> {
        y.check_masks(&self.masks)?;
        match &self.factorization {
            Factorization::Fft { pinv, blocks } => Ok(self.invert_fft(y, pinv, blocks)),
            Factorization::Closed => self.invert_closed(y),
        }
    }

    fn invert_fft(
        &self,
        y: &MeasurementGrid,
        pinv: &[DMatrix<Complex64>],
        blocks: &[DMatrix<Complex64>],
    ) -> Inversion {
        let d = self.masks.d();
        let delta = self.masks.delta();
        let nk = self.masks.count();
        let nc = channels(delta);
        let half = d / 2 + 1;

        // yhat[j][f]
        let mut yhat: Vec<Vec<Complex64>> = (0..nk)
            .map(|j| (0..d).map(|l| Complex64::new(y.get(l, j), 0.0)).collect())
            .collect();
        for row in &mut yhat {
            self.dft.forward_in_place(row);
        }

        let mut zhat = vec![vec![ZERO; d]; nc];
        let mut resid_sq = 0.0;
        let mut rhs = nalgebra::DVector::from_element(nk, ZERO);
        for f in 0..half {
            for j in 0..nk {
                rhs[j] = yhat[j][f];
            }
            let z = &pinv[f] * &rhs;
            let r = &blocks[f] * &z - &rhs;
            // bins f and d - f are conjugate pairs
            let weight = if f == 0 || 2 * f == d { 1.0 } else { 2.0 };
            resid_sq += weight * r.norm_squared();
            for c in 0..nc {
                zhat[c][f] = z[c];
                if f != 0 && 2 * f != d {
                    zhat[c][d - f] = z[c].conj();
                }
            }
        }

        let mut diag = Vec::new();
        let mut re = Vec::with_capacity(delta - 1);
        let mut im = Vec::with_capacity(delta - 1);
        for (c, mut zc) in zhat.into_iter().enumerate() {
            self.dft.inverse_in_place(&mut zc);
            let real: Vec<f64> = zc.iter().map(|v| v.re).collect();
            if c == 0 {
                diag = real;
            } else if c < delta {
                re.push(real);
            } else {
                im.push(real);
            }
        }
        Inversion {
            matrix: BandedHermitian::from_real_parts(d, delta, diag, re, im),
            residual: (resid_sq / d as f64).sqrt(),
        }
    }

    /// Closed-form inverse for UnitPair masks (0-based mask order `e_0`,
    /// then `e_0 + e_k`, `e_0 + i e_k` for `k = 1..delta`):
    ///
    /// * `X[l, l] = y[l][0]`
    /// * `Re X[l, l + k] = (y[l][2k - 1] - y[l][0] - y[l + k][0]) / 2`
    /// * `Im X[l, l + k] = -(y[l][2k] - y[l][0] - y[l + k][0]) / 2`
    fn invert_closed(&self, y: &MeasurementGrid) -> Result<Inversion> {
        let d = self.masks.d();
        let delta = self.masks.delta();
        let diag: Vec<f64> = (0..d).map(|l| y.get(l, 0)).collect();
        let mut re = Vec::with_capacity(delta - 1);
        let mut im = Vec::with_capacity(delta - 1);
        for k in 1..delta {
            let mut r = Vec::with_capacity(d);
            let mut s = Vec::with_capacity(d);
            for l in 0..d {
                let base = diag[l] + diag[(l + k) % d];
                r.push(0.5 * (y.get(l, 2 * k - 1) - base));
                s.push(-0.5 * (y.get(l, 2 * k) - base));
            }
            re.push(r);
            im.push(s);
        }
        let matrix = BandedHermitian::from_real_parts(d, delta, diag, re, im);
        let fitted = forward_apply_lifted(&matrix, &self.masks)?;
        let residual = fitted
            .values()
            .iter()
            .zip(y.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        Ok(Inversion { matrix, residual })
    }
}
