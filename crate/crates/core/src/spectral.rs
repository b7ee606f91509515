//! Spectral diagnostics of the band graph and of phase matrices: the
//! Dirichlet-kernel eigenvalues of the all-ones band `U`, spectral gaps,
//! the connection Laplacian, frustration, `rho`-small index sets and
//! eigenvector perturbation bounds with explicit constants.
//!
//! The band graph on `Z_d` joins `i` and `j` when `circdist(i, j) < delta`
//! and carries a self-loop of weight one at every vertex, so its adjacency
//! matrix is `U` and every degree equals the row count of the band.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::banded::{band_row_count, ones_band, BandedHermitian};
use crate::error::{check_dim, Error, Result};
use crate::metrics::phase_aligned_distance;
use crate::signal::{sgn, Signal};

/// The band graph with self-loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandGraph {
    pub d: usize,
    pub delta: usize,
}

impl BandGraph {
    pub fn new(d: usize, delta: usize) -> Result<Self> {
        if d == 0 || delta == 0 || delta > d {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= delta <= d (delta = {delta}, d = {d})"
            )));
        }
        Ok(Self { d, delta })
    }

    /// Common degree, self-loop included.
    pub fn degree(&self) -> usize {
        band_row_count(self.d, self.delta)
    }

    pub fn volume(&self) -> f64 {
        (self.d * self.degree()) as f64
    }

    pub fn adjacency(&self) -> BandedHermitian {
        ones_band(self.d, self.delta)
    }

    /// Normalized Laplacian `L = I - D^{-1/2} W D^{-1/2} = I - U / deg`.
    pub fn laplacian(&self) -> DMatrix<Complex64> {
        let deg = self.degree() as f64;
        let u = self.adjacency().to_dense();
        DMatrix::identity(self.d, self.d) - u.map(|z| z / deg)
    }
}

/// `nu_j = 1 + 2 sum_{k=1}^{delta-1} cos(2 pi j k / d)` for `j = 0..d`.
/// These are the eigenvalues of `U` only while `2 delta - 1 <= d`; see
/// [`band_eigenvalues`] for the full range.
pub fn dirichlet_eigenvalues(d: usize, delta: usize) -> Vec<f64> {
    (0..d)
        .map(|j| {
            1.0 + 2.0
                * (1..delta)
                    .map(|k| (2.0 * PI * ((j * k) % d) as f64 / d as f64).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// `sin(theta (delta - 1/2)) / sin(theta / 2)`, with the limit `2 delta - 1`
/// at `theta = 0`.
pub fn dirichlet_kernel(theta: f64, delta: usize) -> f64 {
    let s = (theta / 2.0).sin();
    if s.abs() < 1e-300 {
        (2 * delta - 1) as f64
    } else {
        (theta * (delta as f64 - 0.5)).sin() / s
    }
}

/// Eigenvalues of `U` indexed by Fourier frequency. Once the band covers
/// every pair (`2 delta - 1 > d`), `U` is the all-ones matrix with
/// eigenvalues `d, 0, ..., 0`.
pub fn band_eigenvalues(d: usize, delta: usize) -> Vec<f64> {
    if 2 * delta - 1 <= d {
        dirichlet_eigenvalues(d, delta)
    } else {
        let mut v = vec![0.0; d];
        v[0] = d as f64;
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub d: usize,
    pub delta: usize,
    pub nus: Vec<f64>,
    pub nu1: f64,
    /// `nu_1 - max_{j >= 1} |nu_j|`.
    pub gap: f64,
    /// `nu_1 - max_{j >= 1} nu_j`.
    pub nu1_minus_nu2: f64,
    /// Second-smallest eigenvalue of the normalized graph Laplacian.
    pub tau: f64,
    /// `min{(3/4)(2 delta - 1), pi^2 delta^3 / (3 d^2)}`.
    pub gap_lower_bound: f64,
    /// `(1/6)(pi/d)^2 (2 delta - 1)^3`.
    pub gap_upper_bound: f64,
    /// Whether `d >= 4 delta` and `delta >= 3`, where both bounds apply.
    pub bounds_apply: bool,
    pub lower_bound_holds: bool,
    pub upper_bound_holds: bool,
}

pub fn spectral_gap(d: usize, delta: usize) -> Result<SpectrumReport> {
    let graph = BandGraph::new(d, delta)?;
    let nus = band_eigenvalues(d, delta);
    let nu1 = nus[0];
    let rest_abs = nus[1..].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rest_max = nus[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (gap, nu1_minus_nu2) = if d == 1 { (nu1, nu1) } else { (nu1 - rest_abs, nu1 - rest_max) };
    let tau = if d == 1 { 0.0 } else { 1.0 - rest_max / graph.degree() as f64 };
    let k = (2 * delta - 1) as f64;
    let (dd, df) = (d as f64, delta as f64);
    let gap_lower_bound = f64::min(0.75 * k, PI * PI * df.powi(3) / (3.0 * dd * dd));
    let gap_upper_bound = (PI / dd).powi(2) * k.powi(3) / 6.0;
    let bounds_apply = d >= 4 * delta && delta >= 3;
    Ok(SpectrumReport {
        d,
        delta,
        nu1,
        gap,
        nu1_minus_nu2,
        tau,
        gap_lower_bound,
        gap_upper_bound,
        bounds_apply,
        lower_bound_holds: !bounds_apply || gap >= gap_lower_bound,
        upper_bound_holds: !bounds_apply || nu1_minus_nu2 <= gap_upper_bound,
        nus,
    })
}

/// `L_1 = I - X / deg`, the connection Laplacian of a phase matrix on the
/// band graph.
pub fn connection_laplacian(phases: &BandedHermitian) -> DMatrix<Complex64> {
    let d = phases.d();
    let deg = band_row_count(d, phases.delta()) as f64;
    DMatrix::identity(d, d) - phases.to_dense().map(|z| z / deg)
}

/// `y^* (D - X) y / y^* D y` with `D = deg I`, computed in `O(d delta)`.
pub fn frustration(phases: &BandedHermitian, y: &[Complex64]) -> Result<f64> {
    check_dim("vector", phases.d(), y.len())?;
    let ny: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    if ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let deg = band_row_count(phases.d(), phases.delta()) as f64;
    let xy = phases.matvec(y);
    let quad: f64 = y.iter().zip(&xy).map(|(a, b)| (a.conj() * b).re).sum();
    Ok((deg * ny - quad) / (deg * ny))
}

/// `(1/2) sum_{(i,j)} |y_i - X_ij y_j|^2 / sum_i deg |y_i|^2`, summing over
/// ordered in-band pairs including self-loops. Equals [`frustration`]
/// whenever every in-band entry of `phases` has unit modulus.
pub fn frustration_sum_form(phases: &BandedHermitian, y: &[Complex64]) -> Result<f64> {
    check_dim("vector", phases.d(), y.len())?;
    let deg = band_row_count(phases.d(), phases.delta()) as f64;
    let den: f64 = y.iter().map(|v| deg * v.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::ZeroVector);
    }
    let num: f64 = phases
        .entries()
        .map(|(i, j, x)| (y[i] - x * y[j]).norm_sqr())
        .sum();
    Ok(0.5 * num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoSmallSet {
    /// `(delta ||n||_2 / rho)^{1/4}`.
    pub threshold: f64,
    pub indices: Vec<usize>,
    /// `kappa delta ||n||_2 / min_j |x0_j|^4`; any `rho` at least this large
    /// leaves the set empty because `kappa >= 1`.
    pub rho_star: f64,
}

/// Indices whose magnitude falls below `(delta ||n||_2 / rho)^{1/4}`.
pub fn rho_small_set(x0: &Signal, rho: f64, delta: usize, noise_norm: f64, kappa: f64) -> Result<RhoSmallSet> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    let threshold = (delta as f64 * noise_norm / rho).powf(0.25);
    let indices = x0
        .magnitudes()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m < threshold)
        .map(|(j, _)| j)
        .collect();
    let rho_star = kappa * delta as f64 * noise_norm / x0.min_magnitude().powi(4);
    Ok(RhoSmallSet {
        threshold,
        indices,
        rho_star,
    })
}

/// Eigenpairs of a Hermitian matrix sorted by decreasing eigenvalue.
pub fn sorted_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (values, vectors)
}

fn column_signal(m: &DMatrix<Complex64>, c: usize) -> Signal {
    Signal::new(m.column(c).iter().copied().collect()).expect("eigenvectors are finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank1Check {
    /// `||X - x0 x0^*||_F / ||x0||^2`.
    pub eta: f64,
    /// `min_theta ||e^{i theta} x0 - sqrt(|lambda_1|) v_1||_2` with
    /// `lambda_1` the eigenvalue of largest magnitude.
    pub measured: f64,
    /// `(1 + 2 sqrt 2) eta ||x0||_2`.
    pub bound: f64,
    pub holds: bool,
}

pub fn rank1_bound(x0: &Signal, x: &DMatrix<Complex64>) -> Result<Rank1Check> {
    let d = x0.len();
    check_dim("matrix", d, x.nrows())?;
    let e = x0.entries();
    let x0x0 = DMatrix::from_fn(d, d, |i, j| e[i] * e[j].conj());
    let n2 = x0.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let eta = (x - &x0x0).norm() / n2;
    let eig = SymmetricEigen::new(x.clone());
    let top = (0..d)
        .max_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()))
        .expect("d >= 1");
    let v = column_signal(&eig.eigenvectors, top).scaled(Complex64::new(eig.eigenvalues[top].abs().sqrt(), 0.0));
    let (measured, _) = phase_aligned_distance(&v, x0)?;
    let bound = (1.0 + 2.0 * 2f64.sqrt()) * eta * n2.sqrt();
    Ok(Rank1Check {
        eta,
        measured,
        bound,
        holds: measured <= bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinThetaCheck {
    pub eta: f64,
    /// `1 - |<x_1, v_1>|^2` for the top eigenvectors of `X0` and `X`.
    pub lhs: f64,
    /// `4 eta^2 ||X0||_F^2 / (nu_1 - nu_2)^2`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn sin_theta_bound(x0: &DMatrix<Complex64>, x: &DMatrix<Complex64>) -> Result<SinThetaCheck> {
    check_dim("matrix", x0.nrows(), x.nrows())?;
    let f0 = x0.norm();
    if f0 == 0.0 || x0.nrows() < 2 {
        return Err(Error::InvalidParameter("need a nonzero matrix of size >= 2".into()));
    }
    let eta = (x - x0).norm() / f0;
    let (nu, u) = sorted_eigen(x0);
    let (_, v) = sorted_eigen(x);
    let ip: Complex64 = u.column(0).iter().zip(v.column(0).iter()).map(|(a, b)| a * b.conj()).sum();
    let lhs = 1.0 - ip.norm_sqr();
    let rhs = 4.0 * eta * eta * f0 * f0 / (nu[0] - nu[1]).powi(2);
    Ok(SinThetaCheck {
        eta,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// `||X - X0||_F / ||X0||_F` for the phase matrices.
    pub eta: f64,
    /// `min_theta ||sgn(x0) - e^{i theta} sgn(u)||_2`, `u` the top eigenvector.
    pub measured: f64,
    /// The same distance for `sqrt(d) u / ||u||`.
    pub measured_scaled: f64,
    /// `measured / (eta d^{5/2} / delta^2)`.
    pub ratio_sgn: f64,
    /// `measured_scaled / (eta d^3 / delta^{5/2})`.
    pub ratio_scaled: f64,
}

/// Distance between the true phases and those synchronized from `phases`,
/// with the ratios against the two `eta`-scaled bound shapes. Ratios are
/// `0` when `eta = 0`. Uses a dense eigendecomposition.
pub fn phase_perturbation(x0: &Signal, phases: &BandedHermitian) -> Result<PerturbationReport> {
    let d = x0.len();
    check_dim("phase matrix", d, phases.d())?;
    let delta = phases.delta();
    let truth = x0.phase_signal();
    let x0t = crate::banded::lifted_outer(&truth, delta);
    let eta = phases.sub(&x0t)?.frobenius_norm() / x0t.frobenius_norm();
    let (_, vecs) = sorted_eigen(&phases.to_dense());
    let u = column_signal(&vecs, 0);
    let s = u.phase_signal();
    let scaled = u.scaled(Complex64::new((d as f64).sqrt() / u.norm(), 0.0));
    let (measured, _) = phase_aligned_distance(&truth, &s)?;
    let (measured_scaled, _) = phase_aligned_distance(&truth, &scaled)?;
    let (dd, df) = (d as f64, delta as f64);
    let ratio = |m: f64, shape: f64| if eta == 0.0 { 0.0 } else { m / (eta * shape) };
    Ok(PerturbationReport {
        eta,
        measured,
        measured_scaled,
        ratio_sgn: ratio(measured, dd.powf(2.5) / (df * df)),
        ratio_scaled: ratio(measured_scaled, dd.powi(3) / df.powf(2.5)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerCheck {
    /// Frustration of `sgn(u)`, `u` the bottom eigenvector of `L_1`.
    pub rounded: f64,
    /// Smallest eigenvalue of `L_1`, the infimum of the frustration over all
    /// nonzero complex vectors and hence a lower bound for the minimum over
    /// unit-modulus vectors.
    pub relaxed_min: f64,
    pub tau: f64,
    /// `rounded * tau / relaxed_min`, `0` when `rounded` vanishes.
    pub ratio: f64,
}

/// Compare the rounded eigenvector's frustration to the spectral relaxation.
/// The rounding inequality asserts `ratio <= 44`.
pub fn cheeger_check(phases: &BandedHermitian) -> Result<CheegerCheck> {
    let report = spectral_gap(phases.d(), phases.delta())?;
    let l1 = connection_laplacian(phases);
    let (vals, vecs) = sorted_eigen(&l1);
    let last = vals.len() - 1;
    let relaxed_min = vals[last].max(0.0);
    let w: Vec<Complex64> = vecs.column(last).iter().copied().map(sgn).collect();
    let rounded = frustration(phases, &w)?.max(0.0);
    let ratio = if rounded <= 1e-14 {
        0.0
    } else {
        rounded * report.tau / relaxed_min
    };
    Ok(CheegerCheck {
        rounded,
        relaxed_min,
        tau: report.tau,
        ratio,
    })
}
