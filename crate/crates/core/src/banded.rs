//! Hermitian matrices supported on a circular band, and the projection
//! `T_delta` onto that band.
//!
//! An entry `(i, j)` is in the band when `circdist(i, j) < delta`, with
//! `circdist(i, j) = min((i - j) mod d, (j - i) mod d)`. This wraps around the
//! corners, so the all-ones band matrix `U = T_delta(1 1^*)` is circulant.
//!
//! Storage is by circular diagonals: `diags[k][i] = A[i, (i + k) mod d]` for
//! `k = 0..stored`, where `stored = min(delta, d / 2 + 1)`. Entries below the
//! diagonal are recovered by conjugation. When `d` is even and `k = d / 2` is
//! stored, that diagonal pairs with itself: `diags[k][i + k] = conj(diags[k][i])`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::signal::Signal;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Circular distance between indices `i` and `j` on `Z_d`.
#[inline]
pub fn circdist(i: usize, j: usize, d: usize) -> usize {
    let k = (j + d - i % d) % d;
    k.min(d - k)
}

/// Number of stored circular diagonals for a band of half-width `delta`.
#[inline]
pub fn stored_diagonals(d: usize, delta: usize) -> usize {
    delta.min(d / 2 + 1)
}

/// Number of in-band entries per row.
#[inline]
pub fn band_row_count(d: usize, delta: usize) -> usize {
    (2 * delta - 1).min(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandedHermitian {
    d: usize,
    delta: usize,
    diags: Vec<Vec<Complex64>>,
}

impl BandedHermitian {
    pub fn zeros(d: usize, delta: usize) -> Self {
        assert!(d >= 1 && delta >= 1, "need d >= 1 and delta >= 1");
        let delta = delta.min(d);
        Self {
            d,
            delta,
            diags: vec![vec![ZERO; d]; stored_diagonals(d, delta)],
        }
    }

    /// Build from circular diagonals `diags[k][i] = A[i, i + k]`. Diagonal 0
    /// must be real and a self-paired diagonal must be consistent.
    pub fn from_diagonals(d: usize, delta: usize, diags: Vec<Vec<Complex64>>) -> Result<Self> {
        if d == 0 || delta == 0 || delta > d {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= delta <= d (delta = {delta}, d = {d})"
            )));
        }
        check_dim("stored diagonals", stored_diagonals(d, delta), diags.len())?;
        for dg in &diags {
            check_dim("diagonal length", d, dg.len())?;
        }
        let mut m = Self { d, delta, diags };
        for i in 0..d {
            if m.diags[0][i].im != 0.0 {
                return Err(Error::NotHermitian { i, j: i });
            }
        }
        if let Some(k) = m.self_paired() {
            for i in 0..d {
                let a = m.diags[k][i];
                let b = m.diags[k][(i + k) % d];
                if (a - b.conj()).norm() > 1e-12 * (1.0 + a.norm()) {
                    return Err(Error::NotHermitian { i, j: (i + k) % d });
                }
            }
            for i in 0..k {
                let a = m.diags[k][i];
                m.diags[k][i + k] = a.conj();
            }
        }
        Ok(m)
    }

    /// Real diagonal plus upper diagonals, the latter given as separate real
    /// and imaginary parts: `re[k-1][i] + i im[k-1][i] = A[i, i + k]`.
    pub(crate) fn from_real_parts(
        d: usize,
        delta: usize,
        diag: Vec<f64>,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    ) -> Self {
        let mut diags = Vec::with_capacity(delta);
        diags.push(diag.into_iter().map(|v| Complex64::new(v, 0.0)).collect());
        for (r, s) in re.into_iter().zip(im) {
            diags.push(r.into_iter().zip(s).map(|(a, b)| Complex64::new(a, b)).collect());
        }
        Self { d, delta, diags }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn stored(&self) -> usize {
        self.diags.len()
    }

    /// `A[i, (i + k) mod d]` for all `i`.
    pub fn diagonal(&self, k: usize) -> &[Complex64] {
        &self.diags[k]
    }

    pub fn diagonals(&self) -> &[Vec<Complex64>] {
        &self.diags
    }

    fn self_paired(&self) -> Option<usize> {
        let k = self.d / 2;
        (self.d.is_multiple_of(2) && k > 0 && k < self.diags.len()).then_some(k)
    }

    /// How many matrix entries each stored element of diagonal `k` represents.
    pub fn multiplicity(&self, k: usize) -> f64 {
        if k == 0 || Some(k) == self.self_paired() {
            1.0
        } else {
            2.0
        }
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        circdist(i, j, self.d) < self.delta
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let d = self.d;
        let k = (j + d - i) % d;
        if k < self.diags.len() {
            self.diags[k][i]
        } else if d - k < self.diags.len() {
            self.diags[d - k][j].conj()
        } else {
            ZERO
        }
    }

    /// Set `A[i, j] = v` and `A[j, i] = conj(v)`. Panics outside the band or
    /// for a non-real diagonal value.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let d = self.d;
        let k = (j + d - i) % d;
        if k == 0 {
            assert!(v.im == 0.0, "diagonal entries must be real");
            self.diags[0][i] = v;
        } else if k < self.diags.len() {
            self.diags[k][i] = v;
            if Some(k) == self.self_paired() {
                self.diags[k][j] = v.conj();
            }
        } else if d - k < self.diags.len() {
            self.diags[d - k][j] = v.conj();
        } else {
            panic!("({i}, {j}) is outside the band");
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.d;
        let mut a = DMatrix::from_element(d, d, ZERO);
        for (k, dg) in self.diags.iter().enumerate() {
            for (i, &v) in dg.iter().enumerate() {
                let j = (i + k) % d;
                a[(i, j)] = v;
                a[(j, i)] = v.conj();
            }
        }
        a
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.diags
            .iter()
            .enumerate()
            .map(|(k, dg)| self.multiplicity(k) * dg.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.diags
            .iter()
            .flat_map(|dg| dg.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// Apply `f` to every stored entry. `f` must map real values on the main
    /// diagonal to real values for the result to stay Hermitian.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let diags = self
            .diags
            .iter()
            .map(|dg| dg.iter().map(|&z| f(z)).collect())
            .collect();
        let mut out = Self {
            d: self.d,
            delta: self.delta,
            diags,
        };
        for z in &mut out.diags[0] {
            z.im = 0.0;
        }
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_dim("matrix dimension", self.d, other.d)?;
        check_dim("band width", self.delta, other.delta)?;
        let diags = self
            .diags
            .iter()
            .zip(&other.diags)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(Self {
            d: self.d,
            delta: self.delta,
            diags,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// `y = A x` in `O(d * delta)`.
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        assert_eq!(x.len(), d);
        let mut y: Vec<Complex64> = self.diags[0].iter().zip(x).map(|(a, b)| a * b).collect();
        let paired = self.self_paired();
        for (k, dg) in self.diags.iter().enumerate().skip(1) {
            for i in 0..d {
                let j = (i + k) % d;
                y[i] += dg[i] * x[j];
                if Some(k) != paired {
                    y[j] += dg[i].conj() * x[i];
                }
            }
        }
        y
    }

    /// Entries strictly inside the band, as `(i, j, value)` over all ordered
    /// pairs, each matrix entry exactly once.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let d = self.d;
        (0..d).flat_map(move |i| {
            (0..d)
                .filter(move |&j| self.in_band(i, j))
                .map(move |j| (i, j, self.get(i, j)))
        })
    }
}

/// Orthogonal projection onto the circular band: keep entries with
/// `circdist(i, j) < delta`, zero the rest. Rejects non-Hermitian input.
pub fn t_delta_project(a: &DMatrix<Complex64>, delta: usize) -> Result<BandedHermitian> {
    let d = a.nrows();
    check_dim("square matrix", d, a.ncols())?;
    if d == 0 || delta == 0 {
        return Err(Error::InvalidParameter("need d >= 1 and delta >= 1".into()));
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..d {
        for j in i..d {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > 1e-12 * scale {
                return Err(Error::NotHermitian { i, j });
            }
        }
    }
    let mut out = BandedHermitian::zeros(d, delta);
    let stored = out.stored();
    for k in 0..stored {
        for i in 0..d {
            let mut v = a[(i, (i + k) % d)];
            if k == 0 {
                v.im = 0.0;
            }
            out.diags[k][i] = v;
        }
    }
    Ok(out)
}

/// `T_delta(x x^*)` assembled directly in `O(d * delta)`.
pub fn lifted_outer(x: &Signal, delta: usize) -> BandedHermitian {
    let d = x.len();
    let mut out = BandedHermitian::zeros(d, delta);
    let e = x.entries();
    for k in 0..out.stored() {
        for i in 0..d {
            let mut v = e[i] * e[(i + k) % d].conj();
            if k == 0 {
                v.im = 0.0;
            }
            out.diags[k][i] = v;
        }
    }
    out
}

/// The all-ones band matrix `U = T_delta(1 1^*)`.
pub fn ones_band(d: usize, delta: usize) -> BandedHermitian {
    lifted_outer(&Signal::ones(d), delta)
}
