//! Linear solves with matrices supported on a circular band.
//!
//! The matrix is split as `A = B + U W`: `B` is the ordinary band
//! `|i - j| <= p` and the wraparound corners live in the rows
//! `R = {0..p} + {d-p..d}`, so `U` selects those rows and `W` holds their
//! corner entries. `B` gets a banded LU with partial pivoting and the
//! corners are folded back in with the Woodbury identity
//! `A^{-1} b = B^{-1} b - Z S^{-1} W B^{-1} b`, `Z = B^{-1} U`, `S = I + W Z`.
//!
//! Setup is `O(d p^2)` and each solve `O(d p)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::banded::BandedHermitian;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// LU factors of a matrix with `kl` sub- and `ku` super-diagonals.
/// Multipliers stay where they were computed and the row swaps are
/// replayed during the solve.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// `rows[i][j + kl - i]` holds entry `(i, j)`, width `2 kl + ku + 1`.
    rows: Vec<Vec<Complex64>>,
    pivots: Vec<usize>,
}

impl BandLu {
    /// Factor the band matrix whose entry `(i, j)` is `entry(i, j)` for
    /// `i - kl <= j <= i + ku`.
    pub fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let width = 2 * kl + ku + 1;
        let mut rows = vec![vec![ZERO; width]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                row[j + kl - i] = entry(i, j);
            }
        }
        let mut pivots = vec![0; n];
        for c in 0..n {
            let last = (c + kl).min(n - 1);
            let mut piv = c;
            let mut best = rows[c][kl].norm();
            for r in c + 1..=last {
                let v = rows[r][c + kl - r].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular);
            }
            pivots[c] = piv;
            let reach = (c + kl + ku).min(n - 1);
            if piv != c {
                for j in c..=reach {
                    let a = rows[c][j + kl - c];
                    rows[c][j + kl - c] = rows[piv][j + kl - piv];
                    rows[piv][j + kl - piv] = a;
                }
            }
            let diag = rows[c][kl];
            for r in c + 1..=last {
                let l = rows[r][c + kl - r] / diag;
                rows[r][c + kl - r] = l;
                if l == ZERO {
                    continue;
                }
                for j in c + 1..=reach {
                    let u = rows[c][j + kl - c];
                    rows[r][j + kl - r] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            rows,
            pivots,
        })
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for c in 0..n {
            let piv = self.pivots[c];
            if piv != c {
                b.swap(c, piv);
            }
            let bc = b[c];
            if bc == ZERO {
                continue;
            }
            for r in c + 1..=(c + kl).min(n - 1) {
                b[r] -= self.rows[r][c + kl - r] * bc;
            }
        }
        for c in (0..n).rev() {
            let reach = (c + kl + ku).min(n - 1);
            let mut s = b[c];
            for j in c + 1..=reach {
                s -= self.rows[c][j + kl - c] * b[j];
            }
            b[c] = s / self.rows[c][kl];
        }
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Dense(nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>),
    Cyclic {
        band: BandLu,
        /// Corner entries `(slot in R, column, value)`.
        corners: Vec<(usize, usize, Complex64)>,
        /// `Z = B^{-1} U`, one column per slot in `R`.
        z: DMatrix<Complex64>,
        s: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    },
}

/// A factorization of `A - mu I` for a circular band matrix `A`.
#[derive(Clone, Debug)]
pub struct ShiftedBandSolver {
    d: usize,
    inner: Inner,
}

/// Below this size the shifted matrix is factored densely.
pub const DENSE_CUTOFF: usize = 8;

impl ShiftedBandSolver {
    pub fn new(a: &BandedHermitian, mu: f64) -> Result<Self> {
        let d = a.d();
        let p = a.stored() - 1;
        if d < DENSE_CUTOFF || d < 2 * p + 1 {
            Self::dense(a, mu)
        } else {
            Self::cyclic(a, mu)
        }
    }

    /// Always factor densely; used for small problems and as a cross-check.
    pub fn dense(a: &BandedHermitian, mu: f64) -> Result<Self> {
        let mut m = a.to_dense();
        for i in 0..a.d() {
            m[(i, i)] -= mu;
        }
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self {
            d: a.d(),
            inner: Inner::Dense(lu),
        })
    }

    fn cyclic(a: &BandedHermitian, mu: f64) -> Result<Self> {
        let d = a.d();
        let p = a.stored() - 1;
        let shift = Complex64::new(mu, 0.0);
        let band = BandLu::factor(d, p, p, |i, j| {
            if i == j {
                a.get(i, j) - shift
            } else {
                a.get(i, j)
            }
        })?;

        let rows: Vec<usize> = (0..p).chain(d - p..d).collect();
        let mut corners = Vec::new();
        for (slot, &i) in rows.iter().enumerate() {
            for k in 1..=p {
                // columns reached only by wrapping around
                let right = i + k;
                if right >= d {
                    corners.push((slot, right - d, a.get(i, right - d)));
                }
                if i < k {
                    let left = i + d - k;
                    corners.push((slot, left, a.get(i, left)));
                }
            }
        }

        let r = rows.len();
        let mut z = DMatrix::from_element(d, r, ZERO);
        let mut col = vec![ZERO; d];
        for (slot, &i) in rows.iter().enumerate() {
            col.fill(ZERO);
            col[i] = Complex64::new(1.0, 0.0);
            band.solve_in_place(&mut col);
            z.column_mut(slot).copy_from_slice(&col);
        }
        let mut s = DMatrix::<Complex64>::identity(r, r);
        for &(slot, c, v) in &corners {
            for t in 0..r {
                s[(slot, t)] += v * z[(c, t)];
            }
        }
        let s = s.lu();
        if r > 0 && !s.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self {
            d,
            inner: Inner::Cyclic {
                band,
                corners,
                z,
                s,
            },
        })
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.inner, Inner::Dense(_))
    }

    /// Solve `(A - mu I) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.d, "right-hand side length");
        match &self.inner {
            Inner::Dense(lu) => {
                let mut v = DVector::from_column_slice(b);
                lu.solve_mut(&mut v);
                b.copy_from_slice(v.as_slice());
            }
            Inner::Cyclic {
                band,
                corners,
                z,
                s,
            } => {
                band.solve_in_place(b);
                let r = z.ncols();
                if r == 0 {
                    return;
                }
                let mut t = DVector::from_element(r, ZERO);
                for &(slot, c, v) in corners {
                    t[slot] += v * b[c];
                }
                s.solve_mut(&mut t);
                for (i, bi) in b.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    for (k, tk) in t.iter().enumerate() {
                        acc += z[(i, k)] * tk;
                    }
                    *bi -= acc;
                }
            }
        }
    }
}
