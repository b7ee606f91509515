//! Dense reference implementations used as independent oracles.
#![allow(dead_code)]

use blockpr::banded::BandedHermitian;
use blockpr::masks::MaskFamily;
use blockpr::signal::Signal;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Band coordinates `(i, k, part)`: `part` 0 is the diagonal value, 1 the
/// real and 2 the imaginary part of `X[i, i + k]`.
pub fn band_coords(d: usize, delta: usize) -> Vec<(usize, usize, u8)> {
    let mut out = Vec::new();
    for i in 0..d {
        out.push((i, 0, 0));
    }
    for k in 1..delta {
        for i in 0..d {
            out.push((i, k, 1));
        }
    }
    for k in 1..delta {
        for i in 0..d {
            out.push((i, k, 2));
        }
    }
    out
}

/// The dense Hermitian matrix with a single coordinate set to one.
pub fn basis_matrix(d: usize, (i, k, part): (usize, usize, u8)) -> DMatrix<Complex64> {
    let mut e = DMatrix::from_element(d, d, ZERO);
    let j = (i + k) % d;
    match part {
        0 => e[(i, i)] = Complex64::new(1.0, 0.0),
        1 => {
            e[(i, j)] = Complex64::new(1.0, 0.0);
            e[(j, i)] = Complex64::new(1.0, 0.0);
        }
        _ => {
            e[(i, j)] = Complex64::new(0.0, 1.0);
            e[(j, i)] = Complex64::new(0.0, -1.0);
        }
    }
    e
}

/// `y_{l,j} = sum_{n,n'} X[n + l, n' + l] conj(m_n) m_{n'}` straight from the
/// definition, rows ordered `l * K + j`.
pub fn apply_dense(x: &DMatrix<Complex64>, masks: &MaskFamily) -> Vec<f64> {
    let (d, delta, k) = (masks.d(), masks.delta(), masks.count());
    let mut y = vec![0.0; d * k];
    for l in 0..d {
        for j in 0..k {
            let m = masks.mask(j);
            let mut acc = ZERO;
            for n in 0..delta {
                for n2 in 0..delta {
                    acc += x[((n + l) % d, (n2 + l) % d)] * m[n].conj() * m[n2];
                }
            }
            y[l * k + j] = acc.re;
        }
    }
    y
}

/// Real `dK x d(2 delta - 1)` matrix of the lifted map. With `isometric`
/// the off-diagonal columns are divided by `sqrt 2` so that coordinates are
/// orthonormal for the Frobenius inner product.
pub fn dense_lifted(masks: &MaskFamily, isometric: bool) -> DMatrix<f64> {
    let (d, delta) = (masks.d(), masks.delta());
    let coords = band_coords(d, delta);
    let mut a = DMatrix::zeros(d * masks.count(), coords.len());
    for (c, &coord) in coords.iter().enumerate() {
        let y = apply_dense(&basis_matrix(d, coord), masks);
        let s = if isometric && coord.2 != 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
        for (r, v) in y.iter().enumerate() {
            a[(r, c)] = v * s;
        }
    }
    a
}

/// The complex-linear extension in the elementary basis `E_ab`, `a, b` in
/// the band.
pub fn dense_elementary(masks: &MaskFamily) -> DMatrix<Complex64> {
    let (d, delta, k) = (masks.d(), masks.delta(), masks.count());
    let mut pairs = Vec::new();
    for a in 0..d {
        for off in 0..(2 * delta - 1) {
            let b = (a + d + off + 1 - delta) % d;
            pairs.push((a, b));
        }
    }
    let mut m = DMatrix::from_element(d * k, pairs.len(), ZERO);
    for (c, &(a, b)) in pairs.iter().enumerate() {
        for l in 0..d {
            let (na, nb) = ((a + d - l) % d, (b + d - l) % d);
            if na < delta && nb < delta {
                for j in 0..k {
                    let mask = masks.mask(j);
                    m[(l * k + j, c)] = mask[na].conj() * mask[nb];
                }
            }
        }
    }
    m
}

/// Singular values of a real matrix from the eigenvalues of its symmetric
/// dilation; nalgebra's SVD is unreliable when singular values repeat.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut h = DMatrix::zeros(m + n, m + n);
    h.view_mut((0, m), (m, n)).copy_from(a);
    h.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.truncate(m.min(n));
    ev.into_iter().map(|v| v.max(0.0)).collect()
}

/// Complex counterpart of [`singular_values`].
pub fn complex_singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut h = DMatrix::from_element(m + n, m + n, ZERO);
    h.view_mut((0, m), (m, n)).copy_from(a);
    h.view_mut((m, 0), (n, m)).copy_from(&a.adjoint());
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.truncate(m.min(n));
    ev.into_iter().map(|v| v.max(0.0)).collect()
}

pub fn extreme_singular_values(sv: impl Iterator<Item = f64>) -> (f64, f64) {
    sv.fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s), hi.max(s)))
}

/// Least-squares band matrix for `y` through a dense pseudoinverse.
pub fn dense_pinv_invert(masks: &MaskFamily, y: &[f64]) -> BandedHermitian {
    let (d, delta) = (masks.d(), masks.delta());
    let a = dense_lifted(masks, false);
    let svd = a.clone().svd(true, true);
    let yv = nalgebra::DVector::from_column_slice(y);
    let solve = |r: &nalgebra::DVector<f64>| svd.solve(r, 1e-12).expect("SVD was computed with both factors");
    // the SVD alone stalls near 1e-9 on the larger systems; refinement on the
    // residual restores full accuracy
    let mut z = solve(&yv);
    for _ in 0..3 {
        let r = &yv - &a * &z;
        z += solve(&r);
    }
    let mut x = BandedHermitian::zeros(d, delta);
    for (c, &(i, k, part)) in band_coords(d, delta).iter().enumerate() {
        let j = (i + k) % d;
        let cur = x.get(i, j);
        let v = match part {
            0 => Complex64::new(z[c], 0.0),
            1 => Complex64::new(z[c], cur.im),
            _ => Complex64::new(cur.re, z[c]),
        };
        x.set(i, j, v);
    }
    x
}

pub fn max_abs_diff(a: &BandedHermitian, b: &BandedHermitian) -> f64 {
    a.entries()
        .map(|(i, j, v)| (v - b.get(i, j)).norm())
        .fold(0.0, f64::max)
}

pub fn complex_gaussian_signal(d: usize, seed: u64) -> Signal {
    use rand::SeedableRng;
    Signal::random_gaussian(d, &mut rand_chacha::ChaCha20Rng::seed_from_u64(seed))
}
