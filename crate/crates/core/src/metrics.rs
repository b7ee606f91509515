//! Error metrics that account for the global phase ambiguity.

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::signal::Signal;

/// Reported in place of `-inf` for exact recoveries.
pub const ERROR_DB_FLOOR: f64 = -300.0;

/// `min_theta ||a - e^{i theta} b||_2` and the minimizing angle
/// `theta* = arg <a, b>`.
pub fn phase_aligned_distance(a: &Signal, b: &Signal) -> Result<(f64, f64)> {
    // summing the aligned residual directly avoids the sqrt(eps) floor of
    // |a|^2 + |b|^2 - 2|<a, b>|
    let theta = a.inner(b)?.arg();
    let rot = Complex64::from_polar(1.0, theta);
    let d2: f64 = a.entries().iter().zip(b.entries()).map(|(u, v)| (u - rot * v).norm_sqr()).sum();
    Ok((d2.sqrt(), theta))
}

/// `b` rotated by the optimal global phase onto `a`.
pub fn align_phase(a: &Signal, b: &Signal) -> Result<Signal> {
    let (_, theta) = phase_aligned_distance(a, b)?;
    Ok(b.scaled(Complex64::from_polar(1.0, theta)))
}

/// `10 log10(min_theta ||x - e^{i theta} x0||^2 / ||x0||^2)`, floored at
/// [`ERROR_DB_FLOOR`].
pub fn error_db(x: &Signal, x0: &Signal) -> Result<f64> {
    check_dim("signal", x0.len(), x.len())?;
    let n0 = x0.norm_sqr();
    if n0 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (dist, _) = phase_aligned_distance(x, x0)?;
    let db = 10.0 * (dist * dist / n0).log10();
    Ok(if db.is_finite() { db.max(ERROR_DB_FLOOR) } else { ERROR_DB_FLOOR })
}

/// Phase-aligned relative error `min_theta ||x - e^{i theta} x0|| / ||x0||`.
pub fn relative_error(x: &Signal, x0: &Signal) -> Result<f64> {
    let n0 = x0.norm();
    if n0 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(phase_aligned_distance(x, x0)?.0 / n0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn global_phase_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Signal::random_gaussian(10, &mut rng);
        let b = a.scaled(Complex64::new(0.0, 1.0));
        assert!(phase_aligned_distance(&a, &b).unwrap().0 < 1e-14);
        assert_eq!(error_db(&a, &a).unwrap(), ERROR_DB_FLOOR);
    }

    #[test]
    fn orthogonal_unit_vectors() {
        let (dist, _) = phase_aligned_distance(&Signal::unit(3, 0), &Signal::unit(3, 2)).unwrap();
        assert!((dist - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn grid_search_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Signal::random_gaussian(7, &mut rng);
        let b = Signal::random_gaussian(7, &mut rng);
        let (dist, theta) = phase_aligned_distance(&a, &b).unwrap();
        let at = |t: f64| {
            a.entries()
                .iter()
                .zip(b.entries())
                .map(|(u, v)| (u - Complex64::from_polar(1.0, t) * v).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let n = 1_000_000;
        let best = (0..n)
            .map(|k| at(2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        assert!((best - dist).abs() < 1e-6);
        assert!((at(theta) - dist).abs() < 1e-12);
    }

    #[test]
    fn zero_estimate_is_zero_db() {
        let x0 = Signal::from_real(&[1.0, -2.0, 0.5]).unwrap();
        assert!(error_db(&Signal::zeros(3), &x0).unwrap().abs() < 1e-12);
        assert!(error_db(&x0, &Signal::zeros(3)).is_err());
    }

    #[test]
    fn small_perturbation_matches_hand_formula() {
        let x0 = Signal::from_real(&[3.0, 4.0]).unwrap();
        let eps = 1e-3;
        let x = Signal::from_real(&[3.0, 4.0 + eps]).unwrap();
        let expect = 20.0 * (eps / 5.0f64).log10();
        assert!((error_db(&x, &x0).unwrap() - expect).abs() < 1e-6);
    }
}
