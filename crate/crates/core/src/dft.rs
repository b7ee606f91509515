//! The single DFT convention shared by every module:
//!
//! | transform | definition (0-based)                                   |
//! |-----------|--------------------------------------------------------|
//! | forward   | `X_k = sum_n x_n e^{-2 pi i k n / d}` (unnormalized)   |
//! | inverse   | `x_n = (1/d) sum_k X_k e^{+2 pi i k n / d}`            |
//! | unitary F | `F_{jk} = e^{+2 pi i j k / d} / sqrt(d)`               |

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse including the `1/d` factor.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.inverse_in_place(&mut buf);
        buf
    }
}

/// `e^{2 pi i num / den}` with the numerator reduced first.
#[inline]
pub fn root_of_unity(num: i64, den: usize) -> Complex64 {
    let r = num.rem_euclid(den as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r / den as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_matches_definition() {
        let x: Vec<Complex64> = (0..6).map(|n| Complex64::new(n as f64, (n * n) as f64 * 0.1)).collect();
        let dft = Dft::new(6);
        let fx = dft.forward(&x);
        for k in 0..6 {
            let direct: Complex64 = (0..6).map(|n| x[n] * root_of_unity(-((k * n) as i64), 6)).sum();
            assert!((fx[k] - direct).norm() < 1e-12);
        }
        let back = dft.inverse(&fx);
        for n in 0..6 {
            assert!((back[n] - x[n]).norm() < 1e-12);
        }
    }
}
