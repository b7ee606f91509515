//! Compactly supported measurement masks.
//!
//! Every mask in a family is supported on indices `0..delta`. The two
//! deterministic constructions are:
//!
//! * `Exponential`: windowed Fourier masks with exponential decay,
//!   `(m_j)_n = e^{-(n+1)/a} / (2 delta - 1)^{1/4} * e^{2 pi i n j / (2 delta - 1)}`
//!   for `n < delta` (0-based `n`, `j`), `a = max(4, (delta - 1) / 2)` by default.
//! * `UnitPair`: `m_0 = e_0`, `m_{2k-1} = e_0 + e_k`, `m_{2k} = e_0 + i e_k`
//!   for `k = 1..delta` (0-based mask index).
//!
//! Both yield `K = 2 delta - 1` masks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaskKind {
    Exponential { a: f64 },
    UnitPair,
    Ptycho,
    Custom,
}

impl MaskKind {
    /// The exponential family with the default decay `a = max(4, (delta - 1) / 2)`.
    pub fn exponential(delta: usize) -> Self {
        MaskKind::Exponential {
            a: default_decay(delta),
        }
    }
}

pub fn default_decay(delta: usize) -> f64 {
    f64::max(4.0, (delta as f64 - 1.0) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskFamily {
    d: usize,
    delta: usize,
    kind: MaskKind,
    masks: Vec<Vec<Complex64>>,
}

impl MaskFamily {
    /// Wrap arbitrary masks. Every mask must have length `d` and vanish
    /// exactly outside `0..delta`.
    pub fn custom(masks: Vec<Vec<Complex64>>, delta: usize, kind: MaskKind) -> Result<Self> {
        let d = masks
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("mask family is empty".into()))?;
        if delta < 1 || delta > d {
            return Err(Error::InvalidParameter(format!(
                "delta must satisfy 1 <= delta <= d (delta = {delta}, d = {d})"
            )));
        }
        for (j, m) in masks.iter().enumerate() {
            if m.len() != d {
                return Err(Error::DimensionMismatch {
                    what: "mask length",
                    expected: d,
                    found: m.len(),
                });
            }
            if m[delta..].iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "mask {j} has entries outside its support 0..{delta}"
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("mask {j} has non-finite entries")));
            }
        }
        Ok(Self {
            d,
            delta,
            kind,
            masks,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Number of masks `K`.
    pub fn count(&self) -> usize {
        self.masks.len()
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn mask(&self, j: usize) -> &[Complex64] {
        &self.masks[j]
    }

    /// The first `delta` entries of mask `j`.
    pub fn support(&self, j: usize) -> &[Complex64] {
        &self.masks[j][..self.delta]
    }

    pub fn masks(&self) -> &[Vec<Complex64>] {
        &self.masks
    }
}

/// Build one of the deterministic constructions. `Ptycho` and `Custom`
/// families are produced by [`crate::fourier::ptycho_masks`] and
/// [`MaskFamily::custom`] instead.
pub fn build_masks(kind: MaskKind, d: usize, delta: usize) -> Result<MaskFamily> {
    if delta < 1 || delta > d {
        return Err(Error::InvalidParameter(format!(
            "delta must satisfy 1 <= delta <= d (delta = {delta}, d = {d})"
        )));
    }
    let k = 2 * delta - 1;
    let zero = Complex64::new(0.0, 0.0);
    let masks = match kind {
        MaskKind::Exponential { a } => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!("decay a = {a} must be positive")));
            }
            let scale = (k as f64).powf(-0.25);
            (0..k)
                .map(|j| {
                    let mut m = vec![zero; d];
                    for (n, entry) in m.iter_mut().enumerate().take(delta) {
                        let amp = (-((n + 1) as f64) / a).exp() * scale;
                        // reduce n*j mod K before forming the angle
                        let r = (n * j) % k;
                        let theta = 2.0 * std::f64::consts::PI * r as f64 / k as f64;
                        *entry = Complex64::from_polar(amp, theta);
                    }
                    m
                })
                .collect()
        }
        MaskKind::UnitPair => {
            let one = Complex64::new(1.0, 0.0);
            let i = Complex64::new(0.0, 1.0);
            let mut masks = Vec::with_capacity(k);
            let mut m0 = vec![zero; d];
            m0[0] = one;
            masks.push(m0);
            for s in 1..delta {
                let mut re = vec![zero; d];
                re[0] = one;
                re[s] = one;
                let mut im = vec![zero; d];
                im[0] = one;
                im[s] = i;
                masks.push(re);
                masks.push(im);
            }
            masks
        }
        MaskKind::Ptycho | MaskKind::Custom => {
            return Err(Error::InvalidParameter(
                "build_masks only constructs Exponential and UnitPair families".into(),
            ))
        }
    };
    Ok(MaskFamily {
        d,
        delta,
        kind,
        masks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_pair_delta2_is_exact() {
        let f = build_masks(MaskKind::UnitPair, 5, 2).unwrap();
        assert_eq!(f.count(), 3);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(f.mask(0), &[one, z, z, z, z]);
        assert_eq!(f.mask(1), &[one, one, z, z, z]);
        assert_eq!(f.mask(2), &[one, i, z, z, z]);
    }

    #[test]
    fn exponential_degenerate_width() {
        let f = build_masks(MaskKind::exponential(1), 6, 1).unwrap();
        assert_eq!(f.count(), 1);
        assert!((f.mask(0)[0] - Complex64::new((-0.25f64).exp(), 0.0)).norm() < 1e-15);
        assert!(f.mask(0)[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn default_decay_rule() {
        assert_eq!(default_decay(3), 4.0);
        assert_eq!(default_decay(9), 4.0);
        assert_eq!(default_decay(11), 5.0);
        assert_eq!(MaskKind::exponential(21), MaskKind::Exponential { a: 10.0 });
    }

    #[test]
    fn supports_are_respected() {
        for delta in 1..6 {
            for kind in [MaskKind::exponential(delta), MaskKind::UnitPair] {
                let f = build_masks(kind, 12, delta).unwrap();
                assert_eq!(f.count(), 2 * delta - 1);
                for m in f.masks() {
                    assert!(m[delta..].iter().all(|z| z.norm() == 0.0));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(build_masks(MaskKind::UnitPair, 4, 0).is_err());
        assert!(build_masks(MaskKind::UnitPair, 4, 5).is_err());
        assert!(build_masks(MaskKind::Custom, 4, 2).is_err());
    }

    #[test]
    fn custom_rejects_support_violation() {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert!(MaskFamily::custom(vec![vec![one, z, one]], 2, MaskKind::Custom).is_err());
        assert!(MaskFamily::custom(vec![vec![one, one, z]], 2, MaskKind::Custom).is_ok());
    }
}
