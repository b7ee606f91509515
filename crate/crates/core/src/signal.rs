//! Complex signals, the `sgn` normalization, circular shifts, and the
//! CSV/JSON signal file formats.
//!
//! Indexing is 0-based throughout the crate: entry `j` here is entry `j + 1`
//! in 1-based notation. Shifts act as `(S_l x)_j = x_{(j + l) mod d}`.
//!
//! File formats:
//! * CSV with header `index,re,im`, one row per entry in index order.
//! * JSON array of `[re, im]` pairs.
//!
//! Both print `f64` in shortest round-trip form, so a write/read cycle is
//! exact.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Entrywise phase normalization. `sgn(0) = 1`; every nonzero input maps to
/// `z / |z|`, however small.
#[inline]
pub fn sgn(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Reduce a signed shift modulo `d` into `0..d`.
#[inline]
pub fn wrap(index: isize, d: usize) -> usize {
    index.rem_euclid(d as isize) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    entries: Vec<Complex64>,
}

impl Signal {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("signal length must be >= 1".into()));
        }
        if let Some(j) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("signal entry {j} is not finite")));
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "signal length must be >= 1");
        Self {
            entries: vec![Complex64::new(0.0, 0.0); d],
        }
    }

    pub fn ones(d: usize) -> Self {
        assert!(d >= 1, "signal length must be >= 1");
        Self {
            entries: vec![Complex64::new(1.0, 0.0); d],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn unit(d: usize, index: usize) -> Self {
        let mut s = Self::zeros(d);
        s.entries[index] = Complex64::new(1.0, 0.0);
        s
    }

    /// i.i.d. circular complex Gaussian entries with `E|x_j|^2 = 1`.
    pub fn random_gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        assert!(d >= 1, "signal length must be >= 1");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let entries = (0..d)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * s, im * s)
            })
            .collect();
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.norm()).collect()
    }

    /// Entrywise `sgn`, so that `x_j = |x_j| * phases_j`.
    pub fn phases(&self) -> Vec<Complex64> {
        self.entries.iter().copied().map(sgn).collect()
    }

    pub fn phase_signal(&self) -> Signal {
        Signal {
            entries: self.phases(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_magnitude(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal {
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    /// `<self, other> = sum_j self_j * conj(other_j)`.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        check_dim("signal", self.len(), other.len())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn shifted(&self, shift: isize) -> Signal {
        circular_shift(self, shift)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (index, z) in self.entries.iter().enumerate() {
            wr.serialize(SignalRow {
                index,
                re: z.re,
                im: z.im,
            })?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut rows: Vec<SignalRow> = Vec::new();
        for row in rd.deserialize() {
            rows.push(row?);
        }
        rows.sort_by_key(|r| r.index);
        for (expect, row) in rows.iter().enumerate() {
            if row.index != expect {
                return Err(Error::Parse(format!(
                    "signal CSV index {} is missing or duplicated",
                    expect
                )));
            }
        }
        Self::new(rows.into_iter().map(|r| Complex64::new(r.re, r.im)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite floats always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = Complex64;
    fn index(&self, j: usize) -> &Complex64 {
        &self.entries[j]
    }
}

impl Serialize for Signal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.entries.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Signal::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl From<Signal> for Vec<Complex64> {
    fn from(s: Signal) -> Self {
        s.entries
    }
}

#[derive(Serialize, Deserialize)]
struct SignalRow {
    index: usize,
    re: f64,
    im: f64,
}

/// `(S_l x)_j = x_{(j + l) mod d}`; any integer shift is reduced mod `d`.
pub fn circular_shift(x: &Signal, shift: isize) -> Signal {
    let d = x.len();
    let s = wrap(shift, d);
    let entries = (0..d).map(|j| x.entries[(j + s) % d]).collect();
    Signal { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sgn_of_zero_is_one() {
        assert_eq!(sgn(c(0.0, 0.0)), c(1.0, 0.0));
        assert_eq!(sgn(c(0.0, -2.0)), c(0.0, -1.0));
        // tiny but nonzero inputs are not thresholded
        let z = sgn(c(1e-300, 1e-300));
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_identity_and_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Signal::random_gaussian(7, &mut rng);
        assert_eq!(circular_shift(&x, 0), x);
        assert_eq!(circular_shift(&x, 7), x);
        assert_eq!(circular_shift(&x, -7), x);
    }

    #[test]
    fn shift_unit_vector_wraps() {
        // (S_1 e_0)_j = (e_0)_{j+1}, nonzero at j = d - 1
        let e0 = Signal::unit(4, 0);
        assert_eq!(circular_shift(&e0, 1), Signal::unit(4, 3));
        assert_eq!(circular_shift(&e0, -1), Signal::unit(4, 1));
    }

    #[test]
    fn shift_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Signal::random_gaussian(9, &mut rng);
        for a in -10..10 {
            for b in [-4isize, 0, 3, 11] {
                assert_eq!(x.shifted(b).shifted(a), x.shifted(a + b));
            }
        }
    }

    #[test]
    fn magnitude_times_phase_recovers_entries() {
        let x = Signal::new(vec![c(3.0, 4.0), c(0.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let m = x.magnitudes();
        let p = x.phases();
        for j in 0..3 {
            assert!((p[j] * m[j] - x[j]).norm() < 1e-15);
        }
        assert_eq!(p[1], c(1.0, 0.0));
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(Signal::new(vec![]).is_err());
        assert!(Signal::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn csv_and_json_round_trip_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Signal::random_gaussian(33, &mut rng);
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("index,re,im\n"));
        assert_eq!(Signal::read_csv(buf.as_slice()).unwrap(), x);
        assert_eq!(Signal::from_json(&x.to_json()).unwrap(), x);
    }
}
