//! Phase retrieval from local correlation measurements
//! `y_{l,j} = |<S_l x, m_j>|^2` with masks supported on `delta` entries.
//!
//! Recovery runs in two stages. The measurements are linear in the banded
//! lifted matrix `X = T_delta(x x^*)`, which [`lifting::LiftedSolver`]
//! inverts in `O(d delta^2 + delta d log d)` time. The phases of `x` are then
//! read off the top eigenvector of the entrywise-normalized band
//! ([`sync`]), and the magnitudes from the diagonal or from small dense
//! blocks of `X`.
//!
//! ```
//! use blockpr::prelude::*;
//! use rand::SeedableRng;
//!
//! let (d, delta) = (32, 4);
//! let masks = build_masks(MaskKind::UnitPair, d, delta)?;
//! let x = Signal::random_gaussian(d, &mut rand_chacha::ChaCha20Rng::seed_from_u64(1));
//! let y = forward_measure(&x, &masks)?;
//! let solver = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed)?;
//! let report = recover(&y, &solver, &RecoveryConfig::default(), Some(&x))?;
//! assert!(report.error_db.unwrap() < -160.0);
//! # Ok::<(), blockpr::Error>(())
//! ```
//!
//! Indices are 0-based everywhere and `(S_l x)_n = x_{(n + l) mod d}`.

pub mod banded;
pub mod baselines;
pub mod bounds;
pub mod cli;
pub mod cyclic;
pub mod dft;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod lifting;
pub mod masks;
pub mod metrics;
pub mod signal;
pub mod spectral;
pub mod sync;

pub use error::{Error, Result};

/// The types and functions most programs need.
pub mod prelude {
    pub use crate::banded::BandedHermitian;
    pub use crate::error::{Error, Result};
    pub use crate::lifting::{forward_measure, LiftedSolver, MeasurementGrid, SolverStrategy};
    pub use crate::masks::{build_masks, MaskFamily, MaskKind};
    pub use crate::metrics::{error_db, relative_error};
    pub use crate::signal::Signal;
    pub use crate::sync::{recover, MagnitudeMethod, RecoveryConfig, RecoveryReport};
}
