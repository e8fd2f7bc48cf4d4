//! Smoothed (retrodicted) quantum measurements and entropy bookkeeping.
//!
//! The crate is `no_std` with `alloc`. File formats and the command line
//! live in the `qsmooth` companion crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod experiments;
pub mod info;
pub mod measurement;
pub mod qmat;
pub mod quad;
pub mod retrodiction;
pub mod sampling;

pub use error::{Error, Result};
pub use measurement::{apply_nonselective, apply_selective, GaussianMeasurement, MeasurementSet, OutcomeEnsemble};
pub use qmat::{BipartiteDims, BlochVector, CMatrix, DensityMatrix, Subsystem};
