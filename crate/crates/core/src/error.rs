use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::qmat::Violation;

/// Errors produced by the numerical kernel and the measurement pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not fit together.
    Dimension {
        expected: usize,
        found: usize,
        context: &'static str,
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Input matrix was supposed to be Hermitian.
    NotHermitian { defect: f64 },
    /// A parameter lies outside its admissible range.
    Domain(String),
    /// `sum_m Omega_m^dagger Omega_m` differs from the identity.
    Completeness { defect: f64 },
    /// A matrix failed one or more density-matrix invariants.
    InvalidState(Vec<Violation>),
    /// Eigenvalue below the clamping window.
    NegativeEigenvalue { value: f64 },
    /// Probabilities are negative or do not sum to one.
    InvalidDistribution(String),
    /// Outcome tables and state lists disagree in length.
    LabelMismatch { expected: usize, found: usize },
    /// Structural precondition of an operation not met.
    Precondition(String),
    /// Eigendecomposition failed to converge.
    EigenNonConvergence,
    /// Adaptive quadrature hit its subdivision limit before meeting tolerance.
    QuadratureNonConvergence { best_estimate: f64, error_estimate: f64 },
    /// A matrix or probability contained NaN or infinity.
    NonFinite,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                expected,
                found,
                context,
            } => write!(f, "dimension mismatch in {context}: expected {expected}, found {found}"),
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, expected square"),
            Error::NotHermitian { defect } => write!(f, "matrix is not Hermitian (defect {defect:e})"),
            Error::Domain(msg) => write!(f, "parameter out of range: {msg}"),
            Error::Completeness { defect } => {
                write!(f, "measurement set is not complete (defect {defect:e})")
            }
            Error::InvalidState(v) => {
                write!(f, "invalid density matrix:")?;
                for violation in v {
                    write!(f, " {violation};")?;
                }
                Ok(())
            }
            Error::NegativeEigenvalue { value } => {
                write!(f, "state has eigenvalue {value:e} below the clamping window")
            }
            Error::InvalidDistribution(msg) => write!(f, "invalid probability distribution: {msg}"),
            Error::LabelMismatch { expected, found } => {
                write!(f, "outcome count mismatch: expected {expected}, found {found}")
            }
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::EigenNonConvergence => write!(f, "Hermitian eigendecomposition did not converge"),
            Error::QuadratureNonConvergence {
                best_estimate,
                error_estimate,
            } => write!(
                f,
                "quadrature did not converge (best estimate {best_estimate:e}, error {error_estimate:e})"
            ),
            Error::NonFinite => write!(f, "non-finite value encountered"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
