//! The qubit Gaussian model and the hybrid quantum-classical model.

pub mod hybrid;
pub mod qubit;

pub use hybrid::{
    hybrid_build, hybrid_report, photodetection, unit_grid, HybridConfig, HybridModel, HybridOutcome, HybridRow,
};
pub use qubit::{
    entropy_row, log_grid, qubit_entropy_curves, qubit_joint_density, qubit_outcome_probabilities, qubit_point,
    qubit_post_state, qubit_smoothed, second_kets, second_measurement, weak_value_row, weak_values, EntropyRow,
    QubitGaussianConfig, QubitPoint, QubitSmoothed, WeakValueRow, WeakValues, ROW_SANDWICH_SLACK,
};
