//! Qubit `A` coupled to an unobserved classical register `B`.
//!
//! `rho_I^ab = sum_mu q_mu rho_mu (x) |c_mu><c_mu|`. The first measurement
//! reads the register, `Omega_mu = I_a (x) |c_mu><c_mu|`; the second is the
//! photodetection-like pair `M_+ = |-><+|`, `M_- = |-><-|` on `A`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::info::{projective_from_smoothing, ProjectiveBipartiteReport};
use crate::measurement::MeasurementSet;
use crate::qmat::{bloch_to_density, kron, BipartiteDims, BlochVector, CMatrix, DensityMatrix};
use crate::retrodiction::{smooth, SmoothingResult};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HybridConfig {
    weights: Vec<f64>,
    bloch_states: Vec<BlochVector>,
}

impl HybridConfig {
    pub fn new(weights: Vec<f64>, bloch_states: Vec<BlochVector>) -> Result<Self> {
        if weights.len() != bloch_states.len() {
            return Err(Error::LabelMismatch {
                expected: weights.len(),
                found: bloch_states.len(),
            });
        }
        if weights.len() < 2 {
            return Err(Error::Domain(
                "the classical register needs at least two macrostates".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(HybridConfig { weights, bloch_states })
    }

    /// Two macrostates with weights `(q, 1 - q)` and `rho_1 = I/2`, `rho_2 = |+><+|`.
    pub fn fig4(q: f64) -> Result<Self> {
        Self::two_state(q, BlochVector::new(0.0, 0.0, 0.0)?, BlochVector::new(1.0, 0.0, 0.0)?)
    }

    pub fn two_state(q: f64, first: BlochVector, second: BlochVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("weight q = {q} must lie in [0, 1]")));
        }
        Self::new(vec![q, 1.0 - q], vec![first, second])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bloch_states(&self) -> &[BlochVector] {
        &self.bloch_states
    }

    pub fn count(&self) -> usize {
        self.weights.len()
    }
}

/// Initial state, dimensions and both measurement sets on the joint space.
#[derive(Clone, Debug)]
pub struct HybridModel {
    pub rho_ab: DensityMatrix,
    pub dims: BipartiteDims,
    pub first: MeasurementSet,
    pub second: MeasurementSet,
}

/// `{M_+, M_-}` on the qubit alone.
pub fn photodetection() -> MeasurementSet {
    let one = Complex64::new(1.0, 0.0);
    let mut m_plus = CMatrix::zeros(2, 2);
    m_plus[(1, 0)] = one;
    let mut m_minus = CMatrix::zeros(2, 2);
    m_minus[(1, 1)] = one;
    MeasurementSet::new(vec![m_plus, m_minus], Some(vec![String::from("+"), String::from("-")]))
        .expect("photodetection pair is complete")
}

pub fn hybrid_build(cfg: &HybridConfig) -> Result<HybridModel> {
    let n = cfg.count();
    let dims = BipartiteDims::new(2, n);
    let mut m = CMatrix::zeros(dims.total(), dims.total());
    for (mu, (&q, b)) in cfg.weights.iter().zip(&cfg.bloch_states).enumerate() {
        let c = CMatrix::projector(&CMatrix::basis_ket(n, mu));
        m += &kron(&bloch_to_density(b).matrix().scale(q), &c);
    }
    let labels: Vec<String> = (1..=n).map(|mu| format!("{mu}")).collect();
    let first = MeasurementSet::computational(n)
        .tensor_identity_left(2)
        .with_labels(labels)?;
    let second = photodetection().tensor_identity_right(n);
    Ok(HybridModel {
        rho_ab: DensityMatrix::new(m)?,
        dims,
        first,
        second,
    })
}

/// Per-`q` values plotted for the hybrid model.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HybridRow {
    pub s_a_nonsel: f64,
    pub s_a_retro: f64,
    pub s_a_sel: f64,
    pub i_nonsel: f64,
    pub i_retro: f64,
    pub i_sel: f64,
    pub holevo_chi: f64,
    pub h_my: f64,
}

#[derive(Clone, Debug)]
pub struct HybridOutcome {
    pub model: HybridModel,
    pub smoothing: SmoothingResult,
    pub report: ProjectiveBipartiteReport,
    pub row: HybridRow,
}

pub fn hybrid_report(cfg: &HybridConfig) -> Result<HybridOutcome> {
    let model = hybrid_build(cfg)?;
    let smoothing = smooth(&model.rho_ab, &model.first, &model.second)?;
    let report = projective_from_smoothing(&smoothing, model.dims)?;
    let row = HybridRow {
        s_a_nonsel: report.s_nonselective_a,
        s_a_retro: report.s_retro_avg_a,
        s_a_sel: report.s_selective_avg_a,
        i_nonsel: report.i_nonselective,
        i_retro: report.i_retro_avg,
        i_sel: report.i_selective_avg,
        holevo_chi: report.holevo_chi,
        h_my: report.h_m_y,
    };
    Ok(HybridOutcome {
        model,
        smoothing,
        report,
        row,
    })
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::Domain("grid needs at least one point".into())),
        1 => Ok(vec![0.0]),
        _ => Ok((0..n).map(|i| i as f64 / (n - 1) as f64).collect()),
    }
}
