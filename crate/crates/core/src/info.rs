//! Entropies, mutual informations and the inequality reports built on them.
//!
//! All quantities are in nats.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measurement::{MeasurementSet, ZERO_PROBABILITY};
use crate::qmat::{
    hermitian_eigenvalues, kron, partial_trace, reduce, BipartiteDims, CMatrix, DensityMatrix, Subsystem,
};
use crate::retrodiction::{retrodict, smooth, JointDistribution, SmoothingResult};

/// An inequality `lhs >= rhs` counts as satisfied when `lhs - rhs >= -INEQUALITY_TOL`.
pub const INEQUALITY_TOL: f64 = 1e-8;
/// Default tolerance for identities (equalities between independently computed sides).
pub const IDENTITY_TOL: f64 = 1e-9;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-10;
/// Largest total dimension accepted by [`tripartite_checks`].
pub const MAX_TRIPARTITE_DIM: usize = 64;

/// `-Tr[rho ln rho]` of a Hermitian unit-trace matrix.
fn entropy_of_matrix(m: &CMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in hermitian_eigenvalues(m)? {
        if lambda < -EIGEN_CLAMP {
            return Err(Error::NegativeEigenvalue { value: lambda });
        }
        if lambda > 0.0 {
            s -= lambda * libm::log(lambda);
        }
    }
    Ok(s.max(0.0))
}

/// `S[rho] = -Tr[rho ln rho]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_matrix(rho.matrix())
}

fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        p * libm::log(p)
    } else {
        0.0
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    let mut total = 0.0;
    for &x in p {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        if x < -1e-12 {
            return Err(Error::InvalidDistribution(format!("negative entry {x:e}")));
        }
        total += x;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(())
}

/// `H[k] = -sum_k p(k) ln p(k)`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(-p.iter().map(|&x| xlnx(x)).sum::<f64>())
}

/// `H[m, y]`.
pub fn joint_shannon(joint: &JointDistribution) -> f64 {
    -joint.table().iter().flatten().map(|&p| xlnx(p)).sum::<f64>()
}

/// `H[m|y] = -sum_{y,m} p(y,m) ln p(m|y)`.
pub fn conditional_shannon(joint: &JointDistribution) -> f64 {
    let p_y = joint.marginal_y();
    let mut h = 0.0;
    for (row, &py) in joint.table().iter().zip(&p_y) {
        if py < ZERO_PROBABILITY {
            continue;
        }
        for &p in row {
            if p > 0.0 {
                h -= p * libm::log(p / py);
            }
        }
    }
    h.max(0.0)
}

/// `H[m:y] = H[m] + H[y] - H[m,y]`.
pub fn classical_mutual(joint: &JointDistribution) -> f64 {
    let hm = -joint.marginal_m().iter().map(|&p| xlnx(p)).sum::<f64>();
    let hy = -joint.marginal_y().iter().map(|&p| xlnx(p)).sum::<f64>();
    hm + hy - joint_shannon(joint)
}

/// `I[rho^ab] = S[rho^a] + S[rho^b] - S[rho^ab]`.
pub fn quantum_mutual(rho_ab: &DensityMatrix, dims: BipartiteDims) -> Result<f64> {
    dims.check(rho_ab.dim(), "quantum_mutual")?;
    let sa = von_neumann_entropy(&partial_trace(rho_ab, dims, Subsystem::A)?)?;
    let sb = von_neumann_entropy(&partial_trace(rho_ab, dims, Subsystem::B)?)?;
    Ok(sa + sb - von_neumann_entropy(rho_ab)?)
}

/// `chi = S[sum_k p_k rho_k] - sum_k p_k S[rho_k]`.
pub fn holevo_chi(probs: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    if probs.len() != states.len() {
        return Err(Error::LabelMismatch {
            expected: probs.len(),
            found: states.len(),
        });
    }
    check_distribution(probs)?;
    let refs: Vec<&DensityMatrix> = states.iter().collect();
    let mix = DensityMatrix::mixture(probs, &refs)?;
    let mut avg = 0.0;
    for (&p, s) in probs.iter().zip(states) {
        if p > 0.0 {
            avg += p * von_neumann_entropy(s)?;
        }
    }
    Ok(von_neumann_entropy(&mix)? - avg)
}

/// `sum_k p_k f(rho_k)` over the states that are present.
fn weighted<F>(probs: &[f64], states: &[Option<DensityMatrix>], mut f: F) -> Result<f64>
where
    F: FnMut(&DensityMatrix) -> Result<f64>,
{
    let mut acc = 0.0;
    for (&p, s) in probs.iter().zip(states) {
        if let Some(s) = s {
            acc += p * f(s)?;
        }
    }
    Ok(acc)
}

/// One checked inequality `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub context: String,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, context: impl Into<String>) -> Self {
        let margin = lhs - rhs;
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            margin,
            satisfied: margin >= -INEQUALITY_TOL,
            context: context.into(),
        }
    }
}

/// One checked identity `lhs == rhs`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub tolerance: f64,
    pub holds: bool,
    pub context: String,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, context: impl Into<String>) -> Self {
        let defect = (lhs - rhs).abs();
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            defect,
            tolerance,
            holds: defect <= tolerance,
            context: context.into(),
        }
    }
}

/// Entropies of the three stages and the sandwich/gap checks.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CentralReport {
    /// `S[rho_Omega]`.
    pub s_nonselective: f64,
    /// `sum_y p(y) S[rho_y]`.
    pub s_retro_avg: f64,
    /// `sum_m p(m) S[rho_m]`.
    pub s_selective_avg: f64,
    pub h_y: f64,
    pub h_m: f64,
    pub reports: Vec<InequalityReport>,
}

impl CentralReport {
    pub fn all_satisfied(&self) -> bool {
        self.reports.iter().all(|r| r.satisfied)
    }
}

/// `(S[rho_Omega], sum_y p(y) S[rho_y], sum_m p(m) S[rho_m])` after mapping
/// each state through `view` (identity or a partial trace).
fn stage_entropies<V>(res: &SmoothingResult, view: V) -> Result<(f64, f64, f64)>
where
    V: Fn(&DensityMatrix) -> Result<DensityMatrix>,
{
    let s_omega = von_neumann_entropy(&view(&res.nonselective_state)?)?;
    let s_retro = weighted(&res.p_y, &res.smoothed_states, |s| von_neumann_entropy(&view(s)?))?;
    let s_sel = weighted(res.p_m(), &res.ensemble.states, |s| von_neumann_entropy(&view(s)?))?;
    Ok((s_omega, s_retro, s_sel))
}

fn central_from_entropies(s_omega: f64, s_retro: f64, s_sel: f64, h_y: f64, h_m: f64, tag: &str) -> CentralReport {
    let name = |base: &str| {
        if tag.is_empty() {
            base.to_string()
        } else {
            format!("{base}[{tag}]")
        }
    };
    let reports = vec![
        InequalityReport::new(
            name("central_upper"),
            s_omega,
            s_retro,
            "S[rho_Omega] >= sum_y p(y) S[rho_y]",
        ),
        InequalityReport::new(
            name("central_lower"),
            s_retro,
            s_sel,
            "sum_y p(y) S[rho_y] >= sum_m p(m) S[rho_m]",
        ),
        InequalityReport::new(
            name("hy_upper_bound"),
            h_y,
            s_omega - s_retro,
            "H[y] >= S[rho_Omega] - sum_y p(y) S[rho_y]",
        ),
        InequalityReport::new(
            name("hm_lower_bound"),
            h_m,
            s_retro - s_sel,
            "H[m] >= sum_y p(y) S[rho_y] - sum_m p(m) S[rho_m]",
        ),
    ];
    CentralReport {
        s_nonselective: s_omega,
        s_retro_avg: s_retro,
        s_selective_avg: s_sel,
        h_y,
        h_m,
        reports,
    }
}

/// Central report from an already smoothed experiment.
pub fn central_from_smoothing(res: &SmoothingResult) -> Result<CentralReport> {
    let (a, b, c) = stage_entropies(res, |s| Ok(s.clone()))?;
    let h_y = shannon_entropy(&res.p_y)?;
    let h_m = shannon_entropy(res.p_m())?;
    Ok(central_from_entropies(a, b, c, h_y, h_m, ""))
}

/// Evaluates `S[rho_Omega] >= sum_y p(y) S[rho_y] >= sum_m p(m) S[rho_m]`
/// together with the Shannon bounds on both gaps.
pub fn central_report(rho: &DensityMatrix, first: &MeasurementSet, second: &MeasurementSet) -> Result<CentralReport> {
    central_from_smoothing(&smooth(rho, first, second)?)
}

/// The same checks on the reduced states of one subsystem.
pub fn subsystem_central_from_smoothing(
    res: &SmoothingResult,
    dims: BipartiteDims,
    keep: Subsystem,
) -> Result<CentralReport> {
    let (a, b, c) = stage_entropies(res, |s| partial_trace(s, dims, keep))?;
    let h_y = shannon_entropy(&res.p_y)?;
    let h_m = shannon_entropy(res.p_m())?;
    let tag = match keep {
        Subsystem::A => "a",
        Subsystem::B => "b",
    };
    Ok(central_from_entropies(a, b, c, h_y, h_m, tag))
}

pub fn subsystem_central_report(
    rho_ab: &DensityMatrix,
    dims: BipartiteDims,
    first: &MeasurementSet,
    second: &MeasurementSet,
    keep: Subsystem,
) -> Result<CentralReport> {
    dims.check(rho_ab.dim(), "subsystem_central_report")?;
    subsystem_central_from_smoothing(&smooth(rho_ab, first, second)?, dims, keep)
}

/// Mutual informations of the three stages and the two entropy bounds on
/// their differences.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MutualReport {
    /// `I[rho_Omega^ab]`.
    pub i_nonselective: f64,
    /// `sum_y p(y) I[rho_y^ab]`.
    pub i_retro_avg: f64,
    /// `sum_m p(m) I[rho_m^ab]`.
    pub i_selective_avg: f64,
    pub s_nonselective: f64,
    pub s_retro_avg: f64,
    pub s_selective_avg: f64,
    pub reports: Vec<InequalityReport>,
}

pub fn mutual_from_smoothing(res: &SmoothingResult, dims: BipartiteDims) -> Result<MutualReport> {
    let (s_omega, s_retro, s_sel) = stage_entropies(res, |s| Ok(s.clone()))?;
    let i_omega = quantum_mutual(&res.nonselective_state, dims)?;
    let i_retro = weighted(&res.p_y, &res.smoothed_states, |s| quantum_mutual(s, dims))?;
    let i_sel = weighted(res.p_m(), &res.ensemble.states, |s| quantum_mutual(s, dims))?;
    let reports = vec![
        InequalityReport::new(
            "mutual_nonselective_retro",
            s_omega - s_retro,
            i_omega - i_retro,
            "S[rho_Omega^ab] - sum_y p(y) S[rho_y^ab] >= I[rho_Omega^ab] - sum_y p(y) I[rho_y^ab]",
        ),
        InequalityReport::new(
            "mutual_retro_selective",
            s_retro - s_sel,
            i_retro - i_sel,
            "sum_y p(y) S[rho_y^ab] - sum_m p(m) S[rho_m^ab] >= sum_y p(y) I[rho_y^ab] - sum_m p(m) I[rho_m^ab]",
        ),
    ];
    Ok(MutualReport {
        i_nonselective: i_omega,
        i_retro_avg: i_retro,
        i_selective_avg: i_sel,
        s_nonselective: s_omega,
        s_retro_avg: s_retro,
        s_selective_avg: s_sel,
        reports,
    })
}

/// Upper bounds on the change of mutual information across the stages.
pub fn mutual_report(
    rho_ab: &DensityMatrix,
    dims: BipartiteDims,
    first: &MeasurementSet,
    second: &MeasurementSet,
) -> Result<MutualReport> {
    dims.check(rho_ab.dim(), "mutual_report")?;
    mutual_from_smoothing(&smooth(rho_ab, first, second)?, dims)
}

/// Entropy and information bookkeeping when the first measurement projects
/// subsystem `B` onto an orthonormal basis and the second acts on `A`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectiveBipartiteReport {
    pub h_m: f64,
    pub h_y: f64,
    /// `H[m|y]`.
    pub h_m_given_y: f64,
    /// `H[m:y]`.
    pub h_m_y: f64,
    pub s_nonselective_ab: f64,
    pub s_retro_avg_ab: f64,
    pub s_selective_avg_ab: f64,
    pub s_nonselective_a: f64,
    pub s_retro_avg_a: f64,
    pub s_selective_avg_a: f64,
    pub s_nonselective_b: f64,
    pub s_retro_avg_b: f64,
    pub s_selective_avg_b: f64,
    pub i_nonselective: f64,
    pub i_retro_avg: f64,
    pub i_selective_avg: f64,
    /// `S[sum_m p(m) rho_m^a] - sum_m p(m) S[rho_m^a]`.
    pub holevo_chi: f64,
    /// `S[sum_y p(y) rho_y^a] - sum_y p(y) S[rho_y^a]`.
    pub retro_holevo: f64,
    pub identities: Vec<IdentityReport>,
    pub reports: Vec<InequalityReport>,
}

impl ProjectiveBipartiteReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|r| r.holds) && self.reports.iter().all(|r| r.satisfied)
    }
}

/// Builds `{I_a (x) |m><m|}` from the columns of `basis_b` and `{M_y (x) I_b}`
/// from `second_a`, then evaluates the projective report.
pub fn projective_bipartite_report(
    rho_ab: &DensityMatrix,
    dims: BipartiteDims,
    basis_b: &CMatrix,
    second_a: &MeasurementSet,
) -> Result<ProjectiveBipartiteReport> {
    dims.check(rho_ab.dim(), "projective_bipartite_report")?;
    if basis_b.rows() != dims.b || basis_b.cols() != dims.b {
        return Err(Error::Dimension {
            expected: dims.b,
            found: basis_b.rows(),
            context: "projective_bipartite_report basis",
        });
    }
    if basis_b.unitarity_defect() > 1e-10 {
        return Err(Error::Precondition("basis of B is not orthonormal".into()));
    }
    if second_a.dim() != dims.a {
        return Err(Error::Dimension {
            expected: dims.a,
            found: second_a.dim(),
            context: "projective_bipartite_report second measurement",
        });
    }
    let first = MeasurementSet::projective(basis_b)?.tensor_identity_left(dims.a);
    let second = second_a.tensor_identity_right(dims.b);
    projective_from_smoothing(&smooth(rho_ab, &first, &second)?, dims)
}

/// Like [`projective_bipartite_report`] but with full operator sets, which
/// must have the form `I_a (x) P_m` (rank-one projectors `P_m`) and
/// `M_y (x) I_b`.
pub fn projective_bipartite_from_sets(
    rho_ab: &DensityMatrix,
    dims: BipartiteDims,
    first: &MeasurementSet,
    second: &MeasurementSet,
) -> Result<ProjectiveBipartiteReport> {
    dims.check(rho_ab.dim(), "projective_bipartite_from_sets")?;
    let id_a = CMatrix::identity(dims.a);
    let id_b = CMatrix::identity(dims.b);
    for (m, op) in first.operators().iter().enumerate() {
        let p = CMatrix::from_fn(dims.b, dims.b, |i, j| op[(i, j)]);
        let rank_one =
            (&p * &p).max_abs_diff(&p) < 1e-10 && p.hermiticity_defect() < 1e-10 && (p.trace().re - 1.0).abs() < 1e-10;
        if !rank_one || kron(&id_a, &p).max_abs_diff(op) > 1e-10 {
            return Err(Error::Precondition(format!(
                "first-measurement operator {m} is not I_a (x) |m><m|"
            )));
        }
    }
    for (y, op) in second.operators().iter().enumerate() {
        let m = reduce(op, &[dims.a, dims.b], &[0])?.scale(1.0 / dims.b as f64);
        if kron(&m, &id_b).max_abs_diff(op) > 1e-10 {
            return Err(Error::Precondition(format!(
                "second-measurement operator {y} does not act on A alone"
            )));
        }
    }
    projective_from_smoothing(&smooth(rho_ab, first, second)?, dims)
}

/// Projective report from an already smoothed experiment; the operator structure is not re-checked.
pub fn projective_from_smoothing(res: &SmoothingResult, dims: BipartiteDims) -> Result<ProjectiveBipartiteReport> {
    let p_m = res.p_m();
    let p_y = &res.p_y;
    let h_m = shannon_entropy(p_m)?;
    let h_y = shannon_entropy(p_y)?;
    let h_m_given_y = conditional_shannon(&res.joint);
    let h_m_y = classical_mutual(&res.joint);

    let (s_omega_ab, s_retro_ab, s_sel_ab) = stage_entropies(res, |s| Ok(s.clone()))?;
    let (s_omega_a, s_retro_a, s_sel_a) = stage_entropies(res, |s| partial_trace(s, dims, Subsystem::A))?;
    let (s_omega_b, s_retro_b, s_sel_b) = stage_entropies(res, |s| partial_trace(s, dims, Subsystem::B))?;

    let i_omega = quantum_mutual(&res.nonselective_state, dims)?;
    let i_retro = weighted(p_y, &res.smoothed_states, |s| quantum_mutual(s, dims))?;
    let i_sel = weighted(p_m, &res.ensemble.states, |s| quantum_mutual(s, dims))?;

    // The Holevo mixture is rebuilt from the reduced selective states rather
    // than taken from rho_Omega^a.
    let mut mix_a = CMatrix::zeros(dims.a, dims.a);
    for (_, p, s) in res.ensemble.reachable() {
        mix_a += &partial_trace(s, dims, Subsystem::A)?.matrix().scale(p);
    }
    let holevo = entropy_of_matrix(&mix_a)? - s_sel_a;
    let mut mix_y = CMatrix::zeros(dims.a, dims.a);
    for (_, p, s) in res.reachable_smoothed() {
        mix_y += &partial_trace(s, dims, Subsystem::A)?.matrix().scale(p);
    }
    let retro_holevo = entropy_of_matrix(&mix_y)? - s_retro_a;

    let tol = IDENTITY_TOL;
    let identities = vec![
        IdentityReport::new(
            "sab_nonselective",
            s_omega_ab,
            h_m + s_sel_a,
            tol,
            "S[rho_Omega^ab] = H[m] + sum_m p(m) S[rho_m^a]",
        ),
        IdentityReport::new(
            "sab_smoothed",
            s_retro_ab,
            h_m_given_y + s_sel_a,
            tol,
            "sum_y p(y) S[rho_y^ab] = H[m|y] + sum_m p(m) S[rho_m^a]",
        ),
        IdentityReport::new(
            "sab_selective",
            s_sel_ab,
            s_sel_a,
            tol,
            "sum_m p(m) S[rho_m^ab] = sum_m p(m) S[rho_m^a]",
        ),
        IdentityReport::new(
            "selective_mutual_zero",
            i_sel,
            0.0,
            tol,
            "sum_m p(m) I[rho_m^ab] = 0 for rho_m^ab = rho_m^a (x) |m><m|",
        ),
        IdentityReport::new(
            "mutual_gap_nonselective_retro",
            i_omega - i_retro,
            s_omega_a - s_retro_a,
            tol,
            "I[rho_Omega^ab] - sum_y p(y) I[rho_y^ab] = S[rho_Omega^a] - sum_y p(y) S[rho_y^a]",
        ),
        IdentityReport::new(
            "mutual_gap_retro_selective",
            i_retro - i_sel,
            s_retro_a - s_sel_a,
            tol,
            "sum_y p(y) I[rho_y^ab] - sum_m p(m) I[rho_m^ab] = sum_y p(y) S[rho_y^a] - sum_m p(m) S[rho_m^a]",
        ),
        IdentityReport::new(
            "sab_gap_upper",
            s_omega_ab - s_retro_ab,
            h_m_y,
            tol,
            "S[rho_Omega^ab] - sum_y p(y) S[rho_y^ab] = H[m:y]",
        ),
        IdentityReport::new(
            "sab_gap_lower",
            s_retro_ab - s_sel_ab,
            h_m_given_y,
            tol,
            "sum_y p(y) S[rho_y^ab] - sum_m p(m) S[rho_m^ab] = H[m|y]",
        ),
        IdentityReport::new("sb_nonselective", s_omega_b, h_m, tol, "S[rho_Omega^b] = H[m]"),
        IdentityReport::new(
            "sb_smoothed",
            s_retro_b,
            h_m_given_y,
            tol,
            "sum_y p(y) S[rho_y^b] = H[m|y]",
        ),
        IdentityReport::new("sb_selective", s_sel_b, 0.0, tol, "sum_m p(m) S[rho_m^b] = 0"),
    ];

    let reports = vec![
        InequalityReport::new(
            "positive2_upper",
            h_m_y,
            i_omega - i_retro,
            "H[m:y] >= I[rho_Omega^ab] - sum_y p(y) I[rho_y^ab]",
        ),
        InequalityReport::new(
            "positive2_lower",
            s_omega_a - s_retro_a,
            0.0,
            "S[rho_Omega^a] - sum_y p(y) S[rho_y^a] >= 0",
        ),
        InequalityReport::new(
            "positive1_upper",
            h_m_given_y,
            i_retro - i_sel,
            "H[m|y] >= sum_y p(y) I[rho_y^ab] - sum_m p(m) I[rho_m^ab]",
        ),
        InequalityReport::new(
            "positive1_lower",
            s_retro_a - s_sel_a,
            0.0,
            "sum_y p(y) S[rho_y^a] - sum_m p(m) S[rho_m^a] >= 0",
        ),
        InequalityReport::new("holevo", holevo, h_m_y, "chi >= H[m:y]"),
        InequalityReport::new(
            "retro_holevo",
            h_m_y,
            retro_holevo,
            "H[m:y] >= S[sum_y p(y) rho_y^a] - sum_y p(y) S[rho_y^a]",
        ),
        InequalityReport::new("upper_projective_bound", h_y, h_m_y, "H[y] >= H[m:y]"),
        InequalityReport::new("lower_projective_bound", h_m, h_m_given_y, "H[m] >= H[m|y]"),
        InequalityReport::new(
            "entropy_a_upper",
            s_omega_a,
            s_retro_a,
            "S[rho_Omega^a] >= sum_y p(y) S[rho_y^a]",
        ),
        InequalityReport::new(
            "entropy_a_lower",
            s_retro_a,
            s_sel_a,
            "sum_y p(y) S[rho_y^a] >= sum_m p(m) S[rho_m^a]",
        ),
    ];

    Ok(ProjectiveBipartiteReport {
        h_m,
        h_y,
        h_m_given_y,
        h_m_y,
        s_nonselective_ab: s_omega_ab,
        s_retro_avg_ab: s_retro_ab,
        s_selective_avg_ab: s_sel_ab,
        s_nonselective_a: s_omega_a,
        s_retro_avg_a: s_retro_a,
        s_selective_avg_a: s_sel_a,
        s_nonselective_b: s_omega_b,
        s_retro_avg_b: s_retro_b,
        s_selective_avg_b: s_sel_b,
        i_nonselective: i_omega,
        i_retro_avg: i_retro,
        i_selective_avg: i_sel,
        holevo_chi: holevo,
        retro_holevo,
        identities,
        reports,
    })
}

/// Outcome of [`tripartite_checks`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TripartiteReport {
    pub identities: Vec<IdentityReport>,
    pub reports: Vec<InequalityReport>,
}

impl TripartiteReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|r| r.holds) && self.reports.iter().all(|r| r.satisfied)
    }
}

/// `sum_k w_k rho_k (x) |k><k|` on `AB (x) C` with `C` of dimension `w.len()`.
fn classical_extension(weights: &[f64], states: &[DensityMatrix], dab: usize) -> CMatrix {
    let dc = weights.len();
    let mut out = CMatrix::zeros(dab * dc, dab * dc);
    for (k, (&w, s)) in weights.iter().zip(states).enumerate() {
        if w == 0.0 {
            continue;
        }
        let proj = CMatrix::projector(&CMatrix::basis_ket(dc, k));
        out += &kron(&s.matrix().scale(w), &proj);
    }
    out
}

/// Strong subadditivity `S[abc] + S[x] <= S[xy..] + S[xc]` for `x = a` and `x = b`.
fn ssa_reports(m: &CMatrix, factors: [usize; 3], label: &str) -> Result<Vec<InequalityReport>> {
    let s = |keep: &[usize]| -> Result<f64> { entropy_of_matrix(&reduce(m, &factors, keep)?) };
    let s_abc = entropy_of_matrix(m)?;
    let (s_a, s_b, s_ab, s_ac, s_bc) = (s(&[0])?, s(&[1])?, s(&[0, 1])?, s(&[0, 2])?, s(&[1, 2])?);
    Ok(vec![
        InequalityReport::new(
            format!("ssa_a[{label}]"),
            s_ab + s_ac,
            s_abc + s_a,
            "S[ab] + S[ac] >= S[abc] + S[a]",
        ),
        InequalityReport::new(
            format!("ssa_b[{label}]"),
            s_ab + s_bc,
            s_abc + s_b,
            "S[ab] + S[bc] >= S[abc] + S[b]",
        ),
    ])
}

/// Assembles the classical-register extensions `sum p(m,y) rho_m^ab (x) |y><y|`
/// and, for each reachable `y`, `sum_m p(m|y) rho_m^ab (x) |m><m|`; checks
/// their entropy decompositions and strong subadditivity.
pub fn tripartite_checks(
    joint: &JointDistribution,
    states_m_ab: &[DensityMatrix],
    dims: BipartiteDims,
) -> Result<TripartiteReport> {
    if states_m_ab.len() != joint.num_m() {
        return Err(Error::LabelMismatch {
            expected: joint.num_m(),
            found: states_m_ab.len(),
        });
    }
    let dab = dims.total();
    for s in states_m_ab {
        dims.check(s.dim(), "tripartite_checks")?;
    }
    let dc = joint.num_y().max(joint.num_m());
    if dab * dc > MAX_TRIPARTITE_DIM {
        return Err(Error::Domain(format!(
            "tripartite dimension {} exceeds {MAX_TRIPARTITE_DIM}",
            dab * dc
        )));
    }
    let r = retrodict(joint)?;
    let p_y = &r.p_y;

    let rho_y_ab: Vec<Option<DensityMatrix>> = r
        .p_m_given_y
        .iter()
        .zip(&r.reachable)
        .map(|(row, &ok)| {
            if !ok {
                return Ok(None);
            }
            let refs: Vec<&DensityMatrix> = states_m_ab.iter().collect();
            DensityMatrix::mixture(row, &refs).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut identities = Vec::new();
    let mut reports = Vec::new();
    let factors = |c: usize| [dims.a, dims.b, c];

    // Register C holds y.
    let ny = joint.num_y();
    let mut big = CMatrix::zeros(dab * ny, dab * ny);
    for (y, row) in joint.table().iter().enumerate() {
        let proj = CMatrix::projector(&CMatrix::basis_ket(ny, y));
        for (m, &p) in row.iter().enumerate() {
            if p > 0.0 {
                big += &kron(&states_m_ab[m].matrix().scale(p), &proj);
            }
        }
    }
    let h_y = shannon_entropy(p_y)?;
    let avg_y = weighted(p_y, &rho_y_ab, von_neumann_entropy)?;
    identities.push(IdentityReport::new(
        "tripartite_y",
        entropy_of_matrix(&big)?,
        h_y + avg_y,
        IDENTITY_TOL,
        "S[rho^abc] = H[y] + sum_y p(y) S[rho_y^ab]",
    ));
    reports.extend(ssa_reports(&big, factors(ny), "y-register")?);

    // Register C holds m, one state per reachable y.
    let nm = joint.num_m();
    for (y, (row, rho_y)) in r.p_m_given_y.iter().zip(&rho_y_ab).enumerate() {
        if rho_y.is_none() {
            continue;
        }
        let ext = classical_extension(row, states_m_ab, dab);
        let h_m_y = -row.iter().map(|&p| xlnx(p)).sum::<f64>();
        let mut avg = 0.0;
        for (&w, s) in row.iter().zip(states_m_ab) {
            if w > 0.0 {
                avg += w * von_neumann_entropy(s)?;
            }
        }
        identities.push(IdentityReport::new(
            format!("tripartite_m[y={y}]"),
            entropy_of_matrix(&ext)?,
            h_m_y + avg,
            IDENTITY_TOL,
            "S[rho_y^abc] = H[m]|_y + sum_m p(m|y) S[rho_m^ab]",
        ));
        reports.extend(ssa_reports(&ext, factors(nm), &format!("m-register,y={y}"))?);
    }
    Ok(TripartiteReport { identities, reports })
}
