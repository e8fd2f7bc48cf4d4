//! Joint outcome statistics, Bayesian retrodiction and smoothed states.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measurement::{apply_nonselective, apply_selective, MeasurementSet, OutcomeEnsemble, ZERO_PROBABILITY};
use crate::qmat::{hermitian_eigenvalues, CMatrix, DensityMatrix};

/// Entries above this negative value are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = -1e-12;
/// Largest renormalisation defect of a conditional row tolerated after clamping.
pub const RENORMALISATION_TOL: f64 = 1e-8;

/// `p(y, m)`: rows are outcomes `y` of the second measurement, columns
/// outcomes `m` of the first.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    p_ym: Vec<Vec<f64>>,
    labels_m: Vec<String>,
    labels_y: Vec<String>,
}

impl JointDistribution {
    /// Validates and clamps a table indexed `[y][m]`.
    pub fn new(mut p_ym: Vec<Vec<f64>>, labels_m: Vec<String>, labels_y: Vec<String>) -> Result<Self> {
        if p_ym.len() != labels_y.len() {
            return Err(Error::LabelMismatch {
                expected: labels_y.len(),
                found: p_ym.len(),
            });
        }
        let mut total = 0.0;
        for row in &mut p_ym {
            if row.len() != labels_m.len() {
                return Err(Error::LabelMismatch {
                    expected: labels_m.len(),
                    found: row.len(),
                });
            }
            for p in row.iter_mut() {
                if !p.is_finite() {
                    return Err(Error::NonFinite);
                }
                if *p < NEGATIVE_CLAMP {
                    return Err(Error::InvalidDistribution(format!("negative joint probability {p:e}")));
                }
                *p = p.max(0.0);
                total += *p;
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "joint probabilities sum to {total}"
            )));
        }
        Ok(JointDistribution {
            p_ym,
            labels_m,
            labels_y,
        })
    }

    /// `p(y, m)`.
    #[inline]
    pub fn get(&self, y: usize, m: usize) -> f64 {
        self.p_ym[y][m]
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.p_ym
    }

    pub fn labels_m(&self) -> &[String] {
        &self.labels_m
    }

    pub fn labels_y(&self) -> &[String] {
        &self.labels_y
    }

    pub fn num_m(&self) -> usize {
        self.labels_m.len()
    }

    pub fn num_y(&self) -> usize {
        self.labels_y.len()
    }

    /// `p(m) = sum_y p(y, m)`.
    pub fn marginal_m(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_m()];
        for row in &self.p_ym {
            for (acc, p) in out.iter_mut().zip(row) {
                *acc += p;
            }
        }
        out
    }

    /// `p(y) = sum_m p(y, m)`.
    pub fn marginal_y(&self) -> Vec<f64> {
        self.p_ym.iter().map(|row| row.iter().sum()).collect()
    }

    /// `p(y|m)`, indexed `[y][m]`; columns with `p(m) = 0` are zero.
    pub fn p_y_given_m(&self) -> Vec<Vec<f64>> {
        let pm = self.marginal_m();
        self.p_ym
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&pm)
                    .map(|(&p, &q)| if q < ZERO_PROBABILITY { 0.0 } else { p / q })
                    .collect()
            })
            .collect()
    }
}

/// `p(y, m) = Tr[Omega_m rho Omega_m^dagger M_y^dagger M_y]`.
pub fn joint_distribution(
    rho: &DensityMatrix,
    first: &MeasurementSet,
    second: &MeasurementSet,
) -> Result<JointDistribution> {
    first.check_state(rho, "joint_distribution")?;
    second.check_state(rho, "joint_distribution")?;
    let posts: Vec<CMatrix> = first
        .operators()
        .iter()
        .map(|op| rho.matrix().conjugate_by(op))
        .collect();
    let table = second
        .effects()
        .iter()
        .map(|e| posts.iter().map(|post| trace_product(post, e)).collect())
        .collect();
    JointDistribution::new(table, first.labels().to_vec(), second.labels().to_vec())
}

/// `Re Tr[A B]` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Bayesian inversion of a joint table.
#[derive(Clone, Debug, PartialEq)]
pub struct Retrodiction {
    /// `p(m|y)` indexed `[y][m]`; rows of unreachable `y` are all zero.
    pub p_m_given_y: Vec<Vec<f64>>,
    pub p_y: Vec<f64>,
    /// `false` where `p(y) < 1e-14`.
    pub reachable: Vec<bool>,
}

/// `p(m|y) = p(y, m) / p(y)`.
pub fn retrodict(joint: &JointDistribution) -> Result<Retrodiction> {
    let p_y = joint.marginal_y();
    let mut p_m_given_y = Vec::with_capacity(p_y.len());
    let mut reachable = Vec::with_capacity(p_y.len());
    for (row, &py) in joint.table().iter().zip(&p_y) {
        if py < ZERO_PROBABILITY {
            p_m_given_y.push(vec![0.0; row.len()]);
            reachable.push(false);
            continue;
        }
        let mut cond: Vec<f64> = row.iter().map(|&p| (p / py).max(0.0)).collect();
        let s: f64 = cond.iter().sum();
        if (s - 1.0).abs() > RENORMALISATION_TOL {
            return Err(Error::InvalidDistribution(format!("retrodicted row sums to {s}")));
        }
        cond.iter_mut().for_each(|c| *c /= s);
        p_m_given_y.push(cond);
        reachable.push(true);
    }
    Ok(Retrodiction {
        p_m_given_y,
        p_y,
        reachable,
    })
}

/// `rho_y = sum_m p(m|y) rho_m`. Unreachable rows give `None`.
pub fn smoothed_states(ensemble: &OutcomeEnsemble, p_m_given_y: &[Vec<f64>]) -> Result<Vec<Option<DensityMatrix>>> {
    let dim = ensemble
        .reachable()
        .next()
        .map(|(_, _, s)| s.dim())
        .ok_or_else(|| Error::Precondition("ensemble has no reachable outcome".into()))?;
    let mut out = Vec::with_capacity(p_m_given_y.len());
    for row in p_m_given_y {
        if row.len() != ensemble.len() {
            return Err(Error::LabelMismatch {
                expected: ensemble.len(),
                found: row.len(),
            });
        }
        let s: f64 = row.iter().sum();
        if s == 0.0 {
            out.push(None);
            continue;
        }
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("conditional row sums to {s}")));
        }
        let mut acc = CMatrix::zeros(dim, dim);
        for (m, &w) in row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            match &ensemble.states[m] {
                Some(state) => acc += &state.matrix().scale(w),
                // weight on an outcome the first measurement never produces
                None if w < 1e-10 => {}
                None => {
                    return Err(Error::Precondition(format!(
                        "conditional weight {w:e} on unreachable outcome {m}"
                    )))
                }
            }
        }
        out.push(Some(DensityMatrix::new(acc)?));
    }
    Ok(out)
}

/// Everything produced by a measure-then-measure experiment.
#[derive(Clone, Debug)]
pub struct SmoothingResult {
    pub joint: JointDistribution,
    /// Selective output of the first measurement: `p(m)`, `rho_m`.
    pub ensemble: OutcomeEnsemble,
    /// `p(m|y)` indexed `[y][m]`.
    pub p_m_given_y: Vec<Vec<f64>>,
    pub p_y: Vec<f64>,
    /// `rho_y`, `None` for unreachable `y`.
    pub smoothed_states: Vec<Option<DensityMatrix>>,
    /// `rho_M = sum_y p(y) rho_y`.
    pub average_state: DensityMatrix,
    /// `rho_Omega` computed directly from the Kraus operators.
    pub nonselective_state: DensityMatrix,
    /// `w(m, y) = p(m|y) / p(m)` indexed `[m][y]`; zero where undefined.
    pub weights_w: Vec<Vec<f64>>,
}

impl SmoothingResult {
    /// `p(m)` from the first measurement.
    pub fn p_m(&self) -> &[f64] {
        &self.ensemble.probabilities
    }

    /// Largest entry of `|rho_M - rho_Omega|`.
    pub fn average_identity_defect(&self) -> f64 {
        self.average_state
            .matrix()
            .max_abs_diff(self.nonselective_state.matrix())
    }

    /// Reachable `(y, p(y), rho_y)`.
    pub fn reachable_smoothed(&self) -> impl Iterator<Item = (usize, f64, &DensityMatrix)> {
        self.p_y
            .iter()
            .zip(&self.smoothed_states)
            .enumerate()
            .filter_map(|(y, (&p, s))| s.as_ref().map(|s| (y, p, s)))
    }
}

/// Runs the first measurement selectively, the second as a post-selection
/// record, and smooths.
pub fn smooth(rho: &DensityMatrix, first: &MeasurementSet, second: &MeasurementSet) -> Result<SmoothingResult> {
    let joint = joint_distribution(rho, first, second)?;
    let ensemble = apply_selective(rho, first)?;
    let r = retrodict(&joint)?;
    let states = smoothed_states(&ensemble, &r.p_m_given_y)?;

    let dim = rho.dim();
    let mut avg = CMatrix::zeros(dim, dim);
    for (py, s) in r.p_y.iter().zip(&states) {
        if let Some(s) = s {
            avg += &s.matrix().scale(*py);
        }
    }
    let nonselective_state = apply_nonselective(rho, first)?;

    let weights_w = ensemble
        .probabilities
        .iter()
        .enumerate()
        .map(|(m, &pm)| {
            r.p_m_given_y
                .iter()
                .map(|row| if pm < ZERO_PROBABILITY { 0.0 } else { row[m] / pm })
                .collect()
        })
        .collect();

    Ok(SmoothingResult {
        joint,
        ensemble,
        p_m_given_y: r.p_m_given_y,
        p_y: r.p_y,
        smoothed_states: states,
        average_state: DensityMatrix::from_trusted(avg),
        nonselective_state,
        weights_w,
    })
}

/// The pair `(rho, E)` with `E = M_y^dagger M_y` for one observed `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PastQuantumState {
    rho: DensityMatrix,
    effect: CMatrix,
}

impl PastQuantumState {
    pub fn new(rho: DensityMatrix, effect: CMatrix) -> Result<Self> {
        if effect.rows() != rho.dim() || effect.cols() != rho.dim() {
            return Err(Error::Dimension {
                expected: rho.dim(),
                found: effect.rows(),
                context: "PastQuantumState::new",
            });
        }
        let defect = effect.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian { defect });
        }
        let ev = hermitian_eigenvalues(&effect)?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -1e-10 || hi > 1.0 + 1e-10 {
            return Err(Error::Domain(format!("effect spectrum [{lo:e}, {hi}] leaves [0, 1]")));
        }
        Ok(PastQuantumState {
            rho,
            effect: effect.hermitian_part(),
        })
    }

    /// Builds `(rho, M_y^dagger M_y)` from the second measurement.
    pub fn from_outcome(rho: DensityMatrix, second: &MeasurementSet, y: usize) -> Result<Self> {
        let op = second
            .operators()
            .get(y)
            .ok_or_else(|| Error::Domain(format!("outcome index {y} out of range")))?;
        Self::new(rho, &op.dagger() * op)
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn effect(&self) -> &CMatrix {
        &self.effect
    }

    /// `p(m|y) = Tr[Omega rho Omega^dagger E] / sum_m' Tr[...]`.
    pub fn retrodicted_probabilities(&self, first: &MeasurementSet) -> Result<Vec<f64>> {
        first.check_state(&self.rho, "PastQuantumState::retrodicted_probabilities")?;
        let raw: Vec<f64> = first
            .operators()
            .iter()
            .map(|op| trace_product(&self.rho.matrix().conjugate_by(op), &self.effect).max(0.0))
            .collect();
        let total: f64 = raw.iter().sum();
        if total < ZERO_PROBABILITY {
            return Err(Error::Precondition("observed outcome has zero probability".into()));
        }
        Ok(raw.into_iter().map(|p| p / total).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{random_density_with, random_measurement_set_with, seeded_rng};
    use crate::qmat::{bloch_to_density, BlochVector, ONE, ZERO};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
    use num_complex::Complex64;

    fn z_basis() -> MeasurementSet {
        MeasurementSet::computational(2)
    }

    fn x_basis() -> MeasurementSet {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let h = CMatrix::from_vec(2, 2, vec![s, s, s, -s]).unwrap();
        MeasurementSet::projective(&h).unwrap()
    }

    /// Element-by-element triple loop for `Tr[Omega rho Omega^dagger E]`.
    fn brute_joint(rho: &CMatrix, omega: &CMatrix, m_op: &CMatrix) -> f64 {
        let n = rho.rows();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for r in 0..n {
                            // Omega[i,j] rho[j,k] conj(Omega[l,k]) conj(M[r,l]) M[r,i]
                            acc +=
                                omega[(i, j)] * rho[(j, k)] * omega[(l, k)].conj() * m_op[(r, l)].conj() * m_op[(r, i)];
                        }
                    }
                }
            }
        }
        acc.re
    }

    #[test]
    fn same_basis_is_completely_correlated() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_4, 0.0).unwrap());
        let joint = joint_distribution(&rho, &z_basis(), &z_basis()).unwrap();
        let pm = joint.marginal_m();
        for y in 0..2 {
            for m in 0..2 {
                let expected = if y == m { pm[m] } else { 0.0 };
                assert!((joint.get(y, m) - expected).abs() < 1e-15);
            }
        }
        let r = retrodict(&joint).unwrap();
        assert_eq!(r.p_m_given_y, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn complementary_bases_are_independent() {
        let joint = joint_distribution(&DensityMatrix::maximally_mixed(2), &z_basis(), &x_basis()).unwrap();
        for y in 0..2 {
            for m in 0..2 {
                assert!((joint.get(y, m) - 0.25).abs() < 1e-15);
            }
        }
        let r = retrodict(&joint).unwrap();
        for row in &r.p_m_given_y {
            assert!((row[0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn joint_matches_brute_force_and_marginals() {
        let mut rng = seeded_rng(5);
        for dim in 2..5 {
            let rho = random_density_with(&mut rng, dim);
            let first = random_measurement_set_with(&mut rng, dim, 3).unwrap();
            let second = random_measurement_set_with(&mut rng, dim, 2).unwrap();
            let joint = joint_distribution(&rho, &first, &second).unwrap();
            for (y, m_op) in second.operators().iter().enumerate() {
                for (m, omega) in first.operators().iter().enumerate() {
                    assert!((joint.get(y, m) - brute_joint(rho.matrix(), omega, m_op)).abs() < 1e-13);
                }
            }
            let ens = apply_selective(&rho, &first).unwrap();
            for (a, b) in joint.marginal_m().iter().zip(&ens.probabilities) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn joint_rejects_bad_tables() {
        let l = |n: usize| (0..n).map(|i| alloc::format!("{i}")).collect::<Vec<_>>();
        assert!(JointDistribution::new(vec![vec![0.5, 0.6]], l(2), l(1)).is_err());
        assert!(JointDistribution::new(vec![vec![1.1, -0.1]], l(2), l(1)).is_err());
        assert!(JointDistribution::new(vec![vec![1.0]], l(2), l(1)).is_err());
        let j = JointDistribution::new(vec![vec![1.0 + 5e-13, -5e-13]], l(2), l(1)).unwrap();
        assert_eq!(j.get(0, 1), 0.0);
    }

    #[test]
    fn product_joint_gives_prior() {
        let l = |n: usize| (0..n).map(|i| alloc::format!("{i}")).collect::<Vec<_>>();
        let pm = [0.2, 0.3, 0.5];
        let py = [0.6, 0.4];
        let table = py.iter().map(|&a| pm.iter().map(|&b| a * b).collect()).collect();
        let r = retrodict(&JointDistribution::new(table, l(3), l(2)).unwrap()).unwrap();
        for row in &r.p_m_given_y {
            for (a, b) in row.iter().zip(&pm) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unreachable_outcome_is_flagged() {
        let up = DensityMatrix::pure(&[ONE, ZERO]).unwrap();
        let res = smooth(&up, &z_basis(), &z_basis()).unwrap();
        assert!(res.smoothed_states[1].is_none());
        assert_eq!(res.p_y[1], 0.0);
        assert!(res.average_identity_defect() < 1e-15);
    }

    #[test]
    fn delta_and_prior_weights() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_4, 0.0).unwrap());
        let ens = apply_selective(&rho, &z_basis()).unwrap();
        let delta = smoothed_states(&ens, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        for (s, e) in delta.iter().zip(&ens.states) {
            assert_eq!(s.as_ref().unwrap().matrix(), e.as_ref().unwrap().matrix());
        }
        let p = ens.probabilities.clone();
        let prior = smoothed_states(&ens, &[p.clone(), p]).unwrap();
        let omega = apply_nonselective(&rho, &z_basis()).unwrap();
        for s in prior {
            assert!(s.unwrap().matrix().max_abs_diff(omega.matrix()) < 1e-15);
        }
        assert!(matches!(
            smoothed_states(&ens, &[vec![1.0]]),
            Err(Error::LabelMismatch { .. })
        ));
    }

    #[test]
    fn trivial_first_measurement_keeps_state() {
        let mut rng = seeded_rng(8);
        let rho = random_density_with(&mut rng, 3);
        let second = random_measurement_set_with(&mut rng, 3, 3).unwrap();
        let res = smooth(&rho, &MeasurementSet::trivial(3), &second).unwrap();
        for (_, _, s) in res.reachable_smoothed() {
            assert!(s.matrix().max_abs_diff(rho.matrix()) < 1e-14);
        }
    }

    #[test]
    fn z_then_z_smooths_to_eigenstates() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_4, 0.0).unwrap());
        let res = smooth(&rho, &z_basis(), &z_basis()).unwrap();
        let up = DensityMatrix::pure(&[ONE, ZERO]).unwrap();
        let down = DensityMatrix::pure(&[ZERO, ONE]).unwrap();
        assert!(
            res.smoothed_states[0]
                .as_ref()
                .unwrap()
                .matrix()
                .max_abs_diff(up.matrix())
                < 1e-15
        );
        assert!(
            res.smoothed_states[1]
                .as_ref()
                .unwrap()
                .matrix()
                .max_abs_diff(down.matrix())
                < 1e-15
        );
    }

    #[test]
    fn seeded_identity_bayes_and_weights() {
        for seed in 0..200u64 {
            let mut rng = seeded_rng(seed);
            let dim = 2 + (seed % 3) as usize;
            let rho = random_density_with(&mut rng, dim);
            let first = random_measurement_set_with(&mut rng, dim, 2 + (seed % 3) as usize).unwrap();
            let second = random_measurement_set_with(&mut rng, dim, 2 + (seed / 3 % 3) as usize).unwrap();
            let res = smooth(&rho, &first, &second).unwrap();
            assert!(res.average_identity_defect() <= 1e-10, "seed {seed}");

            let pygm = res.joint.p_y_given_m();
            let pm = res.p_m().to_vec();
            for (y, row) in res.p_m_given_y.iter().enumerate() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                for m in 0..pm.len() {
                    assert!((row[m] * res.p_y[y] - pygm[y][m] * pm[m]).abs() < 1e-10);
                    if pm[m] > 1e-10 && res.p_y[y] > 1e-10 && row[m] > 1e-10 {
                        let lhs = res.weights_w[m][y] * pm[m] * res.p_y[y];
                        assert!((lhs - res.joint.get(y, m)).abs() < 1e-12);
                    }
                }
                let pqs = PastQuantumState::from_outcome(rho.clone(), &second, y).unwrap();
                let direct = pqs.retrodicted_probabilities(&first).unwrap();
                for (a, b) in direct.iter().zip(row) {
                    assert!((a - b).abs() < 1e-12, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn past_quantum_state_rejects_bad_effects() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(PastQuantumState::new(rho.clone(), CMatrix::identity(2).scale(1.5)).is_err());
        assert!(PastQuantumState::new(rho.clone(), CMatrix::identity(3)).is_err());
        let nh = CMatrix::from_real(2, &[0.5, 0.2, 0.0, 0.5]).unwrap();
        assert!(matches!(
            PastQuantumState::new(rho, nh),
            Err(Error::NotHermitian { .. })
        ));
    }
}
