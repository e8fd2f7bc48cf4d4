//! Generalised (Kraus) measurements and seeded random generators.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qmat::{hermitian_eigen, CMatrix, DensityMatrix, ZERO};

/// Largest entry of `|sum Omega^dagger Omega - I|` accepted by [`MeasurementSet::new`].
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Outcomes below this probability are flagged unreachable.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Smallest accepted Gaussian strength `a`.
pub const MIN_GAUSSIAN_STRENGTH: f64 = 1e-3;

/// Ordered Kraus operators `{Omega_m}` with `sum_m Omega_m^dagger Omega_m = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    dim: usize,
    operators: Vec<CMatrix>,
    labels: Vec<String>,
}

impl MeasurementSet {
    /// Operators are stored as given. Labels default to `"0", "1", ...` when
    /// `labels` is `None`.
    pub fn new(operators: Vec<CMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Precondition("measurement set needs at least one operator".into()))?;
        if !first.is_square() {
            return Err(Error::NotSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let dim = first.rows();
        for op in &operators {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: op.rows().max(op.cols()),
                    context: "MeasurementSet::new",
                });
            }
            if !op.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let labels = match labels {
            Some(l) if l.len() != operators.len() => {
                return Err(Error::LabelMismatch {
                    expected: operators.len(),
                    found: l.len(),
                })
            }
            Some(l) => l,
            None => (0..operators.len()).map(|i| i.to_string()).collect(),
        };
        let set = MeasurementSet { dim, operators, labels };
        let defect = set.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::Completeness { defect });
        }
        Ok(set)
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective(basis: &CMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare {
                rows: basis.rows(),
                cols: basis.cols(),
            });
        }
        let ops = (0..basis.cols())
            .map(|j| CMatrix::projector(&basis.column(j)))
            .collect();
        Self::new(ops, None)
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self::projective(&CMatrix::identity(dim)).expect("identity basis is complete")
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self::new(alloc::vec![CMatrix::identity(dim)], None).expect("identity is complete")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.operators.len() {
            return Err(Error::LabelMismatch {
                expected: self.operators.len(),
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// POVM elements `Omega_m^dagger Omega_m`.
    pub fn effects(&self) -> Vec<CMatrix> {
        self.operators.iter().map(|op| &op.dagger() * op).collect()
    }

    pub fn completeness_defect(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for e in self.effects() {
            sum += &e;
        }
        sum.max_abs_diff(&CMatrix::identity(self.dim))
    }

    /// Applies the same operators to a larger space, `Omega_m (x) I_n`.
    pub fn tensor_identity_right(&self, n: usize) -> Self {
        let id = CMatrix::identity(n);
        MeasurementSet {
            dim: self.dim * n,
            operators: self.operators.iter().map(|op| crate::qmat::kron(op, &id)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// `I_n (x) Omega_m`.
    pub fn tensor_identity_left(&self, n: usize) -> Self {
        let id = CMatrix::identity(n);
        MeasurementSet {
            dim: self.dim * n,
            operators: self.operators.iter().map(|op| crate::qmat::kron(&id, op)).collect(),
            labels: self.labels.clone(),
        }
    }

    pub(crate) fn check_state(&self, rho: &DensityMatrix, context: &'static str) -> Result<()> {
        if rho.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: rho.dim(),
                context,
            });
        }
        Ok(())
    }
}

/// Outcome probabilities `p(m)` and post-measurement states `rho_m`.
///
/// Outcomes with `p(m) < 1e-14` have no state (`None`); they contribute
/// nothing to averages.
#[derive(Clone, Debug)]
pub struct OutcomeEnsemble {
    pub probabilities: Vec<f64>,
    pub states: Vec<Option<DensityMatrix>>,
    pub labels: Vec<String>,
}

impl OutcomeEnsemble {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Reachable outcomes as `(index, p, state)`.
    pub fn reachable(&self) -> impl Iterator<Item = (usize, f64, &DensityMatrix)> {
        self.probabilities
            .iter()
            .zip(&self.states)
            .enumerate()
            .filter_map(|(i, (&p, s))| s.as_ref().map(|s| (i, p, s)))
    }

    /// `sum_m p(m) rho_m`.
    pub fn mixture(&self) -> DensityMatrix {
        let dim = self.reachable().next().map(|(_, _, s)| s.dim()).unwrap_or(1);
        let mut acc = CMatrix::zeros(dim, dim);
        for (_, p, s) in self.reachable() {
            acc += &s.matrix().scale(p);
        }
        DensityMatrix::from_trusted(acc)
    }
}

/// Selective update: `p(m) = Tr[Omega_m rho Omega_m^dagger]`,
/// `rho_m = Omega_m rho Omega_m^dagger / p(m)`.
pub fn apply_selective(rho: &DensityMatrix, set: &MeasurementSet) -> Result<OutcomeEnsemble> {
    set.check_state(rho, "apply_selective")?;
    let mut probabilities = Vec::with_capacity(set.len());
    let mut states = Vec::with_capacity(set.len());
    for op in set.operators() {
        let unnormalised = rho.matrix().conjugate_by(op);
        let p = unnormalised.trace().re;
        if p < -1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "negative outcome probability {p:e}"
            )));
        }
        if p < ZERO_PROBABILITY {
            probabilities.push(p.max(0.0));
            states.push(None);
        } else {
            probabilities.push(p);
            states.push(Some(DensityMatrix::new(unnormalised.scale(1.0 / p))?));
        }
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(OutcomeEnsemble {
        probabilities,
        states,
        labels: set.labels().to_vec(),
    })
}

/// `rho_Omega = sum_m Omega_m rho Omega_m^dagger`.
pub fn apply_nonselective(rho: &DensityMatrix, set: &MeasurementSet) -> Result<DensityMatrix> {
    set.check_state(rho, "apply_nonselective")?;
    let mut acc = CMatrix::zeros(set.dim(), set.dim());
    for op in set.operators() {
        acc += &rho.matrix().conjugate_by(op);
    }
    Ok(DensityMatrix::from_trusted(acc))
}

/// Continuous qubit measurement
/// `Omega_V = (2 pi a^2)^(-1/4) exp[-(V - sigma_z)^2 / (4 a^2)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianMeasurement {
    a: f64,
}

impl GaussianMeasurement {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!("measurement strength a = {a} must be positive")));
        }
        if a < MIN_GAUSSIAN_STRENGTH {
            return Err(Error::Domain(format!(
                "measurement strength a = {a} is below {MIN_GAUSSIAN_STRENGTH}"
            )));
        }
        Ok(GaussianMeasurement { a })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `(2 pi a^2)^(-1/2)`.
    #[inline]
    pub fn normalisation(&self) -> f64 {
        1.0 / libm::sqrt(2.0 * PI * self.a * self.a)
    }

    /// `exp(-x^2 / 2a^2)`.
    #[inline]
    pub fn kernel(&self, x: f64) -> f64 {
        libm::exp(-x * x / (2.0 * self.a * self.a))
    }

    /// Normal density with mean `mean` and width `a`.
    #[inline]
    pub fn density(&self, v: f64, mean: f64) -> f64 {
        self.normalisation() * self.kernel(v - mean)
    }

    /// Multiplier applied to coherences by the non-selective map, `exp(-1/2a^2)`.
    #[inline]
    pub fn coherence_factor(&self) -> f64 {
        libm::exp(-1.0 / (2.0 * self.a * self.a))
    }
}

fn require_qubit(rho: &DensityMatrix, context: &'static str) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho.dim(),
            context,
        });
    }
    Ok(())
}

/// Closed form of `Omega_V rho Omega_V^dagger`; its trace is the density `p(V)`.
pub fn gaussian_unnormalized_post(rho: &DensityMatrix, g: &GaussianMeasurement, v: f64) -> Result<CMatrix> {
    require_qubit(rho, "gaussian_unnormalized_post")?;
    let m = rho.matrix();
    let k = g.normalisation();
    let cross = k * libm::exp(-(v * v + 1.0) / (2.0 * g.a() * g.a()));
    let mut out = CMatrix::zeros(2, 2);
    out[(0, 0)] = m[(0, 0)] * (k * g.kernel(v - 1.0));
    out[(1, 1)] = m[(1, 1)] * (k * g.kernel(v + 1.0));
    out[(0, 1)] = m[(0, 1)] * cross;
    out[(1, 0)] = m[(1, 0)] * cross;
    Ok(out)
}

/// `int dV Omega_V rho Omega_V^dagger`: populations kept, coherences scaled
/// by `exp(-1/2a^2)`.
pub fn gaussian_nonselective(rho: &DensityMatrix, g: &GaussianMeasurement) -> Result<DensityMatrix> {
    require_qubit(rho, "gaussian_nonselective")?;
    let f = g.coherence_factor();
    let mut m = rho.matrix().clone();
    m[(0, 1)] *= f;
    m[(1, 0)] *= f;
    Ok(DensityMatrix::from_trusted(m))
}

/// Deterministic generator for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with unit variance, `(x + iy)/sqrt 2`.
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with i.i.d. complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `G G^dagger / Tr[G G^dagger]` for a Ginibre `G`.
pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let g = ginibre(rng, dim, dim);
    let gg = &g * &g.dagger();
    let tr = gg.trace().re;
    DensityMatrix::from_trusted(gg.scale(1.0 / tr))
}

pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    random_density_with(&mut seeded_rng(seed), dim)
}

/// `Omega_k = G_k S^(-1/2)` with `S = sum_k G_k^dagger G_k`.
pub fn random_measurement_set_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> Result<MeasurementSet> {
    if count == 0 || dim == 0 {
        return Err(Error::Domain("dimension and outcome count must be positive".into()));
    }
    let gs: Vec<CMatrix> = (0..count).map(|_| ginibre(rng, dim, dim)).collect();
    let mut s = CMatrix::zeros(dim, dim);
    for g in &gs {
        s += &(&g.dagger() * g);
    }
    let eig = hermitian_eigen(&s)?;
    if eig.values[0] < 1e-12 {
        return Err(Error::Precondition("sum of G^dagger G is singular".into()));
    }
    let inv_sqrt = eig.map_spectrum(|x| 1.0 / libm::sqrt(x));
    MeasurementSet::new(gs.iter().map(|g| g * &inv_sqrt).collect(), None)
}

pub fn random_measurement_set(dim: usize, count: usize, seed: u64) -> Result<MeasurementSet> {
    random_measurement_set_with(&mut seeded_rng(seed), dim, count)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim).to_nalgebra();
    let qr = g.qr();
    let q: DMatrix<Complex64> = qr.q();
    let r = qr.r();
    let q = CMatrix::from_nalgebra(&q);
    CMatrix::from_fn(dim, dim, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q[(i, j)] * phase
    })
}

/// Projective measurement in a Haar-random basis.
pub fn random_projective_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> MeasurementSet {
    MeasurementSet::projective(&haar_unitary(rng, dim)).expect("unitary basis is complete")
}

/// Zero operator of size `dim`, used when padding sets.
pub fn zero_operator(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{bloch_to_density, BlochVector, ONE};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn plus_minus() -> MeasurementSet {
        MeasurementSet::computational(2)
    }

    #[test]
    fn rejects_incomplete_and_malformed_sets() {
        let half = CMatrix::identity(2).scale(0.5);
        assert!(matches!(
            MeasurementSet::new(alloc::vec![half], None),
            Err(Error::Completeness { .. })
        ));
        assert!(MeasurementSet::new(Vec::new(), None).is_err());
        assert!(matches!(
            MeasurementSet::new(alloc::vec![CMatrix::identity(2)], Some(alloc::vec![])),
            Err(Error::LabelMismatch { .. })
        ));
    }

    #[test]
    fn projective_on_eigenstate() {
        let up = DensityMatrix::pure(&[ONE, ZERO]).unwrap();
        let ens = apply_selective(&up, &plus_minus()).unwrap();
        assert!((ens.probabilities[0] - 1.0).abs() < 1e-15);
        assert_eq!(ens.probabilities[1], 0.0);
        assert!(ens.states[1].is_none());
        assert!(ens.states[0].as_ref().unwrap().matrix().max_abs_diff(up.matrix()) < 1e-15);
    }

    #[test]
    fn projective_on_mixed_state() {
        let ens = apply_selective(&DensityMatrix::maximally_mixed(2), &plus_minus()).unwrap();
        assert!((ens.probabilities[0] - 0.5).abs() < 1e-15);
        assert!((ens.probabilities[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nonselective_dephases_equatorial_state() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_2, 0.0).unwrap());
        let out = apply_nonselective(&rho, &plus_minus()).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            apply_selective(&rho, &plus_minus()),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            apply_nonselective(&rho, &plus_minus()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn nonselective_equals_mixture_of_selective() {
        for seed in 0..50 {
            let mut rng = seeded_rng(seed);
            let dim = 2 + (seed as usize % 3);
            let rho = random_density_with(&mut rng, dim);
            let set = random_measurement_set_with(&mut rng, dim, 2 + seed as usize % 3).unwrap();
            let ens = apply_selective(&rho, &set).unwrap();
            let total: f64 = ens.probabilities.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            let direct = apply_nonselective(&rho, &set).unwrap();
            assert!(direct.matrix().max_abs_diff(ens.mixture().matrix()) < 1e-10);
            assert!((direct.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_rejects_bad_strength() {
        assert!(GaussianMeasurement::new(0.0).is_err());
        assert!(GaussianMeasurement::new(-1.0).is_err());
        assert!(GaussianMeasurement::new(5e-4).is_err());
        assert!(GaussianMeasurement::new(f64::NAN).is_err());
        assert!(GaussianMeasurement::new(1e-3).is_ok());
    }

    #[test]
    fn gaussian_peak_for_sharp_measurement() {
        let g = GaussianMeasurement::new(1e-2).unwrap();
        let up = DensityMatrix::pure(&[ONE, ZERO]).unwrap();
        let post = gaussian_unnormalized_post(&up, &g, 1.0).unwrap();
        let peak = 1.0 / libm::sqrt(2.0 * PI * 1e-4);
        assert!((post.trace().re - peak).abs() < 1e-10 * peak);
    }

    #[test]
    fn gaussian_trace_is_two_gaussian_mixture() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_4, 0.3).unwrap());
        let g = GaussianMeasurement::new(0.7).unwrap();
        let m = rho.matrix();
        for i in 0..41 {
            let v = -4.0 + 0.2 * i as f64;
            let p = gaussian_unnormalized_post(&rho, &g, v).unwrap().trace().re;
            let mix = m[(0, 0)].re * g.density(v, 1.0) + m[(1, 1)].re * g.density(v, -1.0);
            assert!((p - mix).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_sharp_limit_projects() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_4, 0.0).unwrap());
        let g = GaussianMeasurement::new(0.01).unwrap();
        for (v, target) in [(1.0, [ONE, ZERO]), (-1.0, [ZERO, ONE])] {
            let post = gaussian_unnormalized_post(&rho, &g, v).unwrap();
            let tr = post.trace().re;
            let normalised = DensityMatrix::new(post.scale(1.0 / tr)).unwrap();
            let proj = DensityMatrix::pure(&target).unwrap();
            assert!(normalised.trace_distance(&proj).unwrap() < 1e-3);
        }
    }

    #[test]
    fn gaussian_weak_limit_leaves_state() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_4, 0.0).unwrap());
        let g = GaussianMeasurement::new(100.0).unwrap();
        let post = gaussian_unnormalized_post(&rho, &g, 0.3).unwrap();
        let normalised = post.scale(1.0 / post.trace().re);
        assert!(normalised.max_abs_diff(rho.matrix()) < 1e-3);
        let omega = gaussian_nonselective(&rho, &g).unwrap();
        assert!(omega.matrix().max_abs_diff(rho.matrix()) < 1e-4);
    }

    #[test]
    fn gaussian_nonselective_coherence_factor() {
        let rho = bloch_to_density(&BlochVector::new(0.9, FRAC_PI_2, 0.0).unwrap());
        let strong = gaussian_nonselective(&rho, &GaussianMeasurement::new(0.05).unwrap()).unwrap();
        assert!(strong.matrix()[(0, 1)].norm() < 1e-80);
        let one = gaussian_nonselective(&rho, &GaussianMeasurement::new(1.0).unwrap()).unwrap();
        let ratio = one.matrix()[(0, 1)] / rho.matrix()[(0, 1)];
        assert!((ratio.re - libm::exp(-0.5)).abs() < 1e-15 && ratio.im.abs() < 1e-15);
        assert!(gaussian_nonselective(
            &DensityMatrix::maximally_mixed(3),
            &GaussianMeasurement::new(1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn random_density_is_valid_and_deterministic() {
        for seed in 0..20 {
            let rho = random_density(3, seed);
            assert!(crate::qmat::validate_density(rho.matrix()).is_ok());
        }
        assert_eq!(random_density(4, 9), random_density(4, 9));
        let ev = random_density(2, 1).eigenvalues().unwrap();
        assert!(ev[0] > 0.0);
    }

    #[test]
    fn random_measurement_sets() {
        let single = random_measurement_set(3, 1, 11).unwrap();
        let op = &single.operators()[0];
        assert!((&op.dagger() * op).max_abs_diff(&CMatrix::identity(3)) < 1e-10);
        for seed in 0..20 {
            assert!(
                random_measurement_set(2 + seed as usize % 3, 3, seed)
                    .unwrap()
                    .completeness_defect()
                    <= 1e-10
            );
        }
        let set = random_measurement_set(3, 4, 3).unwrap();
        let ens = apply_selective(&random_density(3, 5), &set).unwrap();
        assert!((ens.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert_eq!(
            random_measurement_set(2, 2, 4).unwrap(),
            random_measurement_set(2, 2, 4).unwrap()
        );
        assert!(random_measurement_set(2, 0, 4).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded_rng(77);
        for dim in 2..6 {
            assert!(haar_unitary(&mut rng, dim).unitarity_defect() < 1e-12);
        }
    }
}
