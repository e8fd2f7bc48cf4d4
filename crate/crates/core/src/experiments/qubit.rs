//! Gaussian (weak-to-strong) qubit measurement followed by a projective
//! measurement along `(theta, phi)`.
//!
//! Basis index 0 is `|+>`, the `sigma_z = +1` eigenstate.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::info::von_neumann_entropy;
use crate::measurement::{gaussian_nonselective, GaussianMeasurement, MeasurementSet, MIN_GAUSSIAN_STRENGTH};
use crate::qmat::{bloch_to_density, BlochVector, CMatrix, DensityMatrix};
use crate::quad::{panel_points, quad_integrate_panels, QuadratureSpec};

/// Initial Bloch state, measurement strength `a` and second-measurement direction.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QubitGaussianConfig {
    pub initial: BlochVector,
    pub a: f64,
    pub theta: f64,
    pub phi: f64,
}

impl QubitGaussianConfig {
    pub fn new(initial: BlochVector, a: f64, theta: f64, phi: f64) -> Result<Self> {
        let cfg = QubitGaussianConfig { initial, a, theta, phi };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        GaussianMeasurement::new(self.a)?;
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::Domain(format!("theta = {} must lie in [0, pi]", self.theta)));
        }
        if !self.phi.is_finite() {
            return Err(Error::Domain("phi must be finite".into()));
        }
        Ok(())
    }

    /// Same configuration at another strength.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.initial, a, self.theta, self.phi)
    }

    pub fn initial_state(&self) -> DensityMatrix {
        bloch_to_density(&self.initial)
    }

    pub fn gaussian(&self) -> GaussianMeasurement {
        GaussianMeasurement::new(self.a).expect("validated strength")
    }

    /// Integration window `[-1 - w a, 1 + w a]`.
    pub fn domain(&self, spec: &QuadratureSpec) -> (f64, f64) {
        let half = 1.0 + spec.truncation_width * self.a;
        (-half, half)
    }
}

/// `|n+> = c|+> + s e^{-i phi}|->`, `|n-> = -s|+> + c e^{-i phi}|->`.
pub fn second_kets(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let c = libm::cos(theta / 2.0);
    let s = libm::sin(theta / 2.0);
    let e = Complex64::new(libm::cos(phi), -libm::sin(phi));
    [[Complex64::new(c, 0.0), e * s], [Complex64::new(-s, 0.0), e * c]]
}

/// Projective measurement `{|n+><n+|, |n-><n-|}` labelled `+`, `-`.
pub fn second_measurement(theta: f64, phi: f64) -> MeasurementSet {
    let [np, nm] = second_kets(theta, phi);
    MeasurementSet::new(
        vec![CMatrix::projector(&np), CMatrix::projector(&nm)],
        Some(vec![String::from("+"), String::from("-")]),
    )
    .expect("orthonormal kets give a complete set")
}

/// Entries of `rho_I` used by the closed forms.
#[derive(Clone, Copy, Debug)]
struct Populations {
    r00: f64,
    r11: f64,
    r01: Complex64,
    det: f64,
}

impl Populations {
    fn of(cfg: &QubitGaussianConfig) -> Self {
        let rho = cfg.initial_state();
        let m = rho.matrix();
        let r00 = m[(0, 0)].re;
        let r11 = m[(1, 1)].re;
        let r01 = m[(0, 1)];
        let det = (r00 * r11 - r01.norm_sqr()).max(0.0);
        Populations { r00, r11, r01, det }
    }
}

/// Pointwise quantities at outcome `V`, computed with the common exponential
/// factored out so that nothing underflows to `0/0`.
#[derive(Clone, Copy, Debug)]
struct PointState {
    /// `p(V)`.
    p_v: f64,
    /// `p(+, V)`, `p(-, V)`.
    p_pm: [f64; 2],
    /// Normalised `rho_V` entries.
    q00: f64,
    q01: Complex64,
    /// `S[rho_V]`.
    entropy: f64,
}

fn binary_entropy_from_min(lmin: f64) -> f64 {
    let lmin = lmin.clamp(0.0, 0.5);
    let lmax = 1.0 - lmin;
    let mut s = 0.0;
    if lmin > 0.0 {
        s -= lmin * libm::log(lmin);
    }
    if lmax > 0.0 {
        s -= lmax * libm::log(lmax);
    }
    s
}

struct Model {
    pop: Populations,
    a: f64,
    k: f64,
    /// `cos^2(theta/2)`, `sin^2(theta/2)`, `sin(theta)/2`, `e^{-i phi}`.
    c2: f64,
    s2: f64,
    half_sin: f64,
    phase: Complex64,
}

impl Model {
    fn new(cfg: &QubitGaussianConfig) -> Self {
        let g = cfg.gaussian();
        let c = libm::cos(cfg.theta / 2.0);
        let s = libm::sin(cfg.theta / 2.0);
        Model {
            pop: Populations::of(cfg),
            a: cfg.a,
            k: g.normalisation(),
            c2: c * c,
            s2: s * s,
            half_sin: c * s,
            phase: Complex64::new(libm::cos(cfg.phi), -libm::sin(cfg.phi)),
        }
    }

    fn point(&self, v: f64) -> PointState {
        let two_a2 = 2.0 * self.a * self.a;
        let al0 = -(v - 1.0) * (v - 1.0) / two_a2;
        let al1 = -(v + 1.0) * (v + 1.0) / two_a2;
        let Populations { r00, r11, r01, det } = self.pop;
        let m = match (r00 > 0.0, r11 > 0.0) {
            (true, true) => al0.max(al1),
            (true, false) => al0,
            _ => al1,
        };
        let w0 = r00 * libm::exp(al0 - m);
        let w1 = r11 * libm::exp(al1 - m);
        let wc = r01 * libm::exp(0.5 * (al0 + al1) - m);
        let norm = w0 + w1;
        let scale = self.k * libm::exp(m);

        let q00 = w0 / norm;
        let q11 = w1 / norm;
        let q01 = wc / norm;
        let cross = 2.0 * self.half_sin * (self.phase * wc).re;
        let p_plus = scale * (self.c2 * w0 + self.s2 * w1 + cross);
        let p_minus = scale * (self.s2 * w0 + self.c2 * w1 - cross);

        let det_v = det * libm::exp(al0 + al1 - 2.0 * m) / (norm * norm);
        let gap = libm::sqrt((q00 - q11) * (q00 - q11) + 4.0 * q01.norm_sqr());
        let lmax = 0.5 * (1.0 + gap);
        PointState {
            p_v: scale * norm,
            p_pm: [p_plus.max(0.0), p_minus.max(0.0)],
            q00,
            q01,
            entropy: binary_entropy_from_min(det_v / lmax),
        }
    }
}

/// `(p(+, V), p(-, V))`:
/// `k[c^2 rho_{±±} G(V∓1) + s^2 rho_{∓∓} G(V±1) ± (sin theta / 2)(e^{-i phi} rho_{+-} + c.c.) e^{-(V^2+1)/2a^2}]`.
pub fn qubit_joint_density(cfg: &QubitGaussianConfig, v: f64) -> (f64, f64) {
    let p = Model::new(cfg).point(v);
    (p.p_pm[0], p.p_pm[1])
}

/// Normalised `rho_V`, or `None` where `p(V)` vanishes.
pub fn qubit_post_state(cfg: &QubitGaussianConfig, v: f64) -> Option<DensityMatrix> {
    let p = Model::new(cfg).point(v);
    if !(p.q00.is_finite()) {
        return None;
    }
    let m = CMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(p.q00, 0.0),
            p.q01,
            p.q01.conj(),
            Complex64::new(1.0 - p.q00, 0.0),
        ],
    )
    .ok()?;
    DensityMatrix::new(m).ok()
}

/// `p(±)` in closed form: `c^2 rho_{±±} + s^2 rho_{∓∓} ± sin(theta) Re(e^{-i phi} rho_{+-}) e^{-1/2a^2}`.
pub fn qubit_outcome_probabilities(cfg: &QubitGaussianConfig) -> (f64, f64) {
    let m = Model::new(cfg);
    let coh = 2.0 * m.half_sin * (m.phase * m.pop.r01).re * cfg.gaussian().coherence_factor();
    (
        m.c2 * m.pop.r00 + m.s2 * m.pop.r11 + coh,
        m.s2 * m.pop.r00 + m.c2 * m.pop.r11 - coh,
    )
}

/// Everything computed for one configuration in a single adaptive pass.
#[derive(Clone, Debug)]
pub struct QubitPoint {
    pub config: QubitGaussianConfig,
    /// `int p(V) dV`, ideally 1.
    pub total_probability: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    /// Smoothed states `rho_±`; `None` when `p(±) < 1e-14`.
    pub rho_plus: Option<DensityMatrix>,
    pub rho_minus: Option<DensityMatrix>,
    /// `rho_Omega` in closed form.
    pub nonselective: DensityMatrix,
    /// `S[rho_Omega]`.
    pub s_nonselective: f64,
    /// `sum_± p(±) S[rho_±]`.
    pub s_retro_avg: f64,
    /// `int p(V) S[rho_V] dV`.
    pub s_selective_avg: f64,
    /// `S[rho_I]`.
    pub s_initial: f64,
    /// `S[rho_+]`, `S[rho_-]` (zero for unreachable outcomes).
    pub s_plus: f64,
    pub s_minus: f64,
    /// `int V p(V) dV`.
    pub v_omega: f64,
    /// `int V p(V|±) dV`; zero for unreachable outcomes.
    pub v_plus: f64,
    pub v_minus: f64,
    pub error_estimate: f64,
}

impl QubitPoint {
    /// Largest entry of `|p(+) rho_+ + p(-) rho_- - rho_Omega|`.
    pub fn average_identity_defect(&self) -> f64 {
        let mut acc = CMatrix::zeros(2, 2);
        for (p, s) in [(self.p_plus, &self.rho_plus), (self.p_minus, &self.rho_minus)] {
            if let Some(s) = s {
                acc += &s.matrix().scale(p);
            }
        }
        acc.max_abs_diff(self.nonselective.matrix())
    }

    /// `p(+) <V_+> + p(-) <V_-> - <V_Omega>`.
    pub fn weak_value_defect(&self) -> f64 {
        self.p_plus * self.v_plus + self.p_minus * self.v_minus - self.v_omega
    }

    /// Smallest margin of `S[rho_Omega] >= sum p S[rho_±] >= int p S[rho_V]`.
    pub fn sandwich_margin(&self) -> f64 {
        (self.s_nonselective - self.s_retro_avg).min(self.s_retro_avg - self.s_selective_avg)
    }
}

const N_COMPONENTS: usize = 13;

/// Runs the quadrature for one configuration.
pub fn qubit_point(cfg: &QubitGaussianConfig, spec: &QuadratureSpec) -> Result<QubitPoint> {
    cfg.validate()?;
    spec.validate()?;
    let model = Model::new(cfg);
    let (lo, hi) = cfg.domain(spec);
    let points = panel_points(lo, hi, &[-1.0, 0.0, 1.0], cfg.a.max(MIN_GAUSSIAN_STRENGTH))?;
    let q = quad_integrate_panels::<N_COMPONENTS, _>(
        |v| {
            let s = model.point(v);
            let [pp, pm] = s.p_pm;
            [
                s.p_v,
                pp,
                pm,
                v * s.p_v,
                v * pp,
                v * pm,
                s.p_v * s.entropy,
                pp * s.q00,
                pp * s.q01.re,
                pp * s.q01.im,
                pm * s.q00,
                pm * s.q01.re,
                pm * s.q01.im,
            ]
        },
        &points,
        spec,
    )?;
    let [total, p_plus, p_minus, v_omega, vp, vm, s_sel, ap00, ap_re, ap_im, am00, am_re, am_im] = q.value;

    let smoothed = |p: f64, q00: f64, re: f64, im: f64| -> Result<Option<DensityMatrix>> {
        if p < 1e-14 {
            return Ok(None);
        }
        let d = q00 / p;
        let c = Complex64::new(re / p, im / p);
        let m = CMatrix::from_vec(
            2,
            2,
            vec![Complex64::new(d, 0.0), c, c.conj(), Complex64::new(1.0 - d, 0.0)],
        )?;
        DensityMatrix::new(m).map(Some)
    };
    let rho_plus = smoothed(p_plus, ap00, ap_re, ap_im)?;
    let rho_minus = smoothed(p_minus, am00, am_re, am_im)?;
    let s_of = |s: &Option<DensityMatrix>| -> Result<f64> { s.as_ref().map_or(Ok(0.0), von_neumann_entropy) };
    let s_plus = s_of(&rho_plus)?;
    let s_minus = s_of(&rho_minus)?;

    let rho_i = cfg.initial_state();
    let nonselective = gaussian_nonselective(&rho_i, &cfg.gaussian())?;
    Ok(QubitPoint {
        config: *cfg,
        total_probability: total,
        p_plus,
        p_minus,
        s_nonselective: von_neumann_entropy(&nonselective)?,
        nonselective,
        s_retro_avg: p_plus * s_plus + p_minus * s_minus,
        s_selective_avg: s_sel,
        s_initial: von_neumann_entropy(&rho_i)?,
        s_plus,
        s_minus,
        v_omega,
        v_plus: if rho_plus.is_some() { vp / p_plus } else { 0.0 },
        v_minus: if rho_minus.is_some() { vm / p_minus } else { 0.0 },
        rho_plus,
        rho_minus,
        error_estimate: q.error_estimate,
    })
}

/// Smoothed states `rho_±` and outcome probabilities `p(±)`.
#[derive(Clone, Debug)]
pub struct QubitSmoothed {
    pub rho_plus: Option<DensityMatrix>,
    pub rho_minus: Option<DensityMatrix>,
    pub p_plus: f64,
    pub p_minus: f64,
}

pub fn qubit_smoothed(cfg: &QubitGaussianConfig, spec: &QuadratureSpec) -> Result<QubitSmoothed> {
    let p = qubit_point(cfg, spec)?;
    Ok(QubitSmoothed {
        rho_plus: p.rho_plus,
        rho_minus: p.rho_minus,
        p_plus: p.p_plus,
        p_minus: p.p_minus,
    })
}

/// One row of the entropy-versus-strength curves.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntropyRow {
    pub a: f64,
    pub s_nonselective: f64,
    pub s_retro_avg: f64,
    pub s_selective_avg: f64,
    pub s_initial: f64,
}

impl EntropyRow {
    pub fn sandwich_margin(&self) -> f64 {
        (self.s_nonselective - self.s_retro_avg).min(self.s_retro_avg - self.s_selective_avg)
    }
}

/// Slack allowed on the entropy ordering of a quadrature-based row.
pub const ROW_SANDWICH_SLACK: f64 = 1e-6;

/// Entropy rows for a list of configurations, in input order. Fails if a
/// row breaks the ordering by more than [`ROW_SANDWICH_SLACK`].
pub fn qubit_entropy_curves(configs: &[QubitGaussianConfig], spec: &QuadratureSpec) -> Result<Vec<EntropyRow>> {
    configs.iter().map(|cfg| entropy_row(cfg, spec)).collect()
}

pub fn entropy_row(cfg: &QubitGaussianConfig, spec: &QuadratureSpec) -> Result<EntropyRow> {
    let p = qubit_point(cfg, spec)?;
    let row = EntropyRow {
        a: cfg.a,
        s_nonselective: p.s_nonselective,
        s_retro_avg: p.s_retro_avg,
        s_selective_avg: p.s_selective_avg,
        s_initial: p.s_initial,
    };
    if row.sandwich_margin() < -ROW_SANDWICH_SLACK {
        return Err(Error::Precondition(format!(
            "entropy ordering violated at a = {}: margin {:e}",
            cfg.a,
            row.sandwich_margin()
        )));
    }
    Ok(row)
}

/// Conditional and unconditional averages of `V` with the post-selected entropies.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeakValues {
    pub v_omega: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

pub fn weak_values(cfg: &QubitGaussianConfig, spec: &QuadratureSpec) -> Result<WeakValues> {
    let p = qubit_point(cfg, spec)?;
    Ok(WeakValues {
        v_omega: p.v_omega,
        v_plus: p.v_plus,
        v_minus: p.v_minus,
        s_plus: p.s_plus,
        s_minus: p.s_minus,
        p_plus: p.p_plus,
        p_minus: p.p_minus,
    })
}

/// One row of the weak-value figure.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeakValueRow {
    pub a: f64,
    pub v_omega: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub s_rho_plus: f64,
    pub s_rho_minus: f64,
    pub s_nonselective: f64,
    pub s_selective_avg: f64,
}

pub fn weak_value_row(cfg: &QubitGaussianConfig, spec: &QuadratureSpec) -> Result<WeakValueRow> {
    let p = qubit_point(cfg, spec)?;
    Ok(WeakValueRow {
        a: cfg.a,
        v_omega: p.v_omega,
        v_plus: p.v_plus,
        v_minus: p.v_minus,
        s_rho_plus: p.s_plus,
        s_rho_minus: p.s_minus,
        s_nonselective: p.s_nonselective,
        s_selective_avg: p.s_selective_avg,
    })
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() || n == 0 {
        return Err(Error::Domain(format!("invalid log grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (l0, l1) = (libm::log(lo), libm::log(hi));
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                libm::exp(l0 + (l1 - l0) * i as f64 / (n - 1) as f64)
            }
        })
        .collect())
}
