//! Adaptive Simpson quadrature for scalar and small vector integrands.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerances and limits for [`quad_integrate`] and friends.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Half-width of the integration window beyond `±1`, in units of `a`.
    pub truncation_width: f64,
    /// Maximum bisection depth of any initial panel.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            relative_tolerance: 1e-9,
            absolute_tolerance: 1e-12,
            truncation_width: 12.0,
            max_subdivisions: 50,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if !(self.truncation_width >= 6.0) || !self.truncation_width.is_finite() {
            return Err(Error::Domain(format!(
                "truncation width {} must be at least 6",
                self.truncation_width
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

/// Integral value together with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature<const N: usize> {
    pub value: [f64; N],
    pub error_estimate: f64,
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    fa: [f64; N],
    fm: [f64; N],
    fb: [f64; N],
    whole: [f64; N],
}

fn simpson<const N: usize>(a: f64, b: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    let h = (b - a) / 6.0;
    core::array::from_fn(|k| h * (fa[k] + 4.0 * fm[k] + fb[k]))
}

fn eval<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, x: f64) -> Result<[f64; N]> {
    let y = f(x);
    if y.iter().all(|v| v.is_finite()) {
        Ok(y)
    } else {
        Err(Error::NonFinite)
    }
}

struct State {
    tol: f64,
    span: f64,
    max_depth: u32,
    error: f64,
    converged: bool,
}

fn refine<const N: usize, F: FnMut(f64) -> [f64; N]>(
    f: &mut F,
    p: Panel<N>,
    depth: u32,
    st: &mut State,
    acc: &mut [f64; N],
) -> Result<()> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(p.a, m, &p.fa, &flm, &p.fm);
    let right = simpson(m, p.b, &p.fm, &frm, &p.fb);
    let mut err = 0.0f64;
    for k in 0..N {
        err = err.max((left[k] + right[k] - p.whole[k]).abs() / 15.0);
    }
    let local_tol = st.tol * (p.b - p.a) / st.span;
    if err <= local_tol || depth >= st.max_depth || m <= p.a || m >= p.b {
        if err > local_tol {
            st.converged = false;
        }
        for k in 0..N {
            let diff = left[k] + right[k] - p.whole[k];
            acc[k] += left[k] + right[k] + diff / 15.0;
        }
        st.error += err;
        return Ok(());
    }
    refine(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        depth + 1,
        st,
        acc,
    )?;
    refine(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        depth + 1,
        st,
        acc,
    )
}

/// Integrates a vector-valued function over consecutive panels
/// `[points[0], points[1]], [points[1], points[2]], ...`.
///
/// All components share one partition. The error test uses the largest
/// component error against `max(abs_tol, rel_tol * |I_0|)`, so component 0
/// should be the one that sets the scale (a normalisation or trace).
pub fn quad_integrate_panels<const N: usize, F>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::Domain("need at least two panel boundaries".into()));
    }
    if points.iter().any(|x| !x.is_finite()) || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "panel boundaries must be finite and strictly increasing".into(),
        ));
    }
    let span = points[points.len() - 1] - points[0];

    let mut panels = Vec::with_capacity(points.len() - 1);
    let mut f_left = eval(&mut f, points[0])?;
    let mut estimate = [0.0; N];
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fm = eval(&mut f, 0.5 * (a + b))?;
        let fb = eval(&mut f, b)?;
        let whole = simpson(a, b, &f_left, &fm, &fb);
        for k in 0..N {
            estimate[k] += whole[k];
        }
        panels.push(Panel {
            a,
            b,
            fa: f_left,
            fm,
            fb,
            whole,
        });
        f_left = fb;
    }

    let scale = if N > 0 { estimate[0].abs() } else { 0.0 };
    let mut st = State {
        tol: spec.absolute_tolerance.max(spec.relative_tolerance * scale),
        span,
        max_depth: spec.max_subdivisions,
        error: 0.0,
        converged: true,
    };
    let mut acc = [0.0; N];
    for p in panels {
        refine(&mut f, p, 0, &mut st, &mut acc)?;
    }
    if !st.converged {
        return Err(Error::QuadratureNonConvergence {
            best_estimate: if N > 0 { acc[0] } else { 0.0 },
            error_estimate: st.error,
        });
    }
    Ok(Quadrature {
        value: acc,
        error_estimate: st.error,
    })
}

/// Panel boundaries covering `[lo, hi]` with every panel at most `max_width`
/// wide and every breakpoint inside the interval included.
pub fn panel_points(lo: f64, hi: f64, breakpoints: &[f64], max_width: f64) -> Result<Vec<f64>> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
    }
    if !(max_width > 0.0) {
        return Err(Error::Domain("panel width must be positive".into()));
    }
    let mut knots: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    knots.push(lo);
    knots.push(hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let n = libm::ceil((w[1] - w[0]) / max_width).max(1.0) as usize;
        for i in 0..n {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    out.push(hi);
    Ok(out)
}

/// Scalar adaptive Simpson over `[lo, hi]`; returns `(value, error_estimate)`.
pub fn quad_integrate<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let q = quad_integrate_panels(|x| [f(x)], &[lo, hi], spec)?;
    Ok((q.value[0], q.error_estimate))
}
