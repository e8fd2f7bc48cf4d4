//! Dense complex matrices and quantum-state primitives.
//!
//! Storage is row-major with no sparsity; every matrix in this crate is at
//! most 64x64. Bipartite composite indices follow `i = i_a * dim_b + i_b`
//! everywhere, and multipartite ones generalise this with the first factor
//! most significant.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|M - M^dagger|` entry accepted by [`hermitian_eigen`].
pub const EIGEN_HERMITICITY_TOL: f64 = 1e-8;
/// Tolerance shared by the three density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                found: data.len(),
                context: "CMatrix::from_vec",
            });
        }
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        let m = CMatrix { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Square matrix from real row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(n, n, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|ket><bra|`.
    pub fn ket_bra(ket: &[Complex64], bra: &[Complex64]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
    }

    /// Rank-one projector `|ket><ket|`.
    pub fn projector(ket: &[Complex64]) -> Self {
        Self::ket_bra(ket, ket)
    }

    /// Computational basis vector `|index>` of length `dim`.
    pub fn basis_ket(dim: usize, index: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        v
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `op * self * op^dagger`.
    pub fn conjugate_by(&self, op: &CMatrix) -> Self {
        &(op * self) * &op.dagger()
    }

    /// Largest entry modulus of `self - other`; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Largest entry of `|M^dagger M - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.dagger() * self).max_abs_diff(&CMatrix::identity(self.cols))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, s: f64) -> CMatrix {
        self.scale(s)
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = -I;
    m[(1, 0)] = I;
    m
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// Kronecker product: entry `(i*db + k, j*db + l)` is `a[i,j] * b[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows, b.cols);
    CMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V f(Lambda) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrised as `(M + M^dagger)/2` first, so asymmetry up to
/// [`EIGEN_HERMITICITY_TOL`] is tolerated.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = m.hermiticity_defect();
    if defect > EIGEN_HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let n = m.rows;
    let h = m.hermitian_part();
    let eig = SymmetricEigen::try_new(h.to_nalgebra(), f64::EPSILON, 10_000).ok_or(Error::EigenNonConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMatrix::from_nalgebra(&eig.eigenvectors);
    let vectors = CMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// A density-matrix invariant that failed, with its numeric defect.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NotSquare {
        rows: usize,
        cols: usize,
    },
    NonFinite,
    /// Largest entry of `|M - M^dagger|`.
    NotHermitian {
        defect: f64,
    },
    /// `Tr M - 1`.
    Trace {
        defect: f64,
    },
    /// The offending minimum eigenvalue.
    Negative {
        min_eigenvalue: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            Violation::NonFinite => write!(f, "non-finite entries"),
            Violation::NotHermitian { defect } => write!(f, "hermiticity defect {defect:e}"),
            Violation::Trace { defect } => write!(f, "trace defect {defect:e}"),
            Violation::Negative { min_eigenvalue } => {
                write!(f, "negative eigenvalue {min_eigenvalue:e}")
            }
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        validate_density(&m).map_err(Error::InvalidState)
    }

    /// Wraps a matrix that is a state by construction (a convex mixture or a
    /// reduction of valid states). Symmetrises but does not re-validate.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        DensityMatrix(m.hermitian_part())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(CMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|psi><psi|` for a (not necessarily normalised) nonzero ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm2: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::Domain("ket must be nonzero and finite".into()));
        }
        Ok(DensityMatrix(CMatrix::projector(ket).scale(1.0 / norm2)))
    }

    /// `sum_k w_k rho_k` for nonnegative weights summing to one.
    pub fn mixture(weights: &[f64], states: &[&DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::LabelMismatch {
                expected: weights.len(),
                found: states.len(),
            });
        }
        let dim = states[0].dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (&w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: s.dim(),
                    context: "DensityMatrix::mixture",
                });
            }
            if w < -1e-12 {
                return Err(Error::InvalidDistribution("negative mixture weight".into()));
            }
            acc += &s.0.scale(w.max(0.0));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution("mixture weights do not sum to one".into()));
        }
        Ok(DensityMatrix::from_trusted(acc))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.0)
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn rotate(&self, u: &CMatrix) -> Result<Self> {
        if u.rows != self.dim() || !u.is_square() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: u.rows,
                context: "DensityMatrix::rotate",
            });
        }
        Ok(DensityMatrix::from_trusted(self.0.conjugate_by(u)))
    }

    /// `(1/2) sum |eig(rho - sigma)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
                context: "trace_distance",
            });
        }
        let diff = &self.0 - &other.0;
        Ok(0.5 * hermitian_eigenvalues(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Checks the three density-matrix invariants, returning the typed state or
/// every violated invariant with its defect.
pub fn validate_density(m: &CMatrix) -> core::result::Result<DensityMatrix, Vec<Violation>> {
    if !m.is_square() {
        return Err(vec![Violation::NotSquare {
            rows: m.rows,
            cols: m.cols,
        }]);
    }
    if !m.is_finite() {
        return Err(vec![Violation::NonFinite]);
    }
    let mut violations = Vec::new();
    let herm_defect = m.hermiticity_defect();
    if herm_defect > STATE_TOL {
        violations.push(Violation::NotHermitian { defect: herm_defect });
    }
    let h = m.hermitian_part();
    let tr = h.trace().re;
    if (tr - 1.0).abs() > STATE_TOL {
        violations.push(Violation::Trace { defect: tr - 1.0 });
    }
    match hermitian_eigenvalues(&h) {
        Ok(values) => {
            let min = values.first().copied().unwrap_or(0.0);
            if min < -STATE_TOL {
                violations.push(Violation::Negative { min_eigenvalue: min });
            }
        }
        Err(_) => violations.push(Violation::NonFinite),
    }
    if violations.is_empty() {
        Ok(DensityMatrix(h))
    } else {
        Err(violations)
    }
}

/// Qubit Bloch vector in spherical coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlochVector {
    r: f64,
    theta: f64,
    phi: f64,
}

impl BlochVector {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(alloc::format!("Bloch radius {r} outside [0, 1]")));
        }
        Ok(BlochVector { r, theta, phi })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(x, y, z) = r (sin t cos p, sin t sin p, cos t)`.
    pub fn cartesian(&self) -> [f64; 3] {
        let st = libm::sin(self.theta);
        [
            self.r * st * libm::cos(self.phi),
            self.r * st * libm::sin(self.phi),
            self.r * libm::cos(self.theta),
        ]
    }
}

/// `rho = (I + r n.sigma) / 2`, with index 0 the `+1` eigenvector of `sigma_z`.
pub fn bloch_to_density(b: &BlochVector) -> DensityMatrix {
    let [x, y, z] = b.cartesian();
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::new(0.5 * (1.0 + z), 0.0);
    m[(1, 1)] = Complex64::new(0.5 * (1.0 - z), 0.0);
    m[(0, 1)] = Complex64::new(0.5 * x, -0.5 * y);
    m[(1, 0)] = Complex64::new(0.5 * x, 0.5 * y);
    DensityMatrix(m)
}

/// Inverse of [`bloch_to_density`]; `phi` is returned in `[0, 2 pi)` and the
/// angles are set to zero where they are undefined.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho.dim(),
            context: "density_to_bloch",
        });
    }
    let m = rho.matrix();
    let x = 2.0 * m[(0, 1)].re;
    let y = -2.0 * m[(0, 1)].im;
    let z = (m[(0, 0)].re - m[(1, 1)].re).clamp(-1.0, 1.0);
    let r = libm::sqrt(x * x + y * y + z * z);
    if r == 0.0 {
        return BlochVector::new(0.0, 0.0, 0.0);
    }
    let theta = libm::acos((z / r).clamp(-1.0, 1.0));
    let mut phi = if x == 0.0 && y == 0.0 { 0.0 } else { libm::atan2(y, x) };
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if phi >= 2.0 * PI {
        phi -= 2.0 * PI;
    }
    BlochVector::new(r.min(1.0), theta, phi)
}

/// Factor dimensions of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BipartiteDims {
    pub a: usize,
    pub b: usize,
}

impl BipartiteDims {
    pub fn new(a: usize, b: usize) -> Self {
        BipartiteDims { a, b }
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn check(&self, dim: usize, context: &'static str) -> Result<()> {
        if dim != self.total() {
            return Err(Error::Dimension {
                expected: self.total(),
                found: dim,
                context,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over every factor not listed in `keep`.
///
/// `factors` lists the subsystem dimensions with the first factor most
/// significant; `keep` must be strictly increasing.
pub fn reduce(m: &CMatrix, factors: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = factors.iter().product();
    if !m.is_square() || m.rows != total {
        return Err(Error::Dimension {
            expected: total,
            found: m.rows,
            context: "partial trace",
        });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= factors.len()) {
        return Err(Error::Precondition(
            "kept factors must be increasing and in range".into(),
        ));
    }
    let kept_dim: usize = keep.iter().map(|&k| factors[k]).product();

    // (kept index, traced index) for each composite index.
    let split: Vec<(usize, usize)> = (0..total)
        .map(|mut idx| {
            let mut digits = vec![0usize; factors.len()];
            for f in (0..factors.len()).rev() {
                digits[f] = idx % factors[f];
                idx /= factors[f];
            }
            let (mut kept, mut traced) = (0usize, 0usize);
            for (f, &d) in digits.iter().enumerate() {
                if keep.contains(&f) {
                    kept = kept * factors[f] + d;
                } else {
                    traced = traced * factors[f] + d;
                }
            }
            (kept, traced)
        })
        .collect();

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for r in 0..total {
        let (kr, tr) = split[r];
        for c in 0..total {
            let (kc, tc) = split[c];
            if tr == tc {
                out[(kr, kc)] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Bipartite partial trace of a raw matrix, keeping subsystem `keep`.
pub fn partial_trace_matrix(m: &CMatrix, dims: BipartiteDims, keep: Subsystem) -> Result<CMatrix> {
    dims.check(m.rows, "partial_trace")?;
    let keep_idx = match keep {
        Subsystem::A => 0,
        Subsystem::B => 1,
    };
    reduce(m, &[dims.a, dims.b], &[keep_idx])
}

pub fn partial_trace(rho_ab: &DensityMatrix, dims: BipartiteDims, keep: Subsystem) -> Result<DensityMatrix> {
    partial_trace_matrix(rho_ab.matrix(), dims, keep).map(DensityMatrix::from_trusted)
}
