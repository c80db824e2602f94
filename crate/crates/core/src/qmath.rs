//! Dense complex linear algebra and density-matrix utilities.
//!
//! Everything here works on small square matrices (dimension at most a few
//! dozen), stored as [`nalgebra::DMatrix`] of [`Complex64`]. Two wrappers
//! carry the invariants the rest of the crate relies on:
//!
//! - [`ComplexMatrix`]: square, all entries finite.
//! - [`DensityMatrix`]: additionally Hermitian, positive semi-definite and of
//!   unit trace, each within [`TOL_DENSITY`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity, positivity and trace tolerance for density matrices.
pub const TOL_DENSITY: f64 = 1e-10;

/// Target accuracy of the Hermitian eigensolver (reconstruction and orthonormality).
pub const TOL_EIG: f64 = 1e-11;

/// Eigenvalues of the second argument of [`relative_entropy`] below this are
/// treated as outside its support.
pub const SUPPORT_EIGENVALUE: f64 = 1e-12;

/// Weight of the first argument of [`relative_entropy`] on a null direction of
/// the second above which the entropy diverges.
pub const SUPPORT_OVERLAP: f64 = 1e-12;

/// Floor used inside `log` for null directions carrying negligible weight.
pub const LOG_FLOOR: f64 = 1e-15;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                let z = m[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds a `dim`×`dim` matrix from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let z: Vec<Complex64> = entries.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_rows(dim, &z)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                Complex64::default()
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    /// `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &DVector<Complex64>) -> Self {
        Self(v * v.adjoint())
    }

    pub(crate) fn from_raw(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * c(factor, 0.0))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &DVector<Complex64>) -> Result<Complex64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok((v.adjoint() * &self.0 * v)[(0, 0)])
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * v
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|m − m†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * c(0.5, 0.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Normalized projector onto `v`.
    pub fn pure(v: &DVector<Complex64>) -> Result<Self> {
        let norm_sqr = v.norm_squared();
        if norm_sqr < 1e-300 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let rho = ComplexMatrix::outer(v).scale(1.0 / norm_sqr);
        Ok(Self(rho))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Wraps a matrix known to satisfy the invariants by construction.
    pub(crate) fn assume_valid(m: ComplexMatrix) -> Self {
        debug_assert!(m.hermitian_deviation() < 1e-8, "not Hermitian: {m:?}");
        debug_assert!((m.trace().re - 1.0).abs() < 1e-8, "trace {}", m.trace());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(tensor(&self.0, &other.0))
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be non-negative and sum to one.
    pub fn mixture<'a, I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a DensityMatrix)>,
    {
        let mut acc: Option<DMatrix<Complex64>> = None;
        let mut total = 0.0;
        for (w, rho) in terms {
            if !(w >= 0.0) {
                return Err(Error::OutOfRange {
                    name: "mixture weight",
                    value: w,
                    range: "[0, inf)",
                });
            }
            total += w;
            let term = rho.0.as_matrix() * c(w, 0.0);
            acc = Some(match acc {
                None => term,
                Some(a) => {
                    if a.nrows() != term.nrows() {
                        return Err(Error::DimensionMismatch {
                            expected: a.nrows(),
                            got: term.nrows(),
                        });
                    }
                    a + term
                }
            });
        }
        let acc = acc.ok_or(Error::InvalidConfig("empty mixture".into()))?;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::TraceNotOne { trace: total });
        }
        Ok(Self(ComplexMatrix(acc)))
    }

    pub fn purity(&self) -> f64 {
        (self.0.as_matrix() * self.0.as_matrix()).trace().re
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix{}", self.0 .0)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Which factor of a bipartite system survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of a two-qubit operator.
pub fn partial_trace(m: &ComplexMatrix, keep: Keep) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: m.dim(),
        });
    }
    partial_trace_dims(m, 2, 2, keep)
}

/// Partial trace of an operator on a `dim_a · dim_b` product space, with
/// index `i_a · dim_b + i_b`.
pub fn partial_trace_dims(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<ComplexMatrix> {
    if m.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            got: m.dim(),
        });
    }
    let mat = m.as_matrix();
    let out = match keep {
        Keep::First => DMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b)
                .map(|k| mat[(i * dim_b + k, j * dim_b + k)])
                .sum()
        }),
        Keep::Second => DMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a)
                .map(|k| mat[(k * dim_b + i, k * dim_b + j)])
                .sum()
        }),
    };
    Ok(ComplexMatrix(out))
}

/// Partial trace of a density matrix over a two-qubit split.
pub fn reduce(rho: &DensityMatrix, keep: Keep) -> Result<DensityMatrix> {
    partial_trace(rho.as_complex(), keep).map(DensityMatrix::assume_valid)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.as_matrix().column(k).into_owned()
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.as_matrix();
        let n = v.nrows();
        let d = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(f(self.values[i]), 0.0)
            } else {
                Complex64::default()
            }
        });
        ComplexMatrix(v * d * v.adjoint())
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermitian_deviation();
    if deviation > TOL_DENSITY {
        return Err(Error::NotHermitian { deviation });
    }
    let herm = m.hermitian_part();
    let eig = herm
        .0
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::EigenNoConvergence)?;
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

/// Certifies `m` as a density matrix.
///
/// The Hermitian part is kept, and eigenvalues in `[-tol, 0)` are clipped to
/// zero; anything more negative is rejected.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let herm = m.hermitian_part();
    let trace = herm.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotOne { trace });
    }
    let eig = eig_hermitian(&herm)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    if min_eigenvalue < 0.0 {
        return Ok(DensityMatrix(eig.map_values(|x| x.max(0.0))));
    }
    Ok(DensityMatrix(herm))
}

/// Quantum relative entropy `S(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ`, in bits.
///
/// Returns `f64::INFINITY` when ρ has weight above [`SUPPORT_OVERLAP`] on an
/// eigenvector of σ whose eigenvalue is below [`SUPPORT_EIGENVALUE`]. Null
/// directions of σ with smaller weight are evaluated with the eigenvalue
/// floored at [`LOG_FLOOR`].
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let rho_eig = eig_hermitian(rho.as_complex())?;
    let neg_entropy: f64 = rho_eig
        .values
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum();

    let sigma_eig = eig_hermitian(sigma.as_complex())?;
    let mut cross = 0.0;
    for (k, &mu) in sigma_eig.values.iter().enumerate() {
        let weight = rho.as_complex().expectation(&sigma_eig.vector(k))?.re;
        if mu < SUPPORT_EIGENVALUE {
            if weight > SUPPORT_OVERLAP {
                return Ok(f64::INFINITY);
            }
            cross += weight.max(0.0) * mu.max(LOG_FLOOR).log2();
        } else {
            cross += weight * mu.log2();
        }
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// `⟨φ|ρ|φ⟩` for a unit vector φ.
pub fn fidelity_pure(phi: &DVector<Complex64>, rho: &DensityMatrix) -> Result<f64> {
    let norm_sqr = phi.norm_squared();
    if (norm_sqr - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(rho.as_complex().expectation(phi)?.re.clamp(0.0, 1.0))
}

/// Trace distance `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let diff = rho.as_complex() - sigma.as_complex();
    let eig = eig_hermitian(&diff)?;
    Ok(0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>())
}
