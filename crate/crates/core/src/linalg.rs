//! Dense real linear algebra used throughout the crate.
//!
//! Everything dimension-valued is decided by one primitive, [`numerical_rank`],
//! with the cutoff `σ_max · max(rows, cols) · 1e-12`. Subspaces are stored as
//! orthonormal column bases; the zero subspace is an `n × 0` basis.

use nalgebra::linalg::{Cholesky, ColPivQR};
use nalgebra::{DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative factor of the singular-value cutoff.
pub const RANK_RTOL: f64 = 1e-12;

/// Entrywise tolerance on `UᵀU = I` for stored bases.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

pub fn check_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput)
    }
}

/// Largest absolute entry, 0 for empty matrices.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn to_faer(m: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order.
///
/// SVDs go through `faer`: nalgebra's bidiagonal SVD returns visibly wrong
/// factors for some projection matrices with clustered singular values.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD of a finite matrix converges")
}

/// Left singular vectors of the thin SVD, ordered like [`singular_values`].
fn left_singular_vectors(m: &Matrix) -> Matrix {
    let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
    let u = svd.U();
    Matrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)])
}

fn cutoff(sigma: &[f64], rows: usize, cols: usize) -> f64 {
    let smax = sigma.first().copied().unwrap_or(0.0);
    smax * rows.max(cols) as f64 * RANK_RTOL
}

fn rank_from_sigma(sigma: &[f64], rows: usize, cols: usize) -> usize {
    let tau = cutoff(sigma, rows, cols);
    sigma.iter().filter(|&&s| s > tau && s > 0.0).count()
}

/// Number of singular values above `σ_max · max(rows, cols) · 1e-12`.
pub fn numerical_rank(m: &Matrix) -> Result<usize> {
    check_finite(m)?;
    let sigma = singular_values(m);
    Ok(rank_from_sigma(&sigma, m.nrows(), m.ncols()))
}

/// Absolute cutoff used by [`numerical_rank`] for this matrix.
pub fn rank_tolerance(m: &Matrix) -> f64 {
    cutoff(&singular_values(m), m.nrows(), m.ncols())
}

/// `aᵀ·b`.
pub fn gram(a: &Matrix, b: &Matrix) -> Matrix {
    a.transpose() * b
}

/// Horizontal concatenation; all inputs must share the row count.
pub fn hstack(rows: usize, blocks: &[&Matrix]) -> Matrix {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Two classical Gram-Schmidt sweeps against the columns already accepted.
fn reorthogonalize(q: &mut Matrix) {
    let k = q.ncols();
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).into_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm > 0.0 {
            q.column_mut(j).scale_mut(1.0 / norm);
        }
    }
}

fn is_orthonormal(q: &Matrix, tol: f64) -> bool {
    let g = gram(q, q);
    let k = g.nrows();
    (0..k).all(|i| (0..k).all(|j| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() <= tol))
}

/// Leading `r` left singular vectors.
fn svd_basis(m: &Matrix, r: usize) -> Matrix {
    left_singular_vectors(m).columns(0, r).into_owned()
}

/// Orthonormal basis of `col(m)` with exactly `r` columns.
///
/// Column-pivoted QR first; if its leading `r` columns fail to reproduce `m`
/// the truncated SVD basis is used instead.
fn basis_with_rank(m: &Matrix, r: usize) -> Matrix {
    let n = m.nrows();
    if r == 0 || m.ncols() == 0 {
        return Matrix::zeros(n, 0);
    }
    let qr = ColPivQR::new(m.clone());
    let mut q = qr.q().columns(0, r).into_owned();
    reorthogonalize(&mut q);
    let residual = m - &q * gram(&q, m);
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let sigma = singular_values(m);
    let next = sigma.get(r).copied().unwrap_or(0.0);
    // QR is accepted when its truncation error is within reach of the optimal one.
    let acceptable = max_abs(&residual) <= (1e3 * next).max(1e-9 * scale);
    if acceptable && is_orthonormal(&q, ORTHONORMAL_TOL) {
        q
    } else {
        let mut u = svd_basis(m, r);
        reorthogonalize(&mut u);
        u
    }
}

/// A linear subspace of `R^n`, held as an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { basis: Matrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { basis: Matrix::identity(ambient_dim, ambient_dim) }
    }

    /// Span of the standard basis vectors `e_j` for the given zero-based indices.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Self {
        let mut basis = Matrix::zeros(ambient_dim, axes.len());
        for (c, &j) in axes.iter().enumerate() {
            basis[(j, c)] = 1.0;
        }
        Subspace::from_span(&basis).expect("finite by construction")
    }

    /// Wraps a basis that is already orthonormal.
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        check_finite(&basis)?;
        if basis.ncols() > basis.nrows() || !is_orthonormal(&basis, ORTHONORMAL_TOL) {
            return Err(Error::InvalidArgument("basis columns are not orthonormal".into()));
        }
        Ok(Subspace { basis })
    }

    /// Same as [`orthonormalize`].
    pub fn from_span(span: &Matrix) -> Result<Self> {
        orthonormalize(span)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn projection(&self) -> Matrix {
        projection_matrix(self)
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::AmbientMismatch { expected: self.ambient_dim(), found: other.ambient_dim() });
        }
        Ok(())
    }

    /// `self ⊇ other`, decided by `dim(self ∩ other) = dim other`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(subspace_intersection(self, other)?.dim() == other.dim())
    }

    /// Largest entry of the difference of the two projections.
    pub fn projection_distance(&self, other: &Subspace) -> Result<f64> {
        self.same_ambient(other)?;
        Ok(max_abs(&(self.projection() - other.projection())))
    }
}

/// Orthonormal basis of the column space; dimension by [`numerical_rank`].
///
/// An input whose columns are already orthonormal is kept verbatim, so
/// externally supplied block operators can refer to known coordinates.
pub fn orthonormalize(span: &Matrix) -> Result<Subspace> {
    check_finite(span)?;
    if span.ncols() <= span.nrows() && span.ncols() > 0 && is_orthonormal(span, ORTHONORMAL_TOL) {
        return Ok(Subspace { basis: span.clone() });
    }
    let r = numerical_rank(span)?;
    Ok(Subspace { basis: basis_with_rank(span, r) })
}

/// `U·Uᵀ` for the stored basis `U`.
pub fn projection_matrix(s: &Subspace) -> Matrix {
    &s.basis * s.basis.transpose()
}

/// `a + b`: orthonormalization of the concatenated bases.
pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.same_ambient(b)?;
    let n = a.ambient_dim();
    orthonormalize(&hstack(n, &[&a.basis, &b.basis]))
}

/// `a ∩ b` with `dim(a ∩ b) = dim a + dim b − dim(a + b)`.
///
/// The dimension comes from the rank of `[A B]`; the basis is made of the
/// leading principal vectors of the pair.
pub fn subspace_intersection(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.same_ambient(b)?;
    let n = a.ambient_dim();
    if a.is_zero() || b.is_zero() {
        return Ok(Subspace::zero(n));
    }
    let sum_rank = numerical_rank(&hstack(n, &[&a.basis, &b.basis]))?;
    let d = a.dim() + b.dim() - sum_rank;
    if d == 0 {
        return Ok(Subspace::zero(n));
    }
    let x = left_singular_vectors(&gram(&a.basis, &b.basis));
    let mut basis = &a.basis * x.columns(0, d);
    reorthogonalize(&mut basis);
    Ok(Subspace { basis })
}

/// `a^⊥` with `dim a + dim a^⊥ = n`.
pub fn orthogonal_complement(a: &Subspace) -> Subspace {
    let n = a.ambient_dim();
    let k = n - a.dim();
    if k == 0 {
        return Subspace::zero(n);
    }
    if a.is_zero() {
        return Subspace::full(n);
    }
    let residual = Matrix::identity(n, n) - projection_matrix(a);
    let mut basis = svd_basis(&residual, k);
    reorthogonalize(&mut basis);
    Subspace { basis }
}

/// `m(s)` for an invertible square `m`.
pub fn apply_invertible(m: &Matrix, s: &Subspace) -> Result<Subspace> {
    check_finite(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() != s.ambient_dim() {
        return Err(Error::AmbientMismatch { expected: s.ambient_dim(), found: m.nrows() });
    }
    let rank = numerical_rank(m)?;
    if rank < m.nrows() {
        return Err(Error::SingularOperator { rank, dim: m.nrows() });
    }
    Ok(Subspace { basis: basis_with_rank(&(m * &s.basis), s.dim()) })
}

/// Column space of `m` as a subspace.
pub fn range(m: &Matrix) -> Result<Subspace> {
    orthonormalize(m)
}

/// Null space of `m`, the complement of its row space.
pub fn null_space(m: &Matrix) -> Result<Subspace> {
    let row_space = orthonormalize(&m.transpose())?;
    Ok(orthogonal_complement(&row_space))
}

/// Symmetric positive-definite factorization used for every `S⁻¹` application.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    chol: Cholesky<f64, Dyn>,
}

impl SpdSolver {
    pub fn new(s: &Matrix) -> Result<Self> {
        check_finite(s)?;
        if s.nrows() != s.ncols() {
            return Err(Error::NotSquare { rows: s.nrows(), cols: s.ncols() });
        }
        let sym = (s + s.transpose()) * 0.5;
        Cholesky::new(sym)
            .map(|chol| SpdSolver { chol })
            .ok_or(Error::SingularOperator { rank: numerical_rank(s)?, dim: s.nrows() })
    }

    pub fn solve(&self, rhs: &Matrix) -> Matrix {
        self.chol.solve(rhs)
    }

    /// Materialized inverse, for operators that must be applied to subspaces.
    pub fn inverse(&self) -> Matrix {
        self.chol.inverse()
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(s: &Matrix) -> Vec<f64> {
    if s.nrows() == 0 {
        return Vec::new();
    }
    let sym = (s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}
