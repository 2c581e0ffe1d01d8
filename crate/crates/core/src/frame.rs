//! Weighted subspace families, their direct-sum coordinates and operators.
//!
//! The direct sum `⊕ W_i` is represented in coordinates: member `i` owns the
//! contiguous block `offsets[i]..offsets[i + 1]` of `R^D`, and a coordinate
//! vector `c_i` stands for `U_i c_i ∈ W_i` where `U_i` is the stored
//! orthonormal basis. In these coordinates the synthesis operator is the
//! `n × D` matrix `[ω₁U₁ | ω₂U₂ | …]` and the analysis operator its transpose.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{self, hstack, max_abs, numerical_rank, Matrix, SpdSolver, Subspace};

/// Entrywise tolerance for operator identities.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Block layout of a direct sum of subspaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectSumIndex {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl DirectSumIndex {
    pub fn new(block_dims: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(block_dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &block_dims {
            acc += d;
            offsets.push(acc);
        }
        DirectSumIndex { block_dims, offsets }
    }

    pub fn len(&self) -> usize {
        self.block_dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_dims.is_empty()
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().expect("offsets start with 0")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

#[derive(Debug, Clone)]
pub struct Member {
    pub subspace: Subspace,
    pub weight: f64,
}

/// A weighted family `{(W_i, ω_i)}` with cached synthesis and frame operators.
///
/// Families whose subspaces do not span the ambient space are still
/// representable (they are Bessel sequences); [`FusionFrame::is_frame`]
/// tells them apart.
#[derive(Debug, Clone)]
pub struct FusionFrame {
    ambient_dim: usize,
    members: Vec<Member>,
    index: DirectSumIndex,
    synthesis: Matrix,
    frame_operator: Matrix,
    synthesis_rank: usize,
}

impl FusionFrame {
    /// Builds a family from subspaces and weights. Zero subspaces are rejected.
    pub fn new(ambient_dim: usize, members: Vec<(Subspace, f64)>) -> Result<Self> {
        if let Some(i) = members.iter().position(|(s, _)| s.is_zero()) {
            return Err(Error::EmptyMember { index: i });
        }
        Self::with_trivial_members(ambient_dim, members)
    }

    /// Like [`FusionFrame::new`] but admits zero subspaces, which arise as
    /// orthogonal complements of full-space members.
    pub fn with_trivial_members(ambient_dim: usize, members: Vec<(Subspace, f64)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::NoMembers);
        }
        let mut out = Vec::with_capacity(members.len());
        for (i, (subspace, weight)) in members.into_iter().enumerate() {
            if subspace.ambient_dim() != ambient_dim {
                return Err(Error::AmbientMismatch { expected: ambient_dim, found: subspace.ambient_dim() });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::NonPositiveWeight { index: i, weight });
            }
            out.push(Member { subspace, weight });
        }
        let index = DirectSumIndex::new(out.iter().map(|m| m.subspace.dim()).collect());
        let scaled: Vec<Matrix> = out.iter().map(|m| m.subspace.basis() * m.weight).collect();
        let refs: Vec<&Matrix> = scaled.iter().collect();
        let synthesis = hstack(ambient_dim, &refs);
        let mut frame_operator = Matrix::zeros(ambient_dim, ambient_dim);
        for m in &out {
            frame_operator += m.subspace.projection() * (m.weight * m.weight);
        }
        let synthesis_rank = numerical_rank(&synthesis)?;
        Ok(FusionFrame { ambient_dim, members: out, index, synthesis, frame_operator, synthesis_rank })
    }

    /// Convenience constructor from spanning sets; each set is orthonormalized.
    pub fn from_spans(ambient_dim: usize, spans: &[(Matrix, f64)]) -> Result<Self> {
        let members = spans
            .iter()
            .map(|(m, w)| Ok((Subspace::from_span(m)?, *w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient_dim, members)
    }

    /// Same subspaces, new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::IndexMismatch { left: self.len(), right: weights.len() });
        }
        let members = self.members.iter().zip(weights).map(|(m, &w)| (m.subspace.clone(), w)).collect();
        Self::with_trivial_members(self.ambient_dim, members)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn subspace(&self, i: usize) -> &Subspace {
        &self.members[i].subspace
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.members[i].weight
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.index.block_dims().to_vec()
    }

    pub fn index(&self) -> &DirectSumIndex {
        &self.index
    }

    /// `D = Σ dim W_i`.
    pub fn total_dim(&self) -> usize {
        self.index.total()
    }

    /// `S_W = Σ ω_i² π_{W_i}`.
    pub fn frame_operator(&self) -> &Matrix {
        &self.frame_operator
    }

    /// `T_W = [ω₁U₁ | ω₂U₂ | …]`, an `n × D` matrix.
    pub fn synthesis_matrix(&self) -> &Matrix {
        &self.synthesis
    }

    /// `T_W^*`, the transpose of the synthesis matrix.
    pub fn analysis_matrix(&self) -> Matrix {
        self.synthesis.transpose()
    }

    pub fn synthesis_rank(&self) -> usize {
        self.synthesis_rank
    }

    pub fn is_frame(&self) -> bool {
        self.synthesis_rank == self.ambient_dim
    }

    pub fn require_frame(&self) -> Result<()> {
        if self.is_frame() {
            Ok(())
        } else {
            Err(Error::NotAFrame { rank: self.synthesis_rank, ambient: self.ambient_dim })
        }
    }

    /// Factorization of `S_W` for applying `S_W⁻¹`.
    pub fn frame_operator_solver(&self) -> Result<SpdSolver> {
        self.require_frame()?;
        SpdSolver::new(&self.frame_operator)
    }

    /// Optimal bounds `(λ_min(S_W), λ_max(S_W))`.
    pub fn frame_bounds(&self) -> Result<(f64, f64)> {
        self.require_frame()?;
        let ev = linalg::symmetric_eigenvalues(&self.frame_operator);
        Ok((ev[0], ev[ev.len() - 1]))
    }

    pub fn is_tight(&self, tol: f64) -> Result<bool> {
        let (a, b) = self.frame_bounds()?;
        Ok((b - a).abs() <= tol * b.max(1.0))
    }

    pub fn is_parseval(&self, tol: f64) -> Result<bool> {
        let (a, b) = self.frame_bounds()?;
        Ok((a - 1.0).abs() <= tol && (b - 1.0).abs() <= tol)
    }

    /// Checks `ω_i² π_{W_i} S_W⁻¹ π_{W_j} = δ_ij π_{W_j}` for every pair.
    pub fn riesz_check(&self) -> Result<RieszCheck> {
        let solver = self.frame_operator_solver()?;
        let projections: Vec<Matrix> = self.members.iter().map(|m| m.subspace.projection()).collect();
        let mut failing = Vec::new();
        let mut max_residual = 0.0_f64;
        for (j, pj) in projections.iter().enumerate() {
            let s_inv_pj = solver.solve(pj);
            for (i, pi) in projections.iter().enumerate() {
                let w2 = self.members[i].weight.powi(2);
                let mut lhs = pi * &s_inv_pj * w2;
                if i == j {
                    lhs -= pj;
                }
                let r = max_abs(&lhs);
                max_residual = max_residual.max(r);
                if r > IDENTITY_TOL {
                    failing.push(RieszFailure { i, j, residual: r });
                }
            }
        }
        Ok(RieszCheck { is_riesz: failing.is_empty(), max_residual, failing })
    }

    pub fn is_riesz_basis(&self) -> Result<bool> {
        Ok(self.riesz_check()?.is_riesz)
    }

    /// The flat family `{ω_i f_{i,j}}` as columns, from Riesz bases of the
    /// members. `None` uses the stored orthonormal bases.
    pub fn local_frame_riesz(&self, riesz_bases: Option<&[Matrix]>) -> Result<Matrix> {
        let n = self.ambient_dim;
        let bases: Vec<Matrix> = match riesz_bases {
            None => self.members.iter().map(|m| m.subspace.basis().clone()).collect(),
            Some(b) => {
                self.validate_local_bases(b)?;
                b.to_vec()
            }
        };
        let scaled: Vec<Matrix> = bases.iter().zip(&self.members).map(|(b, m)| b * m.weight).collect();
        let refs: Vec<&Matrix> = scaled.iter().collect();
        Ok(hstack(n, &refs))
    }

    /// Each supplied matrix must be a basis of the corresponding member.
    pub fn validate_local_bases(&self, bases: &[Matrix]) -> Result<()> {
        if bases.len() != self.len() {
            return Err(Error::IndexMismatch { left: self.len(), right: bases.len() });
        }
        for (i, (b, m)) in bases.iter().zip(&self.members).enumerate() {
            linalg::check_finite(b)?;
            if b.nrows() != self.ambient_dim {
                return Err(Error::AmbientMismatch { expected: self.ambient_dim, found: b.nrows() });
            }
            let p = m.subspace.projection();
            for c in 0..b.ncols() {
                let col = b.column(c);
                let off = (col - &p * col).norm();
                if off > IDENTITY_TOL * col.norm().max(1.0) {
                    return Err(Error::NotInSubspace { member: i, column: c, distance: off });
                }
            }
            let rank = numerical_rank(b)?;
            if b.ncols() != m.subspace.dim() || rank != m.subspace.dim() {
                return Err(Error::RankDeficientLocalBasis { member: i, rank, expected: m.subspace.dim() });
            }
        }
        Ok(())
    }

    /// `F_W = {ω_i π_{W_i} e_j}` over members `i` and standard basis vectors
    /// `e_j`, member-major; zero vectors are kept.
    pub fn local_frame_projected(&self) -> Matrix {
        let n = self.ambient_dim;
        let blocks: Vec<Matrix> = self.members.iter().map(|m| m.subspace.projection() * m.weight).collect();
        let refs: Vec<&Matrix> = blocks.iter().collect();
        hstack(n, &refs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszFailure {
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszCheck {
    pub is_riesz: bool,
    pub max_residual: f64,
    pub failing: Vec<RieszFailure>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_diagonal(&linalg::Vector::from_vec(v.to_vec()))
    }

    #[test]
    fn fx1_frame_operator_and_bounds() {
        let w = fixtures::fx1();
        assert!(w.is_frame());
        assert_abs_diff_eq!(w.frame_operator().clone(), diag(&[1.0, 2.0, 1.0]), epsilon = 1e-14);
        let (a, b) = w.frame_bounds().unwrap();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-12);
        assert_eq!(w.synthesis_matrix().shape(), (3, 4));
        assert_eq!(numerical_rank(w.synthesis_matrix()).unwrap(), 3);
    }

    #[test]
    fn bessel_only_family() {
        let w = FusionFrame::new(2, vec![(Subspace::coordinate(2, &[0]), 1.0)]).unwrap();
        assert!(!w.is_frame());
        assert!(matches!(w.frame_bounds(), Err(Error::NotAFrame { rank: 1, ambient: 2 })));
        assert!(matches!(w.is_riesz_basis(), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn construction_errors() {
        let e1 = Subspace::coordinate(3, &[0]);
        assert!(matches!(
            FusionFrame::new(3, vec![(e1.clone(), 1.0), (e1.clone(), -1.0)]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            FusionFrame::new(2, vec![(e1.clone(), 1.0)]),
            Err(Error::AmbientMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(FusionFrame::new(3, vec![(Subspace::zero(3), 1.0)]), Err(Error::EmptyMember { index: 0 })));
        assert!(matches!(FusionFrame::new(3, vec![]), Err(Error::NoMembers)));
    }

    #[test]
    fn parseval_partition() {
        let w = fixtures::parseval_partition(3, &[1, 2]);
        let (a, b) = w.frame_bounds().unwrap();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-14);
        assert!(w.is_parseval(1e-12).unwrap());
        assert!(w.is_riesz_basis().unwrap());
    }

    #[test]
    fn fx3_is_two_tight() {
        let w = fixtures::fx3(3);
        let (a, b) = w.frame_bounds().unwrap();
        assert_abs_diff_eq!(a, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-12);
        assert!(w.is_tight(1e-12).unwrap());
    }

    #[test]
    fn synthesis_examples() {
        let w = FusionFrame::new(2, vec![(Subspace::full(2), 1.0)]).unwrap();
        assert_abs_diff_eq!(w.synthesis_matrix().clone(), Matrix::identity(2, 2), epsilon = 0.0);
        let t = fixtures::fx5().synthesis_matrix().clone();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = Matrix::from_row_slice(3, 3, &[h, 0.0, 0.0, h, 1.0, 0.0, 0.0, 0.0, 1.0]);
        // member bases are kept up to sign
        assert_abs_diff_eq!(t.abs(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(&t * t.transpose(), fixtures::fx5().frame_operator().clone(), epsilon = 1e-12);
    }

    #[test]
    fn riesz_examples() {
        assert!(fixtures::fx5().is_riesz_basis().unwrap());
        assert!(!fixtures::fx1().is_riesz_basis().unwrap());
        let check = fixtures::fx7().riesz_check().unwrap();
        assert!(!check.is_riesz);
        assert!(!check.failing.is_empty());
    }

    #[test]
    fn local_frames() {
        let w = fixtures::fx1();
        let f = w.local_frame_riesz(Some(&fixtures::fx1_local_bases())).unwrap();
        let expected = Matrix::from_row_slice(3, 4, &[1.0, 1.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(f, expected, epsilon = 0.0);
        assert_eq!(fixtures::fx5().local_frame_riesz(None).unwrap().ncols(), 3);
        let fx2 = fixtures::fx2(3);
        let f2 = fx2.local_frame_riesz(None).unwrap();
        assert_eq!(f2.shape(), (4, 6));
    }

    #[test]
    fn local_basis_validation() {
        let w = fixtures::fx1();
        let mut bad = fixtures::fx1_local_bases();
        bad[0][(2, 0)] = 0.5;
        assert!(matches!(w.local_frame_riesz(Some(&bad)), Err(Error::NotInSubspace { member: 0, column: 0, .. })));
        let mut dep = fixtures::fx1_local_bases();
        dep[1] = Matrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 2.0, 1.0, 2.0]);
        assert!(matches!(
            w.local_frame_riesz(Some(&dep)),
            Err(Error::RankDeficientLocalBasis { member: 1, rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn projected_local_frame() {
        let w = fixtures::fx2(3);
        assert_eq!(w.local_frame_projected().ncols(), 8);
        let p = fixtures::parseval_partition(2, &[1, 1]);
        let f = p.local_frame_projected();
        let expected = Matrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(f, expected, epsilon = 1e-15);
        let fx1 = fixtures::fx1();
        let f1 = fx1.local_frame_projected();
        assert_eq!(f1.ncols(), 6);
        assert_abs_diff_eq!(&f1 * f1.transpose(), diag(&[1.0, 2.0, 1.0]), epsilon = 1e-12);
    }

    #[test]
    fn direct_sum_index() {
        let idx = DirectSumIndex::new(vec![2, 1, 3]);
        assert_eq!(idx.total(), 6);
        assert_eq!(idx.range(1), 2..3);
        assert_eq!(idx.offset(2), 3);
    }
}
