//! Excess of fusion frames and of their orthogonal complements.

use crate::check::{snap, Check};
use crate::error::{Error, Result};
use crate::frame::FusionFrame;
use crate::linalg::{numerical_rank, orthogonal_complement, subspace_intersection, Matrix, SpdSolver, Subspace};

/// Default distance to the nearest integer accepted when snapping real formulas.
pub const SNAP_TOL: f64 = 1e-6;

/// The excess of one frame by every method, with their agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessReport {
    pub e_nullspace: i64,
    pub e_rank_nullity: i64,
    pub e_trace: f64,
    pub e_trace_rounded: i64,
    /// Excess of the flat local frame; orthonormal local bases unless supplied.
    pub e_local: i64,
    pub e_local_raw: f64,
    pub agreement: bool,
    /// Largest distance of a real-valued formula from its rounding.
    pub tolerance_slack: f64,
}

/// `dim N(T_W) = D − rank T_W`.
pub fn excess_nullspace(w: &FusionFrame) -> Result<i64> {
    w.require_frame()?;
    Ok(w.total_dim() as i64 - w.synthesis_rank() as i64)
}

/// `Σ dim W_i − n`.
pub fn excess_rank_nullity(w: &FusionFrame) -> Result<i64> {
    w.require_frame()?;
    Ok(w.total_dim() as i64 - w.ambient_dim() as i64)
}

/// `Σ_i (dim W_i − ω_i² tr(π_{W_i} S_W⁻¹ π_{W_i}))`, unrounded.
pub fn excess_trace(w: &FusionFrame) -> Result<f64> {
    let solver = w.frame_operator_solver()?;
    let mut total = 0.0;
    for m in w.members() {
        let u = m.subspace.basis();
        let inner = u.transpose() * solver.solve(u);
        total += m.subspace.dim() as f64 - m.weight * m.weight * inner.trace();
    }
    Ok(total)
}

/// `m − tr(Fᵀ S_F⁻¹ F)` for a flat family given as columns, unrounded.
pub fn flat_frame_excess_raw(f: &Matrix) -> Result<f64> {
    let n = f.nrows();
    let rank = numerical_rank(f)?;
    if rank < n {
        return Err(Error::NotAFrame { rank, ambient: n });
    }
    let solver = SpdSolver::new(&(f * f.transpose()))?;
    let inner = f.transpose() * solver.solve(f);
    Ok(f.ncols() as f64 - inner.trace())
}

pub fn flat_frame_excess(f: &Matrix, tol: f64) -> Result<i64> {
    snap(flat_frame_excess_raw(f)?, tol)
}

/// Excess of the local frame `{ω_i f_{i,j}}`.
pub fn excess_local(w: &FusionFrame, riesz_bases: Option<&[Matrix]>, tol: f64) -> Result<i64> {
    w.require_frame()?;
    flat_frame_excess(&w.local_frame_riesz(riesz_bases)?, tol)
}

/// All methods side by side. Snapping failures show up as disagreement,
/// not as errors.
pub fn excess_report(w: &FusionFrame, riesz_bases: Option<&[Matrix]>, tol: f64) -> Result<ExcessReport> {
    let e_nullspace = excess_nullspace(w)?;
    let e_rank_nullity = excess_rank_nullity(w)?;
    let e_trace = excess_trace(w)?;
    let e_local_raw = flat_frame_excess_raw(&w.local_frame_riesz(riesz_bases)?)?;
    let e_trace_rounded = e_trace.round() as i64;
    let e_local = e_local_raw.round() as i64;
    let tolerance_slack = (e_trace - e_trace.round()).abs().max((e_local_raw - e_local_raw.round()).abs());
    let agreement = e_nullspace == e_rank_nullity
        && e_nullspace == e_trace_rounded
        && e_nullspace == e_local
        && tolerance_slack <= tol;
    Ok(ExcessReport {
        e_nullspace,
        e_rank_nullity,
        e_trace,
        e_trace_rounded,
        e_local,
        e_local_raw,
        agreement,
        tolerance_slack,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedLocalReport {
    pub e_projected: i64,
    pub e_frame: i64,
    pub checks: Vec<Check>,
}

/// Excess of `F_W = {ω_i π_{W_i} e_j}` and its relation to `e(W)`.
pub fn excess_projected_local(w: &FusionFrame, tol: f64) -> Result<ProjectedLocalReport> {
    let e_frame = excess_nullspace(w)?;
    let e_projected = flat_frame_excess(&w.local_frame_projected(), tol)?;
    let members = w.len() as i64;
    let n = w.ambient_dim() as i64;
    let checks = vec![
        Check::exact("e(F_W) + sum dim W_i = |I| n + e(W)", e_projected + w.total_dim() as i64, members * n + e_frame),
        Check::exact("e(F_W) = (|I| - 1) n", e_projected, (members - 1) * n),
    ];
    Ok(ProjectedLocalReport { e_projected, e_frame, checks })
}

/// `⋂ W_i`, by iterated pairwise intersection.
pub fn common_intersection(w: &FusionFrame) -> Result<Subspace> {
    let mut acc = w.subspace(0).clone();
    for m in &w.members()[1..] {
        if acc.is_zero() {
            break;
        }
        acc = subspace_intersection(&acc, &m.subspace)?;
    }
    Ok(acc)
}

/// `W^⊥ = {(W_i^⊥, ω_i)}`, defined as a frame exactly when `⋂ W_i = {0}`.
///
/// Members equal to the whole space contribute zero complements, which are kept
/// so that indices line up with `w`.
pub fn complement_frame(w: &FusionFrame) -> Result<FusionFrame> {
    w.require_frame()?;
    if w.len() < 2 {
        return Err(Error::InvalidArgument("complement frame needs at least two members".into()));
    }
    let intersection = common_intersection(w)?;
    if !intersection.is_zero() {
        return Err(Error::ComplementNotFrame { intersection });
    }
    let members = w.members().iter().map(|m| (orthogonal_complement(&m.subspace), m.weight)).collect();
    let c = FusionFrame::with_trivial_members(w.ambient_dim(), members)?;
    c.require_frame()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementReport {
    pub e_frame: i64,
    pub e_complement: i64,
    pub check: Check,
}

/// `e(W^⊥) + e(W) = (|I| − 2) n`.
pub fn verify_complement_identity(w: &FusionFrame) -> Result<ComplementReport> {
    let c = complement_frame(w)?;
    let e_frame = excess_nullspace(w)?;
    let e_complement = excess_nullspace(&c)?;
    let rhs = (w.len() as i64 - 2) * w.ambient_dim() as i64;
    let check = Check::exact("e(W^perp) + e(W) = (|I| - 2) n", e_complement + e_frame, rhs);
    Ok(ComplementReport { e_frame, e_complement, check })
}

/// `{(W_ℓ^⊥, ω_ℓ), (W_k^⊥, ω_k)}` for a fusion Riesz basis, which is always a frame.
pub fn complement_pair_frame(w: &FusionFrame, l: usize, k: usize) -> Result<FusionFrame> {
    if l == k || l >= w.len() || k >= w.len() {
        return Err(Error::InvalidArgument(format!("member pair ({l}, {k}) out of range or repeated")));
    }
    if !w.is_riesz_basis()? {
        return Err(Error::NotRieszBasis);
    }
    let members = [l, k].iter().map(|&i| (orthogonal_complement(w.subspace(i)), w.weight(i))).collect();
    let pair = FusionFrame::with_trivial_members(w.ambient_dim(), members)?;
    pair.require_frame()?;
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fx1_all_methods() {
        let w = fixtures::fx1();
        let r = excess_report(&w, Some(&fixtures::fx1_local_bases()), SNAP_TOL).unwrap();
        assert_eq!((r.e_nullspace, r.e_rank_nullity, r.e_trace_rounded, r.e_local), (1, 1, 1, 1));
        assert_abs_diff_eq!(r.e_trace, 1.0, epsilon = 1e-9);
        assert!(r.agreement);
    }

    #[test]
    fn named_families() {
        assert_eq!(excess_nullspace(&fixtures::parseval_partition(4, &[1, 3])).unwrap(), 0);
        assert_eq!(excess_nullspace(&fixtures::fx3(3)).unwrap(), 3);
        assert_eq!(excess_rank_nullity(&fixtures::fx2(3)).unwrap(), 2);
        assert_eq!(excess_rank_nullity(&fixtures::fx4(5)).unwrap(), 3);
        assert_eq!(excess_rank_nullity(&fixtures::fx6(4)).unwrap(), 8);
        assert_abs_diff_eq!(excess_trace(&fixtures::parseval_partition(3, &[1, 1, 1])).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(excess_local(&fixtures::fx5(), None, SNAP_TOL).unwrap(), 0);
    }

    #[test]
    fn bessel_family_is_refused() {
        let w = FusionFrame::new(2, vec![(Subspace::coordinate(2, &[0]), 1.0)]).unwrap();
        assert!(matches!(excess_nullspace(&w), Err(Error::NotAFrame { .. })));
        assert!(matches!(excess_trace(&w), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn projected_local_frame() {
        let r = excess_projected_local(&fixtures::fx2(3), SNAP_TOL).unwrap();
        assert_eq!(r.e_projected, 4);
        assert!(r.checks.iter().all(|c| c.pass));
        assert_eq!(excess_projected_local(&fixtures::fx1(), SNAP_TOL).unwrap().e_projected, 3);
        let single = FusionFrame::new(3, vec![(Subspace::full(3), 2.0)]).unwrap();
        assert_eq!(excess_projected_local(&single, SNAP_TOL).unwrap().e_projected, 0);
    }

    #[test]
    fn complements() {
        let r = verify_complement_identity(&fixtures::fx3(3)).unwrap();
        assert_eq!((r.e_complement, r.e_frame), (9, 3));
        assert!(r.check.pass);
        let r = verify_complement_identity(&fixtures::fx4(5)).unwrap();
        assert_eq!((r.e_complement, r.e_frame), (7, 3));
        assert!(r.check.pass);
        assert_eq!(verify_complement_identity(&fixtures::fx5()).unwrap().e_complement, 0);
    }

    #[test]
    fn complement_refused_on_common_line() {
        let line = Subspace::coordinate(2, &[0]);
        let w = FusionFrame::new(2, vec![(line.clone(), 1.0), (line.clone(), 1.0), (Subspace::full(2), 1.0)]).unwrap();
        match complement_frame(&w) {
            Err(Error::ComplementNotFrame { intersection }) => {
                assert_eq!(intersection.dim(), 1);
                assert!(intersection.projection_distance(&line).unwrap() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complement_keeps_full_members() {
        let w = FusionFrame::new(
            2,
            vec![(Subspace::full(2), 1.0), (Subspace::coordinate(2, &[0]), 1.0), (Subspace::coordinate(2, &[1]), 1.0)],
        )
        .unwrap();
        let c = complement_frame(&w).unwrap();
        assert_eq!(c.dims(), vec![0, 1, 1]);
        assert!(verify_complement_identity(&w).unwrap().check.pass);
    }

    #[test]
    fn complement_pairs() {
        let pair = complement_pair_frame(&fixtures::fx5(), 0, 1).unwrap();
        assert!(pair.frame_bounds().unwrap().0 > 0.0);
        let lines = Matrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let spans: Vec<(Matrix, f64)> = (0..3).map(|j| (lines.columns(j, 1).into_owned(), 1.0)).collect();
        let riesz = FusionFrame::from_spans(3, &spans).unwrap();
        assert!(complement_pair_frame(&riesz, 0, 1).unwrap().is_frame());
        assert!(matches!(complement_pair_frame(&fixtures::fx7(), 0, 1), Err(Error::NotRieszBasis)));
    }
}
