mod common;

use fusion_excess::excess::{excess_projected_local, excess_report, excess_trace, SNAP_TOL};
use fusion_excess::linalg::{numerical_rank, orthonormalize, subspace_intersection, Subspace};
use fusion_excess::random::{gaussian_matrix, random_frame, seeded_rng, suite_frame};
use fusion_excess::{fixtures, Matrix};

use common::{brute_frame_operator, gauss_nullity, gauss_rank, max_abs_diff, min_eigenvalue};

/// `B (BᵀB)⁻¹ Bᵀ` from a spanning set of full column rank.
fn projection_from_span(b: &Matrix) -> Matrix {
    let g = (b.transpose() * b).try_inverse().expect("full column rank");
    b * g * b.transpose()
}

#[test]
fn elimination_rank_matches_svd_rank() {
    let mut rng = seeded_rng(7, 0);
    for case in 0..60 {
        let (rows, cols) = (1 + case % 9, 1 + (case * 5) % 11);
        let inner = 1 + case % rows.min(cols);
        let m = gaussian_matrix(&mut rng, rows, inner) * gaussian_matrix(&mut rng, inner, cols);
        assert_eq!(gauss_rank(&m, 1e-9), inner, "case {case}");
        assert_eq!(numerical_rank(&m).unwrap(), inner, "case {case}");
    }
}

#[test]
fn five_random_columns_span_three_dimensions() {
    let span = gaussian_matrix(&mut seeded_rng(7, 0), 3, 5);
    assert_eq!(gauss_rank(&span, 1e-9), 3);
    assert_eq!(orthonormalize(&span).unwrap().dim(), 3);
}

#[test]
fn fx1_synthesis_rank() {
    let w = fixtures::fx1();
    assert_eq!(gauss_rank(w.synthesis_matrix(), 1e-9), 3);
    assert_eq!(gauss_nullity(w.synthesis_matrix()), 1);
}

#[test]
fn frame_operator_by_explicit_projections() {
    for seed in 0..40u64 {
        let rf = random_frame(2 + seed as usize % 4, &[1, 2, 2], seed).unwrap();
        let w = rf.frame().unwrap();
        let n = w.ambient_dim();
        let mut s = Matrix::zeros(n, n);
        for (span, weight) in rf.spans.iter().zip(&rf.weights) {
            s += projection_from_span(span) * (weight * weight);
        }
        assert!(max_abs_diff(w.frame_operator(), &s) < 1e-10, "seed {seed}");
        let scaled = w.synthesis_matrix();
        assert!(max_abs_diff(&brute_frame_operator(scaled), &s) < 1e-10, "seed {seed}");
    }
}

#[test]
fn lower_frame_bound_by_bisection() {
    for case in 0..40 {
        let w = suite_frame(99, case).unwrap();
        let (a, _) = w.frame_bounds().unwrap();
        let oracle = min_eigenvalue(w.frame_operator());
        assert!((a - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "case {case}: {a} vs {oracle}");
    }
}

#[test]
fn excess_against_elimination() {
    for case in 0..100 {
        let w = suite_frame(17, case).unwrap();
        let oracle = gauss_nullity(w.synthesis_matrix()) as i64;
        let r = excess_report(&w, None, SNAP_TOL).unwrap();
        assert_eq!(r.e_nullspace, oracle, "case {case}");
        assert!((excess_trace(&w).unwrap() - oracle as f64).abs() < 1e-8, "case {case}");
    }
}

#[test]
fn projected_local_frame_by_hand() {
    let w = fixtures::fx1();
    let mut columns = Vec::new();
    for (axes, weight) in [(&[0usize, 1][..], 1.0), (&[1, 2][..], 1.0)] {
        let p = Subspace::coordinate(3, axes).projection();
        for j in 0..3 {
            columns.push(p.column(j) * weight);
        }
    }
    let f = Matrix::from_columns(&columns);
    assert_eq!(f.ncols() - gauss_rank(&f, 1e-9), 3);
    assert_eq!(excess_projected_local(&w, SNAP_TOL).unwrap().e_projected, 3);
}

#[test]
fn intersection_dimension_by_elimination() {
    let mut rng = seeded_rng(31, 0);
    for case in 0..50 {
        let n = 2 + case % 7;
        let shared = case % n.min(3);
        let common = gaussian_matrix(&mut rng, n, shared);
        let ka = 1 + case % (n - shared).max(1);
        let a = orthonormalize(&Matrix::from_columns(
            &common.column_iter().chain(gaussian_matrix(&mut rng, n, ka).column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>(),
        ))
        .unwrap();
        let b = orthonormalize(&Matrix::from_columns(
            &common.column_iter().chain(gaussian_matrix(&mut rng, n, 1).column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>(),
        ))
        .unwrap();
        let joint = Matrix::from_columns(&a.basis().column_iter().chain(b.basis().column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>());
        let oracle = a.dim() + b.dim() - gauss_rank(&joint, 1e-9);
        assert_eq!(subspace_intersection(&a, &b).unwrap().dim(), oracle, "case {case}");
    }
}
