use proptest::prelude::*;

use fusion_excess::dual::{canonical_dual, equivalent_frame};
use fusion_excess::excess::excess_nullspace;
use fusion_excess::linalg::{
    max_abs, numerical_rank, orthogonal_complement, orthonormalize, subspace_intersection, subspace_sum,
};
use fusion_excess::random::{gaussian_matrix, random_invertible, seeded_rng, suite_frame};
use fusion_excess::FusionFrame;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() }
}

fn same_frame(a: &FusionFrame, b: &FusionFrame) -> f64 {
    let mut worst = (a.len() as f64 - b.len() as f64).abs();
    for i in 0..a.len().min(b.len()) {
        worst = worst.max(max_abs(&(a.subspace(i).projection() - b.subspace(i).projection())));
        worst = worst.max((a.weight(i) - b.weight(i)).abs());
    }
    worst
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn projections_are_symmetric_idempotent(seed in any::<u64>(), n in 1usize..9, k in 1usize..6) {
        let s = orthonormalize(&gaussian_matrix(&mut seeded_rng(seed, 0), n, k)).unwrap();
        let p = s.projection();
        prop_assert!(max_abs(&(&p * &p - &p)) < 1e-12);
        prop_assert!(max_abs(&(&p - p.transpose())) < 1e-14);
        prop_assert!((p.trace() - s.dim() as f64).abs() < 1e-12);
    }

    #[test]
    fn grassmann_identity(seed in any::<u64>(), n in 1usize..9, ka in 1usize..5, kb in 1usize..5, shared in 0usize..3) {
        let mut rng = seeded_rng(seed, 0);
        let common = gaussian_matrix(&mut rng, n, shared);
        let widen = |rng: &mut _, k| {
            let extra = gaussian_matrix(rng, n, k);
            let cols: Vec<_> = common.column_iter().chain(extra.column_iter()).map(|c| c.into_owned()).collect();
            orthonormalize(&fusion_excess::Matrix::from_columns(&cols)).unwrap()
        };
        let (a, b) = (widen(&mut rng, ka), widen(&mut rng, kb));
        let sum = subspace_sum(&a, &b).unwrap().dim();
        let meet = subspace_intersection(&a, &b).unwrap().dim();
        prop_assert_eq!(sum + meet, a.dim() + b.dim());
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>(), n in 1usize..10, k in 0usize..6) {
        let s = orthonormalize(&gaussian_matrix(&mut seeded_rng(seed, 0), n, k)).unwrap();
        let c = orthogonal_complement(&s);
        prop_assert_eq!(c.dim() + s.dim(), n);
        prop_assert!(max_abs(&(s.basis().transpose() * c.basis())) < 1e-12);
        let back = orthogonal_complement(&c);
        prop_assert!(max_abs(&(back.projection() - s.projection())) < 1e-10);
    }

    #[test]
    fn rank_of_transpose(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9, inner in 1usize..9) {
        let mut rng = seeded_rng(seed, 0);
        let m = gaussian_matrix(&mut rng, rows, inner) * gaussian_matrix(&mut rng, inner, cols);
        prop_assert_eq!(numerical_rank(&m).unwrap(), numerical_rank(&m.transpose()).unwrap());
        prop_assert_eq!(numerical_rank(&m).unwrap(), inner.min(rows).min(cols));
    }

    #[test]
    fn equivalent_frames_round_trip(seed in any::<u64>()) {
        let w = suite_frame(seed, 0).unwrap();
        let u = random_invertible(&mut seeded_rng(seed, 1), w.ambient_dim()).unwrap();
        let image = equivalent_frame(&w, &u).unwrap();
        prop_assert_eq!(excess_nullspace(&image).unwrap(), excess_nullspace(&w).unwrap());
        let back = equivalent_frame(&image, &u.clone().try_inverse().unwrap()).unwrap();
        prop_assert!(same_frame(&back, &w) < 1e-8);
    }

    #[test]
    fn canonical_dual_keeps_excess(seed in any::<u64>()) {
        let w = suite_frame(seed, 0).unwrap();
        let dual = canonical_dual(&w).unwrap();
        prop_assert_eq!(excess_nullspace(&dual).unwrap(), excess_nullspace(&w).unwrap());
        prop_assert_eq!(dual.dims(), w.dims());
    }
}
