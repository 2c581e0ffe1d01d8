//! Named example families used by the regression corpus and the tests.
//!
//! Indices are zero-based: `coordinate(n, &[0, 1])` is `span{e₁, e₂}`.

use crate::frame::{DirectSumIndex, FusionFrame};
use crate::linalg::{orthogonal_complement, Matrix, Subspace};
use crate::dual::{BlockOperator, OperatorTarget};

fn unit(len: usize) -> Vec<f64> {
    vec![1.0; len]
}

fn build(n: usize, subspaces: Vec<Subspace>, weights: &[f64]) -> FusionFrame {
    assert_eq!(subspaces.len(), weights.len(), "one weight per member");
    FusionFrame::new(n, subspaces.into_iter().zip(weights.iter().copied()).collect())
        .expect("fixture members are valid")
}

/// `W₁ = R²×{0}`, `W₂ = {0}×R²` in `R³`.
pub fn fx1() -> FusionFrame {
    fx1_weighted(&unit(2))
}

pub fn fx1_weighted(weights: &[f64]) -> FusionFrame {
    build(3, vec![Subspace::coordinate(3, &[0, 1]), Subspace::coordinate(3, &[1, 2])], weights)
}

/// Local Riesz bases `{(1,1,0),(1,−1,0)}` and `{(0,1,0),(0,−1,1)}` of FX1.
pub fn fx1_local_bases() -> Vec<Matrix> {
    vec![
        Matrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, -1.0, 0.0, 0.0]),
        Matrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, -1.0, 0.0, 1.0]),
    ]
}

/// `W₁ = Rⁿ×{0}`, `W₂ = {0}×Rⁿ` in `R^{n+1}`.
pub fn fx2(n: usize) -> FusionFrame {
    fx2_weighted(n, &unit(2))
}

pub fn fx2_weighted(n: usize, weights: &[f64]) -> FusionFrame {
    let first: Vec<usize> = (0..n).collect();
    let second: Vec<usize> = (1..=n).collect();
    build(n + 1, vec![Subspace::coordinate(n + 1, &first), Subspace::coordinate(n + 1, &second)], weights)
}

/// Every coordinate axis of `Rⁿ` taken twice: `2n` members.
pub fn fx3(n: usize) -> FusionFrame {
    fx3_weighted(n, &unit(2 * n))
}

pub fn fx3_weighted(n: usize, weights: &[f64]) -> FusionFrame {
    let subspaces = (0..n).flat_map(|i| [Subspace::coordinate(n, &[i]), Subspace::coordinate(n, &[i])]).collect();
    build(n, subspaces, weights)
}

/// `W_i = span{e_i, e_{i+1}}` for `i = 1..n−1` in `Rⁿ`.
pub fn fx4(n: usize) -> FusionFrame {
    fx4_weighted(n, &unit(n - 1))
}

pub fn fx4_weighted(n: usize, weights: &[f64]) -> FusionFrame {
    let subspaces = (0..n - 1).map(|i| Subspace::coordinate(n, &[i, i + 1])).collect();
    build(n, subspaces, weights)
}

/// `W₁ = span{(1,1,0)}`, `W₂ = {0}×R²`: a fusion Riesz basis of `R³`.
pub fn fx5() -> FusionFrame {
    fx5_weighted(&unit(2))
}

pub fn fx5_weighted(weights: &[f64]) -> FusionFrame {
    let w1 = Subspace::from_span(&Matrix::from_column_slice(3, 1, &[1.0, 1.0, 0.0])).expect("finite");
    build(3, vec![w1, Subspace::coordinate(3, &[1, 2])], weights)
}

/// Closed form of the FX5 frame operator for arbitrary weights.
pub fn fx5_frame_operator(w1: f64, w2: f64) -> Matrix {
    let (a, b) = (w1 * w1, w2 * w2);
    Matrix::from_row_slice(3, 3, &[a, a, 0.0, a, a + 2.0 * b, 0.0, 0.0, 0.0, 2.0 * b]) * 0.5
}

/// `V₁ = R²×{0}`, `V₂ = R³` with the weights of `w`: a Gavruta dual of FX5.
pub fn fx5_gavruta_dual(w: &FusionFrame) -> FusionFrame {
    build(3, vec![Subspace::coordinate(3, &[0, 1]), Subspace::full(3)], &w.weights())
}

/// `W_{2i−1} = W_{2i} = span{e_i, e_{i+1}}` for `i = 1..n−1` in `Rⁿ`.
pub fn fx6(n: usize) -> FusionFrame {
    fx6_weighted(n, &unit(2 * (n - 1)))
}

pub fn fx6_weighted(n: usize, weights: &[f64]) -> FusionFrame {
    let subspaces = (0..n - 1)
        .flat_map(|i| [Subspace::coordinate(n, &[i, i + 1]), Subspace::coordinate(n, &[i, i + 1])])
        .collect();
    build(n, subspaces, weights)
}

/// `V = {W_{2i−1}, W_{2i}^⊥}`, a Gavruta dual of FX6.
///
/// The dual identity forces `υ_{2i−1} = (ω_{2i−1}² + ω_{2i}²)/ω_{2i−1}`;
/// the even weights are free and copied from `w`.
pub fn fx6_dual(w: &FusionFrame) -> FusionFrame {
    let n = w.ambient_dim();
    let mut members = Vec::with_capacity(w.len());
    for pair in 0..w.len() / 2 {
        let (odd, even) = (2 * pair, 2 * pair + 1);
        let (wo, we) = (w.weight(odd), w.weight(even));
        members.push((w.subspace(odd).clone(), (wo * wo + we * we) / wo));
        members.push((orthogonal_complement(w.subspace(even)), we));
    }
    FusionFrame::new(n, members).expect("fixture members are valid")
}

/// `span{e₁}`, `span{e₁+e₂}`, `span{e₂, e₃}` in `R³`: not a Riesz basis, yet
/// every pair of orthogonal complements is a frame.
pub fn fx7() -> FusionFrame {
    let w2 = Subspace::from_span(&Matrix::from_column_slice(3, 1, &[1.0, 1.0, 0.0])).expect("finite");
    build(3, vec![Subspace::coordinate(3, &[0]), w2, Subspace::coordinate(3, &[1, 2])], &unit(3))
}

/// Consecutive coordinate blocks of the given sizes, unit weights.
pub fn parseval_partition(n: usize, sizes: &[usize]) -> FusionFrame {
    assert_eq!(sizes.iter().sum::<usize>(), n, "sizes must partition n");
    let mut at = 0;
    let subspaces = sizes
        .iter()
        .map(|&d| {
            let axes: Vec<usize> = (at..at + d).collect();
            at += d;
            Subspace::coordinate(n, &axes)
        })
        .collect();
    build(n, subspaces, &unit(sizes.len()))
}

/// Finite truncation of the two-dimensional sliding family with a one-dimensional
/// tail: `span{e_i, e_{i+1}}` for `i = 1..n`, then `span{e_{n+2}}`, in `R^{n+2}`.
pub fn gap_frame(n: usize) -> FusionFrame {
    gap_frame_weighted(n, &unit(n + 1))
}

pub fn gap_frame_weighted(n: usize, weights: &[f64]) -> FusionFrame {
    let dim = n + 2;
    let mut subspaces: Vec<Subspace> = (0..n).map(|i| Subspace::coordinate(dim, &[i, i + 1])).collect();
    subspaces.push(Subspace::coordinate(dim, &[n + 1]));
    build(dim, subspaces, weights)
}

/// Enlarged dual of [`gap_frame`]: `span{e_i, e_{i+1}, e_{i+2}}` for the
/// sliding members, the tail kept, weights copied. Excess grows by `n`.
pub fn gap_dual(w: &FusionFrame) -> FusionFrame {
    let dim = w.ambient_dim();
    let n = dim - 2;
    let mut subspaces: Vec<Subspace> = (0..n).map(|i| Subspace::coordinate(dim, &[i, i + 1, i + 2])).collect();
    subspaces.push(Subspace::coordinate(dim, &[n + 1]));
    build(dim, subspaces, &w.weights())
}

/// Left inverse of the FX4 analysis operator whose block columns past `cut`
/// collapse to single coordinate directions.
///
/// Block `i` acts on the coordinates of `e_i` and `e_{i+1}`. Up to `cut` the
/// identity is split unevenly (`½ − shift`, `½ + shift`) between neighbouring
/// blocks; beyond it the whole of `e_j` is carried by block `j − 1`.
/// The resulting component preserving dual has excess `cut`.
pub fn fx4_staircase_left_inverse(w: &FusionFrame, cut: usize, shift: f64) -> BlockOperator {
    let n = w.ambient_dim();
    assert_eq!(w.len(), n - 1, "expects an FX4 family");
    assert!(cut <= n - 2, "cut must index a member");
    assert!((shift.abs() - 0.5).abs() > 1e-3, "shift must keep both halves nonzero");
    let index = DirectSumIndex::new(w.dims());
    let mut a = Matrix::zeros(n, index.total());
    let col_a = |i: usize| index.offset(i);
    let col_b = |i: usize| index.offset(i) + 1;
    a[(0, col_a(0))] = 1.0 / w.weight(0);
    a[(n - 1, col_b(n - 2))] = 1.0 / w.weight(n - 2);
    for j in 1..n - 1 {
        if j <= cut {
            a[(j, col_a(j))] = (0.5 - shift) / w.weight(j);
            a[(j, col_b(j - 1))] = (0.5 + shift) / w.weight(j - 1);
        } else {
            a[(j, col_b(j - 1))] = 1.0 / w.weight(j - 1);
        }
    }
    BlockOperator::new(index, OperatorTarget::Ambient(n), a).expect("shape fixed by construction")
}
