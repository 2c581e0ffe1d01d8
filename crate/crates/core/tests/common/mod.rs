//! Test-only oracles, independent of the library's SVD/QR kernel.
#![allow(dead_code, clippy::needless_range_loop)]

use fusion_excess::Matrix;

/// Rank by Gaussian elimination with partial pivoting on a plain copy.
pub fn gauss_rank(m: &Matrix, rel_tol: f64) -> usize {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a: Vec<Vec<f64>> = (0..rows).map(|r| (0..cols).map(|c| m[(r, c)]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = rel_tol * scale;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[pivot][c].abs() <= tol {
            continue;
        }
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            let f = a[r][c] / a[rank][c];
            for k in c..cols {
                a[r][k] -= f * a[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

pub fn gauss_nullity(m: &Matrix) -> usize {
    m.ncols() - gauss_rank(m, 1e-9)
}

/// `Σ_k f_k f_kᵀ` summed one column at a time.
pub fn brute_frame_operator(f: &Matrix) -> Matrix {
    let n = f.nrows();
    let mut s = Matrix::zeros(n, n);
    for k in 0..f.ncols() {
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] += f[(i, k)] * f[(j, k)];
            }
        }
    }
    s
}

/// Smallest eigenvalue of a symmetric matrix by inverse-free bisection on
/// Sylvester's law of inertia (LDLᵀ sign counts).
pub fn min_eigenvalue(s: &Matrix) -> f64 {
    let n = s.nrows();
    let bound = (0..n).map(|i| (0..n).map(|j| s[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let negatives_below = |x: f64| {
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s[(i, j)] - if i == j { x } else { 0.0 }).collect()).collect();
        let mut count = 0;
        for k in 0..n {
            let mut d = a[k][k];
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
            for i in k + 1..n {
                let f = a[i][k] / d;
                for j in k + 1..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        count
    };
    let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if negatives_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}
