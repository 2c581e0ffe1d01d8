//! Seeded generation of frames and duals.
//!
//! The generator is ChaCha8 from `rand_chacha`, seeded with `seed_from_u64`;
//! retry `k` of the same seed uses stream `k`. Normal samples come from
//! `rand_distr::StandardNormal`. Both are portable, so a (dimension, member
//! dimensions, seed) triple replays the same frame on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::frame::FusionFrame;
use crate::linalg::{apply_invertible, hstack, numerical_rank, Matrix, Subspace};

pub const MAX_ATTEMPTS: usize = 32;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Weights drawn uniformly from `[0.5, 2)`.
pub fn random_weights<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(0.5..2.0)).collect()
}

/// Gaussian `n × n` matrix, redrawn until invertible.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Result<Matrix> {
    for _ in 0..MAX_ATTEMPTS {
        let m = gaussian_matrix(rng, n, n);
        if numerical_rank(&m)? == n {
            return Ok(m);
        }
    }
    Err(Error::RetryExhausted { attempts: MAX_ATTEMPTS })
}

/// Spanning sets and weights of a random frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFrame {
    pub spans: Vec<Matrix>,
    pub weights: Vec<f64>,
    pub attempts: usize,
}

impl RandomFrame {
    pub fn frame(&self) -> Result<FusionFrame> {
        let n = self.spans.first().map_or(0, |s| s.nrows());
        let spans: Vec<(Matrix, f64)> = self.spans.iter().cloned().zip(self.weights.iter().copied()).collect();
        FusionFrame::from_spans(n, &spans)
    }
}

/// Gaussian spans of the requested dimensions, redrawn on a fresh stream
/// until every member has full dimension and the family is a frame.
pub fn random_frame(dim: usize, member_dims: &[usize], seed: u64) -> Result<RandomFrame> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if member_dims.is_empty() {
        return Err(Error::NoMembers);
    }
    if let Some(&d) = member_dims.iter().find(|&&d| d == 0 || d > dim) {
        return Err(Error::InvalidArgument(format!("member dimension {d} outside 1..={dim}")));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seeded_rng(seed, attempt as u64);
        let spans: Vec<Matrix> = member_dims.iter().map(|&d| gaussian_matrix(&mut rng, dim, d)).collect();
        let weights = random_weights(&mut rng, member_dims.len());
        let candidate = RandomFrame { spans, weights, attempts: attempt + 1 };
        let frame = candidate.frame()?;
        if frame.is_frame() && frame.dims() == member_dims {
            return Ok(candidate);
        }
    }
    Err(Error::RetryExhausted { attempts: MAX_ATTEMPTS })
}

/// Shape used by the randomized suites: `n ≤ 12`, `|I| ≤ 6`, member
/// dimensions `≤ 4`, with enough total dimension to span.
pub fn suite_shape<R: Rng>(rng: &mut R) -> (usize, Vec<usize>) {
    loop {
        let n = rng.random_range(1..=12);
        let members = rng.random_range(1..=6);
        let cap = n.min(4);
        let dims: Vec<usize> = (0..members).map(|_| rng.random_range(1..=cap)).collect();
        if dims.iter().sum::<usize>() >= n {
            return (n, dims);
        }
    }
}

/// Random frame number `case` of a suite identified by `suite_seed`.
pub fn suite_frame(suite_seed: u64, case: u64) -> Result<FusionFrame> {
    let mut rng = seeded_rng(suite_seed, 1000 + case);
    let (n, dims) = suite_shape(&mut rng);
    random_frame(n, &dims, rng.random())?.frame()
}

/// Members sharing a common random line, so `⋂ W_i ≠ {0}`.
pub fn frame_with_common_line(dim: usize, members: usize, seed: u64) -> Result<FusionFrame> {
    if dim < 2 || members < 2 {
        return Err(Error::InvalidArgument("need dim >= 2 and at least two members".into()));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seeded_rng(seed, attempt as u64);
        let line = gaussian_matrix(&mut rng, dim, 1);
        let extra = (dim - 1).div_ceil(members).max(1).min(dim - 1);
        let mut spans = Vec::with_capacity(members);
        for _ in 0..members {
            let more = gaussian_matrix(&mut rng, dim, extra);
            spans.push((hstack(dim, &[&line, &more]), rng.random_range(0.5..2.0)));
        }
        let w = FusionFrame::from_spans(dim, &spans)?;
        if w.is_frame() {
            return Ok(w);
        }
    }
    Err(Error::RetryExhausted { attempts: MAX_ATTEMPTS })
}

/// A Gavruta dual `V_i = S_W⁻¹ W_i + (random directions)`, `υ = ω`.
pub fn random_superset_dual<R: Rng>(w: &FusionFrame, rng: &mut R) -> Result<FusionFrame> {
    let n = w.ambient_dim();
    let s_inv = w.frame_operator_solver()?.inverse();
    let mut members = Vec::with_capacity(w.len());
    for m in w.members() {
        let tilde = apply_invertible(&s_inv, &m.subspace)?;
        let room = n - tilde.dim();
        let extra = if room == 0 { 0 } else { rng.random_range(0..=room) };
        let span = hstack(n, &[tilde.basis(), &gaussian_matrix(rng, n, extra)]);
        members.push((Subspace::from_span(&span)?, m.weight));
    }
    FusionFrame::new(n, members)
}

/// `R` for `A = S_W⁻¹ T_W + R P`.
pub fn random_free_part<R: Rng>(w: &FusionFrame, rng: &mut R) -> Matrix {
    gaussian_matrix(rng, w.ambient_dim(), w.total_dim())
}
