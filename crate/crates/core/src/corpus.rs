//! Regression corpus: every named example with its expected integers.
//!
//! With `weight_seed` set, every family is rebuilt with seeded random weights;
//! excess values must not move.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::check::snap;
use crate::dual::{
    certify_gavruta, excess_gavruta_trace, excess_q_dual_trace, gavruta_bound_terms, is_gavruta_dual,
    q_dual_from_left_inverse, riesz_gavruta_superset_check,
};
use crate::error::{Error, Result};
use crate::excess::{
    complement_frame, complement_pair_frame, excess_nullspace, excess_projected_local, excess_report,
    verify_complement_identity,
};
use crate::fixtures;
use crate::frame::FusionFrame;
use crate::linalg::{apply_invertible, max_abs, orthogonal_complement, subspace_intersection};
use crate::random::{random_weights, seeded_rng};
use crate::report::{Num, CorpusRow};

/// Entrywise tolerance for closed-form matrices.
pub const MATRIX_TOL: f64 = 1e-12;

struct Rows {
    example: String,
    rows: Vec<CorpusRow>,
}

impl Rows {
    fn new(example: impl Into<String>) -> Self {
        Rows { example: example.into(), rows: Vec::new() }
    }

    fn push(&mut self, quantity: &str, expected: f64, computed: f64, pass: bool) {
        self.rows.push(CorpusRow {
            example: self.example.clone(),
            quantity: quantity.to_string(),
            expected: Num(expected),
            computed: Num(computed),
            pass,
        });
    }

    fn int(&mut self, quantity: &str, expected: i64, computed: i64) {
        self.push(quantity, expected as f64, computed as f64, expected == computed);
    }

    fn flag(&mut self, quantity: &str, expected: bool, computed: bool) {
        self.push(quantity, expected as i64 as f64, computed as i64 as f64, expected == computed);
    }

    fn small(&mut self, quantity: &str, computed: f64, tol: f64) {
        self.push(quantity, 0.0, computed, computed.abs() <= tol);
    }
}

struct Weights(Option<ChaCha8Rng>);

impl Weights {
    fn take(&mut self, count: usize) -> Vec<f64> {
        match &mut self.0 {
            Some(rng) => random_weights(rng, count),
            None => vec![1.0; count],
        }
    }

    fn unit(&self) -> bool {
        self.0.is_none()
    }
}

fn run(example: &str, out: &mut Vec<CorpusRow>, f: impl FnOnce(&mut Rows) -> Result<()>) {
    let mut rows = Rows::new(example);
    if let Err(e) = f(&mut rows) {
        rows.push(&format!("error: {e}"), f64::NAN, f64::NAN, false);
    }
    out.extend(rows.rows);
}

fn methods(r: &mut Rows, w: &FusionFrame, expected: i64, tol: f64) -> Result<()> {
    let rep = excess_report(w, None, tol)?;
    r.int("e(W) null space", expected, rep.e_nullspace);
    r.int("e(W) rank-nullity", expected, rep.e_rank_nullity);
    r.int("e(W) trace formula", expected, snap(rep.e_trace, tol)?);
    r.int("e(W) local frame", expected, rep.e_local);
    Ok(())
}

/// All corpus rows; failures are rows, never errors.
pub fn corpus_rows(tol: f64, weight_seed: Option<u64>) -> Vec<CorpusRow> {
    let mut ws = Weights(weight_seed.map(|s| seeded_rng(s, 0)));
    let mut out = Vec::new();

    let w1 = ws.take(2);
    run("FX1", &mut out, |r| {
        let w = fixtures::fx1_weighted(&w1);
        let bases = fixtures::fx1_local_bases();
        let rep = excess_report(&w, Some(&bases), tol)?;
        r.int("e(W) null space", 1, rep.e_nullspace);
        r.int("e(W) rank-nullity", 1, rep.e_rank_nullity);
        r.int("e(W) trace formula", 1, snap(rep.e_trace, tol)?);
        r.int("e(F) local Riesz bases", 1, rep.e_local);
        r.int("dim(W1 cap W2)", 1, subspace_intersection(w.subspace(0), w.subspace(1))?.dim() as i64);
        r.int("e(F_W)", 3, excess_projected_local(&w, tol)?.e_projected);
        r.flag("Riesz basis", false, w.is_riesz_basis()?);
        Ok(())
    });

    for n in [3usize, 5, 8] {
        let wn = ws.take(2);
        run(&format!("FX2 n={n}"), &mut out, |r| {
            let w = fixtures::fx2_weighted(n, &wn);
            methods(r, &w, n as i64 - 1, tol)?;
            let p = excess_projected_local(&w, tol)?;
            r.int("e(F_W)", n as i64 + 1, p.e_projected);
            r.flag("e(F_W) + sum dim W_i = |I| n + e(W)", true, p.checks.iter().all(|c| c.pass));
            Ok(())
        });
    }

    for n in [3usize, 4] {
        let wn = ws.take(2 * n);
        let unit = ws.unit();
        run(&format!("FX3 n={n}"), &mut out, |r| {
            let w = fixtures::fx3_weighted(n, &wn);
            methods(r, &w, n as i64, tol)?;
            let c = verify_complement_identity(&w)?;
            r.int("e(W^perp)", (n * (2 * n - 3)) as i64, c.e_complement);
            r.int("e(W^perp) + e(W)", (n * (2 * n - 2)) as i64, c.e_complement + c.e_frame);
            if unit {
                let (a, b) = w.frame_bounds()?;
                r.small("frame bound A - 2", a - 2.0, MATRIX_TOL);
                r.small("frame bound B - 2", b - 2.0, MATRIX_TOL);
            }
            Ok(())
        });
    }

    for n in [5usize, 7] {
        let wn = ws.take(n - 1);
        run(&format!("FX4 n={n}"), &mut out, |r| {
            let w = fixtures::fx4_weighted(n, &wn);
            methods(r, &w, n as i64 - 2, tol)?;
            let c = verify_complement_identity(&w)?;
            r.int("e(W^perp)", (n * n - 4 * n + 2) as i64, c.e_complement);
            r.int("e(W^perp) + e(W)", (n * (n - 3)) as i64, c.e_complement + c.e_frame);
            Ok(())
        });
    }

    let w5 = ws.take(2);
    run("FX5", &mut out, |r| {
        let w = fixtures::fx5_weighted(&w5);
        let closed = fixtures::fx5_frame_operator(w5[0], w5[1]);
        r.small("max |S_W - closed form|", max_abs(&(w.frame_operator() - closed)), MATRIX_TOL);
        r.flag("Riesz basis", true, w.is_riesz_basis()?);
        methods(r, &w, 0, tol)?;
        let s = w.frame_operator();
        let s_w1perp = apply_invertible(s, &orthogonal_complement(w.subspace(0)))?;
        let s_w2perp = apply_invertible(s, &orthogonal_complement(w.subspace(1)))?;
        r.small("S W1^perp vs W2 projection distance", s_w1perp.projection_distance(w.subspace(1))?, 1e-10);
        r.small("S W2^perp vs W1 projection distance", s_w2perp.projection_distance(w.subspace(0))?, 1e-10);
        r.int("e(W^perp)", 0, verify_complement_identity(&w)?.e_complement);
        r.flag("complement pair is a frame", true, complement_pair_frame(&w, 0, 1)?.is_frame());
        let v = fixtures::fx5_gavruta_dual(&w);
        let cert = certify_gavruta(&w, &v, tol)?;
        r.flag("Gavruta dual", true, cert.verdict);
        r.int("e(V) null space", 2, excess_nullspace(&v)?);
        r.int("e(V) Gavruta trace formula", 2, snap(excess_gavruta_trace(&w, &v)?, tol)?);
        r.int("sum dim(V_i cap S W_i^perp)", 2, gavruta_bound_terms(&w, &v)?.0);
        r.flag("V_i contains S^-1 W_i", true, riesz_gavruta_superset_check(&w, &v)?);
        r.flag("0 <= e(V) <= sum dim W_i^perp", true, cert.bound_checks.iter().all(|c| c.pass));
        Ok(())
    });

    for n in [4usize, 6] {
        let wn = ws.take(2 * (n - 1));
        run(&format!("FX6 n={n}"), &mut out, |r| {
            let w = fixtures::fx6_weighted(n, &wn);
            methods(r, &w, 3 * n as i64 - 4, tol)?;
            let v = fixtures::fx6_dual(&w);
            r.flag("Gavruta dual", true, is_gavruta_dual(&w, &v)?.verdict);
            let n = n as i64;
            r.int("e(V) null space", n * (n - 2), excess_nullspace(&v)?);
            r.int("e(V) Gavruta trace formula", n * (n - 2), snap(excess_gavruta_trace(&w, &v)?, tol)?);
            let (meet, missed) = gavruta_bound_terms(&w, &v)?;
            r.int("sum dim(V_i cap S W_i^perp)", (n - 1) * (n - 2), meet);
            r.int("sum dim(V_i + S W_i^perp)^perp", 2 * (n - 1), missed);
            Ok(())
        });
    }

    run("FX7", &mut out, |r| {
        let w = fixtures::fx7();
        r.flag("Riesz basis", false, w.is_riesz_basis()?);
        methods(r, &w, 1, tol)?;
        let refused = matches!(complement_pair_frame(&w, 0, 1), Err(Error::NotRieszBasis));
        r.flag("complement pair lemma refuses non-Riesz input", true, refused);
        let mut all_pairs = true;
        for l in 0..w.len() {
            for k in l + 1..w.len() {
                let pair = FusionFrame::new(
                    3,
                    vec![
                        (orthogonal_complement(w.subspace(l)), w.weight(l)),
                        (orthogonal_complement(w.subspace(k)), w.weight(k)),
                    ],
                )?;
                all_pairs &= pair.is_frame();
            }
        }
        r.flag("every complement pair is a frame anyway", true, all_pairs);
        r.flag("complement frame exists", true, complement_frame(&w).is_ok());
        Ok(())
    });

    for n in 1..=5usize {
        let wn = ws.take(n + 1);
        run(&format!("gap n={n}"), &mut out, |r| {
            let w = fixtures::gap_frame_weighted(n, &wn);
            let v = fixtures::gap_dual(&w);
            r.flag("Gavruta dual", true, is_gavruta_dual(&w, &v)?.verdict);
            r.int("e(W)", n as i64 - 1, excess_nullspace(&w)?);
            r.int("e(V) - e(W)", n as i64, excess_nullspace(&v)? - excess_nullspace(&w)?);
            r.int("sum dim(V_i cap S W_i^perp)", n as i64, gavruta_bound_terms(&w, &v)?.0);
            Ok(())
        });
    }

    let wn = ws.take(5);
    let shift = match weight_seed {
        Some(s) => seeded_rng(s, 1).random_range(-0.4..0.4),
        None => 0.25,
    };
    run("FX4 n=6 staircase left inverse", &mut out, |r| {
        let w = fixtures::fx4_weighted(6, &wn);
        for cut in 0..=4 {
            let a = fixtures::fx4_staircase_left_inverse(&w, cut, shift);
            let qd = q_dual_from_left_inverse(&w, &a, None)?;
            r.int(&format!("cut {cut}: e(V) Q_A trace formula"), cut as i64, snap(excess_q_dual_trace(&w, &qd)?, tol)?);
            r.int(&format!("cut {cut}: e(V) null space"), cut as i64, excess_nullspace(&qd.v)?);
        }
        Ok(())
    });

    out
}
