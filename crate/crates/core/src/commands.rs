//! The command-line operations, returning reports rather than printing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::check::Check;
use crate::corpus::corpus_rows;
use crate::document::{self, load_frame, load_operator, operator_for, FrameDocument, LoadedFrame, MemberDocument};
use crate::dual::{certify_gavruta, certify_q_dual};
use crate::error::{Error, Result};
use crate::excess::{
    complement_frame, complement_pair_frame, excess_projected_local, excess_report, verify_complement_identity,
};
use crate::frame::FusionFrame;
use crate::random::random_frame;
use crate::report::{CertificateSection, ExcessSection, InputDigest, RieszSection, RunReport};

pub fn validate_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 && tol < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance {tol} must lie in (0, 0.5)")))
    }
}

fn load_into(report: &mut RunReport, role: &str, path: &Path) -> Result<LoadedFrame> {
    let loaded = load_frame(path)?;
    report.inputs.push(InputDigest { role: role.into(), path: path.display().to_string(), sha256: loaded.sha256.clone() });
    report.notes.extend(loaded.notes.iter().map(|n| format!("{role}: {n}")));
    Ok(loaded)
}

fn excess_section(report: &mut RunReport, w: &FusionFrame, tol: f64) -> Result<()> {
    let rep = excess_report(w, None, tol)?;
    let riesz = w.is_riesz_basis()?;
    report.check(&Check::exact("Riesz predicate agrees with e(W) = 0", riesz as i64, (rep.e_nullspace == 0) as i64));
    report.excess = Some(ExcessSection::new(&rep, riesz));
    Ok(())
}

pub fn cmd_excess(path: &Path, tol: f64) -> Result<RunReport> {
    validate_tolerance(tol)?;
    let start = Instant::now();
    let mut report = RunReport::new("excess", tol);
    let w = load_into(&mut report, "frame", path)?.frame;
    w.require_frame()?;
    excess_section(&mut report, &w, tol)?;
    for c in excess_projected_local(&w, tol)?.checks {
        report.check(&c);
    }
    report.finish(start.elapsed());
    Ok(report)
}

pub fn cmd_complement(path: &Path, tol: f64) -> Result<RunReport> {
    validate_tolerance(tol)?;
    let start = Instant::now();
    let mut report = RunReport::new("complement", tol);
    let w = load_into(&mut report, "frame", path)?.frame;
    w.require_frame()?;
    excess_section(&mut report, &w, tol)?;
    let c = verify_complement_identity(&w)?;
    report.notes.push(format!("e(W) = {}, e(W^perp) = {}", c.e_frame, c.e_complement));
    report.check(&c.check);
    let complement = complement_frame(&w)?;
    let rep = excess_report(&complement, None, tol)?;
    report.check(&Check::exact("e(W^perp) methods agree", rep.agreement as i64, 1));
    report.finish(start.elapsed());
    Ok(report)
}

pub fn cmd_riesz(path: &Path, tol: f64) -> Result<RunReport> {
    validate_tolerance(tol)?;
    let start = Instant::now();
    let mut report = RunReport::new("riesz", tol);
    let w = load_into(&mut report, "frame", path)?.frame;
    let check = w.riesz_check()?;
    excess_section(&mut report, &w, tol)?;
    if check.is_riesz {
        for l in 0..w.len() {
            for k in l + 1..w.len() {
                let pair = complement_pair_frame(&w, l, k)?;
                report.check(&Check::exact(format!("complements of members {l}, {k} form a frame"), pair.is_frame() as i64, 1));
            }
        }
    } else {
        report.notes.push("not a fusion Riesz basis: the pairwise complement lemma does not apply".into());
    }
    report.riesz = Some(RieszSection::from(&check));
    report.finish(start.elapsed());
    Ok(report)
}

pub fn cmd_dual_check(w_path: &Path, v_path: &Path, q_path: Option<&Path>, tol: f64) -> Result<RunReport> {
    validate_tolerance(tol)?;
    let start = Instant::now();
    let mut report = RunReport::new("dual-check", tol);
    let w = load_into(&mut report, "frame", w_path)?.frame;
    let v = load_into(&mut report, "dual", v_path)?.frame;
    w.require_frame()?;
    excess_section(&mut report, &w, tol)?;
    let cert = match q_path {
        Some(q_path) => {
            let (doc, sha256) = load_operator(q_path)?;
            report.inputs.push(InputDigest { role: "operator".into(), path: q_path.display().to_string(), sha256 });
            certify_q_dual(&w, &v, &operator_for(&doc, &w, &v)?, tol)?
        }
        None => certify_gavruta(&w, &v, tol)?,
    };
    report.duals.push(CertificateSection::from(&cert));
    report.finish(start.elapsed());
    Ok(report)
}

pub fn cmd_random(dim: usize, member_dims: &[usize], seed: u64, out: Option<&PathBuf>, tol: f64) -> Result<RunReport> {
    validate_tolerance(tol)?;
    let start = Instant::now();
    let mut report = RunReport::new("random", tol);
    report.seed = Some(seed);
    let rf = random_frame(dim, member_dims, seed)?;
    let dims: Vec<String> = member_dims.iter().map(|d| d.to_string()).collect();
    let doc = FrameDocument {
        label: Some(format!("random dim={dim} subspaces={} seed={seed}", dims.join(","))),
        dim,
        subspaces: rf
            .spans
            .iter()
            .zip(&rf.weights)
            .map(|(s, &weight)| MemberDocument {
                weight,
                span: s.column_iter().map(|c| c.iter().copied().collect()).collect(),
            })
            .collect(),
    };
    if rf.attempts > 1 {
        report.notes.push(format!("frame found on attempt {}", rf.attempts));
    }
    let (w, _) = document::to_frame(&doc)?;
    excess_section(&mut report, &w, tol)?;
    if let Some(path) = out {
        document::save_frame(&doc, path)?;
    }
    report.document = Some(doc);
    report.finish(start.elapsed());
    Ok(report)
}

pub fn cmd_corpus(tol: f64, weight_seed: Option<u64>) -> Result<RunReport> {
    validate_tolerance(tol)?;
    let start = Instant::now();
    let mut report = RunReport::new("paper-examples", tol);
    report.seed = weight_seed;
    if weight_seed.is_some() {
        report.notes.push("weights replaced by seeded random values".into());
    }
    report.rows = corpus_rows(tol, weight_seed);
    report.finish(start.elapsed());
    Ok(report)
}
