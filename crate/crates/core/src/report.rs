//! Machine-readable run reports.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), integers as
//! integers, fields in declaration order. Nothing time- or host-dependent goes
//! into the JSON, so equal inputs give byte-identical output. Wall time is
//! only shown in the table form.

use std::fmt::{self, Write as _};
use std::time::Duration;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::check::Check;
use crate::document::FrameDocument;
use crate::dual::DualCertificate;
use crate::excess::ExcessReport;
use crate::frame::RieszCheck;

/// A real number with fixed JSON formatting; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.fract() == 0.0 && self.0.abs() < 1e15 {
            write!(f, "{}", self.0 as i64)
        } else {
            write!(f, "{:.3e}", self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub lhs: Num,
    pub rhs: Num,
    pub pass: bool,
}

impl From<&Check> for CheckRow {
    fn from(c: &Check) -> Self {
        CheckRow { name: c.name.clone(), lhs: Num(c.lhs), rhs: Num(c.rhs), pass: c.pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcessSection {
    pub e_nullspace: i64,
    pub e_rank_nullity: i64,
    pub e_trace: Num,
    pub e_trace_rounded: i64,
    pub e_local: i64,
    pub agreement: bool,
    pub tolerance_slack: Num,
    pub riesz_basis: bool,
}

impl ExcessSection {
    pub fn new(r: &ExcessReport, riesz_basis: bool) -> Self {
        ExcessSection {
            e_nullspace: r.e_nullspace,
            e_rank_nullity: r.e_rank_nullity,
            e_trace: Num(r.e_trace),
            e_trace_rounded: r.e_trace_rounded,
            e_local: r.e_local,
            agreement: r.agreement,
            tolerance_slack: Num(r.tolerance_slack),
            riesz_basis,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRow {
    pub i: usize,
    pub j: usize,
    pub residual: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct RieszSection {
    pub is_riesz: bool,
    pub max_residual: Num,
    pub failing: Vec<PairRow>,
}

impl From<&RieszCheck> for RieszSection {
    fn from(r: &RieszCheck) -> Self {
        RieszSection {
            is_riesz: r.is_riesz,
            max_residual: Num(r.max_residual),
            failing: r.failing.iter().map(|f| PairRow { i: f.i, j: f.j, residual: Num(f.residual) }).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub kind: &'static str,
    pub verdict: bool,
    pub reason: &'static str,
    pub identity_residual: Num,
    pub excess_of_dual: Option<i64>,
    pub bound_checks: Vec<CheckRow>,
    pub informational: Vec<CheckRow>,
}

impl From<&DualCertificate> for CertificateSection {
    fn from(c: &DualCertificate) -> Self {
        CertificateSection {
            kind: c.kind.as_str(),
            verdict: c.verdict,
            reason: c.reason.as_str(),
            identity_residual: Num(c.identity_residual),
            excess_of_dual: c.excess_of_dual,
            bound_checks: c.bound_checks.iter().map(CheckRow::from).collect(),
            informational: c.informational.iter().map(CheckRow::from).collect(),
        }
    }
}

impl CertificateSection {
    fn pass(&self) -> bool {
        self.verdict && self.bound_checks.iter().all(|c| c.pass)
    }
}

/// Expected against computed for one quantity of a named example.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusRow {
    pub example: String,
    pub quantity: String,
    pub expected: Num,
    pub computed: Num,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tolerance: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excess: Option<ExcessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz: Option<RieszSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub duals: Vec<CertificateSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<CorpusRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<FrameDocument>,
    pub summary: Summary,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    pub fn new(command: &str, tolerance: f64) -> Self {
        RunReport {
            command: command.to_string(),
            tolerance: Num(tolerance),
            seed: None,
            inputs: Vec::new(),
            notes: Vec::new(),
            excess: None,
            riesz: None,
            duals: Vec::new(),
            checks: Vec::new(),
            rows: Vec::new(),
            document: None,
            summary: Summary::default(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn check(&mut self, c: &Check) {
        self.checks.push(c.into());
    }

    /// Recomputes the summary: every check, certificate, row and the excess
    /// agreement count.
    pub fn finish(&mut self, wall_time: Duration) {
        let mut outcomes: Vec<bool> = self.checks.iter().map(|c| c.pass).collect();
        outcomes.extend(self.duals.iter().map(CertificateSection::pass));
        outcomes.extend(self.rows.iter().map(|r| r.pass));
        if let Some(e) = &self.excess {
            outcomes.push(e.agreement);
        }
        let failed = outcomes.iter().filter(|p| !**p).count();
        self.summary = Summary { pass: failed == 0, checks: outcomes.len(), failed };
        self.wall_time = wall_time;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mark = |p: bool| if p { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "command: {}  (tolerance {})", self.command, self.tolerance.0);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        for i in &self.inputs {
            let _ = writeln!(out, "{}: {}  sha256 {}", i.role, i.path, i.sha256);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(e) = &self.excess {
            let _ = writeln!(
                out,
                "excess  nullspace {}  rank-nullity {}  trace {:.12} ({})  local {}  agreement {}  riesz {}",
                e.e_nullspace, e.e_rank_nullity, e.e_trace.0, e.e_trace_rounded, e.e_local, e.agreement, e.riesz_basis
            );
        }
        if let Some(r) = &self.riesz {
            let _ = writeln!(out, "riesz basis: {}  (max residual {:.3e})", r.is_riesz, r.max_residual.0);
            for p in &r.failing {
                let _ = writeln!(out, "  fails at (i, j) = ({}, {})  residual {:.3e}", p.i, p.j, p.residual.0);
            }
        }
        for d in &self.duals {
            let e = d.excess_of_dual.map_or("-".to_string(), |e| e.to_string());
            let _ = writeln!(
                out,
                "dual {}: verdict {} ({})  residual {:.3e}  e(V) {}",
                d.kind, d.verdict, d.reason, d.identity_residual.0, e
            );
            for c in &d.bound_checks {
                let _ = writeln!(out, "  [{}] {}: {} vs {}", mark(c.pass), c.name, c.lhs, c.rhs);
            }
            for c in &d.informational {
                let _ = writeln!(out, "  [info {}] {}: {} vs {}", if c.pass { "holds" } else { "fails" }, c.name, c.lhs, c.rhs);
            }
        }
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}: {} vs {}", mark(c.pass), c.name, c.lhs, c.rhs);
        }
        if !self.rows.is_empty() {
            let w = self.rows.iter().map(|r| r.example.len()).max().unwrap_or(0);
            let q = self.rows.iter().map(|r| r.quantity.len()).max().unwrap_or(0);
            let _ = writeln!(out, "{:w$}  {:q$}  {:>12}  {:>12}  result", "example", "quantity", "expected", "computed");
            for r in &self.rows {
                let _ = writeln!(
                    out,
                    "{:w$}  {:q$}  {:>12}  {:>12}  {}",
                    r.example,
                    r.quantity,
                    r.expected.to_string(),
                    r.computed.to_string(),
                    mark(r.pass)
                );
            }
        }
        if let Some(d) = &self.document {
            let _ = writeln!(out, "document:\n{}", crate::document::to_json(d));
        }
        let _ = writeln!(
            out,
            "summary: {}  ({} checks, {} failed)  wall time {:.3} s",
            mark(self.summary.pass),
            self.summary.checks,
            self.summary.failed,
            self.wall_time.as_secs_f64()
        );
        out
    }
}
