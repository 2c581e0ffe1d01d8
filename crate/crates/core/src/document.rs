//! Frame and operator files.
//!
//! A frame file is JSON of the form
//! `{"label": str?, "dim": int, "subspaces": [{"weight": float, "span": [[float, ...], ...]}]}`
//! where each inner array is one spanning vector of length `dim`.
//!
//! An operator file holds a dense matrix in the coordinates of the stored member
//! bases: `{"rows", "cols", "entries" (row-major), "source_blocks", "target_blocks"?}`.
//! Spans that are already orthonormal are stored verbatim, so those
//! coordinates are the ones written in the frame file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dual::{BlockOperator, OperatorTarget};
use crate::error::{Error, Result};
use crate::frame::{DirectSumIndex, FusionFrame};
use crate::linalg::{Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dim: usize,
    pub subspaces: Vec<MemberDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDocument {
    pub weight: f64,
    pub span: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDocument {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
    pub source_blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_blocks: Option<Vec<usize>>,
}

/// A frame read from disk, with what happened on the way.
#[derive(Debug, Clone)]
pub struct LoadedFrame {
    pub frame: FusionFrame,
    pub document: FrameDocument,
    pub sha256: String,
    pub notes: Vec<String>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn parse_frame(text: &str) -> Result<FrameDocument> {
    let doc: FrameDocument = serde_json::from_str(text).map_err(parse_error)?;
    validate(&doc)?;
    Ok(doc)
}

pub fn validate(doc: &FrameDocument) -> Result<()> {
    if doc.dim == 0 {
        return Err(Error::InvalidArgument("dim must be at least 1".into()));
    }
    if doc.subspaces.is_empty() {
        return Err(Error::NoMembers);
    }
    for (i, m) in doc.subspaces.iter().enumerate() {
        if !(m.weight.is_finite() && m.weight > 0.0) {
            return Err(Error::NonPositiveWeight { index: i, weight: m.weight });
        }
        if m.span.is_empty() {
            return Err(Error::EmptyMember { index: i });
        }
        for (j, v) in m.span.iter().enumerate() {
            if v.len() != doc.dim {
                return Err(Error::DimensionMismatch {
                    field: format!("subspaces[{i}].span[{j}]"),
                    expected: doc.dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
        }
    }
    Ok(())
}

/// Spanning vectors of one member as matrix columns.
pub fn span_matrix(dim: usize, span: &[Vec<f64>]) -> Matrix {
    Matrix::from_fn(dim, span.len(), |r, c| span[c][r])
}

/// Builds the frame; members whose span is rank deficient are collapsed and
/// a note is recorded.
pub fn to_frame(doc: &FrameDocument) -> Result<(FusionFrame, Vec<String>)> {
    validate(doc)?;
    let mut notes = Vec::new();
    let mut members = Vec::with_capacity(doc.subspaces.len());
    for (i, m) in doc.subspaces.iter().enumerate() {
        let s = Subspace::from_span(&span_matrix(doc.dim, &m.span))?;
        if s.is_zero() {
            return Err(Error::EmptyMember { index: i });
        }
        if s.dim() < m.span.len() {
            notes.push(format!("member {i}: {} spanning vectors collapsed to dimension {}", m.span.len(), s.dim()));
        }
        members.push((s, m.weight));
    }
    Ok((FusionFrame::new(doc.dim, members)?, notes))
}

pub fn load_frame(path: &Path) -> Result<LoadedFrame> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| Error::Parse { line: 1, column: 1, message: format!("not UTF-8: {e}") })?;
    let document = parse_frame(&text)?;
    let (frame, notes) = to_frame(&document)?;
    Ok(LoadedFrame { frame, document, sha256: sha256_hex(&bytes), notes })
}

/// Document whose spans are the stored orthonormal bases.
pub fn from_frame(frame: &FusionFrame, label: Option<String>) -> FrameDocument {
    let subspaces = frame
        .members()
        .iter()
        .map(|m| MemberDocument {
            weight: m.weight,
            span: m.subspace.basis().column_iter().map(|c| c.iter().copied().collect()).collect(),
        })
        .collect();
    FrameDocument { label, dim: frame.ambient_dim(), subspaces }
}

pub fn to_json(doc: &FrameDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

pub fn save_frame(doc: &FrameDocument, path: &Path) -> Result<()> {
    fs::write(path, to_json(doc) + "\n")?;
    Ok(())
}

pub fn parse_operator(text: &str) -> Result<OperatorDocument> {
    let doc: OperatorDocument = serde_json::from_str(text).map_err(parse_error)?;
    if doc.entries.len() != doc.rows * doc.cols {
        return Err(Error::DimensionMismatch { field: "entries".into(), expected: doc.rows * doc.cols, got: doc.entries.len() });
    }
    let total: usize = doc.source_blocks.iter().sum();
    if total != doc.cols {
        return Err(Error::DimensionMismatch { field: "source_blocks".into(), expected: doc.cols, got: total });
    }
    if let Some(t) = &doc.target_blocks {
        let total: usize = t.iter().sum();
        if total != doc.rows {
            return Err(Error::DimensionMismatch { field: "target_blocks".into(), expected: doc.rows, got: total });
        }
    }
    Ok(doc)
}

/// `Q : ⊕W → ⊕V`, checked against both frames' block layouts.
pub fn operator_for(doc: &OperatorDocument, w: &FusionFrame, v: &FusionFrame) -> Result<BlockOperator> {
    if doc.source_blocks != w.dims() {
        return Err(Error::DimensionMismatch {
            field: "source_blocks".into(),
            expected: w.total_dim(),
            got: doc.source_blocks.iter().sum(),
        });
    }
    if let Some(t) = &doc.target_blocks {
        if *t != v.dims() {
            return Err(Error::DimensionMismatch {
                field: "target_blocks".into(),
                expected: v.total_dim(),
                got: t.iter().sum(),
            });
        }
    }
    let m = Matrix::from_row_slice(doc.rows, doc.cols, &doc.entries);
    BlockOperator::new(DirectSumIndex::new(doc.source_blocks.clone()), OperatorTarget::DirectSum(v.index().clone()), m)
}

pub fn load_operator(path: &Path) -> Result<(OperatorDocument, String)> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| Error::Parse { line: 1, column: 1, message: format!("not UTF-8: {e}") })?;
    Ok((parse_operator(&text)?, sha256_hex(&bytes)))
}

pub fn operator_document(q: &BlockOperator) -> OperatorDocument {
    let m = q.matrix();
    let target_blocks = match q.target() {
        OperatorTarget::DirectSum(t) => Some(t.block_dims().to_vec()),
        OperatorTarget::Ambient(_) => None,
    };
    OperatorDocument {
        rows: m.nrows(),
        cols: m.ncols(),
        entries: m.transpose().iter().copied().collect(),
        source_blocks: q.source().block_dims().to_vec(),
        target_blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const FX1: &str = r#"{"label": "fx1", "dim": 3, "subspaces": [
        {"weight": 1.0, "span": [[1, 0, 0], [0, 1, 0]]},
        {"weight": 1.0, "span": [[0, 1, 0], [0, 0, 1]]}
    ]}"#;

    #[test]
    fn fx1_document() {
        let doc = parse_frame(FX1).unwrap();
        let (w, notes) = to_frame(&doc).unwrap();
        assert!(notes.is_empty());
        assert_eq!(crate::excess::excess_nullspace(&w).unwrap(), 1);
    }

    #[test]
    fn rank_one_span_collapses() {
        let doc = parse_frame(r#"{"dim": 2, "subspaces": [{"weight": 1, "span": [[1, 1], [2, 2]]}, {"weight": 1, "span": [[1, 0]]}]}"#).unwrap();
        let (w, notes) = to_frame(&doc).unwrap();
        assert_eq!(w.dims(), vec![1, 1]);
        assert_eq!(notes.len(), 1);
        assert!(notes[0].starts_with("member 0"));
    }

    #[test]
    fn validation_errors() {
        let bad_weight = r#"{"dim": 2, "subspaces": [{"weight": 1, "span": [[1, 0]]}, {"weight": -1, "span": [[0, 1]]}]}"#;
        assert!(matches!(parse_frame(bad_weight), Err(Error::NonPositiveWeight { index: 1, .. })));
        let short = r#"{"dim": 3, "subspaces": [{"weight": 1, "span": [[1, 0]]}]}"#;
        assert!(matches!(parse_frame(short), Err(Error::DimensionMismatch { expected: 3, got: 2, .. })));
        match parse_frame("{\"dim\": 3,\n \"subspaces\": [oops]}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let extra = r#"{"dim": 1, "subspaces": [{"weight": 1, "span": [[1]]}], "colour": 1}"#;
        assert!(matches!(parse_frame(extra), Err(Error::Parse { .. })));
        let empty = r#"{"dim": 1, "subspaces": [{"weight": 1, "span": []}]}"#;
        assert!(matches!(parse_frame(empty), Err(Error::EmptyMember { index: 0 })));
        let zero = r#"{"dim": 2, "subspaces": [{"weight": 1, "span": [[0, 0]]}]}"#;
        assert!(matches!(to_frame(&parse_frame(zero).unwrap()), Err(Error::EmptyMember { index: 0 })));
    }

    #[test]
    fn round_trip() {
        let w = fixtures::fx7();
        let doc = from_frame(&w, Some("fx7".into()));
        let back = parse_frame(&to_json(&doc)).unwrap();
        assert_eq!(back, doc);
        let (w2, _) = to_frame(&back).unwrap();
        for i in 0..w.len() {
            assert!(w.subspace(i).projection_distance(w2.subspace(i)).unwrap() <= 1e-10);
            assert_eq!(w.weight(i), w2.weight(i));
        }
    }

    #[test]
    fn operator_documents() {
        let w = fixtures::fx5();
        let v = fixtures::fx5_gavruta_dual(&w);
        let q = crate::dual::phi_vw(&w, &v).unwrap();
        let doc = operator_document(&q);
        let text = serde_json::to_string(&doc).unwrap();
        let back = operator_for(&parse_operator(&text).unwrap(), &w, &v).unwrap();
        assert_eq!(back, q);
        let mut wrong = doc.clone();
        wrong.entries.pop();
        assert!(matches!(
            parse_operator(&serde_json::to_string(&wrong).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut swapped = doc;
        swapped.source_blocks = vec![2, 1];
        assert!(matches!(operator_for(&swapped, &w, &v), Err(Error::DimensionMismatch { .. })));
    }
}
