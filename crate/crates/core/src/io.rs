//! JSON file formats.
//!
//! Quaternions are `[w, x, y, z]` with `q = (w + x i) + (y + z i) j`.
//! Vectors are arrays of quaternions, bases arrays of vectors. Operators are
//! either dense, `{"n": n, "entries": [[q, ...], ...]}`, or partial,
//! `{"domain_frame": M, "action": M, "dense_stand_in": bool}` where `M` is an
//! array of rows and `dense_stand_in` is optional.

use std::fs;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::cayley::{CayleyPair, CayleyResiduals};
use crate::error::{QError, Result};
use crate::hspace::{HilbertBasis, QVector};
use crate::matrix::QMatrix;
use crate::qop::{Operator, PartialOperator};
use crate::quat::Quaternion;

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Operator::Dense(m) => {
                let mut map = s.serialize_map(Some(2))?;
                map.serialize_entry("n", &m.rows())?;
                map.serialize_entry("entries", m)?;
                map.end()
            }
            Operator::Partial(p) => p.serialize(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DenseFile {
    n: usize,
    entries: Vec<Vec<Quaternion>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialFile {
    domain_frame: QMatrix,
    action: QMatrix,
    #[serde(default)]
    dense_stand_in: bool,
}

fn malformed(e: impl std::fmt::Display) -> QError {
    QError::Malformed(e.to_string())
}

/// Parses an operator document, reporting the first violated invariant.
pub fn parse_operator(text: &str) -> Result<Operator> {
    let value: Value = serde_json::from_str(text).map_err(malformed)?;
    let obj = value.as_object().ok_or_else(|| malformed("operator must be a JSON object"))?;
    if obj.contains_key("entries") {
        let f: DenseFile = serde_json::from_value(value).map_err(malformed)?;
        if f.n == 0 {
            return Err(QError::InvalidOperator("n must be at least 1".into()));
        }
        if f.entries.len() != f.n {
            return Err(QError::InvalidOperator(format!("expected {} rows, found {}", f.n, f.entries.len())));
        }
        if let Some((i, row)) = f.entries.iter().enumerate().find(|(_, r)| r.len() != f.n) {
            return Err(QError::InvalidOperator(format!("row {i} has {} entries, expected {}", row.len(), f.n)));
        }
        Ok(Operator::Dense(QMatrix::from_rows(f.entries)?))
    } else if obj.contains_key("domain_frame") {
        let f: PartialFile = serde_json::from_value(value).map_err(malformed)?;
        let p = PartialOperator::new(f.domain_frame, f.action)?;
        Ok(Operator::Partial(p.with_dense_stand_in(f.dense_stand_in)))
    } else {
        Err(malformed("operator needs either \"entries\" or \"domain_frame\""))
    }
}

pub fn parse_basis(text: &str) -> Result<HilbertBasis> {
    let cols: Vec<QVector> = serde_json::from_str(text).map_err(malformed)?;
    HilbertBasis::new(cols)
}

pub fn parse_vector(text: &str) -> Result<QVector> {
    let v: QVector = serde_json::from_str(text).map_err(malformed)?;
    if v.dim() == 0 {
        return Err(malformed("vector must have at least one component"));
    }
    Ok(v)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| QError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| QError::Io(format!("{}: {e}", path.display())))
}

pub fn load_operator(path: &Path) -> Result<Operator> {
    parse_operator(&read_text(path)?)
}

pub fn load_basis(path: &Path) -> Result<HilbertBasis> {
    parse_basis(&read_text(path)?)
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // serde_json's default map is ordered, so a round trip through Value sorts keys.
    let v = serde_json::to_value(value).map_err(malformed)?;
    serde_json::to_string_pretty(&v).map_err(malformed)
}

/// `"standard"` for the standard basis, otherwise the basis itself.
pub fn basis_id(basis: &HilbertBasis) -> Value {
    if basis.is_standard() {
        Value::String("standard".into())
    } else {
        serde_json::to_value(basis).unwrap_or(Value::Null)
    }
}

#[derive(Serialize)]
pub struct CayleyPairDoc<'a> {
    pub source: &'a Operator,
    pub transform: &'a Operator,
    pub lambda: Quaternion,
    pub basis: Value,
    pub residuals: CayleyResiduals,
}

impl<'a> CayleyPairDoc<'a> {
    pub fn new(pair: &'a CayleyPair) -> Result<Self> {
        Ok(CayleyPairDoc {
            source: &pair.source,
            transform: &pair.transform,
            lambda: pair.lambda.value(),
            basis: basis_id(&pair.basis),
            residuals: pair.residuals()?,
        })
    }
}

/// Reads the `transform` member of a Cayley pair document, or the whole
/// document as an operator.
pub fn parse_operator_or_pair(text: &str) -> Result<Operator> {
    let value: Value = serde_json::from_str(text).map_err(malformed)?;
    match value.get("transform") {
        Some(t) => parse_operator(&t.to_string()),
        None => parse_operator(text),
    }
}
