//! JSON input files for quasi-orders, valuations, orders and families.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groups::{Carrier, GroupElement, GroupError};
use crate::orders::{lex_order, omega_preimage, order_from_cone, Order, OrderError, PositiveCone};
use crate::qo::{QoError, QuasiOrder};
use crate::quotient::{levels, lift_family, LiftError, QoFamily};
use crate::valuation::{Valuation, ValuationError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON in {path}: {message}")]
    Json { path: String, message: String },
    #[error("unknown builtin valuation {0:?}")]
    UnknownBuiltin(String),
    #[error("family has no member for level {0:?}")]
    MissingMember(String),
    #[error("family member {0:?} is not a level of the valuation")]
    ExtraMember(String),
    #[error("matrix entries must be 0/1 or booleans")]
    BadCell,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Qo(#[from] QoError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(u8),
}

impl Cell {
    fn truth(&self) -> Result<bool, FormatError> {
        match self {
            Cell::Bool(b) => Ok(*b),
            Cell::Int(0) => Ok(false),
            Cell::Int(1) => Ok(true),
            Cell::Int(_) => Err(FormatError::BadCell),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuationFile {
    /// `"p-adic:P"`, `"trivial"` or `"coordinate"`.
    Builtin { builtin: String },
    /// Labels in increasing order; table keyed by element, 0 may be omitted.
    Table { values: Vec<String>, table: BTreeMap<String, String> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrderFile {
    Lex { signs: Vec<i8> },
    Cone { elements: Vec<GroupElement> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QoFile {
    Matrix { rows: Vec<Vec<Cell>> },
    Valuational { valuation: ValuationFile },
    OmegaPreimage { order: OrderFile },
    Lex { signs: Vec<i8> },
    Lift { valuation: ValuationFile, family: BTreeMap<String, QoFile> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub valuation: ValuationFile,
    pub members: BTreeMap<String, QoFile>,
}

/// Parse a JSON file and return it with the SHA-256 of its bytes.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(T, String), FormatError> {
    let shown = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| FormatError::Io { path: shown.clone(), message: e.to_string() })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let value = serde_json::from_slice(&bytes).map_err(|e| FormatError::Json { path: shown, message: e.to_string() })?;
    Ok((value, digest))
}

pub fn load_valuation(file: &ValuationFile, carrier: &Arc<Carrier>) -> Result<Valuation, FormatError> {
    match file {
        ValuationFile::Builtin { builtin } => {
            let b = builtin.trim();
            if b == "trivial" {
                Ok(Valuation::trivial(Arc::clone(carrier)))
            } else if b == "coordinate" {
                Ok(Valuation::coordinate(Arc::clone(carrier)))
            } else if let Some(p) = b.strip_prefix("p-adic:") {
                let p: i64 = p.trim().parse().map_err(|_| FormatError::UnknownBuiltin(builtin.clone()))?;
                Ok(Valuation::p_adic(Arc::clone(carrier), p)?)
            } else {
                Err(FormatError::UnknownBuiltin(builtin.clone()))
            }
        }
        ValuationFile::Table { values, table } => {
            let entries = table
                .iter()
                .map(|(k, v)| Ok((k.parse::<GroupElement>()?, v.clone())))
                .collect::<Result<Vec<_>, GroupError>>()?;
            Ok(Valuation::from_entries(Arc::clone(carrier), values.clone(), &entries)?)
        }
    }
}

pub fn load_order(file: &OrderFile, carrier: &Arc<Carrier>) -> Result<Order, FormatError> {
    Ok(match file {
        OrderFile::Lex { signs } => lex_order(carrier, signs)?,
        OrderFile::Cone { elements } => order_from_cone(PositiveCone::from_elements(Arc::clone(carrier), elements)?)?,
    })
}

pub fn load_qo(file: &QoFile, carrier: &Arc<Carrier>) -> Result<QuasiOrder, FormatError> {
    match file {
        QoFile::Matrix { rows } => {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(Cell::truth).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QuasiOrder::from_matrix(Arc::clone(carrier), &rows)?)
        }
        QoFile::Valuational { valuation } => {
            let v = load_valuation(valuation, carrier)?;
            Ok(crate::valuation::valuational_qo(&v)?)
        }
        QoFile::OmegaPreimage { order } => Ok(omega_preimage(&load_order(order, carrier)?)?),
        QoFile::Lex { signs } => Ok(lex_order(carrier, signs)?.to_qo()?),
        QoFile::Lift { valuation, family } => {
            let fam = load_family(
                &FamilyFile { valuation: valuation.clone(), members: family.clone() },
                carrier,
            )?;
            Ok(lift_family(&fam)?)
        }
    }
}

/// Members are keyed by value label and read on the level quotient
/// `G^γ/G_γ`, whose elements are the coset representatives.
pub fn load_family(file: &FamilyFile, carrier: &Arc<Carrier>) -> Result<QoFamily, FormatError> {
    let v = load_valuation(&file.valuation, carrier)?;
    let lv = levels(&v).map_err(LiftError::from)?;
    if let Some(extra) = file.members.keys().find(|k| !v.labels().contains(k)) {
        return Err(FormatError::ExtraMember(extra.clone()));
    }
    let members = lv
        .iter()
        .map(|level| {
            let spec = file.members.get(&level.label).ok_or_else(|| FormatError::MissingMember(level.label.clone()))?;
            load_qo(spec, level.carrier())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QoFamily::new(v, members)?)
}
