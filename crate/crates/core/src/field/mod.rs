//! The rational function field ℚ(t) with its t-adic valuation, and the
//! signs of its field orders.

pub mod bk;
pub mod poly;
pub mod ratfunc;

use thiserror::Error;

pub use bk::{
    check_field_order_samples, check_prop_fieldorders, classical_bk, epsilon_from_eta, evaluation_sign,
    random_corpus, sign_under, table_sign, DirectionError, FieldOrderTag, QSection, SignHom,
};
pub use poly::Poly;
pub use ratfunc::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("residue needs a nonnegative value, got {0}")]
    NegativeValue(i64),
    #[error("cannot parse rational function {0:?}")]
    Parse(String),
    #[error("value {value} is below the level {level}")]
    BelowLevel { value: i64, level: i64 },
}
