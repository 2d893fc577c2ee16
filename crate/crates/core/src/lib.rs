//! Quasi-ordered and valued abelian groups on finite and windowed carriers.

pub mod check;
pub mod enumerate;
pub mod field;
pub mod formats;
pub mod groups;
pub mod qo;
pub mod orders;
pub mod quotient;
pub mod report;
pub mod valuation;
