//! Verdicts of exhaustive scans.

use std::fmt;

use serde::Serialize;

use crate::groups::{Carrier, GroupElement};

/// The first violating instance of a rule, in carrier enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rule: String,
    #[serde(skip)]
    pub indices: Vec<usize>,
    pub elements: Vec<GroupElement>,
}

impl Witness {
    pub fn new(carrier: &Carrier, rule: impl Into<String>, indices: Vec<usize>) -> Self {
        let elements = indices.iter().map(|&i| carrier.element(i).clone()).collect();
        Witness { rule: rule.into(), indices, elements }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|g| g.to_string()).collect();
        write!(f, "{} at [{}]", self.rule, parts.join(", "))
    }
}

/// Outcome of a scan. `skipped` counts instances dropped because some sum
/// left the window.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Verdict {
    pub witness: Option<Witness>,
    pub skipped: u64,
}

impl Verdict {
    pub fn pass(skipped: u64) -> Self {
        Verdict { witness: None, skipped }
    }

    pub fn fail(witness: Witness, skipped: u64) -> Self {
        Verdict { witness: Some(witness), skipped }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "pass")?,
            Some(w) => write!(f, "fail: {w}")?,
        }
        if self.skipped > 0 {
            write!(f, " ({} instances outside the window)", self.skipped)?;
        }
        Ok(())
    }
}
