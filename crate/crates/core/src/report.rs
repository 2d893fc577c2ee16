//! Machine-readable run reports.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::check::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub skipped: u64,
    pub witness: Option<String>,
}

/// Everything needed to reproduce and audit a run. Contains no timestamps
/// or paths beyond those supplied on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub checks: Vec<CheckEntry>,
    pub details: BTreeMap<String, Value>,
    pub overall_pass: bool,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            inputs: Vec::new(),
            seed: None,
            checks: Vec::new(),
            details: BTreeMap::new(),
            overall_pass: true,
        }
    }

    pub fn input(&mut self, path: &Path, sha256: String) {
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256 });
    }

    pub fn verdict(&mut self, name: impl Into<String>, v: &Verdict) {
        self.push(CheckEntry {
            name: name.into(),
            passed: v.passed(),
            skipped: v.skipped,
            witness: v.witness.as_ref().map(|w| w.to_string()),
        });
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, witness: Option<String>) {
        self.push(CheckEntry { name: name.into(), passed, skipped: 0, witness });
    }

    fn push(&mut self, entry: CheckEntry) {
        self.overall_pass &= entry.passed;
        self.checks.push(entry);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("report details serialize");
        self.details.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_json() + "\n")
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            if c.skipped > 0 {
                write!(f, " ({} skipped outside the window)", c.skipped)?;
            }
            writeln!(f)?;
        }
        for (k, v) in &self.details {
            match v {
                Value::String(s) => writeln!(f, "{k}: {s}")?,
                other => writeln!(f, "{k}: {other}")?,
            }
        }
        write!(f, "overall: {}", if self.overall_pass { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::Witness;
    use crate::groups::Carrier;

    #[test]
    fn overall_tracks_every_check() {
        let c = Carrier::parse("Z/2").unwrap();
        let mut r = RunReport::new(vec!["check".into()]);
        r.verdict("a", &Verdict::pass(3));
        assert!(r.overall_pass);
        r.verdict("b", &Verdict::fail(Witness::new(&c, "rule", vec![1]), 0));
        r.check("c", true, None);
        assert!(!r.overall_pass);
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let text = r.to_string();
        assert!(text.contains("FAIL b: rule at [(1)]"));
        assert!(text.ends_with("overall: FAIL"));
    }
}
