//! Group valuations with finite value sets.
//!
//! A value set is an ordered list of labels `γ_0 < γ_1 < ...`; values are
//! stored as label positions, and ∞ is reserved for the identity.

use std::cmp::Reverse;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{Verdict, Witness};
use crate::groups::{all_subgroups, Carrier, GroupElement, GroupError, Subgroup};
use crate::qo::{Provenance, QuasiOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Value {
    Finite(usize),
    Infinity,
}

impl Value {
    pub fn finite(self) -> Option<usize> {
        match self {
            Value::Finite(k) => Some(k),
            Value::Infinity => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("table has {got} entries for {expected} elements")]
    TableSize { expected: usize, got: usize },
    #[error("value index {0} is outside the value set")]
    UnknownValue(usize),
    #[error("unknown value label {0:?}")]
    UnknownLabel(String),
    #[error("label {0:?} is reserved for the value of 0")]
    ReservedLabel(String),
    #[error("duplicate value label {0:?}")]
    DuplicateLabel(String),
    #[error("no value given for {0}")]
    MissingEntry(GroupElement),
    #[error("{0} is not a valuation: {1}")]
    Invalid(String, Witness),
    #[error("level set is not a subgroup: {0}")]
    NotSubgroup(GroupError),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelKind {
    /// `G^γ = {g : v(g) ≥ γ}`
    Geq,
    /// `G_γ = {g : v(g) > γ}`
    Gt,
}

#[derive(Clone)]
pub struct Valuation {
    carrier: Arc<Carrier>,
    labels: Vec<String>,
    table: Vec<Value>,
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Valuation[{}]{{", self.carrier.name())?;
        for (g, v) in self.table.iter().enumerate() {
            let shown = match v {
                Value::Finite(k) => self.labels[*k].as_str(),
                Value::Infinity => "∞",
            };
            write!(f, " {}:{}", self.carrier.element(g), shown)?;
        }
        write!(f, " }}")
    }
}

fn is_reserved(label: &str) -> bool {
    matches!(label.trim().to_ascii_lowercase().as_str(), "∞" | "inf" | "infinity")
}

impl Valuation {
    /// Structural construction only; the axioms are checked by
    /// [`check_valuation`].
    pub fn new(
        carrier: Arc<Carrier>,
        labels: Vec<String>,
        table: Vec<Value>,
    ) -> Result<Self, ValuationError> {
        if table.len() != carrier.len() {
            return Err(ValuationError::TableSize { expected: carrier.len(), got: table.len() });
        }
        for (i, l) in labels.iter().enumerate() {
            if is_reserved(l) {
                return Err(ValuationError::ReservedLabel(l.clone()));
            }
            if labels[..i].contains(l) {
                return Err(ValuationError::DuplicateLabel(l.clone()));
            }
        }
        if let Some(k) = table.iter().filter_map(|v| v.finite()).find(|&k| k >= labels.len()) {
            return Err(ValuationError::UnknownValue(k));
        }
        Ok(Valuation { carrier, labels, table })
    }

    /// Table keyed by elements and labels; a missing entry for 0 means ∞.
    pub fn from_entries(
        carrier: Arc<Carrier>,
        labels: Vec<String>,
        entries: &[(GroupElement, String)],
    ) -> Result<Self, ValuationError> {
        let mut table: Vec<Option<Value>> = vec![None; carrier.len()];
        table[carrier.zero()] = Some(Value::Infinity);
        for (g, label) in entries {
            let i = carrier.lookup(g)?;
            let v = if is_reserved(label) {
                Value::Infinity
            } else {
                Value::Finite(
                    labels
                        .iter()
                        .position(|l| l == label)
                        .ok_or_else(|| ValuationError::UnknownLabel(label.clone()))?,
                )
            };
            table[i] = Some(v);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| ValuationError::MissingEntry(carrier.element(i).clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Valuation::new(carrier, labels, table)
    }

    pub fn from_fn(
        carrier: Arc<Carrier>,
        labels: Vec<String>,
        f: impl Fn(&GroupElement) -> Value,
    ) -> Result<Self, ValuationError> {
        let table = carrier.elements().iter().map(f).collect();
        Valuation::new(carrier, labels, table)
    }

    /// `v ≡ 0` off the identity.
    pub fn trivial(carrier: Arc<Carrier>) -> Self {
        let zero = carrier.zero();
        let labels = if carrier.len() > 1 { vec!["0".to_string()] } else { Vec::new() };
        let table = (0..carrier.len())
            .map(|g| if g == zero { Value::Infinity } else { Value::Finite(0) })
            .collect();
        Valuation { carrier, labels, table }
    }

    /// p-adic valuation on `Z/p^k` or on a rank-1 window.
    pub fn p_adic(carrier: Arc<Carrier>, p: i64) -> Result<Self, ValuationError> {
        if p < 2 || (2..p).any(|d| p % d == 0) {
            return Err(ValuationError::Unsupported(format!("{p} is not a prime")));
        }
        if carrier.coord_len() != 1 {
            return Err(ValuationError::Unsupported(
                "p-adic valuations need a cyclic or rank-1 carrier".into(),
            ));
        }
        if !carrier.is_windowed() {
            let mut n = carrier.len() as i64;
            while n % p == 0 {
                n /= p;
            }
            if n != 1 {
                return Err(ValuationError::Unsupported(format!(
                    "{} is not a cyclic {p}-group",
                    carrier.name()
                )));
            }
        }
        let nu = |g: &GroupElement| {
            let mut x = g.0[0];
            if x == 0 {
                return None;
            }
            let mut k = 0;
            while x % p == 0 {
                x /= p;
                k += 1;
            }
            Some(k)
        };
        let top = carrier.elements().iter().filter_map(nu).max().unwrap_or(0);
        let labels = (0..=top).map(|k| k.to_string()).collect();
        let table = carrier
            .elements()
            .iter()
            .map(|g| nu(g).map_or(Value::Infinity, Value::Finite))
            .collect();
        Valuation::new(carrier, labels, table)
    }

    /// Position of the first nonzero coordinate.
    pub fn coordinate(carrier: Arc<Carrier>) -> Self {
        let d = carrier.coord_len();
        let labels = (0..d).map(|k| k.to_string()).collect();
        let table = carrier
            .elements()
            .iter()
            .map(|g| g.0.iter().position(|&c| c != 0).map_or(Value::Infinity, Value::Finite))
            .collect();
        Valuation { carrier, labels, table }
    }

    /// The valuation of a strictly decreasing chain `G = H_0 ⊋ ... ⊋ H_k = {0}`:
    /// `v(g) = max{i : g ∈ H_i}` for `g ≠ 0`.
    pub fn from_chain(carrier: Arc<Carrier>, chain: &[Subgroup]) -> Result<Self, ValuationError> {
        let k = chain.len().saturating_sub(1);
        let table = (0..carrier.len())
            .map(|g| {
                if g == carrier.zero() {
                    Value::Infinity
                } else {
                    Value::Finite(chain.iter().rposition(|h| h.contains(g)).unwrap_or(0))
                }
            })
            .collect();
        Valuation::new(carrier, (0..k).map(|i| i.to_string()).collect(), table)
    }

    /// Compose with a monotone map on value indices, e.g. `⌊v/2⌋`.
    pub fn coarsen_by(&self, labels: Vec<String>, f: impl Fn(usize) -> usize) -> Result<Self, ValuationError> {
        let table = self
            .table
            .iter()
            .map(|v| match v {
                Value::Finite(k) => Value::Finite(f(*k)),
                Value::Infinity => Value::Infinity,
            })
            .collect();
        Valuation::new(Arc::clone(&self.carrier), labels, table)
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: Value) -> &str {
        match v {
            Value::Finite(k) => &self.labels[k],
            Value::Infinity => "∞",
        }
    }

    pub fn value(&self, g: usize) -> Value {
        self.table[g]
    }

    pub fn table(&self) -> &[Value] {
        &self.table
    }

    pub fn level_set(&self, gamma: usize, kind: LevelKind) -> Result<Subgroup, ValuationError> {
        if gamma >= self.labels.len() {
            return Err(ValuationError::UnknownValue(gamma));
        }
        let members = self
            .table
            .iter()
            .map(|&v| match kind {
                LevelKind::Geq => v >= Value::Finite(gamma),
                LevelKind::Gt => v > Value::Finite(gamma),
            })
            .collect();
        Subgroup::from_members(&self.carrier, members).map_err(ValuationError::NotSubgroup)
    }

    /// `g ≾ h ⇔ v(g) ≥ v(h)`, without checking the axioms.
    pub fn induced_qo(&self) -> QuasiOrder {
        let keys: Vec<Reverse<Value>> = self.table.iter().map(|&v| Reverse(v)).collect();
        QuasiOrder::from_keys(Arc::clone(&self.carrier), &keys, Provenance::Valuational)
    }

    /// Equal up to an order isomorphism between the images.
    pub fn equivalent(&self, other: &Valuation) -> bool {
        self.induced_qo().same_relation(&other.induced_qo())
    }
}

/// Exhaustive axiom scan: `v(g)=∞ ⇔ g=0`, the ultrametric inequality over
/// in-window differences, and `v(g)=v(-g)`.
pub fn check_valuation(v: &Valuation) -> Verdict {
    let c = &v.carrier;
    let n = c.len();
    let zero = c.zero();
    if let Some(g) = (0..n).find(|&g| (v.value(g) == Value::Infinity) != (g == zero)) {
        return Verdict::fail(Witness::new(c, "v(g)=∞ ⇔ g=0", vec![g]), 0);
    }
    let mut skipped = 0;
    for g in 0..n {
        for h in 0..n {
            match c.sub(g, h) {
                Some(d) => {
                    if v.value(d) < v.value(g).min(v.value(h)) {
                        let w = Witness::new(c, "v(g-h) ≥ min(v(g),v(h))", vec![g, h]);
                        return Verdict::fail(w, skipped);
                    }
                }
                None => skipped += 1,
            }
        }
    }
    if let Some(g) = (0..n).find(|&g| v.value(g) != v.value(c.neg(g))) {
        return Verdict::fail(Witness::new(c, "v(g)=v(-g)", vec![g]), skipped);
    }
    Verdict::pass(skipped)
}

/// The valuational quasi-order of a valid valuation.
pub fn valuational_qo(v: &Valuation) -> Result<QuasiOrder, ValuationError> {
    let verdict = check_valuation(v);
    match verdict.witness {
        Some(w) => Err(ValuationError::Invalid(v.carrier.name().to_string(), w)),
        None => Ok(v.induced_qo()),
    }
}

/// `0 ≾ g ≾ h ⇒ v(g) ≥ v(h)`. Witness: `[g, h]`.
pub fn check_v_compatible(v: &Valuation, qo: &QuasiOrder) -> Verdict {
    let c = qo.carrier();
    let zero = c.zero();
    let n = c.len();
    for g in (0..n).filter(|&g| qo.le(zero, g)) {
        if let Some(h) = (0..n).find(|&h| qo.le(g, h) && v.value(g) < v.value(h)) {
            return Verdict::fail(Witness::new(c, "0≾g≾h ⇒ v(g)≥v(h)", vec![g, h]), 0);
        }
    }
    Verdict::pass(0)
}

/// `v` is a coarsening of `w` when `v` is compatible with the quasi-order of `w`.
pub fn is_coarsening(v: &Valuation, w: &Valuation) -> Verdict {
    check_v_compatible(v, &w.induced_qo())
}

/// One valuation per strictly decreasing subgroup chain from the whole
/// group down to `{0}`; up to relabeling these are all valuations on a
/// finite group.
pub fn chain_valuations(carrier: &Arc<Carrier>) -> Result<Vec<Valuation>, ValuationError> {
    let subgroups = all_subgroups(carrier)?;
    let whole = Subgroup::whole(carrier);
    let trivial = Subgroup::trivial(carrier);
    if carrier.len() == 1 {
        return Ok(vec![Valuation::trivial(Arc::clone(carrier))]);
    }
    let mut chains: Vec<Vec<Subgroup>> = Vec::new();
    let mut stack: Vec<Vec<Subgroup>> = vec![vec![whole]];
    while let Some(chain) = stack.pop() {
        let top = chain.last().expect("nonempty chain");
        if *top == trivial {
            chains.push(chain);
            continue;
        }
        for s in subgroups.iter().rev() {
            if s != top && s.is_subset_of(top) {
                let mut next = chain.clone();
                next.push(s.clone());
                stack.push(next);
            }
        }
    }
    chains.sort_by_key(|c| c.iter().map(|s| s.len()).collect::<Vec<_>>());
    chains
        .iter()
        .map(|chain| Valuation::from_chain(Arc::clone(carrier), chain))
        .collect()
}
