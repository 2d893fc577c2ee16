//! Total quasi-orders on carriers and the axiom checks run against them.
//!
//! A total quasi-order is stored as a rank function: `g ≾ h` iff
//! `rank(g) <= rank(h)`, ranks dense from 0. Matrices and comparators are
//! validated (reflexive, transitive, total) and then collapsed to ranks, so
//! two quasi-orders on the same carrier are equal exactly when their rank
//! vectors are.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{Verdict, Witness};
use crate::groups::{Carrier, Restriction};
use crate::valuation::{check_valuation, Valuation, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QoError {
    #[error("relation matrix must be {expected}x{expected}, got {got} rows or a ragged row")]
    Dimension { expected: usize, got: usize },
    #[error("relation is not reflexive: {0}")]
    NotReflexive(Witness),
    #[error("relation is not transitive: {0}")]
    NotTransitive(Witness),
    #[error("relation is not total: {0}")]
    NotTotal(Witness),
}

/// How the quasi-order was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Repr {
    Extensional,
    Intensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Matrix,
    Valuational,
    OmegaPreimage,
    LexOrder,
    Lifted,
    Induced,
    Enumerated,
}

#[derive(Clone)]
pub struct QuasiOrder {
    carrier: Arc<Carrier>,
    ranks: Vec<u32>,
    repr: Repr,
    provenance: Provenance,
}

impl fmt::Debug for QuasiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuasiOrder[{}]({})", self.carrier.name(), self)
    }
}

impl QuasiOrder {
    /// Extensional quasi-order from a 0/1 matrix indexed by the carrier
    /// enumeration; `rows[i][j]` means `i ≾ j`.
    pub fn from_matrix(carrier: Arc<Carrier>, rows: &[Vec<bool>]) -> Result<Self, QoError> {
        let n = carrier.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(QoError::Dimension { expected: n, got: rows.len() });
        }
        let rel: Vec<bool> = rows.iter().flatten().copied().collect();
        Self::from_relation(carrier, &rel, Repr::Extensional, Provenance::Matrix)
    }

    /// Intensional quasi-order; the comparator is evaluated once over the
    /// whole carrier and validated like a matrix.
    pub fn from_comparator(
        carrier: Arc<Carrier>,
        provenance: Provenance,
        le: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, QoError> {
        let n = carrier.len();
        let mut rel = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                rel[i * n + j] = le(i, j);
            }
        }
        Self::from_relation(carrier, &rel, Repr::Intensional, provenance)
    }

    pub(crate) fn from_relation(
        carrier: Arc<Carrier>,
        rel: &[bool],
        repr: Repr,
        provenance: Provenance,
    ) -> Result<Self, QoError> {
        let n = carrier.len();
        let at = |i: usize, j: usize| rel[i * n + j];
        // Fast path: a total relation is a total preorder iff comparing
        // down-set sizes reproduces it.
        let down: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| at(j, i)).count()).collect();
        let fast = (0..n).all(|i| (0..n).all(|j| at(i, j) == (down[i] <= down[j])));
        if !fast {
            if let Some(i) = (0..n).find(|&i| !at(i, i)) {
                return Err(QoError::NotReflexive(Witness::new(&carrier, "reflexive", vec![i])));
            }
            for i in 0..n {
                for j in (0..n).filter(|&j| at(i, j)) {
                    if let Some(k) = (0..n).find(|&k| at(j, k) && !at(i, k)) {
                        return Err(QoError::NotTransitive(Witness::new(
                            &carrier,
                            "transitive",
                            vec![i, j, k],
                        )));
                    }
                }
            }
            for i in 0..n {
                if let Some(j) = (0..n).find(|&j| !at(i, j) && !at(j, i)) {
                    return Err(QoError::NotTotal(Witness::new(&carrier, "total", vec![i, j])));
                }
            }
            unreachable!("a reflexive, transitive, total relation passes the fast path");
        }
        Ok(QuasiOrder { ranks: dense_ranks(&down), carrier, repr, provenance })
    }

    /// Quasi-order `i ≾ j iff key[i] <= key[j]`.
    pub fn from_keys<K: Ord>(carrier: Arc<Carrier>, keys: &[K], provenance: Provenance) -> Self {
        assert_eq!(keys.len(), carrier.len());
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut ranks = vec![0u32; keys.len()];
        let mut rank = 0u32;
        for w in 0..order.len() {
            if w > 0 && keys[order[w - 1]] != keys[order[w]] {
                rank += 1;
            }
            ranks[order[w]] = rank;
        }
        QuasiOrder { carrier, ranks, repr: Repr::Intensional, provenance }
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.ranks[i] <= self.ranks[j]
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.ranks[i] < self.ranks[j]
    }

    #[inline]
    pub fn equiv(&self, i: usize, j: usize) -> bool {
        self.ranks[i] == self.ranks[j]
    }

    pub fn rank(&self, i: usize) -> u32 {
        self.ranks[i]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn class_count(&self) -> usize {
        self.ranks.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// The ∼-classes from the bottom up, members in enumeration order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (i, &r) in self.ranks.iter().enumerate() {
            out[r as usize].push(i);
        }
        out
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        let n = self.ranks.len();
        (0..n).map(|i| (0..n).map(|j| self.le(i, j)).collect()).collect()
    }

    pub fn restrict(&self, r: &Restriction) -> QuasiOrder {
        let keys: Vec<u32> = r.embed.iter().map(|&i| self.ranks[i]).collect();
        QuasiOrder::from_keys(Arc::clone(&r.carrier), &keys, self.provenance)
            .with_repr(self.repr)
    }

    fn with_repr(mut self, repr: Repr) -> Self {
        self.repr = repr;
        self
    }

    /// First pair (in enumeration order) on which the two relations differ.
    pub fn first_difference(&self, other: &QuasiOrder) -> Option<(usize, usize)> {
        let n = self.ranks.len();
        assert_eq!(n, other.ranks.len(), "comparing quasi-orders on different carriers");
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.le(i, j) != other.le(i, j))
    }

    pub fn same_relation(&self, other: &QuasiOrder) -> bool {
        self.carrier.elements() == other.carrier.elements() && self.ranks == other.ranks
    }
}

fn dense_ranks<K: Ord + Copy>(keys: &[K]) -> Vec<u32> {
    let mut distinct: Vec<K> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter().map(|k| distinct.binary_search(k).expect("present") as u32).collect()
}

impl fmt::Display for QuasiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes: Vec<String> = self
            .classes()
            .iter()
            .map(|c| {
                let elems: Vec<String> =
                    c.iter().map(|&i| self.carrier.element(i).to_string()).collect();
                format!("{{{}}}", elems.join(" "))
            })
            .collect();
        write!(f, "{}", classes.join(" < "))
    }
}

/// Closed vocabulary of checkable axiom groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AxiomId {
    Total,
    Q1,
    Q2,
    Star,
    CAxioms,
}

impl AxiomId {
    pub const ALL: [AxiomId; 5] =
        [AxiomId::Total, AxiomId::Q1, AxiomId::Q2, AxiomId::Star, AxiomId::CAxioms];
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomId::Total => "TOTAL",
            AxiomId::Q1 => "Q1",
            AxiomId::Q2 => "Q2",
            AxiomId::Star => "STAR",
            AxiomId::CAxioms => "C_AXIOMS",
        })
    }
}

impl FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TOTAL" => Ok(AxiomId::Total),
            "Q1" => Ok(AxiomId::Q1),
            "Q2" => Ok(AxiomId::Q2),
            "STAR" | "*" => Ok(AxiomId::Star),
            "C" | "C_AXIOMS" | "C-AXIOMS" => Ok(AxiomId::CAxioms),
            other => Err(format!("unknown axiom {other:?}")),
        }
    }
}

/// Exhaustive scan of one axiom group. Instances whose arithmetic leaves the
/// window are skipped and counted.
pub fn check_axiom(qo: &QuasiOrder, axiom: AxiomId) -> Verdict {
    match axiom {
        AxiomId::Total => check_total(qo),
        AxiomId::Q1 => check_zero_class(qo, "Q1: cl(0)={0}"),
        AxiomId::Q2 => check_q2(qo),
        AxiomId::Star => check_star(qo),
        AxiomId::CAxioms => check_c_axioms(qo),
    }
}

pub fn passes(qo: &QuasiOrder, axioms: &[AxiomId]) -> bool {
    axioms.iter().all(|&a| check_axiom(qo, a).passed())
}

fn check_total(qo: &QuasiOrder) -> Verdict {
    let n = qo.carrier.len();
    for i in 0..n {
        if let Some(j) = (0..n).find(|&j| !qo.le(i, j) && !qo.le(j, i)) {
            return Verdict::fail(Witness::new(&qo.carrier, "total", vec![i, j]), 0);
        }
    }
    Verdict::pass(0)
}

fn check_zero_class(qo: &QuasiOrder, rule: &str) -> Verdict {
    let c = &qo.carrier;
    let zero = c.zero();
    match (0..c.len()).find(|&x| x != zero && qo.equiv(x, zero)) {
        Some(x) => Verdict::fail(Witness::new(c, rule, vec![x, zero]), 0),
        None => Verdict::pass(0),
    }
}

/// x ≾ y ≁ z ⇒ x+z ≾ y+z
fn check_q2(qo: &QuasiOrder) -> Verdict {
    let c = &qo.carrier;
    let n = c.len();
    let mut skipped = 0;
    for x in 0..n {
        for y in (0..n).filter(|&y| qo.le(x, y)) {
            for z in (0..n).filter(|&z| !qo.equiv(y, z)) {
                match (c.add(x, z), c.add(y, z)) {
                    (Some(a), Some(b)) => {
                        if !qo.le(a, b) {
                            let w = Witness::new(c, "Q2: x≾y≁z ⇒ x+z≾y+z", vec![x, y, z]);
                            return Verdict::fail(w, skipped);
                        }
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    Verdict::pass(skipped)
}

/// cl(0)={0} and g ≾ h ≁ -f ⇒ g+f ≾ h+f
fn check_star(qo: &QuasiOrder) -> Verdict {
    let zero_class = check_zero_class(qo, "STAR: cl(0)={0}");
    if !zero_class.passed() {
        return zero_class;
    }
    let c = &qo.carrier;
    let n = c.len();
    let mut skipped = 0;
    for g in 0..n {
        for h in (0..n).filter(|&h| qo.le(g, h)) {
            for f in (0..n).filter(|&f| !qo.equiv(h, c.neg(f))) {
                match (c.add(g, f), c.add(h, f)) {
                    (Some(a), Some(b)) => {
                        if !qo.le(a, b) {
                            let w = Witness::new(c, "STAR: g≾h≁-f ⇒ g+f≾h+f", vec![g, h, f]);
                            return Verdict::fail(w, skipped);
                        }
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    Verdict::pass(skipped)
}

/// The ternary relation attached to a quasi-order: `C(f,g,h) ⇔ ¬(f-h ≾ g-h)`.
/// `None` when a difference leaves the window.
pub fn c_relation(qo: &QuasiOrder, f: usize, g: usize, h: usize) -> Option<bool> {
    let c = &qo.carrier;
    Some(!qo.le(c.sub(f, h)?, c.sub(g, h)?))
}

/// C-relation axioms for the derived relation.
///
/// The derived relation is translation invariant, so every instance
/// `(x,y,z[,w])` has the same truth value as `(x-z, y-z, 0[, w-z])`; the
/// scan therefore fixes `z = 0`, where `C(a,b,0)` is simply `¬(a ≾ b)`.
fn check_c_axioms(qo: &QuasiOrder) -> Verdict {
    let c = &qo.carrier;
    let n = c.len();
    let zero = c.zero();
    let cz = |a: usize, b: usize| !qo.le(a, b);
    let mut skipped = 0;

    // C(x,y,z) ⇒ C(x,z,y)
    for a in 0..n {
        for b in (0..n).filter(|&b| cz(a, b)) {
            match c_relation(qo, a, zero, b) {
                Some(true) => {}
                Some(false) => {
                    let w = Witness::new(c, "C: C(x,y,z) ⇒ C(x,z,y)", vec![a, b, zero]);
                    return Verdict::fail(w, skipped);
                }
                None => skipped += 1,
            }
        }
    }
    // C(x,y,z) ⇒ ¬C(y,x,z)
    for a in 0..n {
        if let Some(b) = (0..n).find(|&b| cz(a, b) && cz(b, a)) {
            let w = Witness::new(c, "C: C(x,y,z) ⇒ ¬C(y,x,z)", vec![a, b, zero]);
            return Verdict::fail(w, skipped);
        }
    }
    // C(x,y,z) ⇒ C(w,y,z) ∨ C(x,w,z)
    for a in 0..n {
        for b in (0..n).filter(|&b| cz(a, b)) {
            if let Some(w) = (0..n).find(|&w| !cz(w, b) && !cz(a, w)) {
                let wit = Witness::new(c, "C: C(x,y,z) ⇒ C(w,y,z) ∨ C(x,w,z)", vec![a, b, zero, w]);
                return Verdict::fail(wit, skipped);
            }
        }
    }
    // x ≠ y ⇒ C(x,y,y)
    if let Some(a) = (0..n).find(|&a| a != zero && !cz(a, zero)) {
        let w = Witness::new(c, "C: x≠y ⇒ C(x,y,y)", vec![a, zero, zero]);
        return Verdict::fail(w, skipped);
    }
    Verdict::pass(skipped)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementType {
    VType,
    OType,
}

/// `0` counts as o-type; every other element is exactly one of the two.
pub fn element_type(qo: &QuasiOrder, g: usize) -> ElementType {
    let c = &qo.carrier;
    if g != c.zero() && qo.equiv(g, c.neg(g)) {
        ElementType::VType
    } else {
        ElementType::OType
    }
}

fn is_v_type(qo: &QuasiOrder, g: usize) -> bool {
    qo.equiv(g, qo.carrier.neg(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QoType {
    pub all_v: bool,
    pub all_o: bool,
    pub is_order: bool,
    pub is_valuational: bool,
}

pub fn classify(qo: &QuasiOrder) -> QoType {
    let n = qo.carrier.len();
    QoType {
        all_v: (0..n).all(|g| is_v_type(qo, g)),
        all_o: (0..n).all(|g| element_type(qo, g) == ElementType::OType),
        is_order: qo.class_count() == n && translation_invariant(qo),
        is_valuational: natural_valuation(qo).is_ok(),
    }
}

/// `x ≾ y ⇒ x+z ≾ y+z`, over in-window sums.
fn translation_invariant(qo: &QuasiOrder) -> bool {
    let c = &qo.carrier;
    let n = c.len();
    (0..n).all(|x| {
        (0..n).filter(|&y| qo.le(x, y)).all(|y| {
            (0..n).all(|z| match (c.add(x, z), c.add(y, z)) {
                (Some(a), Some(b)) => qo.le(a, b),
                _ => true,
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not valuational: {0}")]
pub struct NotValuational(pub Witness);

/// Recover the valuation whose induced quasi-order is `qo`: the value set is
/// the ∼-classes in reverse order, with `cl(0)` sent to ∞.
pub fn natural_valuation(qo: &QuasiOrder) -> Result<Valuation, NotValuational> {
    let c = &qo.carrier;
    let zero = c.zero();
    if let Some(g) = (0..c.len()).find(|&g| g != zero && qo.le(g, zero)) {
        return Err(NotValuational(Witness::new(c, "v(g)=∞ ⇔ g=0", vec![g, zero])));
    }
    let top = qo.class_count() as u32 - 1;
    let labels: Vec<String> = (0..top).map(|k| k.to_string()).collect();
    let table: Vec<Value> = (0..c.len())
        .map(|g| match qo.rank(g) {
            0 => Value::Infinity,
            r => Value::Finite((top - r) as usize),
        })
        .collect();
    let v = Valuation::new(Arc::clone(c), labels, table).expect("table is well formed");
    let verdict = check_valuation(&v);
    if let Some(w) = verdict.witness {
        return Err(NotValuational(w));
    }
    debug_assert!(v.induced_qo().same_relation(qo));
    Ok(v)
}

/// `set` is convex when no outsider sits between two members.
/// Witness: `[low member, outsider, high member]`.
pub fn check_convex(qo: &QuasiOrder, set: &[bool]) -> Verdict {
    let c = &qo.carrier;
    let members: Vec<usize> = (0..c.len()).filter(|&i| set[i]).collect();
    let (Some(lo), Some(hi)) = (
        members.iter().map(|&i| qo.rank(i)).min(),
        members.iter().map(|&i| qo.rank(i)).max(),
    ) else {
        return Verdict::pass(0);
    };
    for a in (0..c.len()).filter(|&a| !set[a]) {
        let r = qo.rank(a);
        if lo <= r && r <= hi {
            let b = *members.iter().find(|&&b| qo.le(b, a)).expect("rank bound");
            let d = *members.iter().find(|&&d| qo.le(a, d)).expect("rank bound");
            return Verdict::fail(Witness::new(c, "convex", vec![b, a, d]), 0);
        }
    }
    Verdict::pass(0)
}

/// Witness: `[outsider, member]` with outsider ≾ member.
pub fn check_initial_segment(qo: &QuasiOrder, set: &[bool]) -> Verdict {
    let c = &qo.carrier;
    let Some(hi) = (0..c.len()).filter(|&i| set[i]).map(|i| qo.rank(i)).max() else {
        return Verdict::pass(0);
    };
    for a in (0..c.len()).filter(|&a| !set[a]) {
        if qo.rank(a) <= hi {
            let b = (0..c.len()).find(|&b| set[b] && qo.le(a, b)).expect("rank bound");
            return Verdict::fail(Witness::new(c, "initial segment", vec![a, b]), 0);
        }
    }
    Verdict::pass(0)
}

/// The set of o-type elements as a membership mask.
pub fn o_type_set(qo: &QuasiOrder) -> Vec<bool> {
    (0..qo.carrier.len()).map(|g| element_type(qo, g) == ElementType::OType).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupElement;

    fn el(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn chain(spec: &str, ranks: &[u32]) -> QuasiOrder {
        let c = Carrier::parse(spec).unwrap();
        QuasiOrder::from_keys(c, ranks, Provenance::Matrix)
    }

    /// 0 ≺ 2 ≺ 1 ∼ 3 on Z/4.
    fn two_adic_z4() -> QuasiOrder {
        chain("Z/4", &[0, 2, 1, 2])
    }

    #[test]
    fn matrix_validation() {
        let z2 = Carrier::parse("Z/2").unwrap();
        let qo = QuasiOrder::from_matrix(z2, &[vec![true, true], vec![false, true]]).unwrap();
        assert!(qo.lt(0, 1));

        let z3 = Carrier::parse("Z/3").unwrap();
        let rows = vec![vec![true, true, true], vec![true, false, true], vec![true, true, true]];
        let err = QuasiOrder::from_matrix(Arc::clone(&z3), &rows).unwrap_err();
        assert!(matches!(err, QoError::NotReflexive(ref w) if w.indices == vec![1]));

        let rows = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        let err = QuasiOrder::from_matrix(Arc::clone(&z3), &rows).unwrap_err();
        assert!(matches!(err, QoError::NotTransitive(ref w) if w.indices == vec![0, 1, 2]));

        let rows = vec![vec![true, false, false], vec![false, true, false], vec![false, false, true]];
        let err = QuasiOrder::from_matrix(Arc::clone(&z3), &rows).unwrap_err();
        assert!(matches!(err, QoError::NotTotal(_)));

        let err = QuasiOrder::from_matrix(z3, &[vec![true]]).unwrap_err();
        assert!(matches!(err, QoError::Dimension { .. }));
    }

    #[test]
    fn q1_fails_on_collapsed_z2() {
        let qo = chain("Z/2", &[0, 0]);
        let v = check_axiom(&qo, AxiomId::Q1);
        assert_eq!(v.witness.unwrap().indices, vec![1, 0]);
    }

    #[test]
    fn c_axioms_examples() {
        assert!(check_axiom(&two_adic_z4(), AxiomId::CAxioms).passed());
        let strict = chain("Z/3", &[0, 1, 2]);
        let v = check_axiom(&strict, AxiomId::CAxioms);
        let w = v.witness.unwrap();
        assert_eq!(w.indices, vec![2, 1, 0]);
        assert!(w.rule.contains("C(x,z,y)"));
        assert!(check_axiom(&chain("Z/3", &[0, 1, 1]), AxiomId::CAxioms).passed());
        let reversed = chain("Z/2", &[1, 0]);
        assert!(!check_axiom(&reversed, AxiomId::CAxioms).passed());
        let flat = chain("Z/2", &[0, 0]);
        let w = check_axiom(&flat, AxiomId::CAxioms).witness.unwrap();
        assert!(w.rule.contains("x≠y"));
    }

    #[test]
    fn q2_examples() {
        assert!(check_axiom(&chain("Z/2", &[0, 1]), AxiomId::Q2).passed());
        let w = check_axiom(&chain("Z/2", &[1, 0]), AxiomId::Q2).witness.unwrap();
        // x = a, y = 0, z = a: a ≾ 0 ≁ a but 0 ⋠ a.
        assert_eq!(w.indices, vec![1, 0, 1]);
    }

    #[test]
    fn element_types() {
        let qo = two_adic_z4();
        assert_eq!(element_type(&qo, 1), ElementType::VType);
        assert_eq!(element_type(&qo, 0), ElementType::OType);
        let strict = chain("Z/3", &[0, 1, 2]);
        assert_eq!(element_type(&strict, 1), ElementType::OType);
    }

    #[test]
    fn classify_two_adic() {
        let t = classify(&two_adic_z4());
        assert!(t.all_v && t.is_valuational && !t.is_order && !t.all_o);
        let trivial = QuasiOrder::from_keys(Carrier::parse("0").unwrap(), &[0u32], Provenance::Matrix);
        let t = classify(&trivial);
        assert!(t.all_v && t.all_o && t.is_order && t.is_valuational);
        // Antisymmetric but not translation invariant: 0 ≤ 1 yet 1 > 0 = 1+1.
        let t = classify(&chain("Z/2", &[0, 1]));
        assert!(!t.is_order && t.is_valuational);
    }

    #[test]
    fn natural_valuation_of_two_adic() {
        let v = natural_valuation(&two_adic_z4()).unwrap();
        assert_eq!(v.labels(), &["0".to_string(), "1".to_string()]);
        assert_eq!(v.value(2), Value::Finite(1));
        assert_eq!(v.value(1), Value::Finite(0));
        assert_eq!(v.value(3), Value::Finite(0));
        assert_eq!(v.value(0), Value::Infinity);

        let trivial = chain("Z/5", &[0, 1, 1, 1, 1]);
        let v = natural_valuation(&trivial).unwrap();
        assert_eq!(v.labels().len(), 1);

        assert!(natural_valuation(&chain("Z/3", &[0, 1, 2])).is_err());
        assert!(natural_valuation(&chain("Z/2", &[0, 0])).is_err());
    }

    #[test]
    fn convexity() {
        let qo = two_adic_z4();
        let c = qo.carrier().clone();
        let set = |elems: &[&str]| -> Vec<bool> {
            let idx: Vec<usize> = elems.iter().map(|e| c.lookup(&el(e)).unwrap()).collect();
            (0..c.len()).map(|i| idx.contains(&i)).collect()
        };
        assert!(check_convex(&qo, &set(&["0", "2"])).passed());
        let w = check_convex(&qo, &set(&["0", "1"])).witness.unwrap();
        assert_eq!(w.elements, vec![el("0"), el("2"), el("1")]);
        assert!(check_convex(&qo, &[true; 4]).passed());
        assert!(check_initial_segment(&qo, &set(&["0", "2"])).passed());
        assert!(!check_initial_segment(&qo, &set(&["0", "1"])).passed());
    }

    #[test]
    fn c_relation_is_translation_invariant() {
        let qo = chain("Z/6", &[0, 3, 2, 1, 2, 3]);
        let c = qo.carrier().clone();
        for f in 0..6 {
            for g in 0..6 {
                for h in 0..6 {
                    for x in 0..6 {
                        let shift = |i| c.add(i, x).unwrap();
                        assert_eq!(
                            c_relation(&qo, f, g, h),
                            c_relation(&qo, shift(f), shift(g), shift(h))
                        );
                    }
                }
            }
        }
    }
}
