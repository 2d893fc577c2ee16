//! Group orders as positive cones, lexicographic orders, and the map Ω
//! from o-type C-q.o.s to orders.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{Verdict, Witness};
use crate::groups::{Carrier, GroupElement, GroupError, QuotientView};
use crate::qo::{check_axiom, element_type, AxiomId, ElementType, Provenance, QuasiOrder};
use crate::quotient::{lift_family, Level, LiftError, QoFamily};
use crate::valuation::{check_v_compatible, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("not a positive cone: {0}")]
    NotACone(Witness),
    #[error("quasi-order is not a C-q.o.: {0}")]
    NotCqo(Witness),
    #[error("quasi-order has a v-type element: {0}")]
    NotOType(Witness),
    #[error("cone is not a union of classes: {0}")]
    NotStable(Witness),
    #[error("lex orders need a windowed carrier with {expected} signs, got {got}")]
    LexShape { expected: usize, got: usize },
    #[error("signs must be +1 or -1")]
    BadSign,
    #[error("{0} and {1} cannot be compared inside the window")]
    Undetermined(GroupElement, GroupElement),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

#[derive(Debug, Clone)]
pub struct PositiveCone {
    carrier: Arc<Carrier>,
    members: Vec<bool>,
}

impl PartialEq for PositiveCone {
    fn eq(&self, other: &Self) -> bool {
        self.carrier.elements() == other.carrier.elements() && self.members == other.members
    }
}

impl PositiveCone {
    /// Unchecked; see [`check_cone`].
    pub fn new(carrier: Arc<Carrier>, members: Vec<bool>) -> Self {
        assert_eq!(carrier.len(), members.len());
        PositiveCone { carrier, members }
    }

    pub fn from_elements(carrier: Arc<Carrier>, elements: &[GroupElement]) -> Result<Self, OrderError> {
        let mut members = vec![false; carrier.len()];
        for g in elements {
            members[carrier.lookup(g)?] = true;
        }
        Ok(PositiveCone { carrier, members })
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members[g]
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.carrier.len()).filter(|&g| self.members[g]).map(|g| self.carrier.element(g).clone()).collect()
    }
}

/// `P∩−P = {0}`, `P∪−P = G` and `P+P ⊆ P`, the last over in-window sums.
pub fn check_cone(carrier: &Carrier, members: &[bool]) -> Verdict {
    let n = carrier.len();
    let zero = carrier.zero();
    if !members[zero] {
        return Verdict::fail(Witness::new(carrier, "P∩−P={0}", vec![zero]), 0);
    }
    if let Some(g) = (0..n).find(|&g| g != zero && members[g] && members[carrier.neg(g)]) {
        return Verdict::fail(Witness::new(carrier, "P∩−P={0}", vec![g]), 0);
    }
    if let Some(g) = (0..n).find(|&g| !members[g] && !members[carrier.neg(g)]) {
        return Verdict::fail(Witness::new(carrier, "P∪−P=G", vec![g]), 0);
    }
    let mut skipped = 0;
    for g in (0..n).filter(|&g| members[g]) {
        for h in (0..n).filter(|&h| members[h]) {
            match carrier.add(g, h) {
                Some(s) if !members[s] => {
                    return Verdict::fail(Witness::new(carrier, "P+P⊆P", vec![g, h]), skipped);
                }
                Some(_) => {}
                None => skipped += 1,
            }
        }
    }
    Verdict::pass(skipped)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OrderSpec {
    /// Positive cone given by its in-window elements.
    FromCone(Vec<GroupElement>),
    /// Positive iff the first nonzero `signs[i]·a_i` is positive.
    Lex { signs: Vec<i8> },
}

/// A group order `g ≤ h ⇔ h−g ∈ P`.
#[derive(Clone)]
pub struct Order {
    cone: PositiveCone,
    signs: Option<Vec<i8>>,
}

impl fmt::Debug for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.signs {
            Some(s) => write!(f, "Lex{s:?} on {}", self.cone.carrier.name()),
            None => write!(f, "Cone{:?} on {}", self.cone.elements(), self.cone.carrier.name()),
        }
    }
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.cone == other.cone
    }
}

fn lex_positive(signs: &[i8], g: &GroupElement) -> bool {
    signs
        .iter()
        .zip(&g.0)
        .find(|(_, &a)| a != 0)
        .is_none_or(|(&s, &a)| s as i64 * a > 0)
}

fn lex_cone(carrier: &Arc<Carrier>, signs: &[i8]) -> PositiveCone {
    let members = carrier.elements().iter().map(|g| lex_positive(signs, g)).collect();
    PositiveCone::new(Arc::clone(carrier), members)
}

fn sign_vectors(d: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u32 << d).map(move |bits| (0..d).map(|i| if bits >> (d - 1 - i) & 1 == 0 { 1 } else { -1 }).collect())
}

pub fn lex_order(carrier: &Arc<Carrier>, signs: &[i8]) -> Result<Order, OrderError> {
    if !carrier.is_windowed() || carrier.coord_len() != signs.len() {
        return Err(OrderError::LexShape { expected: carrier.coord_len(), got: signs.len() });
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(OrderError::BadSign);
    }
    Ok(Order { cone: lex_cone(carrier, signs), signs: Some(signs.to_vec()) })
}

/// Validate the cone. On a window, a cone that agrees with some lex cone
/// is stored as that lex order so that comparisons beyond the window
/// remain decidable.
pub fn order_from_cone(cone: PositiveCone) -> Result<Order, OrderError> {
    if let Some(w) = check_cone(&cone.carrier, &cone.members).witness {
        return Err(OrderError::NotACone(w));
    }
    let signs = if cone.carrier.is_windowed() {
        sign_vectors(cone.carrier.coord_len()).find(|s| lex_cone(&cone.carrier, s).members == cone.members)
    } else {
        None
    };
    Ok(Order { cone, signs })
}

impl Order {
    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.cone.carrier
    }

    pub fn cone(&self) -> &PositiveCone {
        &self.cone
    }

    pub fn spec(&self) -> OrderSpec {
        match &self.signs {
            Some(s) => OrderSpec::Lex { signs: s.clone() },
            None => OrderSpec::FromCone(self.cone.elements()),
        }
    }

    pub fn is_positive(&self, g: usize) -> bool {
        self.cone.members[g]
    }

    pub fn le(&self, g: usize, h: usize) -> Result<bool, OrderError> {
        let c = &self.cone.carrier;
        if let Some(signs) = &self.signs {
            let d = GroupElement(c.element(h).0.iter().zip(&c.element(g).0).map(|(a, b)| a - b).collect());
            return Ok(lex_positive(signs, &d));
        }
        match c.sub(h, g) {
            Some(d) => Ok(self.cone.members[d]),
            None => Err(OrderError::Undetermined(c.element(g).clone(), c.element(h).clone())),
        }
    }

    /// The order as a quasi-order on the carrier.
    pub fn to_qo(&self) -> Result<QuasiOrder, OrderError> {
        let c = Arc::clone(&self.cone.carrier);
        if let Some(signs) = &self.signs {
            let keys: Vec<Vec<i64>> =
                c.elements().iter().map(|g| g.0.iter().zip(signs).map(|(&a, &s)| a * s as i64).collect()).collect();
            return Ok(QuasiOrder::from_keys(c, &keys, Provenance::LexOrder));
        }
        let n = c.len();
        for g in 0..n {
            for h in 0..n {
                self.le(g, h)?;
            }
        }
        QuasiOrder::from_comparator(Arc::clone(&c), Provenance::LexOrder, |g, h| self.le(g, h).expect("checked"))
            .map_err(|e| match e {
                crate::qo::QoError::NotTransitive(w) | crate::qo::QoError::NotTotal(w) => OrderError::NotACone(w),
                other => unreachable!("{other}"),
            })
    }
}

/// Totality, antisymmetry and translation invariance (in-window) of an
/// order, plus compatibility with `v` when given.
pub fn check_order(order: &Order, v: Option<&Valuation>) -> Result<Vec<(&'static str, Verdict)>, OrderError> {
    let qo = order.to_qo()?;
    let c = order.carrier();
    let n = c.len();
    let mut out = vec![("total", check_axiom(&qo, AxiomId::Total))];
    let anti = (0..n)
        .flat_map(|g| (0..n).map(move |h| (g, h)))
        .find(|&(g, h)| g != h && qo.equiv(g, h))
        .map_or(Verdict::pass(0), |(g, h)| Verdict::fail(Witness::new(c, "antisymmetric", vec![g, h]), 0));
    out.push(("antisymmetric", anti));
    let mut skipped = 0;
    let mut witness = None;
    'outer: for g in 0..n {
        for h in (0..n).filter(|&h| qo.le(g, h)) {
            for z in 0..n {
                match (c.add(g, z), c.add(h, z)) {
                    (Some(a), Some(b)) => {
                        if !qo.le(a, b) {
                            witness = Some(Witness::new(c, "g≤h ⇒ g+z≤h+z", vec![g, h, z]));
                            break 'outer;
                        }
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    out.push(("translation invariant", Verdict { witness, skipped }));
    if let Some(v) = v {
        out.push(("v-compatible", check_v_compatible(v, &qo)));
    }
    Ok(out)
}

/// `P = {g : −g ≾ g}` for an o-type C-q.o., with the cone axioms and
/// ∼-stability verified.
pub fn cone_from_qo(qo: &QuasiOrder) -> Result<PositiveCone, OrderError> {
    if let Some(w) = check_axiom(qo, AxiomId::CAxioms).witness {
        return Err(OrderError::NotCqo(w));
    }
    let c = qo.carrier();
    let n = c.len();
    if let Some(g) = (0..n).find(|&g| element_type(qo, g) == ElementType::VType) {
        return Err(OrderError::NotOType(Witness::new(c, "g≁−g", vec![g, c.neg(g)])));
    }
    let members: Vec<bool> = (0..n).map(|g| qo.le(c.neg(g), g)).collect();
    if let Some(w) = check_cone(c, &members).witness {
        return Err(OrderError::NotACone(w));
    }
    for g in (0..n).filter(|&g| members[g]) {
        if let Some(h) = (0..n).find(|&h| !members[h] && qo.equiv(g, h)) {
            return Err(OrderError::NotStable(Witness::new(c, "g∈P, h∼g ⇒ h∈P", vec![g, h])));
        }
    }
    Ok(PositiveCone::new(Arc::clone(c), members))
}

/// Ω: the order whose positive cone is `{g : −g ≾ g}`.
pub fn omega(qo: &QuasiOrder) -> Result<Order, OrderError> {
    order_from_cone(cone_from_qo(qo)?)
}

/// `0 ≺ (−P∖{0}, one class) ≺ (P∖{0}, ordered by ≤)`.
pub fn omega_preimage(order: &Order) -> Result<QuasiOrder, OrderError> {
    let as_qo = order.to_qo()?;
    let c = order.carrier();
    let zero = c.zero();
    let keys: Vec<(u8, u32)> = (0..c.len())
        .map(|g| {
            if g == zero {
                (0, 0)
            } else if order.is_positive(g) {
                (2, as_qo.rank(g))
            } else {
                (1, 0)
            }
        })
        .collect();
    Ok(QuasiOrder::from_keys(Arc::clone(c), &keys, Provenance::OmegaPreimage))
}

/// The order induced on `G/H` for a convex `H`: a coset is positive when
/// one of its members is.
pub fn induced_order(order: &Order, view: &QuotientView) -> Result<Order, OrderError> {
    let q = view.carrier();
    let members = (0..q.len()).map(|k| view.coset(k).iter().any(|&g| order.is_positive(g))).collect();
    order_from_cone(PositiveCone::new(Arc::clone(q), members))
}

/// The distinct lex orders of a windowed level quotient.
pub fn level_orders(level: &Level) -> Vec<Order> {
    let c = level.carrier();
    let mut out: Vec<Order> = Vec::new();
    for signs in sign_vectors(c.coord_len()) {
        let cone = lex_cone(c, &signs);
        if let Ok(order) = order_from_cone(cone) {
            if !out.contains(&order) {
                out.push(order);
            }
        }
    }
    out
}

/// Lift a family of orders through Ω: take the Ω-preimage at each level,
/// lift the C-q.o. family, and apply Ω.
pub fn lift_order_family(v: &Valuation, orders: &[Order]) -> Result<Order, OrderError> {
    let members = orders.iter().map(omega_preimage).collect::<Result<Vec<_>, _>>()?;
    let fam = QoFamily::new(v.clone(), members)?;
    omega(&lift_family(&fam)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Subgroup;
    use crate::qo::classify;
    use crate::quotient::{induce_family, induce_on_quotient, levels};

    fn el(c: &Carrier, coords: &[i64]) -> usize {
        c.lookup(&GroupElement(coords.to_vec())).unwrap()
    }

    #[test]
    fn cone_checks() {
        let z3 = Carrier::parse("Z/3").unwrap();
        let w = check_cone(&z3, &[true, true, false]).witness.unwrap();
        assert_eq!(w.indices, vec![1, 1]);
        assert_eq!(w.rule, "P+P⊆P");

        let c = Carrier::parse("Z^2[B=3]").unwrap();
        let lex: Vec<bool> = c.elements().iter().map(|g| g.0[0] > 0 || (g.0[0] == 0 && g.0[1] >= 0)).collect();
        let v = check_cone(&c, &lex);
        assert!(v.passed() && v.skipped > 0);

        let trivial_cone: Vec<bool> = (0..c.len()).map(|g| g == c.zero()).collect();
        assert_eq!(check_cone(&c, &trivial_cone).witness.unwrap().rule, "P∪−P=G");
    }

    #[test]
    fn lex_signs() {
        let c = Carrier::parse("Z^2[B=6]").unwrap();
        let pos = |signs: &[i8], g: &[i64]| lex_order(&c, signs).unwrap().is_positive(el(&c, g));
        assert!(pos(&[1, 1], &[1, -5]));
        assert!(!pos(&[-1, 1], &[1, -5]));
        assert!(!pos(&[1, -1], &[0, 3]));
        assert!(lex_order(&c, &[1]).is_err());
        assert!(lex_order(&Carrier::parse("Z/4").unwrap(), &[1]).is_err());
    }

    #[test]
    fn cone_orders() {
        let c = Carrier::parse("Z^2[B=3]").unwrap();
        let lex: Vec<bool> = c.elements().iter().map(|g| g.0[0] > 0 || (g.0[0] == 0 && g.0[1] >= 0)).collect();
        let order = order_from_cone(PositiveCone::new(Arc::clone(&c), lex)).unwrap();
        assert_eq!(order.spec(), OrderSpec::Lex { signs: vec![1, 1] });
        assert!(order.le(el(&c, &[0, -1]), el(&c, &[1, -2])).unwrap());
        // (-3,-3) ≤ (3,3) although the difference leaves the window.
        assert!(order.le(el(&c, &[-3, -3]), el(&c, &[3, 3])).unwrap());

        let z = Carrier::parse("Z^1[B=10]").unwrap();
        let naturals: Vec<bool> = z.elements().iter().map(|g| g.0[0] >= 0).collect();
        let order = order_from_cone(PositiveCone::new(Arc::clone(&z), naturals)).unwrap();
        assert!(order.le(el(&z, &[3]), el(&z, &[7])).unwrap());
        for g in 0..z.len() {
            assert!(order.le(g, g).unwrap());
        }
    }

    #[test]
    fn preimage_on_integers() {
        let c = Carrier::parse("Z^1[B=6]").unwrap();
        let standard = lex_order(&c, &[1]).unwrap();
        let q = omega_preimage(&standard).unwrap();
        assert_eq!(q.class_count(), 8);
        assert!(q.equiv(el(&c, &[-1]), el(&c, &[-6])));
        assert!(q.lt(el(&c, &[0]), el(&c, &[-3])));
        assert!(q.lt(el(&c, &[-3]), el(&c, &[1])));
        assert!(q.lt(el(&c, &[5]), el(&c, &[6])));
        assert!(check_axiom(&q, AxiomId::CAxioms).passed());
        assert!(classify(&q).all_o);

        let reversed = lex_order(&c, &[-1]).unwrap();
        let r = omega_preimage(&reversed).unwrap();
        assert!(r.equiv(el(&c, &[1]), el(&c, &[6])));
        assert!(r.lt(el(&c, &[6]), el(&c, &[-1])));
        assert!(r.lt(el(&c, &[-1]), el(&c, &[-2])));
    }

    #[test]
    fn omega_inverts_preimage() {
        let c = Carrier::parse("Z^1[B=10]").unwrap();
        for signs in [[1], [-1]] {
            let order = lex_order(&c, &signs).unwrap();
            let back = omega(&omega_preimage(&order).unwrap()).unwrap();
            assert_eq!(back, order);
            let p = cone_from_qo(&omega_preimage(&order).unwrap()).unwrap();
            let expected: Vec<GroupElement> =
                (0..=10).map(|k| GroupElement(vec![signs[0] as i64 * k])).collect();
            let mut got = p.elements();
            got.sort();
            let mut want = expected;
            want.sort();
            assert_eq!(got, want);
        }
        let t = Carrier::parse("0").unwrap();
        let q = QuasiOrder::from_keys(Arc::clone(&t), &[0], Provenance::Matrix);
        assert_eq!(cone_from_qo(&q).unwrap().elements(), vec![t.element(0).clone()]);
    }

    #[test]
    fn cone_from_qo_rejects() {
        let v = Valuation::p_adic(Carrier::parse("Z/4").unwrap(), 2).unwrap();
        assert!(matches!(cone_from_qo(&v.induced_qo()), Err(OrderError::NotOType(_))));
        let c = Carrier::parse("Z^1[B=4]").unwrap();
        let standard = lex_order(&c, &[1]).unwrap().to_qo().unwrap();
        assert!(matches!(cone_from_qo(&standard), Err(OrderError::NotCqo(_))));
    }

    /// The four o-type C-q.o.s lifted from the level orders of the
    /// coordinate valuation on `Z^2[B=6]`.
    fn lifted_cqos(v: &Valuation) -> Vec<QuasiOrder> {
        let lv = levels(v).unwrap();
        let per: Vec<Vec<Order>> = lv.iter().map(level_orders).collect();
        assert_eq!(per.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 2]);
        let mut out = Vec::new();
        for a in &per[0] {
            for b in &per[1] {
                let members = vec![omega_preimage(a).unwrap(), omega_preimage(b).unwrap()];
                out.push(lift_family(&QoFamily::new(v.clone(), members).unwrap()).unwrap());
            }
        }
        out
    }

    #[test]
    fn omega_commutes_with_quotients() {
        let c = Carrier::parse("Z^2[B=6]").unwrap();
        let v = Valuation::coordinate(Arc::clone(&c));
        let mut convex_cases = 0;
        for qo in lifted_cqos(&v) {
            let order = omega(&qo).unwrap();
            let pre = omega_preimage(&order).unwrap();
            for q in [&pre, &qo] {
                for mask in [[false, true], [true, false]] {
                    let view = c.quotient(&Subgroup::coordinate(&c, &mask).unwrap());
                    if let Ok(induced) = induce_on_quotient(q, &view) {
                        convex_cases += 1;
                        assert_eq!(omega(&induced).unwrap(), induced_order(&order, &view).unwrap());
                    }
                }
            }
        }
        assert_eq!(convex_cases, 4);
    }

    #[test]
    fn lifted_orders_are_lex() {
        let c = Carrier::parse("Z^2[B=6]").unwrap();
        let v = Valuation::coordinate(Arc::clone(&c));
        let lv = levels(&v).unwrap();
        let per: Vec<Vec<Order>> = lv.iter().map(level_orders).collect();
        let mut lifted = Vec::new();
        for a in &per[0] {
            for b in &per[1] {
                let o = lift_order_family(&v, &[a.clone(), b.clone()]).unwrap();
                for (name, verdict) in check_order(&o, Some(&v)).unwrap() {
                    assert!(verdict.passed(), "{name}: {verdict}");
                }
                lifted.push(o);
            }
        }
        for signs in sign_vectors(2) {
            let lex = lex_order(&c, &signs).unwrap();
            assert_eq!(lifted.iter().filter(|o| **o == lex).count(), 1, "{signs:?}");
        }
        for qo in lifted_cqos(&v) {
            assert!(classify(&qo).all_o);
            assert!(induce_family(&qo, &v).is_ok());
        }
    }
}
