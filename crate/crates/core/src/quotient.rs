//! Induced quotient quasi-orders, lifting along a valuation, and the
//! correspondence between quasi-orders and families on the level quotients.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{Verdict, Witness};
use crate::enumerate::{EnumError, WeakOrders, DEFAULT_CAP};
use crate::groups::{Carrier, GroupElement, QuotientView, Restriction, Subgroup};
use crate::qo::{
    check_axiom, check_convex, classify, passes, AxiomId, Provenance, QoError, QuasiOrder,
};
use crate::valuation::{
    check_v_compatible, check_valuation, is_coarsening, LevelKind, Valuation, ValuationError, Value,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InduceError {
    #[error("quasi-order fails the quotient precondition: {0}")]
    NotStar(Witness),
    #[error("subgroup is not convex: {0}")]
    NotConvex(Witness),
    #[error("induced relation is not transitive: {0}")]
    NotTransitive(Witness),
    #[error("class of the zero coset is not a singleton: {0}")]
    ZeroClassFat(Witness),
    #[error("convexity and induction disagree on {0}")]
    LemmaViolated(String),
}

/// The existential relation `g+H ≾ h+H ⇔ ∃a,b∈H: g+a ≾ h+b` on the coset
/// representatives, with no precondition and no convexity shortcut.
pub fn induced_relation(qo: &QuasiOrder, view: &QuotientView) -> Result<QuasiOrder, InduceError> {
    let q = view.carrier();
    let m = q.len();
    let lo: Vec<u32> = (0..m).map(|i| view.coset(i).iter().map(|&g| qo.rank(g)).min().expect("nonempty")).collect();
    let hi: Vec<u32> = (0..m).map(|i| view.coset(i).iter().map(|&g| qo.rank(g)).max().expect("nonempty")).collect();
    let induced = QuasiOrder::from_comparator(Arc::clone(q), Provenance::Induced, |a, b| lo[a] <= hi[b])
        .map_err(|e| match e {
            QoError::NotTransitive(w) => InduceError::NotTransitive(w),
            other => unreachable!("existential relation is reflexive and total: {other}"),
        })?;
    let zero = q.zero();
    if let Some(x) = (0..m).find(|&x| x != zero && induced.equiv(x, zero)) {
        return Err(InduceError::ZeroClassFat(Witness::new(q, "cl(0+H)={0+H}", vec![x, zero])));
    }
    Ok(induced)
}

/// Induce `qo` on `G/H`. Requires the quotient precondition; convexity of
/// `H` is checked first and is the exact success criterion, so any
/// disagreement with the raw induction is reported as `LemmaViolated`.
pub fn induce_on_quotient(qo: &QuasiOrder, view: &QuotientView) -> Result<QuasiOrder, InduceError> {
    let star = check_axiom(qo, AxiomId::Star);
    if let Some(w) = star.witness {
        return Err(InduceError::NotStar(w));
    }
    let convex = check_convex(qo, view.subgroup().members());
    let raw = induced_relation(qo, view);
    match (convex.witness, raw) {
        (None, Ok(induced)) => Ok(induced),
        (Some(w), Err(_)) => Err(InduceError::NotConvex(w)),
        (None, Err(e)) => Err(InduceError::LemmaViolated(format!("convex subgroup but {e}"))),
        (Some(w), Ok(_)) => Err(InduceError::LemmaViolated(format!("induction succeeds although {w}"))),
    }
}

/// One level `G^γ/G_γ` of a valuation: `G^γ` as a carrier and the quotient
/// of that carrier by `G_γ`.
#[derive(Debug, Clone)]
pub struct Level {
    pub gamma: usize,
    pub label: String,
    pub upper: Restriction,
    pub view: QuotientView,
}

impl Level {
    /// Coset of a parent element with value at least γ.
    pub fn project(&self, g: usize) -> Option<usize> {
        self.upper.lookup[g].map(|k| self.view.project(k))
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        self.view.carrier()
    }

    /// The restriction of `qo` to `G^γ`.
    pub fn restrict(&self, qo: &QuasiOrder) -> QuasiOrder {
        qo.restrict(&self.upper)
    }
}

pub fn levels(v: &Valuation) -> Result<Vec<Level>, ValuationError> {
    let c = v.carrier();
    (0..v.labels().len())
        .map(|gamma| {
            let upper_set = v.level_set(gamma, LevelKind::Geq)?;
            let lower_set = v.level_set(gamma, LevelKind::Gt)?;
            let upper = c.restrict(&upper_set);
            let lower_members: Vec<bool> = upper.embed.iter().map(|&g| lower_set.contains(g)).collect();
            let lower = Subgroup::from_members(&upper.carrier, lower_members)
                .map_err(ValuationError::NotSubgroup)?;
            let view = upper.carrier.quotient(&lower);
            Ok(Level { gamma, label: v.labels()[gamma].clone(), upper, view })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("valuation is not compatible with the quasi-order: {0}")]
    NotCompatible(Witness),
    #[error("at level {label}: {source}")]
    Induce { label: String, source: InduceError },
    #[error("family has {got} members for {expected} levels")]
    MissingLevel { expected: usize, got: usize },
    #[error("member for level {0} lives on the wrong carrier")]
    WrongCarrier(String),
    #[error("lifted relation is not a quasi-order: {0}")]
    NotQuasiOrder(QoError),
    #[error("precondition {axiom} fails at level {label}: {witness}")]
    Precondition { label: String, axiom: AxiomId, witness: Witness },
    #[error("{0} is not a coarsening: {1}")]
    NotCoarsening(String, Witness),
    #[error("w is not constant on the coset of {0}")]
    NotConstantOnCoset(GroupElement),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
}

/// A quasi-order on each level quotient of a valuation.
#[derive(Debug, Clone)]
pub struct QoFamily {
    valuation: Valuation,
    levels: Vec<Level>,
    members: Vec<QuasiOrder>,
}

impl QoFamily {
    pub fn new(valuation: Valuation, members: Vec<QuasiOrder>) -> Result<Self, LiftError> {
        let levels = levels(&valuation)?;
        Self::with_levels(valuation, levels, members)
    }

    fn with_levels(valuation: Valuation, levels: Vec<Level>, members: Vec<QuasiOrder>) -> Result<Self, LiftError> {
        if members.len() != levels.len() {
            return Err(LiftError::MissingLevel { expected: levels.len(), got: members.len() });
        }
        for (level, m) in levels.iter().zip(&members) {
            if m.carrier().elements() != level.carrier().elements() {
                return Err(LiftError::WrongCarrier(level.label.clone()));
            }
        }
        Ok(QoFamily { valuation, levels, members })
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn members(&self) -> &[QuasiOrder] {
        &self.members
    }

    /// First level at which the two families differ, with the pair of
    /// representatives.
    pub fn first_difference(&self, other: &QoFamily) -> Option<(usize, usize, usize)> {
        self.members
            .iter()
            .zip(&other.members)
            .enumerate()
            .find_map(|(gamma, (a, b))| a.first_difference(b).map(|(i, j)| (gamma, i, j)))
    }
}

/// Induce `qo` on every level quotient. Requires `v` compatible with `qo`.
pub fn induce_family(qo: &QuasiOrder, v: &Valuation) -> Result<QoFamily, LiftError> {
    if let Some(w) = check_v_compatible(v, qo).witness {
        return Err(LiftError::NotCompatible(w));
    }
    let levels = levels(v)?;
    let members = levels
        .iter()
        .map(|level| {
            induce_on_quotient(&level.restrict(qo), &level.view)
                .map_err(|source| LiftError::Induce { label: level.label.clone(), source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    QoFamily::with_levels(v.clone(), levels, members)
}

/// `g ≾ h ⇔ g+G_γ ≾_γ h+G_γ` with `γ = min(v(g), v(h))`.
pub fn lift_family(fam: &QoFamily) -> Result<QuasiOrder, LiftError> {
    let v = &fam.valuation;
    QuasiOrder::from_comparator(Arc::clone(v.carrier()), Provenance::Lifted, |g, h| {
        match v.value(g).min(v.value(h)) {
            Value::Infinity => true,
            Value::Finite(gamma) => {
                let level = &fam.levels[gamma];
                let (pg, ph) = (level.project(g).expect("in G^γ"), level.project(h).expect("in G^γ"));
                fam.members[gamma].le(pg, ph)
            }
        }
    })
    .map_err(LiftError::NotQuasiOrder)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QoClass {
    Compatible,
    CQO,
}

impl QoClass {
    pub fn axioms(self) -> &'static [AxiomId] {
        match self {
            QoClass::Compatible => &[AxiomId::Q1, AxiomId::Q2],
            QoClass::CQO => &[AxiomId::CAxioms],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivReport {
    /// (1) every `G^γ` convex, (2) every `G_γ` convex, (3) every level
    /// quotient carries an induced quasi-order of the class, (4) `v`
    /// compatible.
    pub conditions: [bool; 4],
    pub witnesses: [Option<String>; 4],
    pub agree: bool,
    /// Type transfer between `qo` and the induced family; `None` when
    /// condition (3) fails.
    pub moreover: Option<bool>,
}

/// The four conditions, each computed by its own procedure.
pub fn check_equiv_theorem(qo: &QuasiOrder, v: &Valuation, class: QoClass) -> Result<EquivReport, LiftError> {
    for &axiom in class.axioms() {
        if let Some(witness) = check_axiom(qo, axiom).witness {
            return Err(LiftError::Precondition { label: "G".into(), axiom, witness });
        }
    }
    let levels = levels(v)?;
    let mut witnesses: [Option<String>; 4] = Default::default();

    for (k, kind) in [(0, LevelKind::Geq), (1, LevelKind::Gt)] {
        for gamma in 0..v.labels().len() {
            let set = v.level_set(gamma, kind)?;
            if let Some(w) = check_convex(qo, set.members()).witness {
                witnesses[k] = Some(format!("level {}: {w}", v.labels()[gamma]));
                break;
            }
        }
    }

    let mut induced = Vec::new();
    for level in &levels {
        match induced_relation(&level.restrict(qo), &level.view) {
            Ok(q) => {
                let bad = class.axioms().iter().find_map(|&a| check_axiom(&q, a).witness.map(|w| (a, w)));
                if let Some((a, w)) = bad {
                    witnesses[2] = Some(format!("level {}: induced relation fails {a}: {w}", level.label));
                    break;
                }
                induced.push(q);
            }
            Err(e) => {
                witnesses[2] = Some(format!("level {}: {e}", level.label));
                break;
            }
        }
    }

    if let Some(w) = check_v_compatible(v, qo).witness {
        witnesses[3] = Some(w.to_string());
    }

    let conditions = [0, 1, 2, 3].map(|k| witnesses[k].is_none());
    let agree = conditions.iter().all(|&c| c == conditions[0]);
    let moreover = conditions[2].then(|| {
        let t = classify(qo);
        let kinds: Vec<_> = induced.iter().map(classify).collect();
        match class {
            QoClass::Compatible => {
                t.is_valuational == kinds.iter().all(|k| k.is_valuational)
                    && t.is_order == kinds.iter().all(|k| k.is_order)
            }
            QoClass::CQO => t.all_v == kinds.iter().all(|k| k.all_v) && t.all_o == kinds.iter().all(|k| k.all_o),
        }
    });
    Ok(EquivReport { conditions, witnesses, agree, moreover })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub label: String,
    pub equal: bool,
    pub difference: Option<(GroupElement, GroupElement)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTrip {
    pub direction: &'static str,
    pub levels: Vec<LevelCheck>,
    /// Pairwise equality on the whole carrier (quasi-order side only).
    pub qo_difference: Option<(GroupElement, GroupElement)>,
    pub lifted_is_cqo: bool,
    pub type_transfer: bool,
    pub passed: bool,
}

pub enum Side<'a> {
    FromFamily(&'a QoFamily),
    FromQo(&'a QuasiOrder),
}

fn type_transfer(qo: &QuasiOrder, fam: &QoFamily) -> bool {
    let t = classify(qo);
    let kinds: Vec<_> = fam.members.iter().map(classify).collect();
    t.all_v == kinds.iter().all(|k| k.all_v) && t.all_o == kinds.iter().all(|k| k.all_o)
}

fn level_checks(a: &QoFamily, b: &QoFamily) -> Vec<LevelCheck> {
    a.levels
        .iter()
        .zip(a.members.iter().zip(&b.members))
        .map(|(level, (x, y))| {
            let d = x.first_difference(y);
            let c = level.carrier();
            LevelCheck {
                label: level.label.clone(),
                equal: d.is_none(),
                difference: d.map(|(i, j)| (c.element(i).clone(), c.element(j).clone())),
            }
        })
        .collect()
}

/// Check that lifting and inducing are mutually inverse on C-q.o.s.
pub fn bk_roundtrip(v: &Valuation, side: Side<'_>) -> Result<RoundTrip, LiftError> {
    match side {
        Side::FromFamily(fam) => {
            for (level, m) in fam.levels.iter().zip(&fam.members) {
                if let Some(witness) = check_axiom(m, AxiomId::CAxioms).witness {
                    return Err(LiftError::Precondition {
                        label: level.label.clone(),
                        axiom: AxiomId::CAxioms,
                        witness,
                    });
                }
            }
            let lifted = lift_family(fam)?;
            let lifted_is_cqo = passes(&lifted, &[AxiomId::CAxioms]);
            let back = induce_family(&lifted, v)?;
            let levels = level_checks(fam, &back);
            let transfer = type_transfer(&lifted, fam);
            let passed = lifted_is_cqo && transfer && levels.iter().all(|l| l.equal);
            Ok(RoundTrip {
                direction: "family -> lift -> induce",
                levels,
                qo_difference: None,
                lifted_is_cqo,
                type_transfer: transfer,
                passed,
            })
        }
        Side::FromQo(qo) => {
            if let Some(witness) = check_axiom(qo, AxiomId::CAxioms).witness {
                return Err(LiftError::Precondition { label: "G".into(), axiom: AxiomId::CAxioms, witness });
            }
            let fam = induce_family(qo, v)?;
            let lifted = lift_family(&fam)?;
            let c = qo.carrier();
            let qo_difference =
                qo.first_difference(&lifted).map(|(i, j)| (c.element(i).clone(), c.element(j).clone()));
            let levels = level_checks(&fam, &fam);
            let lifted_is_cqo = passes(&lifted, &[AxiomId::CAxioms]);
            let transfer = type_transfer(qo, &fam);
            let passed = qo_difference.is_none() && lifted_is_cqo && transfer;
            Ok(RoundTrip {
                direction: "quasi-order -> induce -> lift",
                levels,
                qo_difference,
                lifted_is_cqo,
                type_transfer: transfer,
                passed,
            })
        }
    }
}

/// All quasi-orders on a level quotient that pass `filters`.
pub fn level_candidates(level: &Level, filters: &[AxiomId]) -> Result<Vec<QuasiOrder>, LiftError> {
    let c = level.carrier();
    Ok(WeakOrders::new(c.len(), DEFAULT_CAP)?
        .map(|wo| wo.to_qo(c))
        .filter(|q| passes(q, filters))
        .collect())
}

/// Every family of C-q.o.s on the level quotients, in lexicographic order
/// of the per-level enumerations.
pub fn all_c_families(v: &Valuation) -> Result<Vec<QoFamily>, LiftError> {
    let levels = levels(v)?;
    let per_level: Vec<Vec<QuasiOrder>> = levels
        .iter()
        .map(|l| level_candidates(l, &[AxiomId::CAxioms]))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; levels.len()];
    if per_level.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let members = idx.iter().zip(&per_level).map(|(&i, c)| c[i].clone()).collect();
        out.push(QoFamily::with_levels(v.clone(), levels.clone(), members)?);
        let mut k = levels.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_level[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Coarsening {
    pub levels: Vec<Level>,
    /// `w_γ` on `G^γ/G_γ`.
    pub members: Vec<Valuation>,
    pub member_verdicts: Vec<Verdict>,
    /// First pair where lifting the `w_γ` quasi-orders differs from `w`.
    pub reconstruction: Option<(GroupElement, GroupElement)>,
}

impl Coarsening {
    pub fn passed(&self) -> bool {
        self.reconstruction.is_none() && self.member_verdicts.iter().all(Verdict::passed)
    }
}

/// Split `w` into valuations `w_γ(g+G_γ) := w(g)` on the level quotients of
/// its coarsening `v`, then rebuild `w` by lifting.
pub fn coarsening_decompose(v: &Valuation, w: &Valuation) -> Result<Coarsening, LiftError> {
    if let Some(wit) = is_coarsening(v, w).witness {
        return Err(LiftError::NotCoarsening("v".into(), wit));
    }
    let levels = levels(v)?;
    let mut members = Vec::new();
    for level in &levels {
        let q = level.carrier();
        let zero = q.zero();
        let mut table = Vec::with_capacity(q.len());
        for k in 0..q.len() {
            if k == zero {
                table.push(Value::Infinity);
                continue;
            }
            let coset = level.view.coset(k);
            let value = w.value(level.upper.embed[coset[0]]);
            if let Some(&g) = coset.iter().find(|&&g| w.value(level.upper.embed[g]) != value) {
                return Err(LiftError::NotConstantOnCoset(level.upper.carrier.element(g).clone()));
            }
            table.push(value);
        }
        // Keep the labels of `w` that occur on this level.
        let mut used: Vec<usize> = table.iter().filter_map(|v| v.finite()).collect();
        used.sort_unstable();
        used.dedup();
        let labels = used.iter().map(|&k| w.labels()[k].clone()).collect();
        let table = table
            .into_iter()
            .map(|v| match v {
                Value::Finite(k) => Value::Finite(used.binary_search(&k).expect("collected")),
                Value::Infinity => Value::Infinity,
            })
            .collect();
        members.push(Valuation::new(Arc::clone(q), labels, table)?);
    }
    let member_verdicts = members.iter().map(check_valuation).collect();
    let fam = QoFamily::with_levels(
        v.clone(),
        levels.clone(),
        members.iter().map(Valuation::induced_qo).collect(),
    )?;
    let lifted = lift_family(&fam)?;
    let target = w.induced_qo();
    let c = v.carrier();
    let reconstruction =
        lifted.first_difference(&target).map(|(i, j)| (c.element(i).clone(), c.element(j).clone()));
    Ok(Coarsening { levels, members, member_verdicts, reconstruction })
}
