//! Finite abelian groups and windowed free abelian groups, with subgroups
//! and quotients.
//!
//! Every group is materialized as a [`Carrier`]: an enumerated element list
//! with a negation table and a partial addition table. A windowed carrier
//! `Z^d[B=k]` only holds the box `{-k..k}^d`, so a sum can leave it; that
//! outcome is `None`, never an error. Restrictions to subgroups and quotients
//! are again carriers, so every check downstream runs on the same structure.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest carrier we are willing to tabulate.
pub const MAX_CARRIER: usize = 2048;

const NO_SUM: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cannot parse group spec {0:?}: {1}")]
    Parse(String, String),
    #[error("cyclic factor Z/{0} is not allowed, factors must be at least 2")]
    FactorTooSmall(i64),
    #[error("window bound must be at least 1, got {0}")]
    BadBound(i64),
    #[error("rank must be at least 1")]
    BadRank,
    #[error("carrier would have {0} elements, the cap is {MAX_CARRIER}")]
    TooLarge(usize),
    #[error("cannot parse element {0:?}")]
    ElementParse(String),
    #[error("element {element} does not belong to {group}")]
    NotInGroup { element: String, group: String },
    #[error("generator {0} is not a coordinate generator of a windowed group")]
    NonCoordinateGenerator(String),
    #[error("subset is not a subgroup: {0}")]
    NotClosed(String),
    #[error("operation needs a finite carrier, {0} is windowed")]
    Windowed(String),
    #[error("mask has {got} entries, the group has rank {expected}")]
    MaskArity { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `Z/n_1 x ... x Z/n_k`; no factors means the trivial group.
    Finite { factors: Vec<i64> },
    /// `Z^rank` seen through the window `{-bound..bound}^rank`.
    FreeWindowed { rank: usize, bound: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
}

/// Result of adding two elements of a windowed group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sum {
    Element(GroupElement),
    OutOfWindow,
}

impl GroupSpec {
    pub fn finite(factors: Vec<i64>) -> Result<Self, GroupError> {
        if let Some(&n) = factors.iter().find(|&&n| n < 2) {
            return Err(GroupError::FactorTooSmall(n));
        }
        let spec = GroupSpec { kind: GroupKind::Finite { factors } };
        spec.check_size()?;
        Ok(spec)
    }

    pub fn free_windowed(rank: usize, bound: i64) -> Result<Self, GroupError> {
        if rank == 0 {
            return Err(GroupError::BadRank);
        }
        if bound < 1 {
            return Err(GroupError::BadBound(bound));
        }
        let spec = GroupSpec { kind: GroupKind::FreeWindowed { rank, bound } };
        spec.check_size()?;
        Ok(spec)
    }

    pub fn trivial() -> Self {
        GroupSpec { kind: GroupKind::Finite { factors: Vec::new() } }
    }

    fn check_size(&self) -> Result<(), GroupError> {
        let size = self.size_u128();
        if size > MAX_CARRIER as u128 {
            Err(GroupError::TooLarge(size.min(usize::MAX as u128) as usize))
        } else {
            Ok(())
        }
    }

    fn size_u128(&self) -> u128 {
        match &self.kind {
            GroupKind::Finite { factors } => factors
                .iter()
                .fold(1u128, |acc, &n| acc.saturating_mul(n as u128)),
            GroupKind::FreeWindowed { rank, bound } => {
                let side = (2 * *bound + 1) as u128;
                (0..*rank).fold(1u128, |acc, _| acc.saturating_mul(side))
            }
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// Number of coordinates of an element.
    pub fn rank(&self) -> usize {
        match &self.kind {
            GroupKind::Finite { factors } => factors.len(),
            GroupKind::FreeWindowed { rank, .. } => *rank,
        }
    }

    /// Number of carrier elements.
    pub fn size(&self) -> usize {
        self.size_u128() as usize
    }

    pub fn is_windowed(&self) -> bool {
        matches!(self.kind, GroupKind::FreeWindowed { .. })
    }

    /// Carrier enumeration: mixed radix, first coordinate most significant.
    /// Finite coordinates run over `0..n_i`, windowed ones over `-B..=B`.
    pub fn elements(&self) -> Vec<GroupElement> {
        let (lows, sides): (Vec<i64>, Vec<i64>) = match &self.kind {
            GroupKind::Finite { factors } => factors.iter().map(|&n| (0, n)).unzip(),
            GroupKind::FreeWindowed { rank, bound } => {
                (0..*rank).map(|_| (-*bound, 2 * *bound + 1)).unzip()
            }
        };
        let size = self.size();
        let mut out = Vec::with_capacity(size);
        let mut digits = vec![0i64; sides.len()];
        for _ in 0..size {
            out.push(GroupElement(
                digits.iter().zip(&lows).map(|(d, lo)| d + lo).collect(),
            ));
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < sides[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        out
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        if g.0.len() != self.rank() {
            return false;
        }
        match &self.kind {
            GroupKind::Finite { factors } => {
                g.0.iter().zip(factors).all(|(&c, &n)| (0..n).contains(&c))
            }
            GroupKind::FreeWindowed { bound, .. } => g.0.iter().all(|c| c.abs() <= *bound),
        }
    }

    fn require(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::NotInGroup { element: g.to_string(), group: self.to_string() })
        }
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<Sum, GroupError> {
        self.require(g)?;
        self.require(h)?;
        let raw = g.0.iter().zip(&h.0).map(|(a, b)| a + b);
        Ok(match &self.kind {
            GroupKind::Finite { factors } => Sum::Element(GroupElement(
                raw.zip(factors).map(|(s, &n)| s.rem_euclid(n)).collect(),
            )),
            GroupKind::FreeWindowed { bound, .. } => {
                let coords: Vec<i64> = raw.collect();
                if coords.iter().any(|c| c.abs() > *bound) {
                    Sum::OutOfWindow
                } else {
                    Sum::Element(GroupElement(coords))
                }
            }
        })
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.require(g)?;
        Ok(match &self.kind {
            GroupKind::Finite { factors } => GroupElement(
                g.0.iter().zip(factors).map(|(&c, &n)| (-c).rem_euclid(n)).collect(),
            ),
            GroupKind::FreeWindowed { .. } => GroupElement(g.0.iter().map(|c| -c).collect()),
        })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Finite { factors } if factors.is_empty() => write!(f, "0"),
            GroupKind::Finite { factors } => {
                let parts: Vec<String> = factors.iter().map(|n| format!("Z/{n}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            GroupKind::FreeWindowed { rank, bound } => write!(f, "Z^{rank}[B={bound}]"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let fail = |why: &str| GroupError::Parse(s.to_string(), why.to_string());
        if compact == "0" || compact == "trivial" {
            return Ok(GroupSpec::trivial());
        }
        if let Some(rest) = compact.strip_prefix("Z^").or_else(|| {
            compact.strip_prefix('Z').filter(|r| r.starts_with('['))
        }) {
            let (rank_str, window) = match rest.find('[') {
                Some(pos) => rest.split_at(pos),
                None => return Err(fail("missing window, expected Z^d[B=k]")),
            };
            let rank = if rank_str.is_empty() {
                1
            } else {
                rank_str.parse::<usize>().map_err(|_| fail("bad rank"))?
            };
            let bound = window
                .strip_prefix("[B=")
                .and_then(|w| w.strip_suffix(']'))
                .ok_or_else(|| fail("expected window of the form [B=k]"))?
                .parse::<i64>()
                .map_err(|_| fail("bad window bound"))?;
            return GroupSpec::free_windowed(rank, bound);
        }
        let mut factors = Vec::new();
        for part in compact.split(['x', '×']) {
            let n = part
                .strip_prefix("Z/")
                .ok_or_else(|| fail("expected factors of the form Z/n"))?
                .parse::<i64>()
                .map_err(|_| fail("bad cyclic order"))?;
            factors.push(n);
        }
        GroupSpec::finite(factors)
    }
}

/// An element as its coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    fn l1(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for GroupElement {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(&compact);
        if inner.is_empty() {
            return Ok(GroupElement(Vec::new()));
        }
        inner
            .split(',')
            .map(|c| c.parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map(GroupElement)
            .map_err(|_| GroupError::ElementParse(s.to_string()))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An enumerated group with tabulated arithmetic. Elements are addressed by
/// their index in the enumeration.
#[derive(Debug)]
pub struct Carrier {
    name: String,
    windowed: bool,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    zero: usize,
    neg: Vec<usize>,
    sum: Vec<u32>,
}

impl Carrier {
    pub fn of(spec: &GroupSpec) -> Result<Arc<Carrier>, GroupError> {
        spec.check_size()?;
        let elements = spec.elements();
        let index: HashMap<GroupElement, usize> =
            elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let n = elements.len();
        let zero = index[&spec.zero()];
        let neg = elements
            .iter()
            .map(|g| index[&spec.neg(g).expect("enumerated element")])
            .collect();
        let mut sum = vec![NO_SUM; n * n];
        for (i, g) in elements.iter().enumerate() {
            for (j, h) in elements.iter().enumerate() {
                if let Sum::Element(s) = spec.add(g, h).expect("enumerated element") {
                    sum[i * n + j] = index[&s] as u32;
                }
            }
        }
        Ok(Arc::new(Carrier {
            name: spec.to_string(),
            windowed: spec.is_windowed(),
            elements,
            index,
            zero,
            neg,
            sum,
        }))
    }

    pub fn parse(spec: &str) -> Result<Arc<Carrier>, GroupError> {
        Carrier::of(&spec.parse()?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_windowed(&self) -> bool {
        self.windowed
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn lookup(&self, g: &GroupElement) -> Result<usize, GroupError> {
        self.index_of(g).ok_or_else(|| GroupError::NotInGroup {
            element: g.to_string(),
            group: self.name.clone(),
        })
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }

    /// `i + j`, or `None` when the sum leaves the window.
    #[inline]
    pub fn add(&self, i: usize, j: usize) -> Option<usize> {
        let s = self.sum[i * self.elements.len() + j];
        (s != NO_SUM).then_some(s as usize)
    }

    #[inline]
    pub fn sub(&self, i: usize, j: usize) -> Option<usize> {
        self.add(i, self.neg[j])
    }

    /// Ambient rank of the coordinate vectors carried by the elements.
    pub fn coord_len(&self) -> usize {
        self.elements.first().map_or(0, |g| g.0.len())
    }

    /// Carrier of the subgroup `sub`, with the embedding into `self`.
    pub fn restrict(self: &Arc<Self>, sub: &Subgroup) -> Restriction {
        let embed: Vec<usize> = sub.indices().collect();
        let mut lookup = vec![None; self.len()];
        for (k, &i) in embed.iter().enumerate() {
            lookup[i] = Some(k);
        }
        let elements: Vec<GroupElement> = embed.iter().map(|&i| self.elements[i].clone()).collect();
        let m = embed.len();
        let mut sum = vec![NO_SUM; m * m];
        for (a, &i) in embed.iter().enumerate() {
            for (b, &j) in embed.iter().enumerate() {
                if let Some(k) = self.add(i, j).and_then(|s| lookup[s]) {
                    sum[a * m + b] = k as u32;
                }
            }
        }
        let carrier = Carrier {
            name: format!("{} in {}", sub.describe(self), self.name),
            windowed: self.windowed,
            index: elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect(),
            zero: lookup[self.zero].expect("subgroup contains 0"),
            neg: embed.iter().map(|&i| lookup[self.neg[i]].expect("closed")).collect(),
            elements,
            sum,
        };
        Restriction { parent: Arc::clone(self), carrier: Arc::new(carrier), embed, lookup }
    }

    /// Quotient by `sub`, one representative per coset.
    ///
    /// Cosets are the classes of `g ~ g + h` (`h` in `sub`, sum in the
    /// window). The representative is the coset member of least L1 norm,
    /// ties broken by enumeration order, so `0` represents `sub` itself.
    pub fn quotient(self: &Arc<Self>, sub: &Subgroup) -> QuotientView {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let members: Vec<usize> = sub.indices().collect();
        for g in 0..n {
            for &h in &members {
                if let Some(s) = self.add(g, h) {
                    let (a, b) = (find(&mut parent, g), find(&mut parent, s));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
        for g in 0..n {
            let root = find(&mut parent, g);
            classes.entry(root).or_default().push(g);
        }
        let mut cosets: Vec<Vec<usize>> = classes.into_values().collect();
        let rep_of = |c: &Vec<usize>| {
            *c.iter()
                .min_by_key(|&&g| (self.elements[g].l1(), g))
                .expect("cosets are nonempty")
        };
        cosets.sort_by_key(|c| rep_of(c));
        let reps: Vec<usize> = cosets.iter().map(rep_of).collect();
        let mut projection = vec![0; n];
        for (q, coset) in cosets.iter().enumerate() {
            for &g in coset {
                projection[g] = q;
            }
        }
        let m = reps.len();
        let mut sum = vec![NO_SUM; m * m];
        for (a, &ra) in reps.iter().enumerate() {
            for (b, &rb) in reps.iter().enumerate() {
                if let Some(s) = self.add(ra, rb) {
                    sum[a * m + b] = projection[s] as u32;
                }
            }
        }
        let elements: Vec<GroupElement> = reps.iter().map(|&r| self.elements[r].clone()).collect();
        let carrier = Carrier {
            name: format!("({}) / {}", self.name, sub.describe(self)),
            windowed: self.windowed,
            index: elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect(),
            zero: projection[self.zero],
            neg: reps.iter().map(|&r| projection[self.neg[r]]).collect(),
            elements,
            sum,
        };
        QuotientView {
            parent: Arc::clone(self),
            subgroup: sub.clone(),
            carrier: Arc::new(carrier),
            projection,
            reps,
            cosets,
        }
    }
}

/// A subgroup carrier together with its embedding into the parent.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub parent: Arc<Carrier>,
    pub carrier: Arc<Carrier>,
    /// Sub index -> parent index.
    pub embed: Vec<usize>,
    /// Parent index -> sub index.
    pub lookup: Vec<Option<usize>>,
}

/// `G/H` as coset representatives plus the projection table.
#[derive(Debug, Clone)]
pub struct QuotientView {
    parent: Arc<Carrier>,
    subgroup: Subgroup,
    carrier: Arc<Carrier>,
    projection: Vec<usize>,
    reps: Vec<usize>,
    cosets: Vec<Vec<usize>>,
}

impl QuotientView {
    pub fn parent(&self) -> &Arc<Carrier> {
        &self.parent
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    /// The quotient as a carrier in its own right.
    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    /// Parent index -> quotient index.
    pub fn project(&self, g: usize) -> usize {
        self.projection[g]
    }

    /// Quotient index -> parent index of the representative.
    pub fn rep(&self, q: usize) -> usize {
        self.reps[q]
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    /// Parent indices of the coset with quotient index `q`.
    pub fn coset(&self, q: usize) -> &[usize] {
        &self.cosets[q]
    }
}

/// A subgroup as a membership mask over a carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<bool>,
    generators: Vec<usize>,
    mask: Option<Vec<bool>>,
}

impl Subgroup {
    pub fn trivial(carrier: &Carrier) -> Subgroup {
        let mut members = vec![false; carrier.len()];
        members[carrier.zero()] = true;
        Subgroup { members, generators: Vec::new(), mask: None }
    }

    pub fn whole(carrier: &Carrier) -> Subgroup {
        Subgroup { members: vec![true; carrier.len()], generators: Vec::new(), mask: None }
    }

    /// Smallest subgroup containing `gens`.
    ///
    /// On windowed carriers only coordinate generators (a single nonzero
    /// coordinate equal to ±1) are accepted; they produce the coordinate
    /// subgroup on the union of their supports.
    pub fn closure(carrier: &Carrier, gens: &[usize]) -> Result<Subgroup, GroupError> {
        if carrier.is_windowed() {
            let mut mask = vec![false; carrier.coord_len()];
            for &g in gens {
                let coords = carrier.element(g).coords();
                let support: Vec<usize> = (0..coords.len()).filter(|&i| coords[i] != 0).collect();
                match support.as_slice() {
                    [] => {}
                    [i] if coords[*i].abs() == 1 => mask[*i] = true,
                    _ => {
                        return Err(GroupError::NonCoordinateGenerator(
                            carrier.element(g).to_string(),
                        ))
                    }
                }
            }
            let mut sub = Subgroup::coordinate(carrier, &mask)?;
            sub.generators = gens.to_vec();
            return Ok(sub);
        }
        let mut members = vec![false; carrier.len()];
        members[carrier.zero()] = true;
        let mut found = vec![carrier.zero()];
        let mut cursor = 0;
        while cursor < found.len() {
            let a = found[cursor];
            cursor += 1;
            for &g in gens {
                if let Some(s) = carrier.add(a, g) {
                    if !members[s] {
                        members[s] = true;
                        found.push(s);
                    }
                }
            }
        }
        Ok(Subgroup { members, generators: gens.to_vec(), mask: None })
    }

    /// Elements supported on the coordinates flagged in `mask`.
    pub fn coordinate(carrier: &Carrier, mask: &[bool]) -> Result<Subgroup, GroupError> {
        if mask.len() != carrier.coord_len() {
            return Err(GroupError::MaskArity { expected: carrier.coord_len(), got: mask.len() });
        }
        let members = carrier
            .elements()
            .iter()
            .map(|g| g.coords().iter().zip(mask).all(|(&c, &keep)| keep || c == 0))
            .collect();
        let sub = Subgroup { members, generators: Vec::new(), mask: Some(mask.to_vec()) };
        sub.validate(carrier)?;
        Ok(sub)
    }

    /// A subgroup given extensionally; closure is validated (sums leaving
    /// the window are not required to exist).
    pub fn from_members(carrier: &Carrier, members: Vec<bool>) -> Result<Subgroup, GroupError> {
        if members.len() != carrier.len() {
            return Err(GroupError::NotClosed(format!(
                "mask has {} entries for {} elements",
                members.len(),
                carrier.len()
            )));
        }
        let sub = Subgroup { members, generators: Vec::new(), mask: None };
        sub.validate(carrier)?;
        Ok(sub)
    }

    fn validate(&self, carrier: &Carrier) -> Result<(), GroupError> {
        if !self.members[carrier.zero()] {
            return Err(GroupError::NotClosed("0 is missing".into()));
        }
        for g in self.indices() {
            if !self.members[carrier.neg(g)] {
                return Err(GroupError::NotClosed(format!(
                    "{} present but not its negative",
                    carrier.element(g)
                )));
            }
            for h in self.indices() {
                if let Some(s) = carrier.add(g, h) {
                    if !self.members[s] {
                        return Err(GroupError::NotClosed(format!(
                            "{} + {} = {} escapes",
                            carrier.element(g),
                            carrier.element(h),
                            carrier.element(s)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members[g]
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn describe(&self, carrier: &Carrier) -> String {
        if let Some(mask) = &self.mask {
            let coords: Vec<String> = mask
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| (i + 1).to_string())
                .collect();
            return format!("coords{{{}}}", coords.join(","));
        }
        if !self.generators.is_empty() {
            let gens: Vec<String> =
                self.generators.iter().map(|&g| carrier.element(g).to_string()).collect();
            return format!("<{}>", gens.join(","));
        }
        if self.len() <= 8 {
            let elems: Vec<String> = self.indices().map(|g| carrier.element(g).to_string()).collect();
            format!("{{{}}}", elems.join(","))
        } else {
            format!("H[{}]", self.len())
        }
    }
}

/// Every subgroup of a finite carrier, sorted by size then membership.
pub fn all_subgroups(carrier: &Carrier) -> Result<Vec<Subgroup>, GroupError> {
    if carrier.is_windowed() {
        return Err(GroupError::Windowed(carrier.name().to_string()));
    }
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut queue = vec![Subgroup::trivial(carrier)];
    seen.insert(queue[0].members.clone());
    let mut cursor = 0;
    while cursor < queue.len() {
        let base: Vec<usize> = queue[cursor].indices().collect();
        cursor += 1;
        for g in 0..carrier.len() {
            if base.contains(&g) {
                continue;
            }
            let mut gens = base.clone();
            gens.push(g);
            let sub = Subgroup::closure(carrier, &gens)?;
            if seen.insert(sub.members.clone()) {
                queue.push(sub);
            }
        }
    }
    let mut out: Vec<Subgroup> = queue
        .into_iter()
        .map(|s| Subgroup { members: s.members, generators: Vec::new(), mask: None })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.members.cmp(&a.members)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    #[test]
    fn parses_group_specs() {
        let z4: GroupSpec = "Z/4".parse().unwrap();
        assert_eq!(z4.kind(), &GroupKind::Finite { factors: vec![4] });
        assert_eq!(z4.size(), 4);
        let klein: GroupSpec = "Z/2 x Z/2".parse().unwrap();
        assert_eq!(klein.kind(), &GroupKind::Finite { factors: vec![2, 2] });
        assert_eq!(klein.size(), 4);
        let free: GroupSpec = "Z^2[B=3]".parse().unwrap();
        assert_eq!(free.kind(), &GroupKind::FreeWindowed { rank: 2, bound: 3 });
        assert_eq!(free.size(), 49);
        assert_eq!(free.to_string(), "Z^2[B=3]");
        assert_eq!(klein.to_string(), "Z/2 x Z/2");
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!("Z/1".parse::<GroupSpec>(), Err(GroupError::FactorTooSmall(1)));
        assert_eq!("Z^2[B=0]".parse::<GroupSpec>(), Err(GroupError::BadBound(0)));
        assert!(matches!("Q/4".parse::<GroupSpec>(), Err(GroupError::Parse(..))));
        assert!(matches!("Z^2".parse::<GroupSpec>(), Err(GroupError::Parse(..))));
        assert!(matches!("Z^3[B=20]".parse::<GroupSpec>(), Err(GroupError::TooLarge(_))));
    }

    #[test]
    fn addition() {
        let z4: GroupSpec = "Z/4".parse().unwrap();
        assert_eq!(z4.add(&el("3"), &el("2")).unwrap(), Sum::Element(el("1")));
        let free: GroupSpec = "Z^2[B=3]".parse().unwrap();
        assert_eq!(free.add(&el("(3,0)"), &el("(1,0)")).unwrap(), Sum::OutOfWindow);
        assert_eq!(free.add(&el("(1,2)"), &el("(-1,1)")).unwrap(), Sum::Element(el("(0,3)")));
        assert!(z4.add(&el("(1,0)"), &el("1")).is_err());
        for g in free.elements() {
            let s = free.add(&g, &free.neg(&g).unwrap()).unwrap();
            assert_eq!(s, Sum::Element(free.zero()));
        }
    }

    #[test]
    fn group_laws_on_tables() {
        for spec in ["Z/6", "Z/2 x Z/4", "Z^2[B=2]"] {
            let c = Carrier::parse(spec).unwrap();
            let n = c.len();
            for a in 0..n {
                assert_eq!(c.add(a, c.zero()), Some(a));
                assert_eq!(c.add(a, c.neg(a)), Some(c.zero()));
                for b in 0..n {
                    assert_eq!(c.add(a, b), c.add(b, a));
                    for d in 0..n {
                        let left = c.add(a, b).and_then(|s| c.add(s, d));
                        let right = c.add(b, d).and_then(|s| c.add(a, s));
                        if let (Some(l), Some(r)) = (left, right) {
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subgroup_closures() {
        let c = Carrier::parse("Z/4").unwrap();
        let h = Subgroup::closure(&c, &[c.lookup(&el("2")).unwrap()]).unwrap();
        assert_eq!(h.indices().map(|i| c.element(i).clone()).collect::<Vec<_>>(), vec![el("0"), el("2")]);
        let c6 = Carrier::parse("Z/6").unwrap();
        let h = Subgroup::closure(&c6, &[c6.lookup(&el("4")).unwrap()]).unwrap();
        assert_eq!(
            h.indices().map(|i| c6.element(i).clone()).collect::<Vec<_>>(),
            vec![el("0"), el("2"), el("4")]
        );
        let k = Carrier::parse("Z/2 x Z/2").unwrap();
        let h = Subgroup::closure(&k, &[k.lookup(&el("(1,0)")).unwrap()]).unwrap();
        assert_eq!(
            h.indices().map(|i| k.element(i).clone()).collect::<Vec<_>>(),
            vec![el("(0,0)"), el("(1,0)")]
        );
        let w = Carrier::parse("Z^2[B=3]").unwrap();
        let bad = Subgroup::closure(&w, &[w.lookup(&el("(1,1)")).unwrap()]);
        assert!(matches!(bad, Err(GroupError::NonCoordinateGenerator(_))));
        let good = Subgroup::closure(&w, &[w.lookup(&el("(0,1)")).unwrap()]).unwrap();
        assert_eq!(good.len(), 7);
    }

    #[test]
    fn quotients() {
        let c = Carrier::parse("Z/4").unwrap();
        let h = Subgroup::closure(&c, &[2]).unwrap();
        let q = c.quotient(&h);
        assert_eq!(q.carrier().elements(), &[el("0"), el("1")]);
        assert_eq!(q.project(3), 1);

        let k = Carrier::parse("Z/2 x Z/2").unwrap();
        let h = Subgroup::closure(&k, &[k.lookup(&el("(1,0)")).unwrap()]).unwrap();
        let q = k.quotient(&h);
        assert_eq!(q.carrier().elements(), &[el("(0,0)"), el("(0,1)")]);

        let w = Carrier::parse("Z^2[B=3]").unwrap();
        let h = Subgroup::coordinate(&w, &[false, true]).unwrap();
        let q = w.quotient(&h);
        let expected: Vec<GroupElement> = (-3..=3).map(|a| GroupElement(vec![a, 0])).collect();
        assert_eq!(q.carrier().elements(), expected.as_slice());
        for (g, elem) in w.elements().iter().enumerate() {
            let rep = q.carrier().element(q.project(g));
            assert_eq!(rep, &GroupElement(vec![elem.0[0], 0]));
        }
    }

    #[test]
    fn projection_differs_by_subgroup_member() {
        for (spec, gens) in [("Z/6", vec!["2"]), ("Z/2 x Z/4", vec!["(1,2)"]), ("Z/8", vec!["4"])] {
            let c = Carrier::parse(spec).unwrap();
            let gens: Vec<usize> = gens.iter().map(|g| c.lookup(&el(g)).unwrap()).collect();
            let h = Subgroup::closure(&c, &gens).unwrap();
            let q = c.quotient(&h);
            assert_eq!(q.rep(q.project(c.zero())), c.zero());
            for g in 0..c.len() {
                let r = q.rep(q.project(g));
                assert!(h.contains(c.sub(r, g).unwrap()));
                assert_eq!(q.project(r), q.project(g));
            }
        }
    }

    #[test]
    fn enumerates_subgroups() {
        let z8 = Carrier::parse("Z/8").unwrap();
        assert_eq!(all_subgroups(&z8).unwrap().len(), 4);
        let klein = Carrier::parse("Z/2 x Z/2").unwrap();
        assert_eq!(all_subgroups(&klein).unwrap().len(), 5);
        let z6 = Carrier::parse("Z/6").unwrap();
        assert_eq!(all_subgroups(&z6).unwrap().len(), 4);
    }

    #[test]
    fn windowed_cosets_of_even_numbers() {
        let w = Carrier::parse("Z^1[B=5]").unwrap();
        let evens = Subgroup::from_members(
            &w,
            w.elements().iter().map(|g| g.0[0] % 2 == 0).collect(),
        )
        .unwrap();
        let q = w.quotient(&evens);
        assert_eq!(q.carrier().elements(), &[el("-1"), el("0")]);
        assert_eq!(q.carrier().add(0, 0), Some(1));
    }
}
