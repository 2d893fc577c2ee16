//! Exhaustive generation of total quasi-orders on small carriers.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::thread;

use serde::Serialize;
use thiserror::Error;

use crate::check::Witness;
use crate::groups::Carrier;
use crate::qo::{check_axiom, classify, AxiomId, Provenance, QuasiOrder};

pub const DEFAULT_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("carrier has {size} elements, above the enumeration cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// A total quasi-order as an ordered set partition; `ranks[i]` is the
/// block of element `i`, and the ranks used are exactly `0..blocks`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakOrder {
    pub ranks: Vec<u32>,
}

impl WeakOrder {
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let k = self.ranks.iter().max().map_or(0, |&m| m as usize + 1);
        let mut out = vec![Vec::new(); k];
        for (i, &r) in self.ranks.iter().enumerate() {
            out[r as usize].push(i);
        }
        out
    }

    pub fn to_qo(&self, carrier: &Arc<Carrier>) -> QuasiOrder {
        QuasiOrder::from_keys(Arc::clone(carrier), &self.ranks, Provenance::Enumerated)
    }
}

/// Rank vectors in lexicographic order, each ordered set partition once.
pub struct WeakOrders {
    ranks: Vec<u32>,
    started: bool,
    done: bool,
}

impl WeakOrders {
    pub fn new(size: usize, cap: usize) -> Result<Self, EnumError> {
        if size > cap {
            return Err(EnumError::CapExceeded { size, cap });
        }
        Ok(WeakOrders { ranks: vec![0; size], started: false, done: false })
    }

    pub fn of(carrier: &Carrier) -> Result<Self, EnumError> {
        Self::new(carrier.len(), DEFAULT_CAP)
    }

    /// Can `prefix` be completed to a surjection onto `0..k` using `free`
    /// more positions?
    fn feasible(prefix: &[u32], free: usize) -> bool {
        let Some(&max) = prefix.iter().max() else { return true };
        let mut seen = vec![false; max as usize + 1];
        for &r in prefix {
            seen[r as usize] = true;
        }
        seen.iter().filter(|s| !**s).count() <= free
    }

    fn fill_from(&mut self, start: usize) {
        let n = self.ranks.len();
        for j in start..n {
            let x = (0..n as u32)
                .find(|&x| {
                    self.ranks[j] = x;
                    Self::feasible(&self.ranks[..=j], n - j - 1)
                })
                .expect("a feasible prefix always extends");
            self.ranks[j] = x;
        }
    }
}

impl Iterator for WeakOrders {
    type Item = WeakOrder;

    fn next(&mut self) -> Option<WeakOrder> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(WeakOrder { ranks: self.ranks.clone() });
        }
        let n = self.ranks.len();
        for i in (0..n).rev() {
            let current = self.ranks[i];
            for x in current + 1..n as u32 {
                self.ranks[i] = x;
                if Self::feasible(&self.ranks[..=i], n - i - 1) {
                    self.fill_from(i + 1);
                    return Some(WeakOrder { ranks: self.ranks.clone() });
                }
            }
            self.ranks[i] = current;
        }
        self.done = true;
        None
    }
}

/// Number of ordered set partitions of an `n`-set.
pub fn ordered_bell(n: usize) -> u64 {
    let mut binom = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for k in 1..=i {
            binom[i][k] = binom[i - 1][k - 1] + if k < i { binom[i - 1][k] } else { 0 };
        }
    }
    let mut a = vec![0u64; n + 1];
    a[0] = 1;
    for m in 1..=n {
        a[m] = (1..=m).map(|k| binom[m][k] * a[m - k]).sum();
    }
    a[n]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub group: String,
    pub class: String,
    pub candidates: u64,
    pub passes: u64,
    /// Passing quasi-orders that are valuational.
    pub valuational: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub row: CensusRow,
    /// First witness per failure mode (axiom and rule), in enumeration order.
    pub witnesses: Vec<ModeWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeWitness {
    pub axiom: String,
    pub candidate: Vec<u32>,
    pub witness: Witness,
}

#[derive(Default)]
struct Partial {
    passes: u64,
    valuational: u64,
    first: BTreeMap<(String, String), (usize, ModeWitness)>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.passes += other.passes;
        self.valuational += other.valuational;
        for (mode, entry) in other.first {
            match self.first.get(&mode) {
                Some((idx, _)) if *idx <= entry.0 => {}
                _ => {
                    self.first.insert(mode, entry);
                }
            }
        }
        self
    }
}

fn scan(carrier: &Arc<Carrier>, filters: &[AxiomId], chunk: &[WeakOrder], offset: usize) -> Partial {
    let mut part = Partial::default();
    for (k, wo) in chunk.iter().enumerate() {
        let qo = wo.to_qo(carrier);
        let mut ok = true;
        for &axiom in filters {
            let verdict = check_axiom(&qo, axiom);
            if let Some(w) = verdict.witness {
                ok = false;
                let mode = (axiom.to_string(), w.rule.clone());
                part.first.entry(mode).or_insert_with(|| {
                    let mw = ModeWitness { axiom: axiom.to_string(), candidate: wo.ranks.clone(), witness: w };
                    (offset + k, mw)
                });
                break;
            }
        }
        if ok {
            part.passes += 1;
            if classify(&qo).is_valuational {
                part.valuational += 1;
            }
        }
    }
    part
}

/// Every total quasi-order on the carrier, filtered by `filters` in order;
/// a candidate is charged to the first axiom it fails.
pub fn survey(carrier: &Arc<Carrier>, filters: &[AxiomId], cap: usize) -> Result<Census, EnumError> {
    let all: Vec<WeakOrder> = WeakOrders::new(carrier.len(), cap)?.collect();
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let size = all.len().div_ceil(workers).max(1);
    let merged = thread::scope(|s| {
        let handles: Vec<_> = all
            .chunks(size)
            .enumerate()
            .map(|(i, chunk)| s.spawn(move || scan(carrier, filters, chunk, i * size)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("survey worker panicked"))
            .fold(Partial::default(), Partial::merge)
    });
    let class = if filters.is_empty() {
        "ALL".to_string()
    } else {
        filters.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("+")
    };
    let mut witnesses: Vec<(usize, ModeWitness)> = merged.first.into_values().collect();
    witnesses.sort_by_key(|(i, _)| *i);
    Ok(Census {
        row: CensusRow {
            group: carrier.name().to_string(),
            class,
            candidates: all.len() as u64,
            passes: merged.passes,
            valuational: merged.valuational,
        },
        witnesses: witnesses.into_iter().map(|(_, w)| w).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Independent count: all n×n 0/1 matrices that are reflexive,
    /// transitive and total.
    fn brute_force_total_preorders(n: usize) -> u64 {
        let mut count = 0;
        for bits in 0u64..(1 << (n * n)) {
            let at = |i: usize, j: usize| bits >> (i * n + j) & 1 == 1;
            let ok = (0..n).all(|i| at(i, i))
                && (0..n).all(|i| (0..n).all(|j| at(i, j) || at(j, i)))
                && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(at(i, j) && at(j, k)) || at(i, k))));
            count += ok as u64;
        }
        count
    }

    #[test]
    fn counts_match_brute_force() {
        for n in 0..=4 {
            let generated = WeakOrders::new(n, DEFAULT_CAP).unwrap().count() as u64;
            assert_eq!(generated, brute_force_total_preorders(n), "n = {n}");
            assert_eq!(generated, ordered_bell(n));
        }
    }

    #[test]
    fn generation_is_distinct_and_lexicographic() {
        let all: Vec<_> = WeakOrders::new(5, DEFAULT_CAP).unwrap().collect();
        assert_eq!(all.len(), 541);
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.windows(2).all(|w| w[0].ranks < w[1].ranks));
        for wo in &all {
            let blocks = wo.blocks();
            assert!(blocks.iter().all(|b| !b.is_empty()));
            assert_eq!(blocks.iter().map(|b| b.len()).sum::<usize>(), 5);
        }
    }

    #[test]
    fn ordered_bell_values() {
        let expected = [1, 1, 3, 13, 75, 541, 4683, 47293, 545835];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(ordered_bell(n), e);
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(WeakOrders::new(9, 8), Err(EnumError::CapExceeded { size: 9, cap: 8 })));
    }

    #[test]
    fn small_surveys() {
        let z2 = Carrier::parse("Z/2").unwrap();
        let c = survey(&z2, &[AxiomId::CAxioms], DEFAULT_CAP).unwrap();
        assert_eq!((c.row.candidates, c.row.passes), (3, 1));
        let z3 = Carrier::parse("Z/3").unwrap();
        let c = survey(&z3, &[AxiomId::CAxioms], DEFAULT_CAP).unwrap();
        assert_eq!((c.row.candidates, c.row.passes, c.row.valuational), (13, 1, 1));
        let c = survey(&z2, &[AxiomId::Q1, AxiomId::Q2], DEFAULT_CAP).unwrap();
        assert_eq!(c.row.passes, 1);
        let q2 = c.witnesses.iter().find(|w| w.axiom == "Q2").unwrap();
        assert_eq!(q2.candidate, vec![1, 0]);
        assert_eq!(q2.witness.indices, vec![1, 0, 1]);
    }
}
