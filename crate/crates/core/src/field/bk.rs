//! Field orders on ℚ(t) compatible with the t-adic valuation.
//!
//! The residue field is ℚ with its unique order, the q-section is
//! `s(n) = tⁿ`, and a compatible order is fixed by the sign η of `t`:
//! `sign(f) = sign(trailing ratio of f) · η^{v(f)}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::FieldError;

fn sign_of(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// The q-section `n ↦ tⁿ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QSection;

impl QSection {
    pub fn s(&self, n: i64) -> RatFunc {
        RatFunc::t_pow(n)
    }

    /// `d` with `s(m+n) = d² · s(m)s(n)`; the section is multiplicative.
    pub fn square_witness(&self, _m: i64, _n: i64) -> RatFunc {
        RatFunc::one()
    }

    /// `φ_g(a) = s(g)·a`, the canonical representative of its coset mod `K_g`.
    pub fn phi(&self, g: i64, a: &BigRational) -> RatFunc {
        self.s(g).mul(&RatFunc::constant(a.clone()))
    }

    /// `φ_g⁻¹(f + K_g) = residue(f / s(g))`; needs `v(f) ≥ g`.
    pub fn phi_inverse(&self, g: i64, f: &RatFunc) -> Result<BigRational, FieldError> {
        if let Some(v) = f.tadic_val() {
            if v < g {
                return Err(FieldError::BelowLevel { value: v, level: g });
            }
        }
        f.div(&self.s(g))?.residue()
    }

    /// First probe `(m, n)` violating `s(0)=1`, `v(s(n))=n` or
    /// `s(m+n) = d²·s(m)s(n)` with the supplied witness `d`.
    pub fn check(&self, probes: &[i64]) -> Option<(i64, i64)> {
        if self.s(0) != RatFunc::one() {
            return Some((0, 0));
        }
        for &m in probes {
            if self.s(m).tadic_val() != Some(m) {
                return Some((m, 0));
            }
            for &n in probes {
                let d = self.square_witness(m, n);
                let rhs = d.mul(&d).mul(&self.s(m)).mul(&self.s(n));
                if self.s(m + n) != rhs {
                    return Some((m, n));
                }
            }
        }
        None
    }
}

/// A compatible order on ℚ(t): η is the sign of `t`; the residue order is
/// the standard order of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldOrderTag {
    pub eta: i8,
}

impl FieldOrderTag {
    pub const ALL: [FieldOrderTag; 2] = [FieldOrderTag { eta: 1 }, FieldOrderTag { eta: -1 }];
}

pub fn sign_under(f: &RatFunc, tag: FieldOrderTag) -> i8 {
    match (f.trailing_ratio(), f.tadic_val()) {
        (Some(r), Some(v)) => {
            let eta_pow = if v.rem_euclid(2) == 0 { 1 } else { tag.eta };
            sign_of(&r) * eta_pow
        }
        _ => 0,
    }
}

/// Sign of `f(η·10^{-k})`, taken at the first `k ≥ 2` where it agrees with
/// the value at `k+1`. Exact evaluation; `None` if it never settles.
pub fn evaluation_sign(f: &RatFunc, eta: i8) -> Option<i8> {
    if f.is_zero() {
        return Some(0);
    }
    let at = |k: u32| {
        let t = BigRational::new(BigInt::from(eta), BigInt::from(10).pow(k));
        f.eval(&t).map(|x| sign_of(&x))
    };
    (2..64).find_map(|k| match (at(k), at(k + 1)) {
        (Some(a), Some(b)) if a == b => Some(a),
        _ => None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldCheck {
    pub rule: &'static str,
    pub instances: u64,
    pub witness: Option<(RatFunc, RatFunc)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub checks: Vec<FieldCheck>,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.witness.is_none())
    }

    pub fn failure(&self) -> Option<&FieldCheck> {
        self.checks.iter().find(|c| c.witness.is_some())
    }
}

/// Order axioms of a sign function over all ordered sample pairs:
/// totality, multiplicativity, additivity on like signs, and
/// `0 < f < g ⇒ v(f) ≥ v(g)`.
pub fn check_field_order_samples(sign: impl Fn(&RatFunc) -> i8, samples: &[RatFunc]) -> SampleReport {
    let signs: Vec<i8> = samples.iter().map(&sign).collect();
    let mut total = FieldCheck { rule: "sign(f)=0 ⇔ f=0", instances: 0, witness: None };
    let mut mult = FieldCheck { rule: "sign(fg)=sign(f)sign(g)", instances: 0, witness: None };
    let mut add = FieldCheck { rule: "sign(f)=sign(g) ⇒ sign(f+g)=sign(f)", instances: 0, witness: None };
    let mut compat = FieldCheck { rule: "0<f<g ⇒ v(f)≥v(g)", instances: 0, witness: None };
    for (f, &sf) in samples.iter().zip(&signs) {
        total.instances += 1;
        if total.witness.is_none() && (sf == 0) != f.is_zero() {
            total.witness = Some((f.clone(), f.clone()));
        }
    }
    for (i, f) in samples.iter().enumerate() {
        for (j, g) in samples.iter().enumerate() {
            let (sf, sg) = (signs[i], signs[j]);
            mult.instances += 1;
            if mult.witness.is_none() && sign(&f.mul(g)) != sf * sg {
                mult.witness = Some((f.clone(), g.clone()));
            }
            if sf == sg && sf != 0 {
                add.instances += 1;
                if add.witness.is_none() && sign(&f.add(g)) != sf {
                    add.witness = Some((f.clone(), g.clone()));
                }
            }
            if sf > 0 && sign(&g.sub(f)) > 0 {
                compat.instances += 1;
                if compat.witness.is_none() && f.tadic_val() < g.tadic_val() {
                    compat.witness = Some((f.clone(), g.clone()));
                }
            }
        }
    }
    SampleReport { checks: vec![total, mult, add, compat] }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DirectionError {
    #[error("direction table must contain the generator 1")]
    MissingGenerator,
    #[error("direction table entries must be +1 or -1")]
    BadEntry,
    #[error("no homomorphism fits the table: ε({0})·ε({1}) ≠ ε({2})")]
    NotAHomomorphism(i64, i64, i64),
    #[error("expected {expected} basis signs, got {got}")]
    Shape { expected: usize, got: usize },
}

/// A character `ℤ^d → {±1}` given by its values on the unit vectors:
/// `ε(g) = ∏ signs_i^{g_i mod 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignHom {
    pub basis_signs: Vec<i8>,
}

impl SignHom {
    pub fn eps(&self, g: &[i64]) -> i8 {
        self.basis_signs
            .iter()
            .zip(g)
            .map(|(&s, &n)| if n.rem_euclid(2) == 1 { s } else { 1 })
            .product()
    }

    /// First pair on the grid `[-bound, bound]^d` with `ε(g+h) ≠ ε(g)ε(h)`.
    pub fn check_multiplicative(&self, bound: i64) -> Option<(Vec<i64>, Vec<i64>)> {
        let d = self.basis_signs.len();
        let side = (2 * bound + 1) as usize;
        let points: Vec<Vec<i64>> = (0..side.pow(d as u32))
            .map(|mut k| {
                let mut p = vec![0; d];
                for slot in p.iter_mut().rev() {
                    *slot = (k % side) as i64 - bound;
                    k /= side;
                }
                p
            })
            .collect();
        for g in &points {
            for h in &points {
                let s: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
                if self.eps(&s) != self.eps(g) * self.eps(h) {
                    return Some((g.clone(), h.clone()));
                }
            }
        }
        None
    }
}

pub fn epsilon_from_eta(d: usize, basis_signs: &[i8]) -> Result<SignHom, DirectionError> {
    if basis_signs.len() != d {
        return Err(DirectionError::Shape { expected: d, got: basis_signs.len() });
    }
    if basis_signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(DirectionError::BadEntry);
    }
    Ok(SignHom { basis_signs: basis_signs.to_vec() })
}

/// Does the table `g ↦ ±1` (φ_g order-preserving or reversing) extend to a
/// homomorphism `ℤ → {±1}`? Every such homomorphism is `g ↦ table(1)^g`.
pub fn check_prop_fieldorders(table: &[(i64, i8)]) -> Result<SignHom, DirectionError> {
    if table.iter().any(|&(_, s)| s != 1 && s != -1) {
        return Err(DirectionError::BadEntry);
    }
    let one = table.iter().find(|(g, _)| *g == 1).ok_or(DirectionError::MissingGenerator)?.1;
    let hom = SignHom { basis_signs: vec![one] };
    for &(g, s) in table {
        if hom.eps(&[g]) != s {
            // An even g is a double, so its sign is forced to +1.
            return Err(if g.rem_euclid(2) == 0 {
                DirectionError::NotAHomomorphism(g / 2, g / 2, g)
            } else {
                DirectionError::NotAHomomorphism(1, g - 1, g)
            });
        }
    }
    Ok(hom)
}

/// Sign function of the lift of the family given by a direction table:
/// the residue sign of `f / s(v(f))`, flipped when φ_{v(f)} reverses.
/// Values outside the table are taken as `+1`.
pub fn table_sign(table: &[(i64, i8)], f: &RatFunc) -> i8 {
    let (Some(r), Some(v)) = (f.trailing_ratio(), f.tadic_val()) else {
        return 0;
    };
    let dir = table.iter().find(|(g, _)| *g == v).map_or(1, |&(_, s)| s);
    sign_of(&r) * dir
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub eta: i8,
    /// +1 for the standard order on the residue field, -1 for its reverse.
    pub residue_direction: i8,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Recovered {
    pub tag: FieldOrderTag,
    /// Sign of `π₁ = t`.
    pub eta: i8,
    /// Every positive sample of value 0 has a positive residue.
    pub residue_standard: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub candidates: Vec<Candidate>,
    pub count: usize,
    pub recovered: Vec<Recovered>,
    pub distinct: bool,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        self.count == 2
            && self.distinct
            && self.recovered.iter().all(|r| r.residue_standard && r.eta == r.tag.eta)
    }
}

/// Try every sign of `t` against both directions on the residue field and
/// keep the candidates that behave as field orders on the corpus.
pub fn classical_bk(corpus: &[RatFunc]) -> ClassicalReport {
    let mut candidates = Vec::new();
    let mut recovered = Vec::new();
    let t = RatFunc::t_pow(1);
    for eta in [1i8, -1] {
        for residue_direction in [1i8, -1] {
            let tag = FieldOrderTag { eta };
            let sign = |f: &RatFunc| residue_direction * sign_under(f, tag);
            let report = check_field_order_samples(sign, corpus);
            let failure = report.failure().map(|c| {
                let (f, g) = c.witness.as_ref().expect("failing check has a witness");
                format!("{} at ({f}, {g})", c.rule)
            });
            if report.passed() {
                let residue_standard = corpus
                    .iter()
                    .filter(|f| f.tadic_val() == Some(0) && sign(f) > 0)
                    .all(|f| f.residue().map(|r| r.is_positive()).unwrap_or(false));
                recovered.push(Recovered { tag, eta: sign(&t), residue_standard });
            }
            candidates.push(Candidate { eta, residue_direction, passed: report.passed(), failure });
        }
    }
    let distinct = recovered.len() == 2 && recovered[0].eta != recovered[1].eta;
    ClassicalReport { count: recovered.len(), candidates, recovered, distinct }
}

/// Nonzero rational functions with numerator and denominator of degree at
/// most 4 and integer coefficients in `[-10, 10]`, always including `t`
/// and `1`.
pub fn random_corpus(seed: u64, count: usize) -> Vec<RatFunc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = |rng: &mut ChaCha8Rng| loop {
        let deg = rng.gen_range(0..=4);
        let coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-10..=10)).collect();
        let p = Poly::from_ints(&coeffs);
        if !p.is_zero() {
            return p;
        }
    };
    let mut out = vec![RatFunc::t_pow(1), RatFunc::one()];
    while out.len() < count {
        let num = poly(&mut rng);
        let den = poly(&mut rng);
        out.push(RatFunc::new(num, den).expect("nonzero denominator"));
    }
    out.truncate(count);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const PLUS: FieldOrderTag = FieldOrderTag { eta: 1 };
    const MINUS: FieldOrderTag = FieldOrderTag { eta: -1 };

    #[test]
    fn sign_examples() {
        assert_eq!(sign_under(&rf("-t + t^3"), PLUS), -1);
        assert_eq!(sign_under(&rf("t"), MINUS), -1);
        assert_eq!(sign_under(&rf("t^2"), MINUS), 1);
        assert_eq!(sign_under(&RatFunc::zero(), MINUS), 0);
        for (f, tag) in [("-t + t^3", PLUS), ("t", MINUS), ("t^2", MINUS)] {
            assert_eq!(evaluation_sign(&rf(f), tag.eta), Some(sign_under(&rf(f), tag)));
        }
    }

    #[test]
    fn qsection_axioms() {
        let s = QSection;
        let probes: Vec<i64> = (-5..=5).collect();
        assert_eq!(s.check(&probes), None);
    }

    #[test]
    fn phi_examples() {
        let s = QSection;
        assert_eq!(s.phi(-2, &q(3, 2)), rf("3/(2t^2)"));
        assert_eq!(s.phi_inverse(-2, &rf("(3 + 2t^3)/(2t^2)")).unwrap(), q(3, 2));
        assert_eq!(s.phi_inverse(1, &rf("1")), Err(FieldError::BelowLevel { value: 0, level: 1 }));
        for g in -3..=3 {
            for a in [q(1, 1), q(-7, 3), q(0, 1)] {
                assert_eq!(s.phi_inverse(g, &s.phi(g, &a)).unwrap(), a);
            }
        }
    }

    #[test]
    fn sample_orders() {
        let samples: Vec<RatFunc> = ["t", "t^2", "1 - t", "1/t"].iter().map(|s| rf(s)).collect();
        for tag in [PLUS, MINUS] {
            let r = check_field_order_samples(|f| sign_under(f, tag), &samples);
            assert!(r.passed(), "{tag:?}: {:?}", r.failure());
        }
        let r = check_field_order_samples(|f| sign_under(f, PLUS), &samples);
        assert!(r.checks[3].instances > 0);

        let t3 = rf("t^3");
        let flipped = |f: &RatFunc| if *f == t3 { -sign_under(f, PLUS) } else { sign_under(f, PLUS) };
        let r = check_field_order_samples(flipped, &samples);
        let fail = r.failure().unwrap();
        assert_eq!(fail.rule, "sign(fg)=sign(f)sign(g)");
        let (f, g) = fail.witness.clone().unwrap();
        assert_eq!(f.mul(&g), t3);
    }

    #[test]
    fn direction_tables() {
        let parity: Vec<(i64, i8)> = (-2..=3).map(|g| (g, if g % 2 == 0 { 1 } else { -1 })).collect();
        assert_eq!(check_prop_fieldorders(&parity).unwrap().basis_signs, vec![-1]);
        let trivial: Vec<(i64, i8)> = (-2..=3).map(|g| (g, 1)).collect();
        assert_eq!(check_prop_fieldorders(&trivial).unwrap().basis_signs, vec![1]);
        let bad = [(1, -1), (2, 1), (3, 1)];
        assert_eq!(check_prop_fieldorders(&bad), Err(DirectionError::NotAHomomorphism(1, 2, 3)));
        let even = [(1, 1), (2, -1)];
        assert_eq!(check_prop_fieldorders(&even), Err(DirectionError::NotAHomomorphism(1, 1, 2)));
        assert_eq!(check_prop_fieldorders(&[(2, 1)]), Err(DirectionError::MissingGenerator));
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_from_eta(1, &[-1]).unwrap();
        assert_eq!((e.eps(&[5]), e.eps(&[-4])), (-1, 1));
        let e = epsilon_from_eta(2, &[-1, 1]).unwrap();
        assert_eq!(e.eps(&[3, 2]), -1);
        let e = epsilon_from_eta(2, &[1, 1]).unwrap();
        assert!((-3..=3).all(|a| (-3..=3).all(|b| e.eps(&[a, b]) == 1)));
        assert_eq!(e.check_multiplicative(3), None);
        assert!(epsilon_from_eta(2, &[1]).is_err());
    }

    #[test]
    fn classical_count() {
        let corpus = random_corpus(7, 40);
        let r = classical_bk(&corpus);
        assert_eq!(r.count, 2);
        assert!(r.passed());
        assert!(r.candidates.iter().filter(|c| c.residue_direction == -1).all(|c| !c.passed));
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = random_corpus(42, 20);
        let b = random_corpus(42, 20);
        assert_eq!(a, b);
        assert_ne!(a, random_corpus(43, 20));
        assert!(a.iter().all(|f| !f.is_zero()));
    }
}
