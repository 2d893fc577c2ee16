//! Rational functions in `t` over ℚ with the t-adic valuation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Poly;
use super::FieldError;

/// `num/den` with `den ≠ 0`, the common power of `t` cancelled and the
/// trailing coefficient of `den` scaled to 1. Equality is cross-multiplied,
/// so no polynomial gcd is needed.
#[derive(Debug, Clone)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let k = num.low_degree().unwrap().min(den.low_degree().unwrap());
        let (num, den) = (num.shift_down(k), den.shift_down(k));
        let lead = den.trailing().expect("nonzero").recip();
        Ok(RatFunc { num: num.scale(&lead), den: den.scale(&lead) })
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::default(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn poly(p: Poly) -> Self {
        RatFunc::new(p, Poly::one()).expect("denominator is one")
    }

    /// `t^k` for any integer `k`.
    pub fn t_pow(k: i64) -> Self {
        let m = Poly::monomial(k.unsigned_abs() as usize);
        if k >= 0 {
            RatFunc { num: m, den: Poly::one() }
        } else {
            RatFunc { num: Poly::one(), den: m }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::new(num, &self.den * &rhs.den).expect("product of nonzero denominators")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &RatFunc) -> RatFunc {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("product of nonzero denominators")
    }

    pub fn inv(&self) -> Result<RatFunc, FieldError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc, FieldError> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// t-adic valuation; `None` stands for ∞.
    pub fn tadic_val(&self) -> Option<i64> {
        let n = self.num.low_degree()? as i64;
        Some(n - self.den.low_degree().expect("nonzero denominator") as i64)
    }

    /// Ratio of the trailing coefficients, i.e. the residue of `f / t^{v(f)}`.
    pub fn trailing_ratio(&self) -> Option<BigRational> {
        Some(self.num.trailing()? / self.den.trailing().expect("nonzero denominator"))
    }

    /// Image in the residue field ℚ; needs `v(f) ≥ 0`.
    pub fn residue(&self) -> Result<BigRational, FieldError> {
        match self.tadic_val() {
            None => Ok(BigRational::zero()),
            Some(v) if v < 0 => Err(FieldError::NegativeValue(v)),
            Some(0) => Ok(self.trailing_ratio().expect("nonzero")),
            Some(_) => Ok(BigRational::zero()),
        }
    }

    /// Exact value at a rational point; `None` at a pole.
    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(t);
        (!d.is_zero()).then(|| self.num.eval(t) / d)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatFunc {}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Clear denominators so both parts have integer coefficients.
        let l: BigInt = self.num.denominator_lcm().lcm(&self.den.denominator_lcm());
        let scale = BigRational::from_integer(l);
        let (num, den) = (self.num.scale(&scale), self.den.scale(&scale));
        let den_is_one = den.coeffs().len() == 1 && den.coeffs()[0].is_one();
        if den_is_one {
            return num.fmt_integer(f);
        }
        let terms = |p: &Poly| p.coeffs().iter().filter(|c| !c.is_zero()).count();
        if terms(&den) == 1 && terms(&num) == 1 && den.trailing().is_some_and(|c| c.is_positive()) {
            num.fmt_integer(f)?;
            write!(f, "/")?;
            return den.fmt_integer(f);
        }
        write!(f, "(")?;
        num.fmt_integer(f)?;
        write!(f, ")/(")?;
        den.fmt_integer(f)?;
        write!(f, ")")
    }
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    if s.starts_with('(') && s.ends_with(')') {
        let inner = &s[1..s.len() - 1];
        let mut depth = 0i32;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return s;
                    }
                }
                _ => {}
            }
        }
        if depth == 0 {
            return inner.trim();
        }
    }
    s
}

/// Terms `c`, `ct`, `ct^k`, `c*t^k`, `t^k` with integer or `p/q` coefficients.
fn parse_poly(s: &str) -> Result<Poly, FieldError> {
    let bad = || FieldError::Parse(s.to_string());
    let s = strip_parens(s);
    if s.is_empty() {
        return Err(bad());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        if (ch == '+' || ch == '-') && !current.is_empty() && !current.ends_with('^') {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && current.is_empty() {
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
    }
    if current.is_empty() {
        return Err(bad());
    }
    terms.push((negative, current));
    let mut out = Poly::default();
    for (negative, term) in terms {
        let (coef, power) = match term.find('t') {
            None => (term.as_str(), 0usize),
            Some(i) => {
                let rest = &term[i + 1..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
                };
                (term[..i].trim_end_matches('*'), power)
            }
        };
        let c: BigRational = if coef.is_empty() {
            BigRational::one()
        } else if let Some((p, q)) = coef.split_once('/') {
            let (p, q): (BigInt, BigInt) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
            if q.is_zero() {
                return Err(FieldError::DivisionByZero);
            }
            BigRational::new(p, q)
        } else {
            BigRational::from_integer(coef.parse().map_err(|_| bad())?)
        };
        let c = if negative { -c } else { c };
        out = &out + &Poly::constant(c).shift_up(power);
    }
    Ok(out)
}

fn single_term(s: &str) -> bool {
    let s = s.trim().trim_start_matches(['-', '+']);
    !s.contains(['+', '-'])
}

/// The fraction bar is a top-level `/` next to a parenthesis, or one
/// between two single terms at least one of which involves `t`. Any other
/// slash belongs to a coefficient such as `3/2`.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                let (before, after) = (s[..i].trim(), s[i + 1..].trim());
                let bar = before.ends_with(')')
                    || after.starts_with('(')
                    || (single_term(before) && single_term(after) && (before.contains('t') || after.contains('t')));
                if bar {
                    return Some((before, after));
                }
            }
            _ => {}
        }
    }
    None
}

impl FromStr for RatFunc {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        match split_fraction(s) {
            Some((n, d)) => RatFunc::new(parse_poly(n)?, parse_poly(d)?),
            None => Ok(RatFunc::poly(parse_poly(s)?)),
        }
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
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

    #[test]
    fn arithmetic_examples() {
        assert_eq!(rf("1/t").add(&rf("t")), rf("(1 + t^2)/t"));
        assert_eq!(rf("t^2").mul(&rf("1/t")), rf("t"));
        assert_eq!(RatFunc::zero().inv(), Err(FieldError::DivisionByZero));
        assert_eq!(rf("(1 + t)/(1 - t)").mul(&rf("(1 - t)/(1 + t)")), RatFunc::one());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(rf("(t^2 + t^3)/(1 - t)").tadic_val(), Some(2));
        assert_eq!(RatFunc::one().tadic_val(), Some(0));
        assert_eq!(RatFunc::zero().tadic_val(), None);
        assert_eq!(rf("(2 + t - 3t^2)/(t^3)").tadic_val(), Some(-3));
    }

    #[test]
    fn residues() {
        assert_eq!(rf("(2 + t)/(1 + 3t)").residue().unwrap(), q(2, 1));
        assert_eq!(rf("t + t^2").residue().unwrap(), q(0, 1));
        assert_eq!(rf("1/t").residue(), Err(FieldError::NegativeValue(-1)));
    }

    #[test]
    fn normalization_cancels_t_power() {
        let f = RatFunc::new(Poly::from_ints(&[0, 0, 2]), Poly::from_ints(&[0, 4])).unwrap();
        assert_eq!(f.numerator(), &Poly::from_ints(&[0, 1]).scale(&q(1, 2)));
        assert_eq!(f.denominator(), &Poly::one());
    }

    #[test]
    fn parse_and_display() {
        let f = rf("(2 + t - 3t^2)/(t^3)");
        assert_eq!(f.to_string(), "(2 + t - 3t^2)/(t^3)");
        assert_eq!(rf(&f.to_string()), f);
        assert_eq!(rf("3/2"), RatFunc::constant(q(3, 2)));
        assert_eq!(rf("3/(2t^2)"), RatFunc::constant(q(3, 2)).mul(&RatFunc::t_pow(-2)));
        assert_eq!(rf("-t + t^3").to_string(), "-t + t^3");
        assert_eq!(rf("1/t").to_string(), "1/t");
        assert!("(1 + )".parse::<RatFunc>().is_err());
        assert!("1/0".parse::<RatFunc>().is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(rf("(1 + t)/(1 - t)").eval(&q(1, 2)), Some(q(3, 1)));
        assert_eq!(rf("1/(1 - t)").eval(&q(1, 1)), None);
    }
}
