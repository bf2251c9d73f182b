//! Truncated elements of the Novikov field with rational exponents.
//!
//! An element is a finite sum `Σ c_i T^{λ_i}` together with a precision `p`:
//! everything at or above `T^p` is unknown. Arithmetic propagates precision
//! the way big-O terms do for valued fields.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Builds a rational from an integer numerator and denominator.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds an integral rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q`.
pub fn parse_q(s: &str) -> Result<Q, NovikovError> {
    Q::from_str(s.trim()).map_err(|_| NovikovError::Parse(format!("bad rational `{s}`")))
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NovikovError {
    #[error("division by zero")]
    ZeroDivision,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("series does not terminate without a finite precision")]
    UnboundedSeries,
    #[error("parse error: {0}")]
    Parse(String),
}

/// A rational number or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    Finite(Q),
    Infinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn plus(&self, other: &Extended) -> Extended {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }

    pub fn plus_q(&self, other: &Q) -> Extended {
        match self {
            Extended::Finite(a) => Extended::Finite(a + other),
            Extended::Infinity => Extended::Infinity,
        }
    }

    pub fn min(self, other: Extended) -> Extended {
        std::cmp::min(self, other)
    }

    /// `true` when the finite rational `x` lies strictly below this bound.
    pub fn above(&self, x: &Q) -> bool {
        match self {
            Extended::Finite(p) => x < p,
            Extended::Infinity => true,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{}", fmt_q(x)),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}

impl From<Q> for Extended {
    fn from(x: Q) -> Self {
        Extended::Finite(x)
    }
}

/// Global truncation data shared by a computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NovikovContext {
    /// The energy cutoff `E_max`; labels with larger energy are discarded.
    pub energy_cutoff: Q,
}

impl NovikovContext {
    pub fn new(energy_cutoff: Q) -> Self {
        NovikovContext { energy_cutoff }
    }

    /// `true` when an energy lies within the cutoff.
    pub fn admits(&self, energy: &Q) -> bool {
        energy <= &self.energy_cutoff
    }
}

/// A truncated Novikov series `Σ c_i T^{λ_i} + O(T^p)`.
#[derive(Clone, Debug)]
pub struct NovikovElement {
    terms: Vec<(Q, Q)>,
    precision: Extended,
}

impl NovikovElement {
    /// Normalizes: sorts by exponent, merges duplicates, drops zero coefficients
    /// and every exponent at or above the precision.
    pub fn new(mut terms: Vec<(Q, Q)>, precision: Extended) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if !precision.above(&e) {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        NovikovElement {
            terms: out,
            precision,
        }
    }

    /// The structural zero, known exactly.
    pub fn zero() -> Self {
        NovikovElement {
            terms: vec![],
            precision: Extended::Infinity,
        }
    }

    /// The zero with a finite precision, `O(T^p)`.
    pub fn big_o(p: Q) -> Self {
        NovikovElement {
            terms: vec![],
            precision: Extended::Finite(p),
        }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![(Q::zero(), c)], Extended::Infinity)
    }

    /// `c T^e`, known exactly.
    pub fn monomial(c: Q, e: Q) -> Self {
        Self::new(vec![(e, c)], Extended::Infinity)
    }

    /// The variable `T`.
    pub fn t() -> Self {
        Self::monomial(Q::one(), Q::one())
    }

    pub fn terms(&self) -> &[(Q, Q)] {
        &self.terms
    }

    pub fn precision(&self) -> &Extended {
        &self.precision
    }

    pub fn with_precision(&self, p: Extended) -> Self {
        Self::new(self.terms.clone(), self.precision.clone().min(p))
    }

    /// `true` when no term is stored (the value may still be `O(T^p)`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest stored exponent, `+∞` for zero.
    pub fn valuation(&self) -> Extended {
        match self.terms.first() {
            Some((e, _)) => Extended::Finite(e.clone()),
            None => Extended::Infinity,
        }
    }

    /// Lower bound on the valuation of the true value: the valuation for a
    /// nonzero element, the precision for a zero one.
    fn valuation_bound(&self) -> Extended {
        self.valuation().min(self.precision.clone())
    }

    pub fn leading_term(&self) -> Option<&(Q, Q)> {
        self.terms.first()
    }

    pub fn coefficient(&self, e: &Q) -> Q {
        self.terms
            .iter()
            .find(|(x, _)| x == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn scalar_mul(&self, c: &Q) -> Self {
        if c.is_zero() {
            return NovikovElement {
                terms: vec![],
                precision: self.precision.clone(),
            };
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        Self::new(terms, self.precision.clone())
    }

    /// Multiplication by `T^s`.
    pub fn shift(&self, s: &Q) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect();
        Self::new(terms, self.precision.plus_q(s))
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let p = self.precision.clone().min(other.precision.clone());
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms, p)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        NovikovElement {
            terms,
            precision: self.precision.clone(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let p = self
            .precision
            .plus(&other.valuation_bound())
            .min(other.precision.plus(&self.valuation_bound()));
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if p.above(&e) {
                    terms.push((e, c1 * c2));
                }
            }
        }
        Self::new(terms, p)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Multiplicative inverse by geometric expansion around the leading term.
    pub fn invert(&self) -> Result<Self, NovikovError> {
        self.invert_to(&Extended::Infinity)
    }

    /// Inverse with the output precision additionally capped at `cap`; needed
    /// when `self` is exact but not a monomial.
    pub fn invert_to(&self, cap: &Extended) -> Result<Self, NovikovError> {
        let (e0, c0) = self
            .leading_term()
            .ok_or(NovikovError::ZeroDivision)?
            .clone();
        let inv_c0 = c0.recip();
        // self = c0 T^{e0} (1 + u)
        let u = Self::new(
            self.terms[1..]
                .iter()
                .map(|(e, c)| (e - &e0, c * &inv_c0))
                .collect(),
            self.precision.plus_q(&-e0.clone()),
        );
        let rel = u.precision.clone().min(cap.plus_q(&e0));
        let sum = geometric_like(&u.neg_ref(), &rel, |_| Q::one())?;
        Ok(sum.scalar_mul(&inv_c0).shift(&-e0))
    }

    /// `exp(x)` for `𝗏(x) > 0`.
    pub fn exp_plus(&self) -> Result<Self, NovikovError> {
        if let Extended::Finite(v) = self.valuation() {
            if !v.is_positive() {
                return Err(NovikovError::DomainError(format!(
                    "exp needs positive valuation, got {}",
                    fmt_q(&v)
                )));
            }
        }
        let p = self.precision.clone();
        let mut fact = Q::one();
        geometric_like(self, &p, |n| {
            if n > 0 {
                fact = &fact / qi(n as i64);
            }
            fact.clone()
        })
    }

    /// Coefficient of `T^0`, the image in the residue field.
    pub fn residue(&self) -> Result<Q, NovikovError> {
        if let Extended::Finite(v) = self.valuation() {
            if v.is_negative() {
                return Err(NovikovError::DomainError(format!(
                    "residue needs nonnegative valuation, got {}",
                    fmt_q(&v)
                )));
            }
        }
        Ok(self.coefficient(&Q::zero()))
    }

    /// Equality of stored terms below `min` of both precisions.
    pub fn eq_up_to_precision(&self, other: &Self) -> bool {
        let p = self.precision.clone().min(other.precision.clone());
        self.with_precision(p.clone()).terms == other.with_precision(p).terms
    }

    /// Exact structural equality, precision included.
    pub fn structurally_eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.precision == other.precision
    }
}

/// `Σ_n w(n) x^n` truncated at `prec`, for `x` of positive valuation.
fn geometric_like(
    x: &NovikovElement,
    prec: &Extended,
    mut weight: impl FnMut(u32) -> Q,
) -> Result<NovikovElement, NovikovError> {
    let w0 = weight(0);
    let mut acc = NovikovElement::new(vec![(Q::zero(), w0)], prec.clone());
    if x.is_zero() {
        return Ok(acc.with_precision(x.precision.clone().min(prec.clone())));
    }
    let v = x.valuation().finite().cloned().expect("nonzero");
    let bound = prec.clone().min(x.precision.clone());
    let Extended::Finite(bound_q) = bound.clone() else {
        return Err(NovikovError::UnboundedSeries);
    };
    let mut power = NovikovElement::one();
    let mut n: u32 = 0;
    loop {
        n += 1;
        if qi(n as i64) * &v >= bound_q {
            break;
        }
        power = power.mul_ref(x).with_precision(bound.clone());
        let w = weight(n);
        acc = acc.add_ref(&power.scalar_mul(&w));
    }
    Ok(acc.with_precision(bound))
}

impl PartialEq for NovikovElement {
    fn eq(&self, other: &Self) -> bool {
        self.eq_up_to_precision(other)
    }
}

impl Add for &NovikovElement {
    type Output = NovikovElement;
    fn add(self, rhs: &NovikovElement) -> NovikovElement {
        self.add_ref(rhs)
    }
}

impl Sub for &NovikovElement {
    type Output = NovikovElement;
    fn sub(self, rhs: &NovikovElement) -> NovikovElement {
        self.sub_ref(rhs)
    }
}

impl Mul for &NovikovElement {
    type Output = NovikovElement;
    fn mul(self, rhs: &NovikovElement) -> NovikovElement {
        self.mul_ref(rhs)
    }
}

impl Neg for &NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        self.neg_ref()
    }
}

impl Add for NovikovElement {
    type Output = NovikovElement;
    fn add(self, rhs: NovikovElement) -> NovikovElement {
        self.add_ref(&rhs)
    }
}

impl Sub for NovikovElement {
    type Output = NovikovElement;
    fn sub(self, rhs: NovikovElement) -> NovikovElement {
        self.sub_ref(&rhs)
    }
}

impl Mul for NovikovElement {
    type Output = NovikovElement;
    fn mul(self, rhs: NovikovElement) -> NovikovElement {
        self.mul_ref(&rhs)
    }
}

impl Neg for NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        self.neg_ref()
    }
}

impl fmt::Display for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = fmt_q(&c.abs());
            let body = format!("{mag}*T^({})", fmt_q(e));
            match (i, c.is_negative()) {
                (0, false) => parts.push_str(&body),
                (0, true) => parts.push_str(&format!("-{body}")),
                (_, false) => parts.push_str(&format!(" + {body}")),
                (_, true) => parts.push_str(&format!(" - {body}")),
            }
        }
        if let Extended::Finite(p) = &self.precision {
            if parts.is_empty() {
                parts = format!("O(T^({}))", fmt_q(p));
            } else {
                parts.push_str(&format!(" + O(T^({}))", fmt_q(p)));
            }
        }
        if parts.is_empty() {
            parts.push('0');
        }
        write!(f, "{parts}")
    }
}

impl FromStr for NovikovElement {
    type Err = NovikovError;

    /// Parses the rendering produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms = Vec::new();
        let mut precision = Extended::Infinity;
        for (sign, chunk) in split_signed(s)? {
            if let Some(rest) = chunk.strip_prefix("O(T^(") {
                let inner = rest
                    .strip_suffix("))")
                    .ok_or_else(|| NovikovError::Parse(format!("bad precision `{chunk}`")))?;
                precision = Extended::Finite(parse_q(inner)?);
                continue;
            }
            let (c, rest) = chunk
                .split_once("*T^(")
                .ok_or_else(|| NovikovError::Parse(format!("bad term `{chunk}`")))?;
            let e = rest
                .strip_suffix(')')
                .ok_or_else(|| NovikovError::Parse(format!("bad exponent `{chunk}`")))?;
            let mut c = parse_q(c)?;
            if sign {
                c = -c;
            }
            terms.push((parse_q(e)?, c));
        }
        Ok(Self::new(terms, precision))
    }
}

/// Splits `a + b - c` into signed chunks; the sign flag is `true` for minus.
fn split_signed(s: &str) -> Result<Vec<(bool, String)>, NovikovError> {
    let mut out = Vec::new();
    let mut rest = s;
    let mut neg = false;
    if let Some(r) = rest.strip_prefix('-') {
        neg = true;
        rest = r;
    }
    loop {
        let plus = rest.find(" + ");
        let minus = rest.find(" - ");
        let next = match (plus, minus) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        match next {
            Some(i) => {
                out.push((neg, rest[..i].trim().to_string()));
                neg = &rest[i..i + 3] == " - ";
                rest = &rest[i + 3..];
            }
            None => {
                out.push((neg, rest.trim().to_string()));
                break;
            }
        }
    }
    if out.iter().any(|(_, c)| c.is_empty()) {
        return Err(NovikovError::Parse(format!("empty term in `{s}`")));
    }
    Ok(out)
}

impl PartialOrd for NovikovElement {
    /// Orders by valuation only; used for norm comparisons.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.valuation().cmp(&other.valuation()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(terms: &[(i64, i64, i64, i64)], p: Option<Q>) -> NovikovElement {
        let t = terms
            .iter()
            .map(|&(en, ed, cn, cd)| (q(en, ed), q(cn, cd)))
            .collect();
        NovikovElement::new(t, p.map(Extended::Finite).unwrap_or(Extended::Infinity))
    }

    #[test]
    fn valuation_examples() {
        let x = el(&[(1, 2, 3, 1), (1, 1, 1, 1)], None);
        assert_eq!(x.valuation(), Extended::Finite(q(1, 2)));
        assert_eq!(NovikovElement::big_o(qi(5)).valuation(), Extended::Infinity);
        let y = el(&[(0, 1, 2, 1), (3, 1, 1, 1)], None);
        assert_eq!(y.valuation(), Extended::Finite(qi(0)));
    }

    #[test]
    fn arithmetic_examples() {
        let a = el(&[(1, 1, 1, 1), (2, 1, 1, 1)], None);
        let b = el(&[(1, 1, -1, 1)], None);
        assert!((&a + &b).structurally_eq(&el(&[(2, 1, 1, 1)], None)));
        let c = el(&[(0, 1, 1, 1), (1, 1, 1, 1)], None);
        let d = el(&[(0, 1, 1, 1), (1, 1, -1, 1)], None);
        assert!((&c * &d).structurally_eq(&el(&[(0, 1, 1, 1), (2, 1, -1, 1)], None)));
    }

    #[test]
    fn precision_rules() {
        let x = el(&[(1, 1, 1, 1)], Some(qi(3)));
        let y = el(&[(2, 1, 1, 1)], Some(qi(4)));
        assert_eq!((&x + &y).precision(), &Extended::Finite(qi(3)));
        // min(3 + 2, 4 + 1) = 5
        assert_eq!((&x * &y).precision(), &Extended::Finite(qi(5)));
        let z = NovikovElement::big_o(qi(2));
        assert_eq!((&z * &z).precision(), &Extended::Finite(qi(4)));
    }

    #[test]
    fn invert_examples() {
        let x = el(&[(0, 1, 1, 1), (1, 1, 1, 1)], Some(qi(4)));
        let inv = x.invert().unwrap();
        let expect = el(
            &[(0, 1, 1, 1), (1, 1, -1, 1), (2, 1, 1, 1), (3, 1, -1, 1)],
            Some(qi(4)),
        );
        assert!(inv.structurally_eq(&expect));
        let t = NovikovElement::t();
        assert!(t
            .invert()
            .unwrap()
            .structurally_eq(&el(&[(-1, 1, 1, 1)], None)));
        let two = NovikovElement::constant(qi(2));
        assert!(two
            .invert()
            .unwrap()
            .structurally_eq(&NovikovElement::constant(q(1, 2))));
        assert_eq!(
            NovikovElement::zero().invert().unwrap_err(),
            NovikovError::ZeroDivision
        );
        let exact = el(&[(0, 1, 1, 1), (1, 1, 1, 1)], None);
        assert_eq!(exact.invert().unwrap_err(), NovikovError::UnboundedSeries);
    }

    #[test]
    fn exp_examples() {
        let t = NovikovElement::t().with_precision(Extended::Finite(q(5, 2)));
        let e = t.exp_plus().unwrap();
        let expect = el(&[(0, 1, 1, 1), (1, 1, 1, 1), (2, 1, 1, 2)], Some(q(5, 2)));
        assert!(e.structurally_eq(&expect));
        assert!(NovikovElement::zero()
            .exp_plus()
            .unwrap()
            .structurally_eq(&NovikovElement::one()));
        let prod = &e * &(-&t).exp_plus().unwrap();
        assert_eq!(prod, NovikovElement::one());
        assert!(NovikovElement::one().exp_plus().is_err());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(
            el(&[(0, 1, 2, 1), (1, 1, 3, 1)], None).residue().unwrap(),
            qi(2)
        );
        assert_eq!(el(&[(1, 3, 1, 1)], None).residue().unwrap(), qi(0));
        assert!(el(&[(-1, 1, 1, 1)], None).residue().is_err());
    }

    #[test]
    fn render_round_trip() {
        let x = el(&[(-1, 2, -3, 7), (0, 1, 1, 1), (5, 3, 2, 1)], Some(q(7, 2)));
        let s = x.to_string();
        assert_eq!(s, "-3/7*T^(-1/2) + 1*T^(0) + 2*T^(5/3) + O(T^(7/2))");
        assert!(s.parse::<NovikovElement>().unwrap().structurally_eq(&x));
        for z in [NovikovElement::zero(), NovikovElement::big_o(qi(2))] {
            assert!(z
                .to_string()
                .parse::<NovikovElement>()
                .unwrap()
                .structurally_eq(&z));
        }
    }
}
