//! Polynomials in the family parameter `s` with rational coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::{One, Zero};

use crate::novikov::{fmt_q, parse_q, qi, NovikovError, Q};

/// `Σ c_i s^i`, stored without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Q>);

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        Poly::new(vec![Q::zero(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn constant_term(&self) -> Q {
        self.0.first().cloned().unwrap_or_else(Q::zero)
    }

    /// The value as a constant, when it is one.
    pub fn as_constant(&self) -> Option<Q> {
        self.is_constant().then(|| self.constant_term())
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, s: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * qi(i as i64))
                .collect(),
        )
    }

    /// The antiderivative vanishing at `0`.
    pub fn antiderivative(&self) -> Poly {
        let mut v = vec![Q::zero()];
        v.extend(self.0.iter().enumerate().map(|(i, c)| c / qi(i as i64 + 1)));
        Poly::new(v)
    }

    /// `∫_a^u p(τ) dτ` as a polynomial in `u`.
    pub fn integral_from(&self, a: &Q) -> Poly {
        let anti = self.antiderivative();
        let at_a = anti.eval(a);
        &anti - &Poly::constant(at_a)
    }

    /// `∫_a^b p(τ) dτ`.
    pub fn definite_integral(&self, a: &Q, b: &Q) -> Q {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// Parses `c` or `[c0,c1,...]`.
    pub fn parse(s: &str) -> Result<Poly, NovikovError> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if inner.trim().is_empty() {
                return Ok(Poly::zero());
            }
            let coeffs = inner
                .split(',')
                .map(parse_q)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Poly::new(coeffs))
        } else {
            Ok(Poly::constant(parse_q(s)?))
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.len() {
            0 => write!(f, "0"),
            1 => write!(f, "{}", fmt_q(&self.0[0])),
            _ => {
                let parts: Vec<String> = self.0.iter().map(fmt_q).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(Q::zero);
            let b = rhs.0.get(i).cloned().unwrap_or_else(Q::zero);
            v.push(a + b);
        }
        Poly::new(v)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        if self.0.len() < rhs.0.len() {
            self.0.resize(rhs.0.len(), Q::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Q::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}
