//! Reduced rational functions `P/Q` over the rationals.
//!
//! Invariants: `Q != 0`, `gcd(P, Q) = 1`, `Q` monic, and zero is `0/1`.
//! These make structural equality coincide with equality of functions.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct RationalFunction {
    #[serde(rename = "num")]
    numerator: Polynomial,
    #[serde(rename = "den")]
    denominator: Polynomial,
}

impl RationalFunction {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if numerator.is_zero() {
            return Ok(Self::zero());
        }
        let g = numerator.gcd(&denominator)?;
        let (n, d) = if g.is_one() {
            (numerator, denominator)
        } else {
            (
                numerator.exact_div(&g).expect("gcd divides numerator"),
                denominator.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = d.leading().expect("nonzero").clone();
        if lc.is_one() {
            Ok(RationalFunction { numerator: n, denominator: d })
        } else {
            let inv = lc.recip();
            Ok(RationalFunction {
                numerator: n.scale(&inv),
                denominator: d.scale(&inv),
            })
        }
    }

    /// Builds without the gcd step when the caller knows the pair is coprime.
    fn from_coprime(numerator: Polynomial, denominator: Polynomial) -> Self {
        if numerator.is_zero() {
            return Self::zero();
        }
        let lc = denominator.leading().expect("nonzero").clone();
        if lc.is_one() {
            RationalFunction { numerator, denominator }
        } else {
            let inv = lc.recip();
            RationalFunction {
                numerator: numerator.scale(&inv),
                denominator: denominator.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        RationalFunction {
            numerator: Polynomial::zero(),
            denominator: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction {
            numerator: Polynomial::constant(c),
            denominator: Polynomial::one(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: Polynomial::one(),
        }
    }

    /// `1 / q`
    pub fn reciprocal_of(q: Polynomial) -> Result<Self> {
        Self::new(Polynomial::one(), q)
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_one()
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.denominator.eval(x);
        if d.is_zero() {
            return Err(Error::Pole { at: format_rational(x) });
        }
        Ok(self.numerator.eval(x) / d)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.denominator == other.denominator {
            let n = &self.numerator + &other.numerator;
            return Self::new(n, self.denominator.clone()).expect("nonzero denominator");
        }
        let n = &(&self.numerator * &other.denominator) + &(&other.numerator * &self.denominator);
        let d = &self.denominator * &other.denominator;
        Self::new(n, d).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            numerator: -&self.numerator,
            denominator: self.denominator.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // cross-cancel so the product stays reduced
        let g1 = self.numerator.gcd(&other.denominator).expect("nonzero");
        let g2 = other.numerator.gcd(&self.denominator).expect("nonzero");
        let n1 = self.numerator.exact_div(&g1).expect("gcd divides");
        let d2 = other.denominator.exact_div(&g1).expect("gcd divides");
        let n2 = other.numerator.exact_div(&g2).expect("gcd divides");
        let d1 = self.denominator.exact_div(&g2).expect("gcd divides");
        Self::from_coprime(&n1 * &n2, &d1 * &d2)
    }

    /// `None` when `self` is zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::from_coprime(self.denominator.clone(), self.numerator.clone()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.mul(&r))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            numerator: self.numerator.scale(c),
            denominator: self.denominator.clone(),
        }
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> Self {
        self.mul(&Self::from_polynomial(p.clone()))
    }

    /// `f(c x)`
    pub fn compose_scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::constant(self.eval(&Rational::zero()).expect("denominator(0) != 0 when c = 0 is used"));
        }
        Self::from_coprime(self.numerator.compose_scale(c), self.denominator.compose_scale(c))
    }

    /// `f(-x)`
    pub fn compose_neg(&self) -> Self {
        Self::from_coprime(self.numerator.compose_neg(), self.denominator.compose_neg())
    }

    /// `f(x^n)`
    pub fn compose_pow(&self, n: usize) -> Self {
        Self::from_coprime(self.numerator.compose_pow(n), self.denominator.compose_pow(n))
    }

    /// `x * f(x)`
    pub fn shift(&self) -> Self {
        self.mul_polynomial(&Polynomial::x())
    }

    /// Taylor coefficients at 0.
    pub fn series(&self, terms: usize) -> Result<Vec<Rational>> {
        self.numerator.series_div(&self.denominator, terms)
    }

    /// Independent cross-multiplication check `n1 * d2 == n2 * d1`.
    pub fn cross_equal(&self, other: &Self) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

#[derive(Deserialize)]
struct RawRationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawRationalFunction::deserialize(d)?;
        RationalFunction::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn normalization_is_canonical() {
        // (1 - x^2) / (2 - 2x) == (1 + x) / 2
        let a = RationalFunction::new(p(&[1, 0, -1]), p(&[2, -2])).unwrap();
        let b = RationalFunction::new(Polynomial::from_coeffs(vec![rat(1, 2), rat(1, 2)]), Polynomial::one()).unwrap();
        assert_eq!(a, b);
        let c = RationalFunction::new(p(&[1]), p(&[1, -1])).unwrap();
        assert_eq!(c.denominator(), &p(&[-1, 1]));
        assert_eq!(c.numerator(), &p(&[-1]));
        assert!(RationalFunction::new(p(&[1]), Polynomial::zero()).is_err());
    }

    #[test]
    fn eval_examples() {
        let geo = RationalFunction::reciprocal_of(p(&[1, -1])).unwrap();
        assert_eq!(geo.eval(&int(0)).unwrap(), int(1));
        assert_eq!(geo.eval(&rat(1, 2)).unwrap(), int(2));
        let f = RationalFunction::new(p(&[1, -1]), p(&[4, 0, 1])).unwrap();
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), rat(2, 17));
        assert!(matches!(geo.eval(&int(1)), Err(Error::Pole { .. })));
    }

    #[test]
    fn field_operations() {
        let geo = RationalFunction::reciprocal_of(p(&[1, -1])).unwrap();
        let alt = geo.compose_neg();
        assert_eq!(alt, RationalFunction::reciprocal_of(p(&[1, 1])).unwrap());
        // 1/(1-x) + 1/(1+x) = 2/(1-x^2)
        let sum = geo.add(&alt);
        assert_eq!(sum, RationalFunction::new(p(&[2]), p(&[1, 0, -1])).unwrap());
        assert_eq!(geo.mul(&alt), geo.compose_pow(2));
        assert_eq!(sum.sub(&alt), geo);
        assert_eq!(geo.div(&geo).unwrap(), RationalFunction::one());
        assert!(geo.sub(&geo).is_zero());
        assert_eq!(geo.compose_scale(&rat(1, 2)).eval(&rat(4, 5)).unwrap(), rat(5, 3));
    }
}
