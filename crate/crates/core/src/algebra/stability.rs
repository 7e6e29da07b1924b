//! Exact location of polynomial roots relative to the unit circle.
//!
//! The outside-disk test runs the Schur–Cohn recursion on the reversed
//! polynomial. When the recursion fails, a Cayley-transform gcd decides
//! whether the failure is caused by a root on the circle.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::polynomial::Polynomial;
use super::rational::Rational;
use super::sturm::count_real_roots;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskVerdict {
    /// Every root satisfies `|z| > 1`.
    Yes,
    /// Some root satisfies `|z| < 1` and none lies on `|z| = 1`.
    No,
    /// Some root lies on `|z| = 1`.
    Boundary,
}

/// Schur–Cohn test: do all roots of `p` lie strictly inside the unit disk?
pub fn schur_cohn_all_inside(p: &Polynomial) -> bool {
    let Some(mut n) = p.degree() else {
        return false;
    };
    let mut cur = p.monic();
    while n > 0 {
        let a0 = cur.coeff(0);
        let an = cur.coeff(n);
        if a0.abs() >= an.abs() {
            return false;
        }
        // (a_n p(z) - a_0 p*(z)) / z, with p* the reversed polynomial
        let reflected = cur.reverse();
        let next = &cur.scale(&an) - &reflected.scale(&a0);
        let next = Polynomial::from_coeffs(next.coeffs()[1..].to_vec());
        debug_assert_eq!(next.degree(), Some(n - 1));
        cur = next.monic();
        n -= 1;
    }
    true
}

/// Decides exactly whether every root of `q` lies strictly outside the unit
/// disk.
pub fn all_roots_outside_unit_disk(q: &Polynomial) -> Result<DiskVerdict> {
    let deg = q.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(DiskVerdict::Yes);
    }
    if q.coeff(0).is_zero() {
        return Ok(DiskVerdict::No);
    }
    // roots of q strictly outside <=> roots of its reversal strictly inside
    if schur_cohn_all_inside(&q.reverse()) {
        return Ok(DiskVerdict::Yes);
    }
    if has_root_on_unit_circle(q) {
        Ok(DiskVerdict::Boundary)
    } else {
        Ok(DiskVerdict::No)
    }
}

/// `(re, im)` pair of real polynomials standing for `re + i*im`.
type GaussPoly = (Polynomial, Polynomial);

fn gauss_mul(a: &GaussPoly, b: &GaussPoly) -> GaussPoly {
    (&(&a.0 * &b.0) - &(&a.1 * &b.1), &(&a.0 * &b.1) + &(&a.1 * &b.0))
}

/// Exact test for a root with `|z| = 1`.
///
/// With `z = (1 + it) / (1 - it)`, the circle minus `z = -1` maps onto the
/// real `t` line, and `(1 - it)^n q(z) = U(t) + i V(t)`. A circle root is a
/// common real root of `U` and `V`.
pub fn has_root_on_unit_circle(q: &Polynomial) -> bool {
    let Some(n) = q.degree() else {
        return false;
    };
    if q.eval(&-Rational::one()).is_zero() {
        return true;
    }
    let plus: GaussPoly = (Polynomial::one(), Polynomial::x());
    let minus: GaussPoly = (Polynomial::one(), -Polynomial::x());
    let mut plus_pows = vec![(Polynomial::one(), Polynomial::zero())];
    let mut minus_pows = vec![(Polynomial::one(), Polynomial::zero())];
    for k in 1..=n {
        plus_pows.push(gauss_mul(&plus_pows[k - 1], &plus));
        minus_pows.push(gauss_mul(&minus_pows[k - 1], &minus));
    }
    let mut re = Polynomial::zero();
    let mut im = Polynomial::zero();
    for (k, a) in q.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = gauss_mul(&plus_pows[k], &minus_pows[n - k]);
        re = &re + &term.0.scale(a);
        im = &im + &term.1.scale(a);
    }
    let g = match re.gcd(&im) {
        Ok(g) => g,
        Err(_) => return true,
    };
    if g.degree() == Some(0) {
        return false;
    }
    count_real_roots(&g) > 0
}
