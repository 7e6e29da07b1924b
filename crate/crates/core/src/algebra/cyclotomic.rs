//! Cyclotomic polynomials and exact extraction of the unit-root part of a
//! polynomial.

use std::collections::BTreeMap;

use serde::Serialize;

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

pub fn euler_phi(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn proper_divisors(d: usize) -> impl Iterator<Item = usize> {
    (1..d).filter(move |e| d % e == 0)
}

/// The `d`-th cyclotomic polynomial, by dividing `x^d - 1` by `Phi_e` for
/// every proper divisor `e` of `d`.
pub fn cyclotomic(d: usize) -> Polynomial {
    assert!(d >= 1, "cyclotomic index must be positive");
    let mut cache = BTreeMap::new();
    cyclotomic_cached(d, &mut cache)
}

fn cyclotomic_cached(d: usize, cache: &mut BTreeMap<usize, Polynomial>) -> Polynomial {
    if let Some(p) = cache.get(&d) {
        return p.clone();
    }
    let mut p = Polynomial::x_pow_minus_one(d);
    for e in proper_divisors(d).collect::<Vec<_>>() {
        let phi_e = cyclotomic_cached(e, cache);
        p = p.exact_div(&phi_e).expect("Phi_e divides x^d - 1 for e | d");
    }
    cache.insert(d, p.clone());
    p
}

/// Product of `Phi_d` over the given indices.
pub fn cyclotomic_product(indices: &[usize]) -> Polynomial {
    let mut cache = BTreeMap::new();
    indices
        .iter()
        .fold(Polynomial::one(), |acc, &d| &acc * &cyclotomic_cached(d, &mut cache))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclotomicPart {
    /// Distinct indices `d` with `Phi_d | q`, ascending.
    pub indices: Vec<usize>,
    /// `q / prod Phi_d`, one copy of each factor removed.
    pub remainder: Polynomial,
    /// Set when some `Phi_d` divides `q` more than once; the extra copies stay
    /// in `remainder`.
    pub multiplicity_violation: bool,
}

/// Trial-divides `q` by every `Phi_d` with `phi(d) <= deg q`.
///
/// Since `phi(d) >= sqrt(d / 2)`, it is enough to scan `d <= 2 deg(q)^2`.
/// The identity `q = remainder * prod Phi_d` holds exactly.
pub fn extract_cyclotomic_part(q: &Polynomial) -> Result<CyclotomicPart> {
    let deg = q.degree().ok_or(Error::ZeroPolynomial)?;
    let mut cache = BTreeMap::new();
    let mut remainder = q.clone();
    let mut indices = Vec::new();
    let mut multiplicity_violation = false;
    let limit = 2 * deg * deg;
    for d in 1..=limit {
        let rem_deg = remainder.degree().unwrap_or(0);
        let phi = euler_phi(d);
        if phi > deg {
            continue;
        }
        if phi > rem_deg {
            continue;
        }
        let phi_d = cyclotomic_cached(d, &mut cache);
        if let Some(quot) = remainder.exact_div(&phi_d) {
            indices.push(d);
            if phi_d.divides(&quot) {
                multiplicity_violation = true;
            }
            remainder = quot;
        }
    }
    Ok(CyclotomicPart {
        indices,
        remainder,
        multiplicity_violation,
    })
}
