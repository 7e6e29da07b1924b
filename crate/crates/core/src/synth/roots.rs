//! Root gadgets: `1 / prod Phi_d`, `1 / (w - x)`, and `1 / (x^2 + b x + c)`.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::gadgets::{alternate_negate, contract, mk_const, mk_geometric, mul_by_poly, power, scale, Parts};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{cyclotomic_product, Polynomial};
use crate::error::{Error, Result};
use crate::mdp::{DegenerateMdp, Distribution};

pub const DEFAULT_GADGET_BOUND: usize = 200;

/// Exponents `k < l < m` and weights `alpha >= 0` summing to 1 such that
/// `x^2 + b x + c` divides `1 - alpha_1 x^k - alpha_2 x^l - alpha_3 x^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCertificate {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    #[serde(with = "rational::serde_string_vec")]
    pub alpha: Vec<Rational>,
}

impl GadgetCertificate {
    /// `1 - alpha_1 x^k - alpha_2 x^l - alpha_3 x^m`.
    pub fn cycle_denominator(&self) -> Polynomial {
        let mut coeffs = vec![Rational::zero(); self.m + 1];
        coeffs[0] = Rational::one();
        for (e, a) in [self.k, self.l, self.m].into_iter().zip(&self.alpha) {
            coeffs[e] -= a;
        }
        Polynomial::from_coeffs(coeffs)
    }

    /// Checks every invariant exactly against `x^2 + b x + c`.
    pub fn verify(&self, b: &Rational, c: &Rational) -> bool {
        let quad = quadratic(b, c);
        1 <= self.k
            && self.k < self.l
            && self.l < self.m
            && self.alpha.len() == 3
            && self.alpha.iter().all(|a| !a.is_negative())
            && self.alpha.iter().sum::<Rational>().is_one()
            && quad.divides(&self.cycle_denominator())
    }
}

fn quadratic(b: &Rational, c: &Rational) -> Polynomial {
    Polynomial::from_coeffs(vec![c.clone(), b.clone(), Rational::one()])
}

fn check_quadratic(b: &Rational, c: &Rational) -> Result<()> {
    if b * b >= rational::int(4) * c || c <= &Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "quadratic (b, c) = ({}, {}) needs b^2 < 4c and c > 1",
            rational::format_rational(b),
            rational::format_rational(c)
        )));
    }
    Ok(())
}

/// Solves the 3x3 system by Cramer's rule; `None` when singular.
fn solve3(a: [[&Rational; 3]; 3], rhs: [Rational; 3]) -> Option<[Rational; 3]> {
    let det3 = |m: [[&Rational; 3]; 3]| -> Rational {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(a);
    if d.is_zero() {
        return None;
    }
    let col = |j: usize| {
        let mut m = a;
        for (i, r) in rhs.iter().enumerate() {
            m[i][j] = r;
        }
        det3(m) / &d
    };
    Some([col(0), col(1), col(2)])
}

/// Lexicographic search over `1 <= k < l < m <= bound` for a certificate.
///
/// With `w` a root of the quadratic, `w^j = u_j + v_j w` exactly, and the
/// weights solve `sum alpha u = 1`, `sum alpha v = 0`, `sum alpha = 1`.
pub fn gadget_search(b: &Rational, c: &Rational, bound: usize) -> Result<GadgetCertificate> {
    check_quadratic(b, c)?;
    // powers[j] = (u_j, v_j); w^{j+1} = -c v_j + (u_j - b v_j) w
    let mut powers: Vec<(Rational, Rational)> = vec![(Rational::one(), Rational::zero())];
    for j in 0..bound {
        let (u, v) = &powers[j];
        powers.push((-(c * v), u - b * v));
    }
    let one = Rational::one();
    for k in 1..=bound {
        for l in k + 1..=bound {
            for m in l + 1..=bound {
                let (uk, vk) = &powers[k];
                let (ul, vl) = &powers[l];
                let (um, vm) = &powers[m];
                let Some(alpha) = solve3(
                    [[uk, ul, um], [vk, vl, vm], [&one, &one, &one]],
                    [Rational::one(), Rational::zero(), Rational::one()],
                ) else {
                    continue;
                };
                if alpha.iter().any(Signed::is_negative) {
                    continue;
                }
                let cert = GadgetCertificate {
                    k,
                    l,
                    m,
                    alpha: alpha.to_vec(),
                };
                if cert.verify(b, c) {
                    return Ok(cert);
                }
            }
        }
    }
    Err(Error::GadgetSearchExhausted { bound })
}

/// Cycle `s_1 -> ... -> s_m` with payoff 1 at `s_m`; from `s_m` the chain
/// returns after `e` steps with probability `alpha` for `e` in `(k, l, m)`.
/// Value `1 / (1 - alpha_1 x^k - alpha_2 x^l - alpha_3 x^m)` from `s_m`.
pub(crate) fn cycle_gadget(cert: &GadgetCertificate) -> DegenerateMdp {
    let m = cert.m;
    let mut p = Parts::default();
    for i in 1..=m {
        let (payoff, row) = if i < m {
            (Rational::zero(), Distribution::from([(i, Rational::one())]))
        } else {
            let mut row = Distribution::new();
            for (e, a) in [cert.k, cert.l, cert.m].into_iter().zip(&cert.alpha) {
                if !a.is_zero() {
                    // s_{m-e+1} is e - 1 steps before s_m
                    *row.entry(m - e).or_insert_with(Rational::zero) += a;
                }
            }
            (Rational::one(), row)
        };
        p.push(format!("cyc{i}"), payoff, row);
    }
    p.initial = Distribution::from([(m - 1, Rational::one())]);
    p.build()
}

/// Value `1 / (x^2 + b x + c)` together with the certificate used.
pub fn inv_quadratic_with_certificate(b: &Rational, c: &Rational, bound: usize) -> Result<(DegenerateMdp, GadgetCertificate)> {
    let cert = gadget_search(b, c, bound)?;
    let cofactor = cert
        .cycle_denominator()
        .exact_div(&quadratic(b, c))
        .expect("certificate divisibility was verified");
    Ok((mul_by_poly(&cycle_gadget(&cert), &cofactor), cert))
}

pub fn inv_quadratic(b: &Rational, c: &Rational, bound: usize) -> Result<DegenerateMdp> {
    inv_quadratic_with_certificate(b, c, bound).map(|(m, _)| m)
}

/// Value `1 / (w - x)` for `|w| > 1`.
pub fn inv_linear(w: &Rational) -> Result<DegenerateMdp> {
    if w.abs() <= Rational::one() {
        return Err(Error::InvalidParameter(format!("linear root {w} must satisfy |w| > 1")));
    }
    if w.is_positive() {
        let inv = w.recip();
        Ok(scale(&contract(&mk_geometric(), &inv)?, &inv))
    } else {
        let pos = inv_linear(&-w)?;
        Ok(scale(&alternate_negate(&pos), &-Rational::one()))
    }
}

/// Value `1 / prod_d Phi_d` for distinct indices `d >= 1`: the cofactor
/// `(1 - x^n) / prod Phi_d` applied to `1 / (1 - x^n)`, `n = lcm(d)`.
pub fn inv_cyclotomic(indices: &[usize]) -> Result<DegenerateMdp> {
    let distinct: BTreeSet<usize> = indices.iter().copied().collect();
    if distinct.len() != indices.len() || distinct.contains(&0) {
        return Err(Error::InvalidParameter(format!("cyclotomic indices {indices:?} must be distinct and positive")));
    }
    if indices.is_empty() {
        return Ok(mk_const(Rational::one()));
    }
    let n = indices.iter().fold(1usize, |acc, &d| acc.lcm(&d));
    let one_minus = -Polynomial::x_pow_minus_one(n);
    let cofactor = one_minus
        .exact_div(&cyclotomic_product(indices))
        .expect("Phi_d divides x^n - 1 for d | n");
    Ok(mul_by_poly(&power(&mk_geometric(), n)?, &cofactor))
}
