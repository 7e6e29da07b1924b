//! Polynomial gcd over Q through integer arithmetic.
//!
//! Inputs are cleared to primitive integer polynomials. A gcd of degree 0
//! modulo a prime that divides neither leading coefficient proves the gcd
//! over Q is 1, which settles most calls without big-number work; the rest
//! run a primitive pseudo-remainder sequence.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::polynomial::Polynomial;
use super::rational::Rational;

const PRIMES: [u64; 3] = [(1 << 61) - 1, 4_611_686_018_427_387_847, 4_294_967_291];

/// Scales `p != 0` to integer coefficients with content 1 and a positive
/// leading coefficient.
pub(crate) fn primitive_integer(p: &Polynomial) -> Vec<BigInt> {
    let den = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| c.numer() * (&den / c.denom())).collect();
    primitive(ints)
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let content = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let negative = v.last().is_some_and(|c| c.sign() == Sign::Minus);
    if !content.is_one() || negative {
        let d = if negative { -content } else { content };
        for c in v.iter_mut() {
            *c = &*c / &d;
        }
    }
    v
}

fn reduce(v: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = v.iter().map(|c| c.mod_floor(&pb).to_u64().expect("reduced below p")).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Degree of `gcd(a, b)` over `Z/p`; both nonzero.
fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonempty"), p);
        let db = b.len() - 1;
        while a.len() > db {
            let k = a.len() - 1 - db;
            let c = mul_mod(*a.last().expect("nonempty"), inv, p);
            for (j, bj) in b.iter().enumerate() {
                let t = mul_mod(c, *bj, p);
                a[k + j] = (a[k + j] + p - t) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// Pseudo-remainder of `a` by `b` over Z.
fn pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let lr = r.last().expect("nonempty").clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &lr * bj;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// Monic gcd of two nonzero polynomials.
pub(crate) fn gcd_nonzero(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let (da, db) = (a.degree().expect("nonzero"), b.degree().expect("nonzero"));
    if da == 0 || db == 0 {
        return Polynomial::one();
    }
    let (ia, ib) = (primitive_integer(a), primitive_integer(b));
    for p in PRIMES {
        let (ra, rb) = (reduce(&ia, p), reduce(&ib, p));
        if ra.len() == ia.len() && rb.len() == ib.len() {
            if gcd_degree_mod(ra, rb, p) == 0 {
                return Polynomial::one();
            }
            break;
        }
    }
    let (mut x, mut y) = if da >= db { (ia, ib) } else { (ib, ia) };
    while !y.is_empty() {
        let r = pseudo_remainder(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { primitive(r) };
    }
    let lead = Rational::from_integer(x.last().expect("nonzero gcd").clone());
    Polynomial::from_coeffs(x.into_iter().map(|c| Rational::from_integer(c) / &lead).collect())
}
