//! Exact real-root isolation with Sturm sequences and bisection.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::polynomial::Polynomial;
use super::rational::{self, Rational};

/// Closed interval `[lo, hi]` with rational endpoints containing exactly one
/// real root. A point interval means the root is `lo` itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootInterval {
    #[serde(with = "rational::serde_string")]
    pub lo: Rational,
    #[serde(with = "rational::serde_string")]
    pub hi: Rational,
}

impl RootInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Maximum interval width produced by [`sturm_isolate`]: `10^-12`.
pub fn isolation_width() -> Rational {
    rational::rat(1, 1_000_000_000_000)
}

struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    /// Chain of the squarefree part of `q`; `None` for constants.
    fn new(q: &Polynomial) -> Option<Self> {
        q.degree().filter(|&d| d >= 1)?;
        let g = q.gcd(&q.derivative()).ok()?;
        let p0 = q.exact_div(&g).expect("gcd divides").monic();
        let mut chain = vec![p0.clone(), p0.derivative()];
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]).expect("nonzero chain element");
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        Some(SturmChain { chain })
    }

    fn base(&self) -> &Polynomial {
        &self.chain[0]
    }

    fn variations_at(&self, x: &Rational) -> usize {
        count_variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    /// Variations at `+inf` (`positive = true`) or `-inf`.
    fn variations_at_infinity(&self, positive: bool) -> usize {
        count_variations(self.chain.iter().map(|p| {
            let s = sign(p.leading().expect("nonzero"));
            if positive || p.degree().unwrap_or(0) % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    fn count_in(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }
}

fn sign(x: &Rational) -> i8 {
    match x.cmp(&Rational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct real roots of `q`.
pub fn count_real_roots(q: &Polynomial) -> usize {
    match SturmChain::new(q) {
        Some(c) => c.variations_at_infinity(false) - c.variations_at_infinity(true),
        None => 0,
    }
}

/// Isolates every distinct real root of `q` in `[lo, hi)`.
///
/// Intervals are disjoint, sorted, narrower than [`isolation_width`], and each
/// contains exactly one root. Roots hit exactly by a bisection point are
/// returned as point intervals.
pub fn sturm_isolate(q: &Polynomial, lo: &Rational, hi: &Rational) -> Vec<RootInterval> {
    isolate_with_width(q, lo, hi, &isolation_width())
}

/// [`sturm_isolate`] with a caller-chosen maximum width (must be positive).
pub fn isolate_with_width(q: &Polynomial, lo: &Rational, hi: &Rational, width: &Rational) -> Vec<RootInterval> {
    debug_assert!(width.is_positive());
    let mut out = Vec::new();
    if lo >= hi {
        return out;
    }
    let Some(chain) = SturmChain::new(q) else {
        return out;
    };
    let p = chain.base();
    if p.eval(lo).is_zero() {
        out.push(RootInterval { lo: lo.clone(), hi: lo.clone() });
    }
    let at_hi = usize::from(p.eval(hi).is_zero());
    let inside = chain.count_in(lo, hi) - at_hi;
    bisect(&chain, lo.clone(), hi.clone(), inside, width, &mut out);
    out
}

/// Isolates the `count` roots strictly inside `(a, b)`.
fn bisect(chain: &SturmChain, a: Rational, b: Rational, count: usize, width: &Rational, out: &mut Vec<RootInterval>) {
    if count == 0 {
        return;
    }
    if count == 1 && &(&b - &a) < width {
        out.push(RootInterval { lo: a, hi: b });
        return;
    }
    let mid = (&a + &b) / rational::int(2);
    let mid_root = usize::from(chain.base().eval(&mid).is_zero());
    let left = chain.count_in(&a, &mid) - mid_root;
    let right = count - left - mid_root;
    bisect(chain, a, mid.clone(), left, width, out);
    if mid_root == 1 {
        out.push(RootInterval { lo: mid.clone(), hi: mid.clone() });
    }
    bisect(chain, mid, b, right, width, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn linear_root() {
        let iv = sturm_isolate(&p(&[-1, 2]), &int(0), &int(1));
        assert_eq!(iv.len(), 1);
        assert!(iv[0].contains(&rat(1, 2)));
        assert!(iv[0].width() < isolation_width());
    }

    #[test]
    fn no_real_roots() {
        assert!(sturm_isolate(&p(&[1, 0, 1]), &int(0), &int(1)).is_empty());
        assert_eq!(count_real_roots(&p(&[1, 0, 1])), 0);
    }

    #[test]
    fn two_roots_sorted() {
        let q = &p(&[-1, 2]) * &p(&[-1, 3]);
        let iv = sturm_isolate(&q, &int(0), &int(1));
        assert_eq!(iv.len(), 2);
        assert!(iv[0].contains(&rat(1, 3)));
        assert!(iv[1].contains(&rat(1, 2)));
        assert!(iv.iter().all(|i| i.width() < isolation_width()));
    }

    #[test]
    fn endpoints() {
        // roots 0 and 1 on [0, 1): 0 kept, 1 excluded
        let iv = sturm_isolate(&p(&[0, -1, 1]), &int(0), &int(1));
        assert_eq!(iv, vec![RootInterval { lo: int(0), hi: int(0) }]);
    }

    #[test]
    fn repeated_and_irrational_roots() {
        // (x - 1/4)^2 (x^2 - 1/2): distinct roots 1/4 and 1/sqrt(2) in [0, 1)
        let a = Polynomial::from_coeffs(vec![rat(-1, 4), int(1)]);
        let q = &(&a * &a) * &Polynomial::from_coeffs(vec![rat(-1, 2), int(0), int(1)]);
        let iv = sturm_isolate(&q, &int(0), &int(1));
        assert_eq!(iv.len(), 2);
        assert!(iv[0].contains(&rat(1, 4)));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(rational::to_f64(&iv[1].lo) <= s && s <= rational::to_f64(&iv[1].hi));
        assert_eq!(count_real_roots(&q), 3);
    }
}
