//! Independent oracles and seeded generators shared by the integration tests.
//!
//! The oracles never call the solver: values come from Gauss-Jordan
//! elimination over Q at a fixed rational discount, and series coefficients
//! from repeated vector-matrix products.

#![allow(dead_code)]

use mdpvf::algebra::rational::{int, rat};
use mdpvf::{Action, DegenerateMdp, Distribution, Mdp, Polynomial, Rational, RationalFunction};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n / d` with `1 <= d <= max_den` and `|n| <= max_abs * d`.
pub fn random_rational(r: &mut TestRng, max_den: i64, max_abs: i64) -> Rational {
    let d = r.gen_range(1..=max_den);
    rat(r.gen_range(-max_abs * d..=max_abs * d), d)
}

/// Strictly between 0 and 1 with denominator at most `max_den >= 2`.
pub fn random_unit_open(r: &mut TestRng, max_den: i64) -> Rational {
    let d = r.gen_range(2..=max_den);
    rat(r.gen_range(1..d), d)
}

/// Probability vector on `0..n` with a common denominator at most `max_den`.
pub fn random_distribution(r: &mut TestRng, n: usize, max_den: i64) -> Distribution {
    let d = r.gen_range(1..=max_den);
    let k = r.gen_range(1..=n.min(3).min(d as usize));
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() < k - 1 {
        let c = r.gen_range(1..d);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let mut out = Distribution::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain([d]) {
        let s = r.gen_range(0..n);
        *out.entry(s).or_insert_with(Rational::zero) += rat(c - prev, d);
        prev = c;
    }
    out
}

pub fn random_degenerate(r: &mut TestRng, max_states: usize, max_den: i64) -> DegenerateMdp {
    random_mdp(r, max_states, 1, max_den).try_into().expect("one action per state")
}

pub fn random_mdp(r: &mut TestRng, max_states: usize, max_actions: usize, max_den: i64) -> Mdp {
    let n = r.gen_range(1..=max_states);
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let actions = (0..n)
        .map(|_| {
            (0..r.gen_range(1..=max_actions))
                .map(|a| Action::new(format!("a{a}"), random_rational(r, max_den, 4), random_distribution(r, n, max_den)))
                .collect()
        })
        .collect();
    let m = Mdp {
        states,
        actions,
        initial: random_distribution(r, n, max_den),
    };
    assert!(m.validate().is_empty());
    m
}

/// `mu . (I - x Q)^{-1} r` by Gauss-Jordan elimination over Q.
pub fn dense_value(m: &DegenerateMdp, x: &Rational) -> Rational {
    let n = m.num_states();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = vec![Rational::zero(); n + 1];
            row[i] = Rational::one();
            for (j, p) in m.row(i) {
                row[*j] -= x * p;
            }
            row[n] = m.payoff(i).clone();
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero()).expect("I - xQ is nonsingular for x < 1");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    m.initial().iter().map(|(s, w)| w * &a[*s][n]).sum()
}

/// Sample discounts `k / (2 count + 1)` for `k = 0..count`, all in `[0, 1/2)`.
pub fn sample_points(count: usize) -> Vec<Rational> {
    let den = 2 * count as i64 + 1;
    (0..count as i64).map(|k| rat(k, den)).collect()
}

/// Two rational functions whose numerator and denominator degrees are at
/// most `d` agree everywhere iff they agree at `2 d + 1` points.
pub fn agrees_with_dense(f: &RationalFunction, m: &DegenerateMdp) -> bool {
    let d = m.num_states().max(f.numerator().degree().unwrap_or(0)).max(f.denominator().degree().unwrap_or(0));
    sample_points(2 * d + 1)
        .iter()
        .all(|x| f.eval(x).map_or(false, |v| v == dense_value(m, x)))
}

/// `x_t = mu Q^t r` for `t < terms`.
pub fn direct_series(m: &DegenerateMdp, terms: usize) -> Vec<Rational> {
    let n = m.num_states();
    let mut dist = vec![Rational::zero(); n];
    for (s, w) in m.initial() {
        dist[*s] = w.clone();
    }
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        out.push((0..n).map(|s| &dist[s] * m.payoff(s)).sum());
        let mut next = vec![Rational::zero(); n];
        for (s, w) in dist.iter().enumerate() {
            if !w.is_zero() {
                for (t, p) in m.row(s) {
                    next[*t] += w * p;
                }
            }
        }
        dist = next;
    }
    out
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

pub fn random_polynomial(r: &mut TestRng, max_degree: usize, max_den: i64) -> Polynomial {
    let d = r.gen_range(0..=max_degree);
    Polynomial::from_coeffs((0..=d).map(|_| random_rational(r, max_den, 3)).collect())
}

pub fn poly(c: &[i64]) -> Polynomial {
    Polynomial::from_ints(c)
}

pub fn one() -> Rational {
    int(1)
}

pub mod constructions {
    //! One randomized instance per construction: the synthesized MDP, its
    //! expected value as a transformation of the inputs' symbolic values, and
    //! a pointwise oracle built only from dense solves and polynomial
    //! evaluation.

    use super::*;
    use mdpvf::algebra::cyclotomic_product;
    use mdpvf::solver::degenerate_value_symbolic as value;
    use mdpvf::synth::{
        add, alternate_negate, contract, inv_cyclotomic, inv_linear, inv_quadratic, mk_const, mk_geometric, mul_by_poly,
        power, product_contract, scale, shift, DEFAULT_GADGET_BOUND,
    };
    use num_integer::Integer;

    pub const KINDS: [&str; 11] = [
        "const",
        "geometric",
        "scale",
        "alternate_negate",
        "shift",
        "contract",
        "add",
        "power",
        "product_contract",
        "mul_by_poly",
        "inv_cyclotomic/inv_quadratic/inv_linear",
    ];

    pub struct Instance {
        pub output: DegenerateMdp,
        pub expected: RationalFunction,
        pub pointwise: Box<dyn Fn(&Rational) -> Rational>,
    }

    fn outside_quadratic(r: &mut TestRng) -> (Rational, Rational) {
        loop {
            let c = random_rational(r, 16, 6).abs();
            let b = random_rational(r, 16, 4);
            if c > one() && &b * &b < int(4) * &c {
                return (b, c);
            }
        }
    }

    pub fn instance(kind: usize, r: &mut TestRng) -> Instance {
        let f = random_degenerate(r, 8, 16);
        let fv = value(&f);
        match kind {
            0 => {
                let a = random_rational(r, 16, 5);
                let a2 = a.clone();
                Instance {
                    output: mk_const(a.clone()),
                    expected: RationalFunction::constant(a),
                    pointwise: Box::new(move |_| a2.clone()),
                }
            }
            1 => Instance {
                output: mk_geometric(),
                expected: RationalFunction::new(one_poly(), poly(&[1, -1])).unwrap(),
                pointwise: Box::new(|x| (one() - x).recip()),
            },
            2 => {
                let a = random_rational(r, 16, 5);
                let (f2, a2) = (f.clone(), a.clone());
                Instance {
                    output: scale(&f, &a),
                    expected: fv.scale(&a),
                    pointwise: Box::new(move |x| &a2 * dense_value(&f2, x)),
                }
            }
            3 => Instance {
                output: alternate_negate(&f),
                expected: fv.compose_neg(),
                pointwise: Box::new(move |x| dense_value(&f, &-x)),
            },
            4 => Instance {
                output: shift(&f),
                expected: fv.mul_polynomial(&poly(&[0, 1])),
                pointwise: Box::new(move |x| x * dense_value(&f, x)),
            },
            5 => {
                let c = if r.gen_bool(0.1) { Rational::zero() } else { random_unit_open(r, 16) };
                let c2 = c.clone();
                Instance {
                    output: contract(&f, &c).unwrap(),
                    expected: fv.compose_scale(&c),
                    pointwise: Box::new(move |x| dense_value(&f, &(&c2 * x))),
                }
            }
            6 => {
                let g = random_degenerate(r, 8, 16);
                let expected = fv.add(&value(&g));
                let (f2, g2) = (f.clone(), g.clone());
                Instance {
                    output: add(&f, &g),
                    expected,
                    pointwise: Box::new(move |x| dense_value(&f2, x) + dense_value(&g2, x)),
                }
            }
            7 => {
                let n = r.gen_range(1..=4usize);
                Instance {
                    output: power(&f, n).unwrap(),
                    expected: fv.compose_pow(n),
                    pointwise: Box::new(move |x| dense_value(&f, &num_traits::pow(x.clone(), n))),
                }
            }
            8 => {
                let g = random_degenerate(r, 8, 16);
                let c = random_unit_open(r, 16);
                let expected = fv.mul(&value(&g).compose_scale(&c));
                let (f2, g2, c2) = (f.clone(), g.clone(), c.clone());
                Instance {
                    output: product_contract(&f, &g, &c).unwrap(),
                    expected,
                    pointwise: Box::new(move |x| dense_value(&f2, x) * dense_value(&g2, &(&c2 * x))),
                }
            }
            9 => {
                let p = random_polynomial(r, 4, 16);
                let (f2, p2) = (f.clone(), p.clone());
                Instance {
                    output: mul_by_poly(&f, &p),
                    expected: fv.mul_polynomial(&p),
                    pointwise: Box::new(move |x| p2.eval(x) * dense_value(&f2, x)),
                }
            }
            _ => {
                let q = match r.gen_range(0..3) {
                    0 => {
                        let mut idx: Vec<usize> = Vec::new();
                        for _ in 0..r.gen_range(0..=3) {
                            let d = r.gen_range(1..=12usize);
                            let l = idx.iter().fold(d, |a, &b| a.lcm(&b));
                            if !idx.contains(&d) && l <= 60 {
                                idx.push(d);
                            }
                        }
                        let q = cyclotomic_product(&idx);
                        return Instance {
                            output: inv_cyclotomic(&idx).unwrap(),
                            expected: RationalFunction::new(one_poly(), q.clone()).unwrap(),
                            pointwise: Box::new(move |x| q.eval(x).recip()),
                        };
                    }
                    1 => {
                        let (b, c) = outside_quadratic(r);
                        let q = Polynomial::from_coeffs(vec![c.clone(), b.clone(), one()]);
                        (inv_quadratic(&b, &c, DEFAULT_GADGET_BOUND).unwrap(), q)
                    }
                    _ => {
                        let w = loop {
                            let w = random_rational(r, 16, 5);
                            if w.abs() > one() {
                                break w;
                            }
                        };
                        // 1 / (w - x)
                        let q = Polynomial::from_coeffs(vec![w.clone(), -one()]);
                        (inv_linear(&w).unwrap(), q)
                    }
                };
                let (output, q) = q;
                Instance {
                    output,
                    expected: RationalFunction::new(one_poly(), q.clone()).unwrap(),
                    pointwise: Box::new(move |x| q.eval(x).recip()),
                }
            }
        }
    }

    fn one_poly() -> Polynomial {
        Polynomial::one()
    }
}
