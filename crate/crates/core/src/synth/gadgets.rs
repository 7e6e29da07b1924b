//! Closure constructions on degenerate MDPs. Each maps input value
//! functions to the stated transformation exactly.

use num_traits::{One, Signed, Zero};

use super::nonzero_terms;
use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::mdp::{fresh_name, DegenerateMdp, Distribution};

/// Mutable chain under construction.
#[derive(Default)]
pub(crate) struct Parts {
    pub names: Vec<String>,
    pub payoffs: Vec<Rational>,
    pub rows: Vec<Distribution>,
    pub initial: Distribution,
}

impl Parts {
    pub fn of(m: &DegenerateMdp) -> Parts {
        Parts {
            names: m.names().to_vec(),
            payoffs: m.payoffs(),
            rows: m.rows(),
            initial: m.initial().clone(),
        }
    }

    pub fn build(self) -> DegenerateMdp {
        DegenerateMdp::from_chain(self.names, self.payoffs, self.rows, self.initial)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn push(&mut self, name: String, payoff: Rational, row: Distribution) -> usize {
        self.names.push(name);
        self.payoffs.push(payoff);
        self.rows.push(row);
        self.names.len() - 1
    }

    /// Appends a renamed copy of `m` with payoffs multiplied by `factor`;
    /// returns the index offset of the copy.
    pub fn append(&mut self, m: &DegenerateMdp, prefix: &str, factor: &Rational) -> usize {
        let offset = self.len();
        for s in 0..m.num_states() {
            self.names.push(format!("{prefix}{}", m.names()[s]));
            self.payoffs.push(m.payoff(s) * factor);
            self.rows.push(shifted(m.row(s), offset));
        }
        offset
    }
}

pub(crate) fn shifted(d: &Distribution, offset: usize) -> Distribution {
    d.iter().map(|(&t, p)| (t + offset, p.clone())).collect()
}

fn accumulate(into: &mut Distribution, d: &Distribution, weight: &Rational, offset: usize) {
    for (&t, p) in d {
        let e = into.entry(t + offset).or_insert_with(Rational::zero);
        *e += weight * p;
    }
    into.retain(|_, p| !p.is_zero());
}

/// Value `a` at every discount factor.
pub fn mk_const(a: Rational) -> DegenerateMdp {
    DegenerateMdp::from_chain(
        vec!["const".into(), "sink".into()],
        vec![a, Rational::zero()],
        vec![Distribution::from([(1, Rational::one())]), Distribution::from([(1, Rational::one())])],
        Distribution::from([(0, Rational::one())]),
    )
}

/// Value `1 / (1 - x)`.
pub fn mk_geometric() -> DegenerateMdp {
    DegenerateMdp::from_chain(
        vec!["geo".into()],
        vec![Rational::one()],
        vec![Distribution::from([(0, Rational::one())])],
        Distribution::from([(0, Rational::one())]),
    )
}

/// Value `a f`.
pub fn scale(m: &DegenerateMdp, a: &Rational) -> DegenerateMdp {
    let mut p = Parts::of(m);
    for r in &mut p.payoffs {
        *r *= a;
    }
    p.build()
}

/// Value `f(-x)`: odd stages in the original copy, even stages in a negated copy.
pub fn alternate_negate(m: &DegenerateMdp) -> DegenerateMdp {
    let n = m.num_states();
    let mut p = Parts::default();
    for s in 0..n {
        p.push(format!("odd:{}", m.names()[s]), m.payoff(s).clone(), shifted(m.row(s), n));
    }
    for s in 0..n {
        p.push(format!("even:{}", m.names()[s]), -m.payoff(s), m.row(s).clone());
    }
    p.initial = m.initial().clone();
    p.build()
}

/// Value `x f(x)`: a zero-payoff start state moving according to `mu`.
pub fn shift(m: &DegenerateMdp) -> DegenerateMdp {
    let mut p = Parts::of(m);
    let name = fresh_name("shift", &p.names);
    let start = p.push(name, Rational::zero(), m.initial().clone());
    p.initial = Distribution::from([(start, Rational::one())]);
    p.build()
}

/// Value `f(c x)` for `c` in `[0, 1]`: every step is absorbed with probability `1 - c`.
pub fn contract(m: &DegenerateMdp, c: &Rational) -> Result<DegenerateMdp> {
    if c.is_negative() || c > &Rational::one() {
        return Err(Error::InvalidParameter(format!("contraction {c} outside [0, 1]")));
    }
    let mut p = Parts::of(m);
    let sink = p.len();
    let leak = Rational::one() - c;
    for row in &mut p.rows {
        let mut scaled: Distribution = row.iter().filter(|_| !c.is_zero()).map(|(&t, q)| (t, q * c)).collect();
        if !leak.is_zero() {
            scaled.insert(sink, leak.clone());
        }
        *row = scaled;
    }
    let name = fresh_name("absorb", &p.names);
    p.push(name, Rational::zero(), Distribution::from([(sink, Rational::one())]));
    Ok(p.build())
}

/// Value `f + g`: a fair coin picks the component, payoffs doubled.
pub fn add(mf: &DegenerateMdp, mg: &DegenerateMdp) -> DegenerateMdp {
    let two = Rational::from_integer(2.into());
    let half = Rational::new(1.into(), 2.into());
    let mut p = Parts::default();
    let of = p.append(mf, "f:", &two);
    let og = p.append(mg, "g:", &two);
    let mut initial = Distribution::new();
    accumulate(&mut initial, mf.initial(), &half, of);
    accumulate(&mut initial, mg.initial(), &half, og);
    p.initial = initial;
    p.build()
}

/// Value `f(x^n)`: each original stage is followed by `n - 1` silent stages.
pub fn power(m: &DegenerateMdp, n: usize) -> Result<DegenerateMdp> {
    if n == 0 {
        return Err(Error::InvalidParameter("power exponent must be at least 1".into()));
    }
    let k = m.num_states();
    // state (s, layer) has index layer * k + s, layers 0..n
    let mut p = Parts::default();
    for layer in 0..n {
        for s in 0..k {
            let payoff = if layer == 0 { m.payoff(s).clone() } else { Rational::zero() };
            let row = if layer + 1 < n {
                Distribution::from([((layer + 1) * k + s, Rational::one())])
            } else {
                m.row(s).clone()
            };
            p.push(format!("{}@{}", m.names()[s], layer + 1), payoff, row);
        }
    }
    p.initial = m.initial().clone();
    Ok(p.build())
}

/// Value `f(x) g(c x)` for `c` in `(0, 1)`.
///
/// The chain runs `M_g`; each step continues in `M_g` with probability `c`
/// and otherwise enters the copy of `M_f` attached to the current state of
/// `M_g`, at the stage-two distribution of `M_f`. That copy pays
/// `r_g(s_g) r_f(s_f)`, and the state of `M_g` pays the stage-one share
/// `(1 - c) r_g(s_g) E_mu_f[r_f]`. The raw value `(1 - c) f(x) g(c x)` is
/// rescaled by `1 / (1 - c)`.
pub fn product_contract(mf: &DegenerateMdp, mg: &DegenerateMdp, c: &Rational) -> Result<DegenerateMdp> {
    if !c.is_positive() || c >= &Rational::one() {
        return Err(Error::InvalidParameter(format!("product contraction {c} outside (0, 1)")));
    }
    let leak = Rational::one() - c;
    let ng = mg.num_states();
    let nf = mf.num_states();
    let first = mf.first_stage_payoff();
    let second = mf.second_stage();
    let copy = |sg: usize, sf: usize| ng + sg * nf + sf;

    let mut p = Parts::default();
    for sg in 0..ng {
        // stage-one share, already divided by (1 - c)
        let payoff = mg.payoff(sg) * &first;
        let mut row: Distribution = mg.row(sg).iter().map(|(&t, q)| (t, q * c)).collect();
        for (&sf, q) in &second {
            row.insert(copy(sg, sf), q * &leak);
        }
        p.push(format!("g:{}", mg.names()[sg]), payoff, row);
    }
    for sg in 0..ng {
        let factor = mg.payoff(sg) / &leak;
        for sf in 0..nf {
            let row = mf.row(sf).iter().map(|(&t, q)| (copy(sg, t), q.clone())).collect();
            p.push(format!("g:{}×f:{}", mg.names()[sg], mf.names()[sf]), mf.payoff(sf) * &factor, row);
        }
    }
    p.initial = mg.initial().clone();
    Ok(p.build())
}

/// Value `p(x) f(x)`: the sum over the terms `p_i x^i f`, with the shift
/// chains of equal sign sharing one delay line and one scaled copy of `f`.
pub fn mul_by_poly(m: &DegenerateMdp, poly: &Polynomial) -> DegenerateMdp {
    if poly.is_zero() {
        return mk_const(Rational::zero());
    }
    if poly.is_one() {
        return m.clone();
    }
    let total: Rational = nonzero_terms(poly).map(|(_, c)| c.abs()).sum();
    let mut p = Parts::default();
    let mut initial = Distribution::new();
    for (sign, label) in [(Rational::one(), "pos"), (-Rational::one(), "neg")] {
        let terms: Vec<(usize, Rational)> = nonzero_terms(poly)
            .filter(|(_, c)| c.is_positive() == sign.is_positive())
            .map(|(i, c)| (i, c.abs() / &total))
            .collect();
        let Some(&(longest, _)) = terms.iter().max_by_key(|(i, _)| *i) else {
            continue;
        };
        let offset = p.append(m, &format!("{label}:"), &(&sign * &total));
        // delay[j] is j steps from entering the copy
        let mut delay = vec![usize::MAX; longest + 1];
        for j in 1..=longest {
            let row = if j == 1 {
                shifted(m.initial(), offset)
            } else {
                Distribution::from([(delay[j - 1], Rational::one())])
            };
            delay[j] = p.push(format!("{label}-delay{j}"), Rational::zero(), row);
        }
        for (i, w) in terms {
            if i == 0 {
                accumulate(&mut initial, m.initial(), &w, offset);
            } else {
                *initial.entry(delay[i]).or_insert_with(Rational::zero) += w;
            }
        }
    }
    p.initial = initial;
    p.build()
}
