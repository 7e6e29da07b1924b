//! Sparse state elimination for `v = r + A v` with `A = lambda Q`.
//!
//! Eliminating state `s` substitutes `v_s = (r_s + sum_t A_st v_t) / (1 - A_ss)`
//! into its predecessors. A virtual root with edges `mu` and no payoff
//! collects `mu . v`; it has no predecessors, so it never acquires a
//! self-loop and is never eliminated.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{lambda_times, Chain};
use crate::algebra::{Rational, RationalFunction};
use crate::mdp::Distribution;

pub(crate) trait Scalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `o` is nonzero.
    fn div(&self, o: &Self) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <Rational as num_traits::One>::one()
    }
    fn is_zero(&self) -> bool {
        <Rational as num_traits::Zero>::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RationalFunction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RationalFunction::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFunction::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        RationalFunction::div(self, o).expect("nonzero divisor")
    }
}

/// States reachable from the initial support that can reach a nonzero
/// payoff, ascending. All other states contribute nothing to `mu . v`.
pub(crate) fn relevant_states(chain: &Chain<'_>) -> Vec<usize> {
    let n = chain.payoffs.len();
    let mut reach = vec![false; n];
    let mut queue: VecDeque<usize> = chain.initial.iter().filter(|(_, p)| !p.is_zero()).map(|(&s, _)| s).collect();
    for &s in &queue {
        reach[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for (&t, p) in chain.rows[s] {
            if !p.is_zero() && !reach[t] {
                reach[t] = true;
                queue.push_back(t);
            }
        }
    }
    let productive = productive_states(chain);
    (0..n).filter(|&s| reach[s] && productive[s]).collect()
}

/// `productive[s]` iff a nonzero payoff is reachable from `s`.
fn productive_states(chain: &Chain<'_>) -> Vec<bool> {
    let n = chain.payoffs.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in chain.rows.iter().enumerate() {
        for (&t, p) in row.iter() {
            if !p.is_zero() {
                preds[t].push(s);
            }
        }
    }
    let mut productive = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&s| !chain.payoffs[s].is_zero()).collect();
    for &s in &queue {
        productive[s] = true;
    }
    while let Some(t) = queue.pop_front() {
        for &s in &preds[t] {
            if !productive[s] {
                productive[s] = true;
                queue.push_back(s);
            }
        }
    }
    productive
}

/// Owned chain restricted to a state subset, indices renumbered.
pub(crate) struct SubChain {
    pub payoffs: Vec<Rational>,
    pub rows: Vec<Distribution>,
    pub initial: Distribution,
}

impl SubChain {
    /// Edges leaving `keep` are dropped; callers ensure their targets have
    /// value zero.
    pub fn restrict(chain: &Chain<'_>, keep: &[usize]) -> SubChain {
        let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let remap = |d: &Distribution| -> Distribution {
            d.iter()
                .filter_map(|(t, p)| index.get(t).map(|&i| (i, p.clone())))
                .collect()
        };
        SubChain {
            payoffs: keep.iter().map(|&s| chain.payoffs[s].clone()).collect(),
            rows: keep.iter().map(|&s| remap(chain.rows[s])).collect(),
            initial: remap(chain.initial),
        }
    }
}

struct Graph<S> {
    out: Vec<BTreeMap<usize, S>>,
    inc: Vec<BTreeSet<usize>>,
    r: Vec<S>,
}

/// Row of an eliminated state, already divided by `1 - A_ss`.
struct Record<S> {
    state: usize,
    r: S,
    out: BTreeMap<usize, S>,
}

impl<S: Scalar> Graph<S> {
    /// Nodes `0..nodes.len()` mirror `nodes`; node `nodes.len()` is the root.
    /// `payoff` embeds constants, so the root edges are `payoff(mu(s))`.
    fn build(chain: &Chain<'_>, nodes: &[usize], weight: &impl Fn(&Rational) -> S, payoff: &impl Fn(&Rational) -> S) -> Self {
        let k = nodes.len();
        let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut out: Vec<BTreeMap<usize, S>> = Vec::with_capacity(k + 1);
        let mut inc: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k + 1];
        let mut r = Vec::with_capacity(k + 1);
        for (i, &s) in nodes.iter().enumerate() {
            let mut row = BTreeMap::new();
            for (t, p) in chain.rows[s] {
                if let Some(&j) = index.get(t) {
                    if !p.is_zero() {
                        row.insert(j, weight(p));
                        inc[j].insert(i);
                    }
                }
            }
            out.push(row);
            r.push(payoff(chain.payoffs[s]));
        }
        let mut root = BTreeMap::new();
        for (t, p) in chain.initial {
            if let Some(&j) = index.get(t) {
                if !p.is_zero() {
                    root.insert(j, payoff(p));
                    inc[j].insert(k);
                }
            }
        }
        out.push(root);
        r.push(S::zero());
        Graph { out, inc, r }
    }

    fn eliminate(&mut self, s: usize) -> Record<S> {
        let mut row = std::mem::take(&mut self.out[s]);
        let mut rs = std::mem::replace(&mut self.r[s], S::zero());
        if let Some(a) = row.remove(&s) {
            self.inc[s].remove(&s);
            let d = S::one().sub(&a);
            rs = rs.div(&d);
            for w in row.values_mut() {
                *w = w.div(&d);
            }
        }
        for t in row.keys() {
            self.inc[*t].remove(&s);
        }
        let preds = std::mem::take(&mut self.inc[s]);
        for p in preds {
            let w = self.out[p].remove(&s).expect("edge recorded in both directions");
            if !rs.is_zero() {
                self.r[p] = self.r[p].add(&w.mul(&rs));
            }
            for (t, a) in &row {
                let add = w.mul(a);
                let entry = self.out[p].entry(*t).or_insert_with(S::zero);
                *entry = entry.add(&add);
                if entry.is_zero() {
                    self.out[p].remove(t);
                    self.inc[*t].remove(&p);
                } else {
                    self.inc[*t].insert(p);
                }
            }
        }
        Record { state: s, r: rs, out: row }
    }

    /// Eliminates every non-root node in Markowitz order.
    fn eliminate_all(&mut self, keep_records: bool) -> Vec<Record<S>> {
        let root = self.out.len() - 1;
        let mut alive: BTreeSet<usize> = (0..root).collect();
        let mut records = Vec::new();
        while !alive.is_empty() {
            let s = *alive
                .iter()
                .min_by_key(|&&s| (self.inc[s].len() * self.out[s].len(), s))
                .expect("nonempty");
            alive.remove(&s);
            let rec = self.eliminate(s);
            if keep_records {
                records.push(rec);
            }
        }
        records
    }
}

/// Root value `mu . v` for the chain restricted to `nodes`.
fn root_value<S: Scalar>(chain: &Chain<'_>, nodes: &[usize], weight: impl Fn(&Rational) -> S, payoff: impl Fn(&Rational) -> S) -> S {
    let mut g = Graph::build(chain, nodes, &weight, &payoff);
    g.eliminate_all(false);
    let root = nodes.len();
    debug_assert!(g.out[root].is_empty());
    g.r[root].clone()
}

pub(crate) fn symbolic_average(chain: &Chain<'_>, core: &[usize]) -> RationalFunction {
    root_value(
        chain,
        core,
        |q| RationalFunction::from_polynomial(lambda_times(q)),
        |r| RationalFunction::constant(r.clone()),
    )
}

/// Per-state values by elimination and back-substitution.
pub(crate) fn symbolic_all_states(chain: &Chain<'_>) -> Vec<RationalFunction> {
    let n = chain.payoffs.len();
    let productive = productive_states(chain);
    let nodes: Vec<usize> = (0..n).filter(|&s| productive[s]).collect();
    let weight = |q: &Rational| RationalFunction::from_polynomial(lambda_times(q));
    let payoff = |r: &Rational| RationalFunction::constant(r.clone());
    let mut g = Graph::build(chain, &nodes, &weight, &payoff);
    let records = g.eliminate_all(true);
    let mut local: Vec<RationalFunction> = vec![RationalFunction::zero(); nodes.len()];
    for rec in records.iter().rev() {
        let v = rec
            .out
            .iter()
            .fold(rec.r.clone(), |acc, (t, a)| acc.add(&a.mul(&local[*t])));
        local[rec.state] = v;
    }
    let mut out = vec![RationalFunction::zero(); n];
    for (i, &s) in nodes.iter().enumerate() {
        out[s] = local[i].clone();
    }
    out
}

/// Exact `mu . v` at a rational discount factor.
pub(crate) fn value_at(chain: &Chain<'_>, lambda: &Rational) -> Rational {
    let core = relevant_states(chain);
    if core.is_empty() {
        return <Rational as Scalar>::zero();
    }
    root_value(chain, &core, |q| q * lambda, |r| r.clone())
}
