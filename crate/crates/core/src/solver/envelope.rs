//! Upper envelope of the values of all pure stationary policies.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{chain_parts, chain_average_symbolic, Chain, Policy};
use crate::algebra::rational::{format_rational, int, rat};
use crate::algebra::{all_roots_outside_unit_disk, extract_cyclotomic_part, isolate_with_width, DiskVerdict, Polynomial, Rational, RationalFunction};
use crate::error::{Error, Result};
use crate::mdp::Mdp;

pub const DEFAULT_POLICY_CAP: usize = 4096;

/// Exact admissibility of a denominator: unit roots simple, every other root
/// strictly outside the unit disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub verdict: String,
    /// Indices `d` of the cyclotomic factors `Phi_d`.
    pub cyclotomic: Vec<usize>,
    pub multiplicity_violation: bool,
    /// Outside-disk verdict on the denominator with its cyclotomic part removed.
    pub remainder: DiskVerdict,
}

pub fn admissibility(q: &Polynomial) -> Result<Admissibility> {
    let part = extract_cyclotomic_part(q)?;
    let remainder = all_roots_outside_unit_disk(&part.remainder)?;
    let (admissible, verdict) = match (part.multiplicity_violation, remainder) {
        (true, _) => (false, "inadmissible: repeated unit root"),
        (false, DiskVerdict::Yes) => (true, "admissible"),
        (false, DiskVerdict::No) => (false, "inadmissible: root inside the unit disk"),
        (false, DiskVerdict::Boundary) => (false, "inadmissible: root on the unit circle that is not a unit root"),
    };
    Ok(Admissibility {
        admissible,
        verdict: verdict.to_string(),
        cyclotomic: part.indices,
        multiplicity_violation: part.multiplicity_violation,
        remainder,
    })
}

/// One distinct value function among the pure stationary policies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch {
    #[serde(skip)]
    pub policy: Policy,
    /// First policy (in enumeration order) attaining this value.
    #[serde(rename = "policy")]
    pub named_policy: BTreeMap<String, String>,
    /// Number of policies sharing this value.
    pub policies: usize,
    pub value: RationalFunction,
    pub admissibility: Admissibility,
}

/// The argmax branch changes from `from` to `to` at the unique switch inside
/// `[lo, hi]`; `hi - lo < 10^-12`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switchpoint {
    pub lo: Rational,
    pub hi: Rational,
    pub from: usize,
    pub to: usize,
}

impl Switchpoint {
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl Serialize for Switchpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Switchpoint", 3)?;
        st.serialize_field("interval", &[format_rational(&self.lo), format_rational(&self.hi)])?;
        st.serialize_field("from", &self.from)?;
        st.serialize_field("to", &self.to)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub policies_enumerated: usize,
    pub branches: Vec<Branch>,
    pub switchpoints: Vec<Switchpoint>,
    /// Every branch admissible.
    pub admissible: bool,
}

impl EnvelopeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// `max_i f_i(lambda)` over the branches.
    pub fn max_at(&self, lambda: &Rational) -> Rational {
        self.branches
            .iter()
            .map(|b| b.value.eval(lambda).expect("no poles in [0, 1)"))
            .max()
            .expect("at least one branch")
    }
}

/// Enumerates every pure stationary policy, deduplicates their values, checks
/// admissibility, and locates where the maximizing branch changes on `[0, 1)`.
pub fn policy_envelope(m: &Mdp, cap: usize) -> Result<EnvelopeReport> {
    m.ensure_valid()?;
    let count = m.policy_count();
    if count > cap as u128 {
        let count = if count == u128::MAX { "more than 2^128".to_string() } else { count.to_string() };
        return Err(Error::PolicyCap { count, cap });
    }
    let mut index: HashMap<RationalFunction, usize> = HashMap::new();
    let mut branches: Vec<Branch> = Vec::new();
    let mut enumerated = 0;
    for policy in Policy::enumerate(m) {
        enumerated += 1;
        let (payoffs, rows) = chain_parts(m, &policy);
        let value = chain_average_symbolic(Chain {
            payoffs: &payoffs,
            rows: &rows,
            initial: &m.initial,
        });
        if let Some(&i) = index.get(&value) {
            branches[i].policies += 1;
            continue;
        }
        index.insert(value.clone(), branches.len());
        let admissibility = admissibility(value.denominator())?;
        branches.push(Branch {
            named_policy: policy.named(m),
            policy,
            policies: 1,
            value,
            admissibility,
        });
    }
    let values: Vec<RationalFunction> = branches.iter().map(|b| b.value.clone()).collect();
    let switchpoints = switchpoints(&values);
    Ok(EnvelopeReport {
        policies_enumerated: enumerated,
        admissible: branches.iter().all(|b| b.admissibility.admissible),
        branches,
        switchpoints,
    })
}

#[derive(Clone)]
struct Candidate {
    lo: Rational,
    hi: Rational,
    pair: usize,
}

struct Cluster {
    lo: Rational,
    hi: Rational,
    members: Vec<Candidate>,
}

fn coarse_width() -> Rational {
    rat(1, 1024)
}

/// Roots of `q` in `[lo, hi]`, or `[lo, hi)` when `hi = 1`.
fn isolate_closed(q: &Polynomial, lo: &Rational, hi: &Rational, width: &Rational) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = if lo < hi {
        isolate_with_width(q, lo, hi, width).into_iter().map(|iv| (iv.lo, iv.hi)).collect()
    } else {
        Vec::new()
    };
    if !hi.is_one() && q.eval(hi).is_zero() && out.last().map_or(true, |l| &l.0 != hi) {
        out.push((hi.clone(), hi.clone()));
    }
    out
}

fn clusters(mut cands: Vec<Candidate>) -> Vec<Cluster> {
    cands.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    let mut out: Vec<Cluster> = Vec::new();
    for c in cands {
        match out.last_mut() {
            Some(cl) if c.lo <= cl.hi => {
                if c.hi > cl.hi {
                    cl.hi = c.hi.clone();
                }
                cl.members.push(c);
            }
            _ => out.push(Cluster {
                lo: c.lo.clone(),
                hi: c.hi.clone(),
                members: vec![c],
            }),
        }
    }
    out
}

fn argmax_at(values: &[RationalFunction], x: &Rational) -> usize {
    let evals: Vec<Rational> = values.iter().map(|f| f.eval(x).expect("no poles in [0, 1)")).collect();
    (0..values.len()).max_by(|&i, &j| evals[i].cmp(&evals[j]).then(j.cmp(&i))).expect("nonempty")
}

/// A point in `(x, 1)` beyond every root in `[x, 1)` of the given polynomials.
fn right_of(polys: &[&Polynomial], x: &Rational) -> Rational {
    let one = Rational::one();
    let mut t = (x + &one) / int(2);
    while polys.iter().any(|p| p.eval(&t).is_zero() || !isolate_with_width(p, &t, &one, &one).is_empty()) {
        t = (&t + &one) / int(2);
    }
    t
}

/// Isolating intervals on `[0, 1)` where the argmax over `values` changes.
/// `values` are pairwise distinct.
pub(crate) fn switchpoints(values: &[RationalFunction]) -> Vec<Switchpoint> {
    let k = values.len();
    if k < 2 {
        return Vec::new();
    }
    let mut pairs = Vec::new();
    let mut diffs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let d = &(values[i].numerator() * values[j].denominator()) - &(values[j].numerator() * values[i].denominator());
            debug_assert!(!d.is_zero(), "branches are deduplicated");
            pairs.push((i, j));
            diffs.push(d);
        }
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let coarse: Vec<Candidate> = diffs
        .iter()
        .enumerate()
        .flat_map(|(pair, d)| {
            isolate_with_width(d, &zero, &one, &coarse_width())
                .into_iter()
                .map(move |iv| Candidate { lo: iv.lo, hi: iv.hi, pair })
        })
        .collect();
    let coarse = clusters(coarse);

    let mut out = Vec::new();
    let mut left: Option<usize> = if coarse.first().map_or(true, |c| c.lo > zero || diffs.iter().all(|d| !d.eval(&zero).is_zero())) {
        let x = coarse.first().map_or(zero.clone(), |c| if c.lo > zero { &c.lo / int(2) } else { zero.clone() });
        Some(argmax_at(values, &x))
    } else {
        None
    };
    for (ci, c) in coarse.iter().enumerate() {
        let member_polys: Vec<&Polynomial> = c.members.iter().map(|m| &diffs[m.pair]).collect();
        let right_point = match coarse.get(ci + 1) {
            Some(next) => (&c.hi + &next.lo) / int(2),
            None if c.hi < one => (&c.hi + &one) / int(2),
            None => right_of(&member_polys, &c.lo),
        };
        let right = argmax_at(values, &right_point);
        let touches_leader = left.map_or(true, |l| c.members.iter().any(|m| pairs[m.pair].0 == l || pairs[m.pair].1 == l));
        if touches_leader {
            refine_cluster(values, &diffs, c, left, &right_point, &mut out);
        }
        left = Some(right);
    }
    out
}

/// Re-isolates a coarse cluster's roots finely and reports argmax changes.
fn refine_cluster(
    values: &[RationalFunction],
    diffs: &[Polynomial],
    c: &Cluster,
    left: Option<usize>,
    right_point: &Rational,
    out: &mut Vec<Switchpoint>,
) {
    let mut involved: Vec<usize> = c.members.iter().map(|m| m.pair).collect();
    involved.sort_unstable();
    involved.dedup();
    // fine hulls stay below 10^-12 even if every fine interval overlaps
    let width = rat(1, 1_000_000_000_000) / int(c.members.len() as i64 + 1);
    let fine: Vec<Candidate> = involved
        .iter()
        .flat_map(|&pair| {
            isolate_closed(&diffs[pair], &c.lo, &c.hi, &width)
                .into_iter()
                .map(move |(lo, hi)| Candidate { lo, hi, pair })
        })
        .collect();
    let fine = clusters(fine);
    let mut before = left;
    for (fi, f) in fine.iter().enumerate() {
        let after = match fine.get(fi + 1) {
            Some(next) => argmax_at(values, &((&f.hi + &next.lo) / int(2))),
            None => argmax_at(values, right_point),
        };
        if let Some(b) = before {
            if b != after {
                out.push(Switchpoint {
                    lo: f.lo.clone(),
                    hi: f.hi.clone(),
                    from: b,
                    to: after,
                });
            }
        }
        before = Some(after);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::to_f64;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        let q = &(&Polynomial::from_ints(&[1, 1]) * &Polynomial::from_ints(&[2, -1])) * &Polynomial::from_ints(&[4, 0, 1]);
        let a = admissibility(&q).unwrap();
        assert!(a.admissible);
        assert_eq!(a.cyclotomic, vec![2]);
        assert!(!admissibility(&Polynomial::from_ints(&[1, 2, 1])).unwrap().admissible);
        let inside = Polynomial::from_coeffs(vec![rat(-1, 2), int(1)]);
        assert_eq!(admissibility(&inside).unwrap().remainder, DiskVerdict::No);
    }

    #[test]
    fn rational_switchpoint() {
        let sp = switchpoints(&[rf(&[2], &[1]), rf(&[1], &[1, -1])]);
        assert_eq!(sp.len(), 1);
        assert!(sp[0].contains(&rat(1, 2)));
        assert_eq!((sp[0].from, sp[0].to), (0, 1));
    }

    #[test]
    fn irrational_switchpoint() {
        // lambda/(1-lambda) vs 1/(2-lambda): crossing at (3 - sqrt 5)/2
        let sp = switchpoints(&[rf(&[0, 1], &[1, -1]), rf(&[1], &[2, -1])]);
        assert_eq!(sp.len(), 1);
        let r = (3.0 - 5f64.sqrt()) / 2.0;
        assert!(to_f64(&sp[0].lo) <= r && r <= to_f64(&sp[0].hi));
        assert!(sp[0].hi.clone() - sp[0].lo.clone() < rat(1, 1_000_000_000_000));
        assert_eq!((sp[0].from, sp[0].to), (1, 0));
    }

    #[test]
    fn dominated_branch_has_no_switch() {
        // 3 > 1/(2-lambda) on [0, 1), and they cross only at lambda = 5/3
        assert!(switchpoints(&[rf(&[3], &[1]), rf(&[1], &[2, -1])]).is_empty());
    }

    #[test]
    fn crossing_not_on_envelope_is_ignored() {
        // branches 0 and 1 cross at 1/2 below branch 2 = 10
        let sp = switchpoints(&[rf(&[2], &[1]), rf(&[0, 4], &[1]), rf(&[10], &[1])]);
        assert!(sp.is_empty());
    }

    #[test]
    fn three_way_envelope() {
        // 1, then 2 lambda + 1/2 from lambda = 1/4, then 4 lambda - 1/2 from 1/2
        let f0 = rf(&[1], &[1]);
        let f1 = RationalFunction::from_polynomial(Polynomial::from_coeffs(vec![rat(1, 2), int(2)]));
        let f2 = RationalFunction::from_polynomial(Polynomial::from_coeffs(vec![rat(-1, 2), int(4)]));
        let sp = switchpoints(&[f0, f1, f2]);
        assert_eq!(sp.len(), 2);
        assert!(sp[0].contains(&rat(1, 4)) && (sp[0].from, sp[0].to) == (0, 1));
        assert!(sp[1].contains(&rat(1, 2)) && (sp[1].from, sp[1].to) == (1, 2));
    }
}
