//! Discounted values of MDPs: exact rational functions for fixed policies,
//! exact values at rational discount factors, value iteration, and the
//! envelope of all pure stationary policies.
//!
//! A fixed policy turns the MDP into a chain with payoff vector `r` and
//! transition matrix `Q`; its value is `v = (I - lambda Q)^-1 r` and the
//! value from the initial distribution is `mu . v`.

mod bareiss;
mod elimination;
mod envelope;
mod iteration;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{Polynomial, Rational, RationalFunction};
use crate::error::{Error, Result};
use crate::mdp::{DegenerateMdp, Distribution, Mdp};

pub use envelope::{admissibility, policy_envelope, Admissibility, Branch, EnvelopeReport, Switchpoint, DEFAULT_POLICY_CAP};
pub use iteration::{iteration_count, value_iteration, ValueIteration};

/// Chains up to this many (reachable, productive) states are solved by
/// Bareiss elimination on the polynomial matrix; larger ones by sparse
/// state elimination over the rational function field.
pub const BAREISS_MAX_STATES: usize = 12;

/// Pure stationary policy: `choice[s]` indexes into the actions of state `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Policy {
    pub choice: Vec<usize>,
}

impl Policy {
    pub fn new(choice: Vec<usize>) -> Self {
        Policy { choice }
    }

    /// The unique policy of a degenerate MDP.
    pub fn trivial(m: &Mdp) -> Self {
        Policy {
            choice: vec![0; m.num_states()],
        }
    }

    pub fn check(&self, m: &Mdp) -> Result<()> {
        if self.choice.len() != m.num_states() {
            return Err(Error::InvalidPolicy(format!(
                "policy covers {} states, MDP has {}",
                self.choice.len(),
                m.num_states()
            )));
        }
        for (s, (&a, acts)) in self.choice.iter().zip(&m.actions).enumerate() {
            if a >= acts.len() {
                return Err(Error::InvalidPolicy(format!(
                    "action index {a} out of range at state {:?} ({} actions)",
                    m.states[s],
                    acts.len()
                )));
            }
        }
        Ok(())
    }

    /// `{state name: action name}`.
    pub fn named(&self, m: &Mdp) -> BTreeMap<String, String> {
        self.choice
            .iter()
            .enumerate()
            .map(|(s, &a)| (m.states[s].clone(), m.actions[s][a].name.clone()))
            .collect()
    }

    /// Every pure stationary policy of `m` in odometer order (state 0 fastest).
    pub fn enumerate(m: &Mdp) -> impl Iterator<Item = Policy> + '_ {
        let sizes: Vec<usize> = m.actions.iter().map(Vec::len).collect();
        let empty = sizes.contains(&0);
        let mut next = (!empty).then(|| vec![0usize; sizes.len()]);
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.clone();
            for (i, &k) in sizes.iter().enumerate() {
                succ[i] += 1;
                if succ[i] < k {
                    next = Some(succ);
                    break;
                }
                succ[i] = 0;
            }
            Some(Policy { choice: cur })
        })
    }
}

/// Symbolic value of a fixed policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyValue {
    pub per_state: Vec<RationalFunction>,
    /// `sum_s mu(s) v_s`.
    pub average: RationalFunction,
}

/// Borrowed Markov reward chain induced by a policy.
#[derive(Clone, Copy)]
pub(crate) struct Chain<'a> {
    pub payoffs: &'a [&'a Rational],
    pub rows: &'a [&'a Distribution],
    pub initial: &'a Distribution,
}

fn chain_parts<'a>(m: &'a Mdp, p: &Policy) -> (Vec<&'a Rational>, Vec<&'a Distribution>) {
    let payoffs = p.choice.iter().enumerate().map(|(s, &a)| &m.actions[s][a].payoff).collect();
    let rows = p.choice.iter().enumerate().map(|(s, &a)| &m.actions[s][a].transition).collect();
    (payoffs, rows)
}

fn checked(m: &Mdp, p: &Policy) -> Result<()> {
    m.ensure_valid()?;
    p.check(m)
}

/// Solves `(I - lambda Q_p) v = r_p` exactly over the rational functions.
pub fn stationary_value_symbolic(m: &Mdp, p: &Policy) -> Result<PolicyValue> {
    checked(m, p)?;
    let (payoffs, rows) = chain_parts(m, p);
    let chain = Chain {
        payoffs: &payoffs,
        rows: &rows,
        initial: &m.initial,
    };
    let per_state = if m.num_states() <= BAREISS_MAX_STATES {
        bareiss::solve(&chain)
    } else {
        elimination::symbolic_all_states(&chain)
    };
    let average = average_of(&per_state, &m.initial);
    Ok(PolicyValue { per_state, average })
}

fn average_of(per_state: &[RationalFunction], mu: &Distribution) -> RationalFunction {
    mu.iter()
        .fold(RationalFunction::zero(), |acc, (&s, w)| acc.add(&per_state[s].scale(w)))
}

/// `gamma(mu, p)` as a reduced rational function. Only the states reachable
/// from the initial support and able to reach a nonzero payoff are solved.
pub fn policy_value_symbolic(m: &Mdp, p: &Policy) -> Result<RationalFunction> {
    checked(m, p)?;
    let (payoffs, rows) = chain_parts(m, p);
    Ok(chain_average_symbolic(Chain {
        payoffs: &payoffs,
        rows: &rows,
        initial: &m.initial,
    }))
}

pub(crate) fn chain_average_symbolic(chain: Chain<'_>) -> RationalFunction {
    let core = elimination::relevant_states(&chain);
    if core.is_empty() {
        return RationalFunction::zero();
    }
    if core.len() <= BAREISS_MAX_STATES {
        let sub = elimination::SubChain::restrict(&chain, &core);
        let (payoffs, rows): (Vec<&Rational>, Vec<&Distribution>) = (sub.payoffs.iter().collect(), sub.rows.iter().collect());
        let c = Chain {
            payoffs: &payoffs,
            rows: &rows,
            initial: &sub.initial,
        };
        average_of(&bareiss::solve(&c), &sub.initial)
    } else {
        elimination::symbolic_average(&chain, &core)
    }
}

/// Symbolic value of a degenerate MDP from its initial distribution.
pub fn degenerate_value_symbolic(m: &DegenerateMdp) -> RationalFunction {
    let payoffs: Vec<&Rational> = (0..m.num_states()).map(|s| m.payoff(s)).collect();
    let rows: Vec<&Distribution> = (0..m.num_states()).map(|s| m.row(s)).collect();
    chain_average_symbolic(Chain {
        payoffs: &payoffs,
        rows: &rows,
        initial: m.initial(),
    })
}

fn check_discount(lambda: &Rational) -> Result<()> {
    if lambda < &Rational::zero() || lambda >= &Rational::one() {
        return Err(Error::DiscountOutOfRange(crate::algebra::format_rational(lambda)));
    }
    Ok(())
}

/// Exact `mu . v` at a rational discount factor in `[0, 1)`.
pub fn degenerate_value_at(m: &DegenerateMdp, lambda: &Rational) -> Result<Rational> {
    check_discount(lambda)?;
    let payoffs: Vec<&Rational> = (0..m.num_states()).map(|s| m.payoff(s)).collect();
    let rows: Vec<&Distribution> = (0..m.num_states()).map(|s| m.row(s)).collect();
    Ok(elimination::value_at(
        &Chain {
            payoffs: &payoffs,
            rows: &rows,
            initial: m.initial(),
        },
        lambda,
    ))
}

/// Exact `gamma(mu, p)` at a rational discount factor in `[0, 1)`.
pub fn policy_value_at(m: &Mdp, p: &Policy, lambda: &Rational) -> Result<Rational> {
    checked(m, p)?;
    check_discount(lambda)?;
    let (payoffs, rows) = chain_parts(m, p);
    Ok(elimination::value_at(
        &Chain {
            payoffs: &payoffs,
            rows: &rows,
            initial: &m.initial,
        },
        lambda,
    ))
}

/// The monomial `q lambda`.
pub(crate) fn lambda_times(q: &Rational) -> Polynomial {
    Polynomial::monomial(q.clone(), 1)
}
