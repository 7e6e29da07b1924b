//! Bellman value iteration with an a priori iteration count.

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::rational::to_f64;
use crate::error::{Error, Result};
use crate::mdp::{Distribution, Mdp};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueIteration {
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Certified bound on `|values[s] - v_lambda(s)|`.
    pub epsilon: f64,
}

impl ValueIteration {
    /// `sum_s mu(s) values[s]`, within `epsilon` of the value from `mu`.
    pub fn from_initial(&self, mu: &Distribution) -> f64 {
        mu.iter().map(|(&s, p)| to_f64(p) * self.values[s]).sum()
    }
}

/// Smallest `N >= 1` with `lambda^N rmax / (1 - lambda) <= eps`.
pub fn iteration_count(lambda: f64, rmax: f64, eps: f64) -> usize {
    if lambda == 0.0 || rmax == 0.0 {
        return 1;
    }
    let bound = |n: usize| lambda.powi(n as i32) * rmax / (1.0 - lambda);
    let guess = ((eps * (1.0 - lambda) / rmax).ln() / lambda.ln()).ceil();
    let mut n = if guess.is_finite() && guess > 1.0 { guess as usize } else { 1 };
    while bound(n) > eps {
        n += 1;
    }
    while n > 1 && bound(n - 1) <= eps {
        n -= 1;
    }
    n
}

/// Iterates `v <- max_a (r(s,a) + lambda sum_t q(t|s,a) v_t)` from zero.
pub fn value_iteration(m: &Mdp, lambda: f64, eps: f64) -> Result<ValueIteration> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::DiscountOutOfRange(lambda.to_string()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    m.ensure_valid()?;
    let actions: Vec<Vec<(f64, Vec<(usize, f64)>)>> = m
        .actions
        .iter()
        .map(|acts| {
            acts.iter()
                .map(|a| {
                    let row = a
                        .transition
                        .iter()
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(&t, p)| (t, to_f64(p)))
                        .collect();
                    (to_f64(&a.payoff), row)
                })
                .collect()
        })
        .collect();
    let rmax = to_f64(&m.max_abs_payoff());
    let iterations = iteration_count(lambda, rmax, eps);
    let mut v = vec![0.0f64; m.num_states()];
    let mut next = v.clone();
    for _ in 0..iterations {
        for (s, acts) in actions.iter().enumerate() {
            next[s] = acts
                .iter()
                .map(|(r, row)| r + lambda * row.iter().map(|&(t, p)| p * v[t]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
        }
        std::mem::swap(&mut v, &mut next);
    }
    Ok(ValueIteration {
        values: v,
        iterations,
        epsilon: eps,
    })
}
