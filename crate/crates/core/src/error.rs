use thiserror::Error;

use crate::mdp::Violation;
use crate::synth::SpecViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,
    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial of degree {degree} has no roots to find")]
    ConstantPolynomial { degree: usize },
    #[error("denominator vanishes at lambda = {at}")]
    Pole { at: String },
    #[error("root finder did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid MDP ({} violation(s)): {}", .0.len(), join(.0))]
    InvalidMdp(Vec<Violation>),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("expected a degenerate MDP (exactly one action per state)")]
    NotDegenerate,
    #[error("discount factor {0} is outside [0, 1)")]
    DiscountOutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{count} pure stationary policies exceed the cap of {cap}")]
    PolicyCap { count: String, cap: usize },
    #[error("initial support of {size} states with choices exceeds the limit of {limit}")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("gadget search exhausted: no admissible (k, l, m) with m <= {bound}; raise the bound")]
    GadgetSearchExhausted { bound: usize },
    #[error("invalid spec ({} violation(s)): {}", .0.len(), join(.0))]
    InvalidSpec(Vec<SpecViolation>),
    #[error("verification tier mismatch: {0}")]
    TierMismatch(String),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
