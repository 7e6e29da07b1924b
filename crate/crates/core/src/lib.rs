//! Values of discounted MDPs as functions of the discount factor.
//!
//! Four layers: exact algebra over `Q[x]`, MDPs with exact rational data,
//! a symbolic and numeric solver, and a synthesizer that builds an MDP whose
//! value is a prescribed maximum of admissible rational functions. The
//! analyzer runs the forward direction as a certificate check.

pub mod algebra;
pub mod analyzer;
pub mod error;
pub mod mdp;
pub mod solver;
pub mod synth;

pub use algebra::{Polynomial, Rational, RationalFunction};
pub use error::{Error, Result};
pub use mdp::{Action, DegenerateMdp, Distribution, Mdp};
pub use synth::{MaxFSpec, SpecBranch};
