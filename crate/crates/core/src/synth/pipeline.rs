//! Assembly of a branch `P / Q` from its factored denominator, and of the
//! maximum over branches.

use num_traits::{One, Signed};
use serde::Serialize;

use super::gadgets::{alternate_negate, contract, mk_const, mk_geometric, mul_by_poly, power, product_contract, shifted};
use super::roots::{cycle_gadget, gadget_search, GadgetCertificate};
use super::{FactoredDenominator, MaxFSpec, SpecBranch};
use crate::algebra::rational::{self, format_rational, int, Rational};
use crate::algebra::{cyclotomic_product, Polynomial, RationalFunction};
use crate::error::{Error, Result};
use crate::mdp::{fresh_name, Action, DegenerateMdp, Distribution, Mdp};

/// One construction applied during synthesis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub operation: &'static str,
    pub detail: String,
    pub states: usize,
    /// A priori bound on `states` from the construction sizes.
    pub state_bound: usize,
}

/// Certificate used for one quadratic factor, after rescaling by `scaling`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticRecord {
    #[serde(with = "rational::serde_string")]
    pub b: Rational,
    #[serde(with = "rational::serde_string")]
    pub c: Rational,
    #[serde(with = "rational::serde_string")]
    pub scaling: Rational,
    #[serde(with = "rational::serde_string")]
    pub scaled_b: Rational,
    #[serde(with = "rational::serde_string")]
    pub scaled_c: Rational,
    pub certificate: GadgetCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchSynthesis {
    #[serde(skip)]
    pub mdp: DegenerateMdp,
    pub target: RationalFunction,
    pub states: usize,
    pub state_bound: usize,
    pub steps: Vec<Step>,
    pub certificates: Vec<QuadraticRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecSynthesis {
    #[serde(skip)]
    pub mdp: Mdp,
    pub states: usize,
    pub degenerate: bool,
    pub branches: Vec<BranchSynthesis>,
}

fn mul_by_poly_bound(states: usize, p: &Polynomial) -> usize {
    if p.is_zero() {
        2
    } else if p.is_one() {
        states
    } else {
        2 * states + 2 * p.degree().unwrap_or(0)
    }
}

/// Rational `s` with `1 < s < sqrt(c)`, for `c > 1`: the integer 2 when it
/// fits, else `1 + 1/k` for the least admissible `k`. Small heights keep the
/// certificate weights of the rescaled quadratic short.
fn quadratic_scaling(c: &Rational) -> Rational {
    let one = Rational::one();
    let mut bits = 8;
    let root = loop {
        let s = rational::sqrt_floor(c, bits);
        if s > one {
            break s;
        }
        bits *= 2;
    };
    let two = int(2);
    if root > two {
        return two;
    }
    // least k with 1 + 1/k < root
    let k = ((&root - &one).recip()).floor() + &one;
    &one + k.recip()
}

/// Running product `cur(x) * prod_i g_i(c_i x)` together with its a priori
/// state bound and the polynomial still owed to the value.
struct Builder {
    cur: Option<DegenerateMdp>,
    bound: usize,
    owed: Polynomial,
    steps: Vec<Step>,
}

impl Builder {
    fn record(&mut self, operation: &'static str, detail: String) {
        let states = self.cur.as_ref().map_or(0, DegenerateMdp::num_states);
        assert!(states <= self.bound, "{operation} exceeded its state bound");
        self.steps.push(Step {
            operation,
            detail,
            states,
            state_bound: self.bound,
        });
    }

    /// Multiplies the running value by `g(c x)`.
    fn fold(&mut self, g: &DegenerateMdp, c: &Rational) -> Result<()> {
        let ng = g.num_states();
        let detail = format!("contraction {}", format_rational(c));
        match self.cur.take() {
            None => {
                self.cur = Some(contract(g, c)?);
                self.bound = ng + 1;
                self.record("contract", detail);
            }
            Some(cur) => {
                self.cur = Some(product_contract(&cur, g, c)?);
                self.bound = ng + ng * self.bound;
                self.record("product_contract", detail);
            }
        }
        Ok(())
    }
}

/// MDP with value exactly `numerator / den.polynomial()`.
///
/// The value is built as a product of contracted root gadgets: the spaced
/// geometric chain `1 / (1 - x^n)` for the cyclotomic part, the certificate
/// cycle `1 / D(x / s)` for each quadratic, and the geometric chain
/// `1 / (1 -+ x / |w|)` for each real root `w`. The cofactors `D / quad` and
/// the scalars that restore each factor are collected into one polynomial
/// applied at the end together with the numerator.
pub fn synth_branch(numerator: &Polynomial, den: &FactoredDenominator, gadget_bound: usize) -> Result<BranchSynthesis> {
    MaxFSpec::single(numerator.clone(), den.clone()).ensure_valid()?;
    let mut b = Builder {
        cur: None,
        bound: 0,
        owed: numerator.clone(),
        steps: Vec::new(),
    };
    if !den.cyclotomic.is_empty() {
        let n = den.cyclotomic.iter().fold(1usize, |a, &d| num_integer::lcm(a, d));
        // (1 - x^n) / prod Phi_d
        let cofactor = (-Polynomial::x_pow_minus_one(n))
            .exact_div(&cyclotomic_product(&den.cyclotomic))
            .expect("Phi_d divides x^n - 1 for d | n");
        b.owed = &b.owed * &cofactor;
        b.cur = Some(power(&mk_geometric(), n)?);
        b.bound = n;
        b.record("power", format!("geometric spaced by {n} for cyclotomic indices {:?}", den.cyclotomic));
    }
    let mut certificates = Vec::new();

    for (qb, qc, mult) in &den.quadratics {
        for _ in 0..*mult {
            let s = quadratic_scaling(qc);
            let sb = qb / &s;
            let sc = qc / (&s * &s);
            if &sb * &sb >= int(4) * &sc || sc <= Rational::one() {
                return Err(Error::InvalidParameter(format!("rescaled quadratic ({sb}, {sc}) left the admissible region")));
            }
            let cert = gadget_search(&sb, &sc, gadget_bound)?;
            let cycle = cycle_gadget(&cert);
            b.steps.push(Step {
                operation: "gadget_search",
                detail: format!(
                    "x^2 + ({})x + ({}) with (k, l, m) = ({}, {}, {})",
                    format_rational(&sb),
                    format_rational(&sc),
                    cert.k,
                    cert.l,
                    cert.m
                ),
                states: cycle.num_states(),
                state_bound: cert.m,
            });
            let scaled = Polynomial::from_coeffs(vec![sc.clone(), sb.clone(), Rational::one()]);
            let cofactor = cert
                .cycle_denominator()
                .exact_div(&scaled)
                .expect("certificate divisibility was verified");
            // D(x/s) = cofactor(x/s) (x^2 + b x + c) / s^2
            let inv = s.recip();
            b.owed = (&b.owed * &cofactor.compose_scale(&inv)).scale(&(&inv * &inv));
            b.fold(&cycle, &inv)?;
            certificates.push(QuadraticRecord {
                b: qb.clone(),
                c: qc.clone(),
                scaling: s,
                scaled_b: sb,
                scaled_c: sc,
                certificate: cert,
            });
        }
    }

    for (w, mult) in &den.real_roots {
        for _ in 0..*mult {
            // 1 / (1 - x / w) = -w / (x - w); for w < 0 this is 1 / (1 + x / |w|)
            let gadget = if w.is_positive() {
                mk_geometric()
            } else {
                alternate_negate(&mk_geometric())
            };
            b.owed = b.owed.scale(&-w.recip());
            b.fold(&gadget, &w.abs().recip())?;
        }
    }

    let base = b.cur.take().unwrap_or_else(|| mk_const(Rational::one()));
    let base_bound = if b.steps.is_empty() { 2 } else { b.bound };
    b.bound = mul_by_poly_bound(base_bound, &b.owed);
    b.cur = Some(mul_by_poly(&base, &b.owed));
    b.record("mul_by_poly", format!("numerator times cofactors: {}", b.owed));
    let mdp = b.cur.take().expect("set above");

    Ok(BranchSynthesis {
        target: SpecBranch::new(numerator.clone(), den.clone()).target(),
        states: mdp.num_states(),
        state_bound: b.bound,
        mdp,
        steps: b.steps,
        certificates,
    })
}

/// A choice state whose action `i` collapses branch `i`'s first stage to
/// expectations under its initial distribution. Value `max_i f_i`.
pub fn synth_max(branches: &[DegenerateMdp]) -> Result<Mdp> {
    if branches.is_empty() {
        return Err(Error::InvalidParameter("maximum over an empty list of branches".into()));
    }
    let mut states = Vec::new();
    let mut actions = Vec::new();
    let mut choices = Vec::new();
    for (i, m) in branches.iter().enumerate() {
        let offset = states.len();
        let src = m.as_mdp();
        for (s, acts) in src.states.iter().zip(&src.actions) {
            states.push(format!("b{i}:{s}"));
            actions.push(
                acts.iter()
                    .map(|a| Action::new(a.name.clone(), a.payoff.clone(), shifted(&a.transition, offset)))
                    .collect::<Vec<_>>(),
            );
        }
        choices.push(Action::new(format!("branch{i}"), m.first_stage_payoff(), shifted(&m.second_stage(), offset)));
    }
    let start = states.len();
    states.push(fresh_name("choose", &states));
    actions.push(choices);
    let out = Mdp {
        states,
        actions,
        initial: Distribution::from([(start, Rational::one())]),
    };
    debug_assert!(out.validate().is_empty());
    Ok(out)
}

/// Synthesizes every branch; a single branch yields a degenerate MDP.
pub fn synth_spec(spec: &MaxFSpec, gadget_bound: usize) -> Result<SpecSynthesis> {
    spec.ensure_valid()?;
    let branches = spec
        .branches
        .iter()
        .map(|b| synth_branch(&b.numerator, &b.denominator, gadget_bound))
        .collect::<Result<Vec<_>>>()?;
    let mdp = if branches.len() == 1 {
        branches[0].mdp.clone().into_mdp()
    } else {
        synth_max(&branches.iter().map(|b| b.mdp.clone()).collect::<Vec<_>>())?
    };
    Ok(SpecSynthesis {
        states: mdp.num_states(),
        degenerate: mdp.is_degenerate(),
        mdp,
        branches,
    })
}
