//! Forward direction as a service: certify that an MDP's value is a maximum
//! of admissible rational functions, and verify synthesized MDPs against
//! their targets in an exact tier and a numeric tier.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::rational::{approximate, from_f64, to_f64, Rational};
use crate::algebra::{extract_cyclotomic_part, roots_numeric, ComplexPoint, Polynomial, RationalFunction};
use crate::error::{Error, Result};
use crate::mdp::{DegenerateMdp, Mdp};
use crate::solver::{admissibility, degenerate_value_symbolic, policy_envelope, value_iteration, Admissibility, EnvelopeReport};
use crate::synth::{FactoredDenominator, MaxFSpec};

/// Default numeric tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Admissibility of a denominator with a diagnostic root listing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenominatorReport {
    #[serde(flatten)]
    pub admissibility: Admissibility,
    /// Numeric roots of the non-cyclotomic part; diagnostic only.
    pub remainder_roots: Vec<ComplexPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_finder_error: Option<String>,
}

pub fn classify_denominator(q: &Polynomial) -> Result<DenominatorReport> {
    let admissibility = admissibility(q)?;
    let remainder = extract_cyclotomic_part(q)?.remainder;
    let (remainder_roots, root_finder_error) = if remainder.degree().unwrap_or(0) == 0 {
        (Vec::new(), None)
    } else {
        match roots_numeric(&remainder) {
            Ok(r) => (r, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        }
    };
    Ok(DenominatorReport {
        admissibility,
        remainder_roots,
        root_finder_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub admissible: bool,
    pub envelope: EnvelopeReport,
    /// Per-branch numeric roots of the non-cyclotomic denominator part.
    pub remainder_roots: Vec<Vec<ComplexPoint>>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// The policy envelope with every branch denominator classified.
pub fn analyze(m: &Mdp, cap: usize) -> Result<AnalysisReport> {
    let envelope = policy_envelope(m, cap)?;
    let remainder_roots = envelope
        .branches
        .iter()
        .map(|b| classify_denominator(b.value.denominator()).map(|r| r.remainder_roots))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        admissible: envelope.admissible,
        envelope,
        remainder_roots,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tier: Tier,
    pub verdict: Verdict,
    /// Exact tier: the nonzero difference `value - target` on failure.
    pub witness: Option<String>,
    /// Numeric tier: `max |value iteration - max_i f_i|` over the grid.
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Certified value iteration error at each grid point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Exact tier: the symbolic value of a degenerate MDP equals the single
/// branch of `spec` as reduced rational functions.
pub fn verify_exact(m: &Mdp, spec: &MaxFSpec) -> Result<VerificationReport> {
    if !m.is_degenerate() {
        return Err(Error::TierMismatch("the exact tier needs a degenerate MDP; use the numeric tier".into()));
    }
    if spec.branches.len() != 1 {
        return Err(Error::TierMismatch(format!(
            "the exact tier needs a single-branch spec, got {} branches",
            spec.branches.len()
        )));
    }
    let target = spec.branches[0].target();
    verify_exact_target(&DegenerateMdp::new(m.clone())?, &target)
}

pub fn verify_exact_target(m: &DegenerateMdp, target: &RationalFunction) -> Result<VerificationReport> {
    let value = degenerate_value_symbolic(m);
    let equal = &value == target;
    debug_assert_eq!(equal, value.cross_equal(target));
    Ok(VerificationReport {
        tier: Tier::Exact,
        verdict: if equal { Verdict::Pass } else { Verdict::Fail },
        witness: (!equal).then(|| format!("value {value} minus target {target} = {}", value.sub(target))),
        max_deviation: None,
        worst_lambda: None,
        grid_points: None,
        tol: None,
        epsilon: None,
    })
}

/// `{0.01, 0.02, ..., 0.99}`.
pub fn default_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

/// Parses `lo:hi:step` into `lo, lo + step, ...` up to `hi`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(Error::Parse(format!("grid {s:?} is not lo:hi:step")));
    };
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Parse(format!("grid component {t:?} is not a finite number")))
    };
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if step <= 0.0 || hi < lo {
        return Err(Error::Parse(format!("grid {s:?} needs step > 0 and lo <= hi")));
    }
    let count = ((hi - lo) / step + 1e-9).floor();
    if count > 1e6 {
        return Err(Error::Parse(format!("grid {s:?} has more than 10^6 points")));
    }
    // snap to 12 decimals so `0.1:0.3:0.1` yields 0.3, not 0.30000000000000004
    Ok((0..=count as usize).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// Numeric tier against the maximum of the target branches.
pub fn verify_numeric(m: &Mdp, spec: &MaxFSpec, grid: &[f64], tol: f64) -> Result<VerificationReport> {
    verify_numeric_targets(m, &spec.targets(), grid, tol)
}

/// Value iteration with certified error `tol` at each grid point against
/// `max_i f_i` evaluated exactly at the grid point. Passes iff the largest
/// deviation is at most `tol + epsilon`.
pub fn verify_numeric_targets(m: &Mdp, targets: &[RationalFunction], grid: &[f64], tol: f64) -> Result<VerificationReport> {
    if targets.is_empty() {
        return Err(Error::InvalidParameter("no target branches".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    for &x in grid {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::DiscountOutOfRange(x.to_string()));
        }
    }
    let epsilon = tol;
    let mut worst = (0.0f64, None);
    for &x in grid {
        let exact_x = from_f64(x).expect("finite grid point");
        let mut best: Option<Rational> = None;
        for f in targets {
            let v = f.eval(&exact_x)?;
            if best.as_ref().map_or(true, |b| &v > b) {
                best = Some(v);
            }
        }
        let expected = to_f64(&best.expect("nonempty targets"));
        let got = value_iteration(m, x, epsilon)?.from_initial(&m.initial);
        let dev = (got - expected).abs();
        if dev > worst.0 || worst.1.is_none() {
            worst = (dev.max(worst.0), if dev >= worst.0 { Some(x) } else { worst.1 });
        }
    }
    let pass = worst.0 <= tol + epsilon;
    Ok(VerificationReport {
        tier: Tier::Numeric,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        witness: None,
        max_deviation: Some(worst.0),
        worst_lambda: worst.1,
        grid_points: Some(grid.len()),
        tol: Some(tol),
        epsilon: Some(epsilon),
    })
}

/// Factored approximation of an unfactored denominator `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproximateFactorization {
    /// `q ~ leading * factored.polynomial()`; the cyclotomic part is exact.
    pub factored: FactoredDenominator,
    pub leading: Rational,
    /// Largest root displacement introduced by rationalization.
    pub max_root_error: f64,
}

/// Extracts cyclotomic factors exactly (repeated ones are kept, so the
/// result fails validation), then factors the remainder numerically into
/// linear and quadratic factors with coefficients rationalized to
/// denominators at most `max_den`.
pub fn approximate_factorization(q: &Polynomial, max_den: u64) -> Result<ApproximateFactorization> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut cyclotomic = Vec::new();
    let mut rest = q.clone();
    loop {
        let part = extract_cyclotomic_part(&rest)?;
        if part.indices.is_empty() {
            break;
        }
        cyclotomic.extend(part.indices);
        rest = part.remainder;
    }
    cyclotomic.sort_unstable();
    let leading = rest.leading().expect("nonzero").clone();
    let max_den = BigInt::from(max_den);
    let mut real: BTreeMap<Rational, usize> = BTreeMap::new();
    let mut quadratics: BTreeMap<(Rational, Rational), usize> = BTreeMap::new();
    let mut max_root_error = 0.0f64;
    if rest.degree().unwrap_or(0) > 0 {
        let roots = roots_numeric(&rest)?;
        for z in roots {
            let scale = 1e-9 * (1.0 + z.modulus());
            if z.im.abs() <= scale {
                let w = approximate(&from_f64(z.re).expect("finite root"), &max_den);
                max_root_error = max_root_error.max((to_f64(&w) - z.re).abs());
                *real.entry(w).or_insert(0) += 1;
            } else if z.im > 0.0 {
                let b = approximate(&from_f64(-2.0 * z.re).expect("finite"), &max_den);
                let c = approximate(&from_f64(z.re * z.re + z.im * z.im).expect("finite"), &max_den);
                max_root_error = max_root_error.max((to_f64(&b) + 2.0 * z.re).abs()).max((to_f64(&c) - z.modulus().powi(2)).abs());
                *quadratics.entry((b, c)).or_insert(0) += 1;
            }
        }
    }
    Ok(ApproximateFactorization {
        factored: FactoredDenominator {
            cyclotomic,
            real_roots: real.into_iter().collect(),
            quadratics: quadratics.into_iter().map(|((b, c), k)| (b, c, k)).collect(),
        },
        leading,
        max_root_error,
    })
}
