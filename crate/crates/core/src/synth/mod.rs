//! Compiles target value functions into MDPs realizing them exactly.
//!
//! Targets are finite maxima of branches `P / Q` with `Q` given in factored
//! form: simple cyclotomic factors, monic linear factors `(x - w)` with
//! `|w| > 1`, and monic quadratics `x^2 + b x + c` with complex roots of
//! modulus `sqrt(c) > 1`. All data are rational, so every construction and
//! every check is exact.

mod gadgets;
mod pipeline;
mod roots;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{self, format_rational, parse_rational, Rational};
use crate::algebra::{cyclotomic_product, Polynomial, RationalFunction};
use crate::error::{Error, Result};

pub use gadgets::{add, alternate_negate, contract, mk_const, mk_geometric, mul_by_poly, power, product_contract, scale, shift};
pub use pipeline::{synth_branch, synth_max, synth_spec, BranchSynthesis, SpecSynthesis, Step};
pub use roots::{gadget_search, inv_cyclotomic, inv_linear, inv_quadratic, inv_quadratic_with_certificate, GadgetCertificate, DEFAULT_GADGET_BOUND};

/// Denominator `prod Phi_d * prod (x - w)^k * prod (x^2 + b x + c)^k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactoredDenominator {
    pub cyclotomic: Vec<usize>,
    /// `(w, multiplicity)`.
    pub real_roots: Vec<(Rational, usize)>,
    /// `(b, c, multiplicity)`.
    pub quadratics: Vec<(Rational, Rational, usize)>,
}

impl FactoredDenominator {
    /// The expanded monic denominator.
    pub fn polynomial(&self) -> Polynomial {
        let mut q = cyclotomic_product(&self.cyclotomic);
        for (w, k) in &self.real_roots {
            q = &q * &Polynomial::from_coeffs(vec![-w.clone(), Rational::one()]).pow(*k);
        }
        for (b, c, k) in &self.quadratics {
            q = &q * &Polynomial::from_coeffs(vec![c.clone(), b.clone(), Rational::one()]).pow(*k);
        }
        q
    }

    pub fn degree(&self) -> usize {
        self.polynomial().degree().unwrap_or(0)
    }

    fn violations(&self, branch: usize, out: &mut Vec<SpecViolation>) {
        let mut seen = std::collections::BTreeSet::new();
        for &d in &self.cyclotomic {
            if d == 0 {
                out.push(SpecViolation::ZeroCyclotomicIndex { branch });
            } else if !seen.insert(d) {
                out.push(SpecViolation::DuplicateCyclotomic { branch, index: d });
            }
        }
        for (w, k) in &self.real_roots {
            if w.abs() <= Rational::one() {
                out.push(SpecViolation::RealRootNotOutside { branch, root: w.clone() });
            }
            if *k == 0 {
                out.push(SpecViolation::ZeroMultiplicity { branch, factor: format!("x - ({})", format_rational(w)) });
            }
        }
        for (b, c, k) in &self.quadratics {
            if b * b >= rational::int(4) * c {
                out.push(SpecViolation::QuadraticNotComplex { branch, b: b.clone(), c: c.clone() });
            }
            if c <= &Rational::one() {
                out.push(SpecViolation::QuadraticNotOutside { branch, c: c.clone() });
            }
            if *k == 0 {
                out.push(SpecViolation::ZeroMultiplicity {
                    branch,
                    factor: format!("x^2 + ({})x + ({})", format_rational(b), format_rational(c)),
                });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecBranch {
    pub numerator: Polynomial,
    pub denominator: FactoredDenominator,
}

impl SpecBranch {
    pub fn new(numerator: Polynomial, denominator: FactoredDenominator) -> Self {
        SpecBranch { numerator, denominator }
    }

    /// The branch as a reduced rational function.
    pub fn target(&self) -> RationalFunction {
        RationalFunction::new(self.numerator.clone(), self.denominator.polynomial()).expect("denominator is nonzero")
    }
}

/// Finite maximum of branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFSpec {
    pub branches: Vec<SpecBranch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecViolation {
    NoBranches,
    ZeroCyclotomicIndex { branch: usize },
    DuplicateCyclotomic { branch: usize, index: usize },
    RealRootNotOutside { branch: usize, root: Rational },
    QuadraticNotComplex { branch: usize, b: Rational, c: Rational },
    QuadraticNotOutside { branch: usize, c: Rational },
    ZeroMultiplicity { branch: usize, factor: String },
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpecViolation::*;
        match self {
            NoBranches => write!(f, "spec has no branches"),
            ZeroCyclotomicIndex { branch } => write!(f, "branch {branch}: cyclotomic index 0 is not allowed"),
            DuplicateCyclotomic { branch, index } => {
                write!(f, "branch {branch}: cyclotomic index {index} repeated (unit roots must be simple)")
            }
            RealRootNotOutside { branch, root } => {
                write!(f, "branch {branch}: real root {} does not satisfy |w| > 1", format_rational(root))
            }
            QuadraticNotComplex { branch, b, c } => write!(
                f,
                "branch {branch}: quadratic (b, c) = ({}, {}) violates b^2 < 4c",
                format_rational(b),
                format_rational(c)
            ),
            QuadraticNotOutside { branch, c } => {
                write!(f, "branch {branch}: quadratic with c = {} violates c > 1", format_rational(c))
            }
            ZeroMultiplicity { branch, factor } => write!(f, "branch {branch}: factor {factor} has multiplicity 0"),
        }
    }
}

impl MaxFSpec {
    pub fn new(branches: Vec<SpecBranch>) -> Self {
        MaxFSpec { branches }
    }

    pub fn single(numerator: Polynomial, denominator: FactoredDenominator) -> Self {
        MaxFSpec {
            branches: vec![SpecBranch::new(numerator, denominator)],
        }
    }

    pub fn validate(&self) -> Vec<SpecViolation> {
        let mut out = Vec::new();
        if self.branches.is_empty() {
            out.push(SpecViolation::NoBranches);
        }
        for (i, b) in self.branches.iter().enumerate() {
            b.denominator.violations(i, &mut out);
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }

    pub fn targets(&self) -> Vec<RationalFunction> {
        self.branches.iter().map(SpecBranch::target).collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let branches = parse_spec_document(s)?
            .into_iter()
            .enumerate()
            .map(|(i, (numerator, den))| match den {
                DenominatorInput::Factored(d) => Ok(SpecBranch::new(numerator, d)),
                DenominatorInput::Raw(_) => Err(Error::Parse(format!(
                    "branch {i}: denominator is an unfactored polynomial; factored form required"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MaxFSpec { branches })
    }

    pub fn to_json(&self) -> String {
        let doc = SpecDocument {
            branches: self
                .branches
                .iter()
                .map(|b| RawBranch {
                    numerator: b.numerator.clone(),
                    denominator: serde_json::to_value(RawDenominator::from(&b.denominator)).expect("serializable"),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

/// A branch denominator as written in a spec file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DenominatorInput {
    Factored(FactoredDenominator),
    /// Coefficient array; only usable through approximate factorization.
    Raw(Polynomial),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    branches: Vec<RawBranch>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    numerator: Polynomial,
    denominator: serde_json::Value,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDenominator {
    #[serde(default)]
    cyclotomic: Vec<usize>,
    #[serde(default)]
    real_roots: Vec<(String, usize)>,
    #[serde(default)]
    quadratics: Vec<(String, String, usize)>,
}

impl From<&FactoredDenominator> for RawDenominator {
    fn from(d: &FactoredDenominator) -> Self {
        RawDenominator {
            cyclotomic: d.cyclotomic.clone(),
            real_roots: d.real_roots.iter().map(|(w, k)| (format_rational(w), *k)).collect(),
            quadratics: d
                .quadratics
                .iter()
                .map(|(b, c, k)| (format_rational(b), format_rational(c), *k))
                .collect(),
        }
    }
}

impl RawDenominator {
    fn parse(self) -> Result<FactoredDenominator> {
        Ok(FactoredDenominator {
            cyclotomic: self.cyclotomic,
            real_roots: self
                .real_roots
                .into_iter()
                .map(|(w, k)| Ok((parse_rational(&w)?, k)))
                .collect::<Result<_>>()?,
            quadratics: self
                .quadratics
                .into_iter()
                .map(|(b, c, k)| Ok((parse_rational(&b)?, parse_rational(&c)?, k)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Parses a spec file, keeping unfactored denominators as [`DenominatorInput::Raw`].
pub fn parse_spec_document(s: &str) -> Result<Vec<(Polynomial, DenominatorInput)>> {
    let doc: SpecDocument = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    doc.branches
        .into_iter()
        .map(|b| {
            let den = if b.denominator.is_array() {
                let p: Polynomial = serde_json::from_value(b.denominator).map_err(|e| Error::Parse(e.to_string()))?;
                if p.is_zero() {
                    return Err(Error::Parse("zero denominator".into()));
                }
                DenominatorInput::Raw(p)
            } else {
                let raw: RawDenominator = serde_json::from_value(b.denominator).map_err(|e| Error::Parse(e.to_string()))?;
                DenominatorInput::Factored(raw.parse()?)
            };
            Ok((b.numerator, den))
        })
        .collect()
}

/// Signed `p` as a sum `sum_i p_i x^i`, skipping zero coefficients.
pub(crate) fn nonzero_terms(p: &Polynomial) -> impl Iterator<Item = (usize, &Rational)> {
    p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn den(cyc: &[usize], real: &[(Rational, usize)], quad: &[(Rational, Rational, usize)]) -> FactoredDenominator {
        FactoredDenominator {
            cyclotomic: cyc.to_vec(),
            real_roots: real.to_vec(),
            quadratics: quad.to_vec(),
        }
    }

    #[test]
    fn validation_examples() {
        let ok = MaxFSpec::single(Polynomial::one(), den(&[], &[], &[(int(0), int(4), 1)]));
        assert!(ok.validate().is_empty());
        let bad = MaxFSpec::single(Polynomial::one(), den(&[], &[], &[(int(0), rat(1, 2), 1)]));
        assert_eq!(bad.validate(), vec![SpecViolation::QuadraticNotOutside { branch: 0, c: rat(1, 2) }]);
        let dup = MaxFSpec::single(Polynomial::one(), den(&[2, 2], &[], &[]));
        assert_eq!(dup.validate(), vec![SpecViolation::DuplicateCyclotomic { branch: 0, index: 2 }]);
        let real = MaxFSpec::single(Polynomial::one(), den(&[], &[(int(-1), 1)], &[(int(3), int(2), 1)]));
        assert_eq!(real.validate().len(), 2);
        assert_eq!(MaxFSpec::new(vec![]).validate(), vec![SpecViolation::NoBranches]);
    }

    #[test]
    fn expanded_denominator() {
        let d = den(&[2], &[(int(2), 1)], &[(int(0), int(4), 1)]);
        let expect = &(&Polynomial::from_ints(&[1, 1]) * &Polynomial::from_ints(&[-2, 1])) * &Polynomial::from_ints(&[4, 0, 1]);
        assert_eq!(d.polynomial(), expect);
        assert_eq!(d.degree(), 4);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"branches":[{"numerator":["1"],"denominator":{"cyclotomic":[2,4],"real_roots":[["5/2",1]],"quadratics":[["0","4",1]]}}]}"#;
        let spec = MaxFSpec::from_json(text).unwrap();
        assert_eq!(spec.branches[0].denominator.real_roots, vec![(rat(5, 2), 1)]);
        assert_eq!(MaxFSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert!(matches!(MaxFSpec::from_json("[]"), Err(Error::Parse(_))));
        let raw = r#"{"branches":[{"numerator":["1"],"denominator":["2","-1"]}]}"#;
        assert!(matches!(MaxFSpec::from_json(raw), Err(Error::Parse(_))));
        assert_eq!(
            parse_spec_document(raw).unwrap()[0].1,
            DenominatorInput::Raw(Polynomial::from_ints(&[2, -1]))
        );
    }
}
