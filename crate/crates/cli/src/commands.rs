use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use mdpvf::algebra::rational::{format_rational, parse_decimal_or_rational, to_f64};
use mdpvf::analyzer::{
    analyze as analyze_mdp, approximate_factorization, default_grid, parse_grid, verify_exact, verify_exact_target, verify_numeric,
    verify_numeric_targets, VerificationReport,
};
use mdpvf::solver::{degenerate_value_at, value_iteration};
use mdpvf::synth::{parse_spec_document, synth_spec, DenominatorInput};
use mdpvf::{DegenerateMdp, Error, MaxFSpec, Mdp, RationalFunction, Result, SpecBranch};
use serde_json::{json, Value};

use crate::SpecOptions;

/// Rationalization denominator cap for `--approx-factor`.
const APPROX_MAX_DEN: u64 = 1_000_000;

const APPROX_NOTE: &str = "denominators were factored numerically with rationalized roots; \
exact checks apply to the approximated spec only, the original spec is checked numerically";

pub struct Context {
    pub timestamps: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TierChoice {
    /// Exact for a degenerate MDP against a single branch, numeric otherwise.
    Auto,
    Exact,
    Numeric,
}

pub struct Out {
    pub report: Value,
    pub code: u8,
}

impl Context {
    fn finish(&self, mut report: Value, code: u8) -> Result<Out> {
        if self.timestamps {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            report["generated_at"] = json!(secs);
        }
        Ok(Out { report, code })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_mdp(path: &Path) -> Result<Mdp> {
    Mdp::from_json(&read(path)?)
}

/// A spec with every denominator in factored form.
struct LoadedSpec {
    spec: MaxFSpec,
    /// Targets as written, before any approximation.
    originals: Vec<RationalFunction>,
    approximations: Vec<Value>,
    /// Raw denominators left unfactored because `--approx-factor` was off.
    unfactored: Vec<usize>,
}

impl LoadedSpec {
    fn approximated(&self) -> bool {
        !self.approximations.is_empty()
    }

    fn ensure_usable(&self) -> Result<()> {
        if let Some(i) = self.unfactored.first() {
            return Err(Error::InvalidParameter(format!(
                "branch {i}: denominator is an unfactored polynomial; pass --approx-factor"
            )));
        }
        self.spec.ensure_valid()
    }

    fn annotate(&self, report: &mut Value) {
        if self.approximated() {
            report["approximation"] = json!({
                "note": APPROX_NOTE,
                "branches": self.approximations,
                "approximated_spec": serde_json::from_str::<Value>(&self.spec.to_json()).expect("spec JSON"),
            });
        }
    }
}

fn load_spec(path: &Path, opts: &SpecOptions) -> Result<LoadedSpec> {
    let mut loaded = LoadedSpec {
        spec: MaxFSpec::new(Vec::new()),
        originals: Vec::new(),
        approximations: Vec::new(),
        unfactored: Vec::new(),
    };
    for (i, (numerator, den)) in parse_spec_document(&read(path)?)?.into_iter().enumerate() {
        match den {
            DenominatorInput::Factored(d) => {
                let branch = SpecBranch::new(numerator, d);
                loaded.originals.push(branch.target());
                loaded.spec.branches.push(branch);
            }
            DenominatorInput::Raw(q) if opts.approx_factor => {
                let approx = approximate_factorization(&q, APPROX_MAX_DEN)?;
                loaded.originals.push(RationalFunction::new(numerator.clone(), q.clone())?);
                loaded.approximations.push(json!({
                    "branch": i,
                    "original_denominator": q,
                    "leading": format_rational(&approx.leading),
                    "max_root_error": approx.max_root_error,
                }));
                let scaled = numerator.scale(&approx.leading.recip());
                loaded.spec.branches.push(SpecBranch::new(scaled, approx.factored));
            }
            DenominatorInput::Raw(q) => {
                loaded.unfactored.push(i);
                // keep indices aligned; this branch is never synthesized
                loaded.originals.push(RationalFunction::new(numerator.clone(), q)?);
                loaded.spec.branches.push(SpecBranch::new(numerator, Default::default()));
            }
        }
    }
    Ok(loaded)
}

fn grid_or_default(grid: Option<&str>) -> Result<Vec<f64>> {
    grid.map_or_else(|| Ok(default_grid()), parse_grid)
}

fn report_value(r: &VerificationReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

pub fn check_spec(ctx: &Context, path: &Path, opts: &SpecOptions) -> Result<Out> {
    let loaded = load_spec(path, opts)?;
    let mut violations: Vec<String> = loaded
        .unfactored
        .iter()
        .map(|i| format!("branch {i}: denominator is an unfactored polynomial; pass --approx-factor"))
        .collect();
    violations.extend(
        loaded
            .spec
            .validate()
            .into_iter()
            .map(|v| v.to_string())
            .filter(|_| loaded.unfactored.is_empty()),
    );
    let valid = violations.is_empty();
    let mut report = json!({
        "valid": valid,
        "branches": loaded.spec.branches.len(),
        "violations": violations,
    });
    loaded.annotate(&mut report);
    ctx.finish(report, if valid { 0 } else { 2 })
}

pub fn synth(ctx: &Context, path: &Path, out: Option<&Path>, gadget_bound: usize, opts: &SpecOptions) -> Result<Out> {
    let loaded = load_spec(path, opts)?;
    loaded.ensure_usable()?;
    let synthesis = synth_spec(&loaded.spec, gadget_bound)?;
    let mut report = serde_json::to_value(&synthesis).expect("serializable");
    let text = synthesis.mdp.to_json();
    match out {
        Some(p) => {
            fs::write(p, format!("{text}\n")).map_err(|e| Error::InvalidParameter(format!("{}: {e}", p.display())))?;
            report["mdp_file"] = json!(p.display().to_string());
        }
        None => report["mdp"] = serde_json::from_str(&text).expect("MDP JSON"),
    }
    loaded.annotate(&mut report);
    ctx.finish(report, 0)
}

pub fn value(ctx: &Context, path: &Path, lambda: Option<&str>, grid: Option<&str>, tol: f64) -> Result<Out> {
    let m = load_mdp(path)?;
    let report = match (lambda, grid) {
        (Some(l), _) => {
            let lam = parse_decimal_or_rational(l)?;
            if m.is_degenerate() {
                let v = degenerate_value_at(&DegenerateMdp::new(m)?, &lam)?;
                json!({ "tier": "exact", "lambda": format_rational(&lam), "value": format_rational(&v) })
            } else {
                let x = to_f64(&lam);
                let vi = value_iteration(&m, x, tol)?;
                json!({
                    "tier": "numeric",
                    "lambda": x,
                    "value": vi.from_initial(&m.initial),
                    "epsilon": vi.epsilon,
                    "iterations": vi.iterations,
                })
            }
        }
        (None, Some(g)) => {
            let values = parse_grid(g)?
                .into_iter()
                .map(|x| {
                    let vi = value_iteration(&m, x, tol)?;
                    Ok(json!({ "lambda": x, "value": vi.from_initial(&m.initial) }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "tier": "numeric", "epsilon": tol, "values": values })
        }
        (None, None) => return Err(Error::InvalidParameter("pass --lambda or --grid".into())),
    };
    ctx.finish(report, 0)
}

pub fn analyze(ctx: &Context, path: &Path, cap: usize) -> Result<Out> {
    let m = load_mdp(path)?;
    let report = analyze_mdp(&m, cap)?;
    ctx.finish(serde_json::to_value(&report).expect("serializable"), 0)
}

pub fn verify(
    ctx: &Context,
    mdp: &Path,
    spec: &Path,
    tier: TierChoice,
    grid: Option<&str>,
    tol: f64,
    opts: &SpecOptions,
) -> Result<Out> {
    let m = load_mdp(mdp)?;
    let loaded = load_spec(spec, opts)?;
    loaded.ensure_usable()?;
    let exact = match tier {
        TierChoice::Exact => true,
        TierChoice::Numeric => false,
        TierChoice::Auto => m.is_degenerate() && loaded.spec.branches.len() == 1,
    };
    let primary = if exact {
        verify_exact(&m, &loaded.spec)?
    } else {
        verify_numeric(&m, &loaded.spec, &grid_or_default(grid)?, tol)?
    };
    let mut passed = primary.passed();
    let mut report = report_value(&primary);
    if loaded.approximated() {
        let original = verify_numeric_targets(&m, &loaded.originals, &grid_or_default(grid)?, tol)?;
        passed &= original.passed();
        report["original_numeric"] = report_value(&original);
        loaded.annotate(&mut report);
    }
    ctx.finish(report, if passed { 0 } else { 1 })
}

pub fn roundtrip(ctx: &Context, path: &Path, gadget_bound: usize, grid: Option<&str>, tol: f64, opts: &SpecOptions) -> Result<Out> {
    let loaded = load_spec(path, opts)?;
    loaded.ensure_usable()?;
    let grid = grid_or_default(grid)?;
    let synthesis = synth_spec(&loaded.spec, gadget_bound)?;
    let mut passed = true;
    let mut branches = Vec::new();
    for b in &synthesis.branches {
        let r = verify_exact_target(&b.mdp, &b.target)?;
        passed &= r.passed();
        branches.push(json!({
            "states": b.states,
            "state_bound": b.state_bound,
            "exact": report_value(&r),
        }));
    }
    let numeric = verify_numeric(&synthesis.mdp, &loaded.spec, &grid, tol)?;
    passed &= numeric.passed();
    let mut report = json!({
        "verdict": if passed { "pass" } else { "fail" },
        "states": synthesis.states,
        "degenerate": synthesis.degenerate,
        "branches": branches,
        "numeric": report_value(&numeric),
    });
    if loaded.approximated() {
        let original = verify_numeric_targets(&synthesis.mdp, &loaded.originals, &grid, tol)?;
        let ok = original.passed();
        passed &= ok;
        report["original_numeric"] = report_value(&original);
        report["verdict"] = json!(if passed { "pass" } else { "fail" });
        loaded.annotate(&mut report);
    }
    ctx.finish(report, if passed { 0 } else { 1 })
}
