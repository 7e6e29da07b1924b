//! `mdpvf`: check, synthesize, solve, analyze and verify MDP value functions.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 invalid input, 3 parse or
//! read error, 4 gadget search exhausted, 5 policy cap exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mdpvf::analyzer::DEFAULT_TOL;
use mdpvf::solver::DEFAULT_POLICY_CAP;
use mdpvf::synth::DEFAULT_GADGET_BOUND;
use mdpvf::Error;

#[derive(Parser)]
#[command(name = "mdpvf", version, about = "Exact value functions of discounted MDPs")]
struct Cli {
    /// Add a generation time to every report (off by default so output is reproducible).
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct SpecOptions {
    /// Accept unfactored denominators, factored numerically with rationalized coefficients.
    #[arg(long)]
    pub approx_factor: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a spec file.
    CheckSpec {
        spec: PathBuf,
        #[command(flatten)]
        opts: SpecOptions,
    },
    /// Synthesize an MDP whose value is the maximum of the target branches.
    Synth {
        spec: PathBuf,
        /// Where to write the MDP; without it the MDP is embedded in the report.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GADGET_BOUND)]
        gadget_bound: usize,
        #[command(flatten)]
        opts: SpecOptions,
    },
    /// Discounted value from the initial distribution.
    Value {
        mdp: PathBuf,
        /// Rational or decimal discount in [0, 1).
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        lambda: Option<String>,
        /// Numeric values on `lo:hi:step`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Policy envelope with per-branch admissibility.
    Analyze {
        mdp: PathBuf,
        #[arg(long, default_value_t = DEFAULT_POLICY_CAP)]
        cap: usize,
    },
    /// Compare an MDP's value against a spec.
    Verify {
        mdp: PathBuf,
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = commands::TierChoice::Auto)]
        tier: commands::TierChoice,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        opts: SpecOptions,
    },
    /// Synthesize, then verify every branch exactly and the maximum numerically.
    Roundtrip {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GADGET_BOUND)]
        gadget_bound: usize,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        opts: SpecOptions,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 3,
        Error::GadgetSearchExhausted { .. } => 4,
        Error::PolicyCap { .. } => 5,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context { timestamps: cli.timestamps };
    let result = match cli.command {
        Command::CheckSpec { spec, opts } => commands::check_spec(&ctx, &spec, &opts),
        Command::Synth {
            spec,
            out,
            gadget_bound,
            opts,
        } => commands::synth(&ctx, &spec, out.as_deref(), gadget_bound, &opts),
        Command::Value { mdp, lambda, grid, tol } => commands::value(&ctx, &mdp, lambda.as_deref(), grid.as_deref(), tol),
        Command::Analyze { mdp, cap } => commands::analyze(&ctx, &mdp, cap),
        Command::Verify {
            mdp,
            spec,
            tier,
            grid,
            tol,
            opts,
        } => commands::verify(&ctx, &mdp, &spec, tier, grid.as_deref(), tol, &opts),
        Command::Roundtrip {
            spec,
            gadget_bound,
            grid,
            tol,
            opts,
        } => commands::roundtrip(&ctx, &spec, gadget_bound, grid.as_deref(), tol, &opts),
    };
    match result {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable"));
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
