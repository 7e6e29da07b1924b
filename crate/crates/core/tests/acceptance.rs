//! Acceptance criteria, run sequentially so wall-clock limits are meaningful.
//! Prints one line per criterion and exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::constructions::{instance, KINDS};
use common::*;
use mdpvf::algebra::rational::{from_f64, int, rat, to_f64};
use mdpvf::analyzer::{analyze, default_grid, verify_exact, verify_numeric};
use mdpvf::solver::{degenerate_value_symbolic, policy_envelope, value_iteration, DEFAULT_POLICY_CAP};
use mdpvf::synth::{gadget_search, synth_branch, synth_spec, FactoredDenominator, SpecBranch, DEFAULT_GADGET_BOUND};
use mdpvf::{MaxFSpec, Polynomial, Rational, RationalFunction};
use num_traits::Zero;

const TOL: f64 = 1e-9;
const EPSILON: f64 = 1e-9;
const SWITCH_WIDTH: f64 = 1e-12;
const AC1_LIMIT: Duration = Duration::from_secs(1);
const AC2_LIMIT: Duration = Duration::from_secs(60);
const AC2_INSTANCES: usize = 20;
const AC3_LIMIT: Duration = Duration::from_secs(10);
const AC5_LIMIT: Duration = Duration::from_secs(300);
const AC5_MDPS: usize = 500;
const AC6_LIMIT: Duration = Duration::from_secs(30);
const AC6_MDPS: usize = 100;
const AC7_MDPS: usize = 200;
const AC7_TERMS: usize = 30;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<String, String> {
    let t = start.elapsed();
    check(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(format!("{t:.2?} (limit {limit:?})"))
}

/// Gaussian elimination on a small dense rational system.
fn solve_dense(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for i in 0..n {
            if i != col {
                let f = &a[i][col] / &a[col][col];
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[col];
                b[i] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Schoolbook long division on ascending coefficient vectors.
fn long_division(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![Rational::zero(); num.len().saturating_sub(dd)];
    for k in (0..q.len()).rev() {
        let c = &r[k + dd] / &den[dd];
        for (j, d) in den.iter().enumerate() {
            r[k + j] -= &c * d;
        }
        q[k] = c;
    }
    r.truncate(dd);
    (q, r)
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let cert = gadget_search(&int(0), &int(4), DEFAULT_GADGET_BOUND).map_err(|e| e.to_string())?;
    check((cert.k, cert.l, cert.m) == (1, 2, 4), || format!("triple {:?}", (cert.k, cert.l, cert.m)))?;
    check(cert.alpha == vec![int(0), rat(3, 4), rat(1, 4)], || format!("alpha {:?}", cert.alpha))?;

    // (2i)^e = re + im i = u + v (2i) with u = re, v = im / 2
    let power = |e: usize| -> (Rational, Rational) {
        let (mut re, mut im) = (int(1), int(0));
        for _ in 0..e {
            let nre = -(&im * int(2));
            im = &re * int(2);
            re = nre;
        }
        (re, im / int(2))
    };
    let system = |k: usize, l: usize, m: usize| {
        let p = [power(k), power(l), power(m)];
        solve_dense(
            vec![
                p.iter().map(|x| x.0.clone()).collect(),
                p.iter().map(|x| x.1.clone()).collect(),
                vec![int(1); 3],
            ],
            vec![int(1), int(0), int(1)],
        )
    };
    let oracle = system(1, 2, 4).ok_or("oracle system singular")?;
    check(oracle == cert.alpha, || format!("oracle alpha {oracle:?}"))?;
    let rejected = system(1, 2, 3).ok_or("(1,2,3) system singular")?;
    check(rejected[1] == rat(-1, 4), || format!("(1,2,3) gives {rejected:?}"))?;

    let d = vec![int(1), int(0), rat(-3, 4), int(0), rat(-1, 4)];
    let (q, r) = long_division(&d, &[int(4), int(0), int(1)]);
    check(r.iter().all(Zero::is_zero), || format!("remainder {r:?}"))?;
    check(q == vec![rat(1, 4), int(0), rat(-1, 4)], || format!("quotient {q:?}"))?;
    check(cert.cycle_denominator().coeffs() == &d[..], || "certificate denominator differs".into())?;
    within(AC1_LIMIT, start)
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let points = [int(0), rat(1, 3), rat(5, 7), rat(-1, 2)];
    for (kind, name) in KINDS.iter().enumerate() {
        let mut r = rng(0xAC2 + kind as u64);
        for i in 0..AC2_INSTANCES {
            let inst = instance(kind, &mut r);
            check(inst.output.as_mdp().validate().is_empty(), || format!("{name} #{i}: invalid output"))?;
            let got = degenerate_value_symbolic(&inst.output);
            check(got == inst.expected, || format!("{name} #{i}: value {got}, expected {}", inst.expected))?;
            for x in &points {
                if kind == 10 && x < &Rational::zero() {
                    continue;
                }
                let dense = dense_value(&inst.output, x);
                let want = (inst.pointwise)(x);
                check(dense == want, || format!("{name} #{i} at {x}: dense {dense}, oracle {want}"))?;
            }
        }
    }
    within(AC2_LIMIT, start).map(|t| format!("{} constructions x {AC2_INSTANCES}, {t}", KINDS.len()))
}

fn flagship_spec() -> MaxFSpec {
    MaxFSpec::single(
        Polynomial::one(),
        FactoredDenominator {
            cyclotomic: vec![2],
            real_roots: vec![(int(2), 1)],
            quadratics: vec![(int(0), int(4), 1)],
        },
    )
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let spec = flagship_spec();
    let b = &spec.branches[0];
    let s = synth_branch(&b.numerator, &b.denominator, DEFAULT_GADGET_BOUND).map_err(|e| e.to_string())?;
    let q = &(&poly(&[1, 1]) * &poly(&[-2, 1])) * &poly(&[4, 0, 1]);
    let expected = RationalFunction::new(Polynomial::one(), q.clone()).map_err(|e| e.to_string())?;
    let got = degenerate_value_symbolic(&s.mdp);
    check(got == expected, || format!("value {got}"))?;
    for x in sample_points(6) {
        let dense = dense_value(&s.mdp, &x);
        check(dense == q.eval(&x).recip(), || format!("dense oracle differs at {x}"))?;
    }
    let report = verify_exact(s.mdp.as_mdp(), &spec).map_err(|e| e.to_string())?;
    check(report.passed(), || format!("verify_exact: {report:?}"))?;
    within(AC3_LIMIT, start).map(|t| format!("{} states, {t}", s.states))
}

fn ac4() -> Outcome {
    let spec = MaxFSpec::new(vec![
        SpecBranch::new(Polynomial::constant(int(2)), FactoredDenominator::default()),
        SpecBranch::new(
            Polynomial::constant(int(-1)),
            FactoredDenominator {
                cyclotomic: vec![1],
                ..Default::default()
            },
        ),
    ]);
    let m = synth_spec(&spec, DEFAULT_GADGET_BOUND).map_err(|e| e.to_string())?.mdp;
    let grid = default_grid();
    check(grid.len() == 99, || "grid size".into())?;
    let mut worst = 0.0f64;
    for &x in &grid {
        let vi = value_iteration(&m, x, EPSILON).map_err(|e| e.to_string())?.from_initial(&m.initial);
        worst = worst.max((vi - f64::max(2.0, 1.0 / (1.0 - x))).abs());
    }
    check(worst <= TOL + EPSILON, || format!("closed-form deviation {worst:e}"))?;
    let report = verify_numeric(&m, &spec, &grid, TOL).map_err(|e| e.to_string())?;
    check(report.passed(), || format!("verify_numeric: {report:?}"))?;

    let a = analyze(&m, DEFAULT_POLICY_CAP).map_err(|e| e.to_string())?;
    check(a.admissible, || "envelope branch inadmissible".into())?;
    check(a.envelope.switchpoints.len() == 1, || format!("switchpoints {:?}", a.envelope.switchpoints))?;
    let sp = &a.envelope.switchpoints[0];
    let width = to_f64(&(&sp.hi - &sp.lo));
    check(width < SWITCH_WIDTH, || format!("width {width:e}"))?;
    check(sp.contains(&rat(1, 2)), || format!("[{}, {}] misses 1/2", sp.lo, sp.hi))?;
    Ok(format!("max deviation {worst:.1e}, switchpoint width {width:.1e}"))
}

fn ac5() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xAC5);
    let grid: Vec<f64> = (0..25).map(|i| i as f64 * 0.04).collect();
    let mut branches = 0;
    for i in 0..AC5_MDPS {
        let m = random_mdp(&mut r, 4, 3, 8);
        let env = policy_envelope(&m, DEFAULT_POLICY_CAP).map_err(|e| format!("mdp #{i}: {e}"))?;
        branches += env.branches.len();
        for b in &env.branches {
            check(b.admissibility.admissible, || format!("mdp #{i}: {} is {}", b.value, b.admissibility.verdict))?;
        }
        for &x in &grid {
            let exact = to_f64(&env.max_at(&from_f64(x).expect("finite")));
            let vi = value_iteration(&m, x, EPSILON).map_err(|e| e.to_string())?.from_initial(&m.initial);
            check((vi - exact).abs() <= EPSILON, || format!("mdp #{i} at {x}: vi {vi}, envelope {exact}"))?;
        }
    }
    within(AC5_LIMIT, start).map(|t| format!("{AC5_MDPS} MDPs, {branches} branches, {t}"))
}

fn ac6() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xAC6);
    let mut done = 0;
    while done < AC6_MDPS {
        let m = random_degenerate(&mut r, 6, 8);
        if m.initial().len() < 2 {
            continue;
        }
        let d = m.as_mdp().determinize_initial().map_err(|e| e.to_string())?;
        let before = degenerate_value_symbolic(&m);
        let dm = mdpvf::DegenerateMdp::new(d).map_err(|e| format!("#{done}: {e}"))?;
        check(dm.initial().len() == 1, || format!("#{done}: initial not a point mass"))?;
        let after = degenerate_value_symbolic(&dm);
        check(before == after, || format!("#{done}: {before} became {after}"))?;
        for x in sample_points(3) {
            check(dense_value(&m, &x) == dense_value(&dm, &x), || format!("#{done}: dense oracle differs at {x}"))?;
        }
        done += 1;
    }
    within(AC6_LIMIT, start).map(|t| format!("{AC6_MDPS} MDPs, {t}"))
}

fn ac7() -> Outcome {
    let mut r = rng(0xAC7);
    for i in 0..AC7_MDPS {
        let m = random_degenerate(&mut r, 6, 8);
        let series = degenerate_value_symbolic(&m).series(AC7_TERMS).map_err(|e| e.to_string())?;
        check(series == direct_series(&m, AC7_TERMS), || format!("#{i}: series differs from mu Q^t r"))?;
        let bound = max_abs(&m.payoffs());
        check(series.iter().all(|x| num_traits::Signed::abs(x) <= bound), || format!("#{i}: coefficient exceeds {bound}"))?;
    }
    Ok(format!("{AC7_MDPS} MDPs x {AC7_TERMS} coefficients"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("AC1 gadget certificate (0, 4)", ac1),
        ("AC2 construction round-trips", ac2),
        ("AC3 flagship synthesis", ac3),
        ("AC4 two-branch envelope", ac4),
        ("AC5 random MDP admissibility", ac5),
        ("AC6 initial determinization", ac6),
        ("AC7 Taylor coefficient bound", ac7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
