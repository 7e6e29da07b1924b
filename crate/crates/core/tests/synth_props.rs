mod common;

use common::constructions::{instance, KINDS};
use common::*;
use mdpvf::algebra::rational::{from_f64, int, to_f64};
use mdpvf::analyzer::{analyze, verify_exact, verify_numeric, DEFAULT_TOL};
use mdpvf::solver::{degenerate_value_symbolic as value, DEFAULT_POLICY_CAP};
use mdpvf::synth::{
    add, alternate_negate, contract, gadget_search, mk_const, mk_geometric, mul_by_poly, power, product_contract, scale,
    shift, synth_branch, synth_spec, FactoredDenominator, SpecBranch, DEFAULT_GADGET_BOUND,
};
use mdpvf::{MaxFSpec, Polynomial, Rational};
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;
use rand::Rng;

/// Denominator of total degree at most `max_degree` from cyclotomic
/// indices, rational real roots and rational complex quadratics.
fn random_denominator(r: &mut TestRng, max_degree: usize) -> FactoredDenominator {
    let mut den = FactoredDenominator::default();
    let mut budget = r.gen_range(0..=max_degree);
    let mut tries = 0;
    while budget > 0 && tries < 20 {
        tries += 1;
        match r.gen_range(0..3) {
            0 => {
                let d = r.gen_range(1..=12usize);
                let phi = mdpvf::algebra::euler_phi(d);
                let lcm = den.cyclotomic.iter().fold(d, |a, &b| a.lcm(&b));
                if phi <= budget && lcm <= 30 && !den.cyclotomic.contains(&d) {
                    den.cyclotomic.push(d);
                    budget -= phi;
                }
            }
            1 => {
                let w = random_rational(r, 8, 4);
                if w.abs() > one() {
                    match den.real_roots.iter_mut().find(|(x, _)| *x == w) {
                        Some((_, k)) => *k += 1,
                        None => den.real_roots.push((w, 1)),
                    }
                    budget -= 1;
                }
            }
            _ => {
                let (b, c) = (random_rational(r, 8, 3), random_rational(r, 8, 5).abs());
                if budget >= 2 && c > one() && &b * &b < int(4) * &c {
                    den.quadratics.push((b, c, 1));
                    budget -= 2;
                }
            }
        }
    }
    den.cyclotomic.sort_unstable();
    den
}

fn random_branch(r: &mut TestRng) -> SpecBranch {
    SpecBranch::new(random_polynomial(r, 4, 8), random_denominator(r, 6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_construction_round_trips(seed in any::<u64>(), kind in 0usize..KINDS.len()) {
        let inst = instance(kind, &mut rng(seed));
        prop_assert!(inst.output.as_mdp().validate().is_empty());
        prop_assert_eq!(value(&inst.output), inst.expected.clone());
        for x in sample_points(3) {
            prop_assert_eq!(dense_value(&inst.output, &x), (inst.pointwise)(&x));
        }
    }

    #[test]
    fn construction_sizes(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let f = random_degenerate(&mut r, 6, 8);
        let g = random_degenerate(&mut r, 6, 8);
        let (nf, ng) = (f.num_states(), g.num_states());
        prop_assert_eq!(mk_const(int(3)).num_states(), 2);
        prop_assert_eq!(mk_geometric().num_states(), 1);
        prop_assert_eq!(scale(&f, &int(2)).num_states(), nf);
        prop_assert_eq!(alternate_negate(&f).num_states(), 2 * nf);
        prop_assert_eq!(shift(&f).num_states(), nf + 1);
        prop_assert_eq!(contract(&f, &random_unit_open(&mut r, 16)).unwrap().num_states(), nf + 1);
        prop_assert_eq!(add(&f, &g).num_states(), nf + ng);
        prop_assert_eq!(power(&f, n).unwrap().num_states(), n * nf);
        prop_assert_eq!(product_contract(&f, &g, &random_unit_open(&mut r, 16)).unwrap().num_states(), ng + ng * nf);
    }

    #[test]
    fn construction_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_degenerate(&mut r, 6, 8);
        let g = random_degenerate(&mut r, 6, 8);
        let c = random_unit_open(&mut r, 16);
        prop_assert_eq!(value(&alternate_negate(&alternate_negate(&f))), value(&f));
        prop_assert_eq!(value(&mul_by_poly(&f, &poly(&[0, 1]))), value(&shift(&f)));
        prop_assert_eq!(value(&product_contract(&f, &mk_const(one()), &c).unwrap()), value(&f));
        prop_assert_eq!(value(&product_contract(&mk_const(one()), &g, &c).unwrap()), value(&contract(&g, &c).unwrap()));
        prop_assert_eq!(value(&add(&f, &mk_const(int(0)))), value(&f));
        prop_assert_eq!(value(&contract(&f, &one()).unwrap()), value(&f));
        prop_assert_eq!(value(&power(&f, 1).unwrap()), value(&f));
    }

    #[test]
    fn certificates_are_valid_and_deterministic(bn in -30i64..=30, cn in 1i64..=60, d in 1i64..=8) {
        let (b, c) = (mdpvf::algebra::rat(bn, d), mdpvf::algebra::rat(cn, d));
        prop_assume!(c > one() && &b * &b < int(4) * &c);
        let cert = gadget_search(&b, &c, DEFAULT_GADGET_BOUND).unwrap();
        prop_assert!(cert.verify(&b, &c));
        prop_assert!(cert.alpha.iter().all(|a| !a.is_negative()));
        prop_assert_eq!(cert.alpha.iter().sum::<Rational>(), one());
        prop_assert_eq!(gadget_search(&b, &c, DEFAULT_GADGET_BOUND).unwrap(), cert);
    }

    #[test]
    fn spec_json_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = MaxFSpec::new((0..r.gen_range(1..=3)).map(|_| random_branch(&mut r)).collect());
        prop_assert_eq!(MaxFSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}

/// Single-branch specs: exact round trip, state bound, and the numeric
/// tier never contradicting the exact one.
#[test]
fn random_single_branch_specs_round_trip() {
    let mut r = rng(0x5EC);
    for i in 0..200 {
        let b = random_branch(&mut r);
        let s = synth_branch(&b.numerator, &b.denominator, DEFAULT_GADGET_BOUND).unwrap();
        assert!(s.states <= s.state_bound, "#{i}: {} states over bound {}", s.states, s.state_bound);
        for step in &s.steps {
            assert!(step.states <= step.state_bound, "#{i}: {step:?}");
        }
        let spec = MaxFSpec::new(vec![b.clone()]);
        let exact = verify_exact(s.mdp.as_mdp(), &spec).unwrap();
        assert!(exact.passed(), "#{i}: {exact:?}");
        if i % 10 == 0 {
            let grid: Vec<f64> = (0..25).map(|k| k as f64 * 0.04).collect();
            let numeric = verify_numeric(s.mdp.as_mdp(), &spec, &grid, DEFAULT_TOL).unwrap();
            assert!(numeric.passed(), "#{i}: {numeric:?}");
        }
    }
}

/// Multi-branch specs: value iteration at 25 grid points matches the
/// pointwise maximum of the exact branch values.
#[test]
fn random_multi_branch_specs_match_envelope() {
    let mut r = rng(0x3A8);
    let grid: Vec<f64> = (0..25).map(|k| k as f64 * 0.04).collect();
    for i in 0..20 {
        let spec = MaxFSpec::new((0..r.gen_range(2..=3)).map(|_| random_branch(&mut r)).collect());
        let s = synth_spec(&spec, DEFAULT_GADGET_BOUND).unwrap();
        assert!(!s.degenerate);
        let report = verify_numeric(&s.mdp, &spec, &grid, DEFAULT_TOL).unwrap();
        assert!(report.passed(), "#{i}: {report:?}");
        for x in [0.1, 0.5, 0.9] {
            let exact = spec.targets().iter().map(|f| f.eval(&from_f64(x).unwrap()).unwrap()).max().unwrap();
            let vi = mdpvf::solver::value_iteration(&s.mdp, x, DEFAULT_TOL).unwrap().from_initial(&s.mdp.initial);
            assert!((vi - to_f64(&exact)).abs() <= 2.0 * DEFAULT_TOL, "#{i} at {x}");
        }
        let a = analyze(&s.mdp, DEFAULT_POLICY_CAP).unwrap();
        assert!(a.admissible, "#{i}");
    }
}

#[test]
fn flagship_and_examples() {
    let den = FactoredDenominator {
        cyclotomic: vec![2],
        real_roots: vec![(int(2), 1)],
        quadratics: vec![(int(0), int(4), 1)],
    };
    let s = synth_branch(&Polynomial::one(), &den, DEFAULT_GADGET_BOUND).unwrap();
    assert_eq!(value(&s.mdp).denominator(), &poly(&[-8, -4, 2, -1, 1]));
    assert_eq!(s.certificates.len(), 1);

    let two_const = MaxFSpec::new(vec![
        SpecBranch::new(Polynomial::constant(int(1)), FactoredDenominator::default()),
        SpecBranch::new(Polynomial::constant(int(2)), FactoredDenominator::default()),
    ]);
    let m = synth_spec(&two_const, DEFAULT_GADGET_BOUND).unwrap().mdp;
    let env = analyze(&m, DEFAULT_POLICY_CAP).unwrap().envelope;
    assert!(env.switchpoints.is_empty());
    assert_eq!(env.max_at(&mdpvf::algebra::rat(1, 3)), int(2));
}
