//! Finite Markov decision processes with exact rational data.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Sparse probability vector over state indices. Absent entries are zero.
pub type Distribution = BTreeMap<usize, Rational>;

/// Support size above which [`Mdp::determinize_initial`] refuses MDPs whose
/// support carries choices (one new action per joint profile).
pub const DEFAULT_SUPPORT_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub name: String,
    pub payoff: Rational,
    pub transition: Distribution,
}

impl Action {
    pub fn new(name: impl Into<String>, payoff: Rational, transition: Distribution) -> Self {
        Action {
            name: name.into(),
            payoff,
            transition,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mdp {
    pub states: Vec<String>,
    /// `actions[s]` is the ordered action list of state `s`.
    pub actions: Vec<Vec<Action>>,
    pub initial: Distribution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateState { state: String },
    DuplicateAction { state: String, action: String },
    EmptyActions { state: String },
    RowSum { state: String, action: String, sum: Rational },
    NegativeProbability { state: String, action: String, target: String },
    UnknownTarget { state: String, action: String, index: usize },
    InitialSum { sum: Rational },
    NegativeInitial { state: String },
    UnknownInitial { index: usize },
    MissingPayoff { state: String, action: String },
    MissingTransition { state: String, action: String },
    UnknownKey { section: &'static str, key: String },
    UnknownStateName { section: &'static str, name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateState { state } => write!(f, "duplicate state {state:?}"),
            DuplicateAction { state, action } => write!(f, "duplicate action {action:?} at state {state:?}"),
            EmptyActions { state } => write!(f, "state {state:?} has no actions"),
            RowSum { state, action, sum } => {
                write!(f, "transition row {state}|{action} sums to {} instead of 1", format_rational(sum))
            }
            NegativeProbability { state, action, target } => {
                write!(f, "negative probability {state}|{action} -> {target}")
            }
            UnknownTarget { state, action, index } => {
                write!(f, "transition {state}|{action} targets unknown state index {index}")
            }
            InitialSum { sum } => write!(f, "initial distribution sums to {} instead of 1", format_rational(sum)),
            NegativeInitial { state } => write!(f, "negative initial probability at {state:?}"),
            UnknownInitial { index } => write!(f, "initial distribution names unknown state index {index}"),
            MissingPayoff { state, action } => write!(f, "missing payoff for {state}|{action}"),
            MissingTransition { state, action } => write!(f, "missing transition for {state}|{action}"),
            UnknownKey { section, key } => write!(f, "{section}: key {key:?} matches no state|action pair"),
            UnknownStateName { section, name } => write!(f, "{section}: unknown state {name:?}"),
        }
    }
}

impl Mdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn is_degenerate(&self) -> bool {
        self.actions.iter().all(|a| a.len() == 1)
    }

    /// Number of pure stationary policies, saturating at `u128::MAX`.
    pub fn policy_count(&self) -> u128 {
        self.actions
            .iter()
            .try_fold(1u128, |acc, a| acc.checked_mul(a.len() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn max_abs_payoff(&self) -> Rational {
        self.actions
            .iter()
            .flatten()
            .map(|a| a.payoff.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Every violation of the MDP invariants, checked exactly.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.states.len();
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s.as_str()) {
                out.push(Violation::DuplicateState { state: s.clone() });
            }
        }
        for (si, acts) in self.actions.iter().enumerate() {
            let state = self.states.get(si).cloned().unwrap_or_else(|| format!("#{si}"));
            if acts.is_empty() {
                out.push(Violation::EmptyActions { state: state.clone() });
            }
            let mut names = HashSet::new();
            for a in acts {
                if !names.insert(a.name.as_str()) {
                    out.push(Violation::DuplicateAction {
                        state: state.clone(),
                        action: a.name.clone(),
                    });
                }
                let mut sum = Rational::zero();
                for (&t, p) in &a.transition {
                    if t >= n {
                        out.push(Violation::UnknownTarget {
                            state: state.clone(),
                            action: a.name.clone(),
                            index: t,
                        });
                    } else if p.is_negative() {
                        out.push(Violation::NegativeProbability {
                            state: state.clone(),
                            action: a.name.clone(),
                            target: self.states[t].clone(),
                        });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    out.push(Violation::RowSum {
                        state: state.clone(),
                        action: a.name.clone(),
                        sum,
                    });
                }
            }
        }
        for si in self.actions.len()..n {
            out.push(Violation::EmptyActions {
                state: self.states[si].clone(),
            });
        }
        let mut sum = Rational::zero();
        for (&s, p) in &self.initial {
            if s >= n {
                out.push(Violation::UnknownInitial { index: s });
            } else if p.is_negative() {
                out.push(Violation::NegativeInitial {
                    state: self.states[s].clone(),
                });
            }
            sum += p;
        }
        if !sum.is_one() {
            out.push(Violation::InitialSum { sum });
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMdp(v))
        }
    }

    /// Moves the initial randomness into a new deterministic start state.
    ///
    /// The new state gets one action per joint choice of actions on the
    /// support of the initial distribution; each carries the expected
    /// first-stage payoff and transition. Original states keep their indices
    /// and data.
    pub fn determinize_initial(&self) -> Result<Mdp> {
        self.determinize_initial_with_limit(DEFAULT_SUPPORT_LIMIT)
    }

    pub fn determinize_initial_with_limit(&self, support_limit: usize) -> Result<Mdp> {
        self.ensure_valid()?;
        let support: Vec<(usize, &Rational)> = self.initial.iter().filter(|(_, p)| !p.is_zero()).map(|(&s, p)| (s, p)).collect();
        let has_choice = support.iter().any(|&(s, _)| self.actions[s].len() > 1);
        if has_choice && support.len() > support_limit {
            return Err(Error::SupportTooLarge {
                size: support.len(),
                limit: support_limit,
            });
        }
        let mut profile = vec![0usize; support.len()];
        let mut new_actions = Vec::new();
        loop {
            let mut payoff = Rational::zero();
            let mut transition = Distribution::new();
            for (&(s, mu), &a) in support.iter().zip(&profile) {
                let act = &self.actions[s][a];
                payoff += mu * &act.payoff;
                for (&t, p) in &act.transition {
                    *transition.entry(t).or_insert_with(Rational::zero) += mu * p;
                }
            }
            transition.retain(|_, p| !p.is_zero());
            let name = if has_choice {
                support
                    .iter()
                    .zip(&profile)
                    .map(|(&(s, _), &a)| format!("{}={}", self.states[s], self.actions[s][a].name))
                    .collect::<Vec<_>>()
                    .join(",")
            } else {
                "expect".to_string()
            };
            new_actions.push(Action::new(name, payoff, transition));
            // odometer over the joint profiles
            let mut i = 0;
            loop {
                if i == support.len() {
                    let mut out = self.clone();
                    let start = out.states.len();
                    out.states.push(fresh_name("init", &self.states));
                    out.actions.push(new_actions);
                    out.initial = Distribution::from([(start, Rational::one())]);
                    return Ok(out);
                }
                profile[i] += 1;
                if profile[i] < self.actions[support[i].0].len() {
                    break;
                }
                profile[i] = 0;
                i += 1;
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MdpDocument::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Mdp> {
        let doc: MdpDocument = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_mdp()
    }
}

/// `base`, or `base#k` for the smallest `k` making it unused.
pub(crate) fn fresh_name(base: &str, taken: &[String]) -> String {
    let taken: HashSet<&str> = taken.iter().map(String::as_str).collect();
    if !taken.contains(base) {
        return base.to_string();
    }
    (2..)
        .map(|k| format!("{base}#{k}"))
        .find(|c| !taken.contains(c.as_str()))
        .expect("unbounded")
}

/// An MDP with exactly one action per state: a Markov reward chain.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerateMdp(Mdp);

/// Name of the single action in synthesized chains.
pub const CHAIN_ACTION: &str = "go";

impl DegenerateMdp {
    pub fn new(m: Mdp) -> Result<Self> {
        m.ensure_valid()?;
        if !m.is_degenerate() {
            return Err(Error::NotDegenerate);
        }
        Ok(DegenerateMdp(m))
    }

    /// Assembles a chain from per-state data. Callers guarantee validity.
    pub(crate) fn from_chain(names: Vec<String>, payoffs: Vec<Rational>, rows: Vec<Distribution>, initial: Distribution) -> Self {
        debug_assert_eq!(names.len(), payoffs.len());
        debug_assert_eq!(names.len(), rows.len());
        let actions = payoffs
            .into_iter()
            .zip(rows)
            .map(|(r, q)| vec![Action::new(CHAIN_ACTION, r, q)])
            .collect();
        let m = Mdp {
            states: names,
            actions,
            initial,
        };
        debug_assert!(m.validate().is_empty(), "{:?}", m.validate());
        DegenerateMdp(m)
    }

    pub fn as_mdp(&self) -> &Mdp {
        &self.0
    }

    pub fn into_mdp(self) -> Mdp {
        self.0
    }

    pub fn num_states(&self) -> usize {
        self.0.states.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0.states
    }

    pub fn payoff(&self, s: usize) -> &Rational {
        &self.0.actions[s][0].payoff
    }

    pub fn row(&self, s: usize) -> &Distribution {
        &self.0.actions[s][0].transition
    }

    pub fn initial(&self) -> &Distribution {
        &self.0.initial
    }

    pub fn payoffs(&self) -> Vec<Rational> {
        (0..self.num_states()).map(|s| self.payoff(s).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Distribution> {
        (0..self.num_states()).map(|s| self.row(s).clone()).collect()
    }

    /// Expected stage-one payoff under the initial distribution.
    pub fn first_stage_payoff(&self) -> Rational {
        self.initial().iter().map(|(&s, p)| p * self.payoff(s)).sum()
    }

    /// Distribution of the stage-two state.
    pub fn second_stage(&self) -> Distribution {
        let mut out = Distribution::new();
        for (&s, mu) in self.initial() {
            for (&t, p) in self.row(s) {
                *out.entry(t).or_insert_with(Rational::zero) += mu * p;
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

impl TryFrom<Mdp> for DegenerateMdp {
    type Error = Error;
    fn try_from(m: Mdp) -> Result<Self> {
        DegenerateMdp::new(m)
    }
}

impl From<DegenerateMdp> for Mdp {
    fn from(d: DegenerateMdp) -> Mdp {
        d.0
    }
}

/// On-disk form: `"state|action"` keys, `"num/den"` values, zeros omitted.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MdpDocument {
    states: Vec<String>,
    actions: BTreeMap<String, Vec<String>>,
    payoff: BTreeMap<String, String>,
    transition: BTreeMap<String, BTreeMap<String, String>>,
    initial: BTreeMap<String, String>,
}

fn pair_key(state: &str, action: &str) -> String {
    format!("{state}|{action}")
}

impl From<&Mdp> for MdpDocument {
    fn from(m: &Mdp) -> Self {
        let mut actions = BTreeMap::new();
        let mut payoff = BTreeMap::new();
        let mut transition = BTreeMap::new();
        for (s, acts) in m.states.iter().zip(&m.actions) {
            actions.insert(s.clone(), acts.iter().map(|a| a.name.clone()).collect());
            for a in acts {
                let key = pair_key(s, &a.name);
                payoff.insert(key.clone(), format_rational(&a.payoff));
                let row = a
                    .transition
                    .iter()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(&t, p)| (m.states[t].clone(), format_rational(p)))
                    .collect();
                transition.insert(key, row);
            }
        }
        let initial = m
            .initial
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(&s, p)| (m.states[s].clone(), format_rational(p)))
            .collect();
        MdpDocument {
            states: m.states.clone(),
            actions,
            payoff,
            transition,
            initial,
        }
    }
}

impl MdpDocument {
    fn into_mdp(self) -> Result<Mdp> {
        let mut violations = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.as_str(), i).is_some() {
                violations.push(Violation::DuplicateState { state: s.clone() });
            }
        }
        for name in self.actions.keys() {
            if !index.contains_key(name.as_str()) {
                violations.push(Violation::UnknownStateName {
                    section: "actions",
                    name: name.clone(),
                });
            }
        }
        let lookup = |section: &'static str, name: &str, violations: &mut Vec<Violation>| -> Option<usize> {
            let found = index.get(name).copied();
            if found.is_none() {
                violations.push(Violation::UnknownStateName {
                    section,
                    name: name.to_string(),
                });
            }
            found
        };

        let mut used_keys = BTreeSet::new();
        let mut actions = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let names = self.actions.get(s).cloned().unwrap_or_default();
            let mut acts = Vec::with_capacity(names.len());
            for a in names {
                let key = pair_key(s, &a);
                if !used_keys.insert(key.clone()) {
                    violations.push(Violation::DuplicateAction {
                        state: s.clone(),
                        action: a.clone(),
                    });
                    continue;
                }
                let payoff = match self.payoff.get(&key) {
                    Some(v) => parse_rational(v)?,
                    None => {
                        violations.push(Violation::MissingPayoff {
                            state: s.clone(),
                            action: a.clone(),
                        });
                        Rational::zero()
                    }
                };
                let mut transition = Distribution::new();
                match self.transition.get(&key) {
                    Some(row) => {
                        for (t, p) in row {
                            let p = parse_rational(p)?;
                            if let Some(ti) = lookup("transition", t, &mut violations) {
                                if !p.is_zero() {
                                    transition.insert(ti, p);
                                }
                            }
                        }
                    }
                    None => violations.push(Violation::MissingTransition {
                        state: s.clone(),
                        action: a.clone(),
                    }),
                }
                acts.push(Action::new(a, payoff, transition));
            }
            actions.push(acts);
        }
        for (section, keys) in [("payoff", self.payoff.keys().collect::<Vec<_>>()), ("transition", self.transition.keys().collect())] {
            for k in keys {
                if !used_keys.contains(k) {
                    violations.push(Violation::UnknownKey { section, key: k.clone() });
                }
            }
        }
        let mut initial = Distribution::new();
        for (s, p) in &self.initial {
            let p = parse_rational(p)?;
            if let Some(si) = lookup("initial", s, &mut violations) {
                if !p.is_zero() {
                    initial.insert(si, p);
                }
            }
        }
        if violations.is_empty() {
            Ok(Mdp {
                states: self.states,
                actions,
                initial,
            })
        } else {
            Err(Error::InvalidMdp(violations))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn single_loop(payoff: i64) -> Mdp {
        Mdp {
            states: vec!["s".into()],
            actions: vec![vec![Action::new("a", int(payoff), Distribution::from([(0, int(1))]))]],
            initial: Distribution::from([(0, int(1))]),
        }
    }

    #[test]
    fn canonical_valid() {
        assert!(single_loop(1).validate().is_empty());
        assert!(single_loop(1).is_degenerate());
    }

    #[test]
    fn row_sum_violation() {
        let mut m = single_loop(1);
        m.actions[0][0].transition.insert(0, rat(9, 10));
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::RowSum { .. }));
    }

    #[test]
    fn empty_actions_violation() {
        let mut m = single_loop(1);
        m.states.push("t".into());
        m.actions.push(vec![]);
        let v = m.validate();
        assert_eq!(v, vec![Violation::EmptyActions { state: "t".into() }]);
    }

    #[test]
    fn negative_and_initial_violations() {
        let mut m = single_loop(1);
        m.actions[0][0].transition = Distribution::from([(0, int(2)), (1, int(-1))]);
        m.initial = Distribution::from([(0, rat(1, 2))]);
        let v = m.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::UnknownTarget { index: 1, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::InitialSum { .. })));
    }

    #[test]
    fn choice_is_not_degenerate() {
        let mut m = single_loop(1);
        m.actions[0].push(Action::new("b", int(0), Distribution::from([(0, int(1))])));
        assert!(!m.is_degenerate());
        assert_eq!(m.policy_count(), 2);
        assert_eq!(DegenerateMdp::new(m), Err(Error::NotDegenerate));
    }

    #[test]
    fn json_round_trip_and_format() {
        let m = Mdp {
            states: vec!["s1".into(), "s2".into()],
            actions: vec![
                vec![Action::new("a", rat(1, 2), Distribution::from([(1, int(1))]))],
                vec![Action::new("b", int(-1), Distribution::from([(0, rat(1, 3)), (1, rat(2, 3))]))],
            ],
            initial: Distribution::from([(0, int(1))]),
        };
        let json = m.to_json();
        assert!(json.contains(r#""s1|a": "1/2""#));
        assert_eq!(Mdp::from_json(&json).unwrap(), m);
    }

    #[test]
    fn json_totality_violations() {
        let doc = r#"{"states":["s"],"actions":{"s":["a"]},"payoff":{},"transition":{"s|a":{"s":"1"},"s|z":{}},"initial":{"s":"1","t":"0"}}"#;
        match Mdp::from_json(doc) {
            Err(Error::InvalidMdp(v)) => {
                assert!(v.contains(&Violation::MissingPayoff { state: "s".into(), action: "a".into() }));
                assert!(v.contains(&Violation::UnknownKey { section: "transition", key: "s|z".into() }));
                assert!(v.contains(&Violation::UnknownStateName { section: "initial", name: "t".into() }));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Mdp::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(
            Mdp::from_json(r#"{"states":["s"],"actions":{"s":["a"]},"payoff":{"s|a":"x"},"transition":{"s|a":{"s":"1"}},"initial":{"s":"1"}}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn determinize_shape() {
        let m = Mdp {
            states: vec!["x".into(), "y".into()],
            actions: vec![
                vec![Action::new("a", int(0), Distribution::from([(0, int(1))]))],
                vec![Action::new("a", int(2), Distribution::from([(0, int(1))]))],
            ],
            initial: Distribution::from([(0, rat(1, 2)), (1, rat(1, 2))]),
        };
        let d = m.determinize_initial().unwrap();
        assert_eq!(d.num_states(), 3);
        assert_eq!(&d.actions[..2], &m.actions[..]);
        assert_eq!(d.actions[2].len(), 1);
        assert_eq!(d.actions[2][0].payoff, int(1));
        assert_eq!(d.actions[2][0].transition, Distribution::from([(0, int(1))]));
        assert_eq!(d.initial, Distribution::from([(2, int(1))]));
        assert!(d.validate().is_empty());
    }

    #[test]
    fn determinize_profiles_and_limit() {
        let mut m = single_loop(1);
        m.actions[0].push(Action::new("b", int(3), Distribution::from([(0, int(1))])));
        let d = m.determinize_initial().unwrap();
        assert_eq!(d.actions[1].len(), 2);
        assert_eq!(d.actions[1][1].name, "s=b");
        assert!(matches!(
            m.determinize_initial_with_limit(0),
            Err(Error::SupportTooLarge { size: 1, limit: 0 })
        ));
    }

    #[test]
    fn fresh_names() {
        let taken = vec!["init".to_string(), "init#2".to_string()];
        assert_eq!(fresh_name("init", &taken), "init#3");
        assert_eq!(fresh_name("sink", &taken), "sink");
    }
}
