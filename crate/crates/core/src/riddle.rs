//! The consecutive numbers riddle: model generator, utterances and scripted
//! runs under the different announcement semantics.
//!
//! Anne (`a`) and Bill (`b`) are told numbers one apart. A state is a pair
//! `(m, n)` where atom `a<m>` and atom `b<n>` hold. The generated model is
//! cut off at a bound, and states at the bound know more than they should.
//! Runs therefore report which steps and which surviving states lie close
//! enough to the cut to be affected by it.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::action;
use crate::error::{ModelError, Result};
use crate::kripke::{KripkeModel, PointedModel};
use crate::plausibility::{execute_pl, PlausibilityModel, PointedPlausibilityModel};
use crate::syntax::{Agent, Announcement, Atom, Formula};
use crate::update::{self, classify, detect, Detection, Flavor};

pub type Pair = (u32, u32);

/// Which of the two disconnected halves to generate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// Both halves: `a` odd and `b` even, and the reverse.
    #[default]
    Both,
    /// Only the half containing the actual pair.
    ActualOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiddleConfig {
    pub bound: u32,
    pub actual: Pair,
    pub parity: Parity,
}

impl RiddleConfig {
    pub fn new(bound: u32, actual: Pair) -> RiddleConfig {
        RiddleConfig { bound, actual, parity: Parity::Both }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.actual;
        if m.abs_diff(n) != 1 {
            return Err(ModelError::Invalid(format!("numbers ({m},{n}) are not one apart")));
        }
        if m.max(n) > self.bound {
            return Err(ModelError::Invalid(format!(
                "bound {} too small for actual pair ({m},{n})",
                self.bound
            )));
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<Pair> {
        let parity = self.actual.0 % 2;
        let mut out = Vec::new();
        for m in 0..=self.bound {
            if self.parity == Parity::ActualOnly && m % 2 != parity {
                continue;
            }
            for n in [m.wrapping_sub(1), m + 1] {
                if n <= self.bound {
                    out.push((m, n));
                }
            }
        }
        out
    }
}

pub fn state_name((m, n): Pair) -> String {
    format!("({m},{n})")
}

fn a_atom(m: u32) -> String {
    format!("a{m}")
}

fn b_atom(n: u32) -> String {
    format!("b{n}")
}

/// The riddle model: S5 for both agents, pointed at the actual pair.
pub fn riddle_model(cfg: &RiddleConfig) -> Result<PointedModel> {
    cfg.validate()?;
    let pairs = cfg.pairs();
    let mut atoms: Vec<Atom> = (0..=cfg.bound).map(|m| Atom::new(a_atom(m))).collect();
    atoms.extend((0..=cfg.bound).map(|n| Atom::new(b_atom(n))));
    let names: Vec<String> = pairs.iter().map(|&p| state_name(p)).collect();
    let mut model = KripkeModel::new(vec![Agent::new("a"), Agent::new("b")], atoms, names.clone())?;
    for (i, &(m, n)) in pairs.iter().enumerate() {
        model.set_true(&a_atom(m), &names[i])?;
        model.set_true(&b_atom(n), &names[i])?;
        for (j, &(m2, n2)) in pairs.iter().enumerate() {
            if m == m2 {
                model.add_edge("a", &names[i], &names[j])?;
            }
            if n == n2 {
                model.add_edge("b", &names[i], &names[j])?;
            }
        }
    }
    model.point(&state_name(cfg.actual))
}

/// What an agent says in the riddle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Utterance {
    /// "I know your number."
    KnowsNumber,
    /// "I do not know your number."
    NotKnowsNumber,
    /// "That's a lie", read as "I believe a false statement".
    ThatsALie,
}

fn other(speaker: &Agent) -> Result<Agent> {
    match speaker.as_str() {
        "a" => Ok(Agent::new("b")),
        "b" => Ok(Agent::new("a")),
        s => Err(ModelError::UnknownAgent(s.to_string())),
    }
}

/// The formula an utterance stands for, with the number disjunction cut
/// off at the bound.
pub fn expand_utterance(u: Utterance, speaker: &Agent, cfg: &RiddleConfig) -> Result<Formula> {
    let addressee = other(speaker)?;
    let knows = || {
        Formula::disj((0..=cfg.bound).map(|k| {
            let fact = Formula::atom(&if addressee.as_str() == "b" { b_atom(k) } else { a_atom(k) });
            Formula::and(fact.clone(), Formula::Believes(speaker.clone(), Box::new(fact)))
        }))
    };
    Ok(match u {
        Utterance::KnowsNumber => knows(),
        Utterance::NotKnowsNumber => Formula::not(knows()),
        Utterance::ThatsALie => Formula::Believes(speaker.clone(), Box::new(Formula::Bot)),
    })
}

fn flavor_word<S: Serializer>(f: &Flavor, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(f.keyword())
}

fn parse_flavor_word<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Flavor, D::Error> {
    let s = String::deserialize(d)?;
    Flavor::from_keyword(&s)
        .ok_or_else(|| serde::de::Error::custom(format!("unknown flavor `{s}`, expected truth, lie or bluff")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub speaker: Agent,
    #[serde(serialize_with = "flavor_word", deserialize_with = "parse_flavor_word")]
    pub flavor: Flavor,
    pub utterance: Utterance,
}

impl Step {
    pub fn new(speaker: &str, flavor: Flavor, utterance: Utterance) -> Step {
        Step { speaker: Agent::new(speaker), flavor, utterance }
    }
}

/// A scripted dialogue, as read from a scenario file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub bound: u32,
    pub actual: Pair,
    #[serde(default)]
    pub parity: Parity,
    pub steps: Vec<Step>,
}

impl Scenario {
    pub fn config(&self) -> RiddleConfig {
        RiddleConfig { bound: self.bound, actual: self.actual, parity: self.parity }
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        Ok(serde_json::from_str(text)?)
    }

    /// The four truthful lines: a and b say they do not know, then that they know.
    pub fn truthful_dialogue(bound: u32, actual: Pair) -> Scenario {
        use Utterance::*;
        let t = Flavor::Truthful;
        Scenario {
            bound,
            actual,
            parity: Parity::Both,
            steps: vec![
                Step::new("a", t, NotKnowsNumber),
                Step::new("b", t, NotKnowsNumber),
                Step::new("a", t, KnowsNumber),
                Step::new("b", t, KnowsNumber),
            ],
        }
    }
}

/// How announcements change the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Public announcement by state elimination. Only truthful steps.
    Public,
    /// Agent announcements: the addressee's arrows are cut.
    Direct,
    /// Agent announcements to a skeptical addressee.
    Skeptical,
    /// Agent announcements on the plausibility model.
    Plausible,
}

impl FromStr for Mode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "public" => Ok(Mode::Public),
            "direct" => Ok(Mode::Direct),
            "skeptical" => Ok(Mode::Skeptical),
            "plausible" => Ok(Mode::Plausible),
            _ => Err(ModelError::Invalid(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Public => "public",
            Mode::Direct => "direct",
            Mode::Skeptical => "skeptical",
            Mode::Plausible => "plausible",
        })
    }
}

/// Model at some point of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RiddleState {
    Kripke(PointedModel),
    Plausibility(PointedPlausibilityModel),
}

impl RiddleState {
    pub fn eval(&self, f: &Formula) -> Result<bool> {
        match self {
            RiddleState::Kripke(pm) => pm.eval(f),
            RiddleState::Plausibility(pm) => pm.eval(f),
        }
    }

    /// The belief model, for plausibility states.
    pub fn kripke(&self) -> PointedModel {
        match self {
            RiddleState::Kripke(pm) => pm.clone(),
            RiddleState::Plausibility(pm) => pm.belief_model(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            RiddleState::Kripke(pm) => pm.to_json(),
            RiddleState::Plausibility(pm) => pm.to_json(),
        }
    }

    /// Number pair of a state, read off its valuation.
    pub fn pair(&self, s: usize) -> Pair {
        pair_of(&self.kripke().model, s)
    }

    /// Distinct number pairs that are still states of the model.
    pub fn pairs(&self) -> BTreeSet<Pair> {
        let m = self.kripke().model;
        (0..m.len()).map(|s| pair_of(&m, s)).collect()
    }

    /// Number pairs `agent` considers possible at the point.
    pub fn believed_pairs(&self, agent: &str) -> Result<BTreeSet<Pair>> {
        let pm = self.kripke();
        self.believed_pairs_at(agent, pm.point)
    }

    /// Number pairs `agent` considers possible at state `s`.
    pub fn believed_pairs_at(&self, agent: &str, s: usize) -> Result<BTreeSet<Pair>> {
        let m = self.kripke().model;
        let a = m.agent_index(&Agent::new(agent))?;
        Ok(m.successors(a, s).iter().map(|t| pair_of(&m, t)).collect())
    }

    /// States whose number pair is `p`.
    pub fn states_with(&self, p: Pair) -> Vec<usize> {
        let m = self.kripke().model;
        (0..m.len()).filter(|&s| pair_of(&m, s) == p).collect()
    }
}

fn pair_of(m: &KripkeModel, s: usize) -> Pair {
    let mut a = None;
    let mut b = None;
    for (i, p) in m.atoms().iter().enumerate() {
        if m.valuation(i).contains(s) {
            let (head, num) = p.as_str().split_at(1);
            if let Ok(k) = num.parse::<u32>() {
                match head {
                    "a" => a = Some(k),
                    "b" => b = Some(k),
                    _ => {}
                }
            }
        }
    }
    (a.expect("riddle state without a-number"), b.expect("riddle state without b-number"))
}

/// What happened at one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub speaker: Agent,
    pub flavor: String,
    pub announcement: String,
    pub executed: bool,
    /// How the utterance relates to the speaker's beliefs before the step.
    /// `None` when the speaker's beliefs are inconsistent.
    pub classification: Option<Flavor>,
    /// The addressee's verdict before the step.
    pub detection: Option<Detection>,
    /// The result at the point may depend on the cut at the bound.
    pub near_boundary: bool,
    /// Number pairs left after the step.
    pub pairs: Vec<Pair>,
    /// Remaining pairs close enough to the cut to be artifacts of it.
    pub boundary_pairs: Vec<Pair>,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub config: RiddleConfig,
    pub mode: Mode,
    /// The initial model followed by the model after each executed step.
    pub states: Vec<RiddleState>,
    pub reports: Vec<StepReport>,
}

impl ScenarioRun {
    pub fn final_state(&self) -> &RiddleState {
        self.states.last().expect("a run starts with the initial model")
    }

    pub fn completed(&self) -> bool {
        self.reports.iter().all(|r| r.executed)
    }

    /// JSON report: one entry per step with the resulting model.
    pub fn to_json(&self) -> serde_json::Value {
        let steps: Vec<serde_json::Value> = self
            .reports
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).expect("report serializes");
                if r.executed {
                    let model: serde_json::Value =
                        serde_json::from_str(&self.states[r.index + 1].to_json()).expect("model JSON");
                    v["model"] = model;
                }
                v
            })
            .collect();
        serde_json::json!({
            "bound": self.config.bound,
            "actual": [self.config.actual.0, self.config.actual.1],
            "mode": self.mode.to_string(),
            "steps": steps,
        })
    }
}

/// Graph distance in the initial model from each pair to the nearest pair
/// at the bound.
fn boundary_distance(cfg: &RiddleConfig) -> std::collections::BTreeMap<Pair, usize> {
    let pairs = cfg.pairs();
    let mut dist = std::collections::BTreeMap::new();
    let mut queue = VecDeque::new();
    for &p in &pairs {
        if p.0.max(p.1) == cfg.bound {
            dist.insert(p, 0);
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        for &q in &pairs {
            if (q.0 == p.0 || q.1 == p.1) && !dist.contains_key(&q) {
                dist.insert(q, d + 1);
                queue.push_back(q);
            }
        }
    }
    dist
}

/// Execute a scripted dialogue. The run stops at the first step whose
/// precondition fails at the point.
pub fn run_scenario(sc: &Scenario, mode: Mode) -> Result<ScenarioRun> {
    let cfg = sc.config();
    let initial = riddle_model(&cfg)?;
    let dist = boundary_distance(&cfg);
    let mut current = match mode {
        Mode::Plausible => RiddleState::Plausibility(PointedPlausibilityModel {
            model: PlausibilityModel::from_s5(&initial.model)?,
            point: initial.point,
        }),
        _ => RiddleState::Kripke(initial),
    };
    let mut run = ScenarioRun { config: cfg.clone(), mode, states: vec![current.clone()], reports: vec![] };
    // Each update can move information one step further than the depth of
    // what it tests, so influence of the cut grows by depth + 1 per step.
    let mut radius = 0;
    for (index, step) in sc.steps.iter().enumerate() {
        let addressee = other(&step.speaker)?;
        let phi = expand_utterance(step.utterance, &step.speaker, &cfg)?;
        let before = current.kripke();
        let classification = classify(&before, &step.speaker, &phi).ok();
        let detection = detect(&before, &addressee, &step.speaker, &phi).ok();
        let ann = announcement_for(mode, step, &addressee, &phi, &current)?;
        let pre_depth = match &ann {
            None => phi.modal_depth(),
            Some(a) if a.is_plausibility() => {
                let pam = crate::plausibility::pl_builtin_for(a)?;
                pam.model.pre[pam.point].modal_depth()
            }
            Some(a) => crate::normalform::precondition_of(a, before.model.agents())?.modal_depth(),
        };
        let near_boundary = dist.get(&cfg.actual).is_some_and(|&d| d <= radius + pre_depth);
        radius += pre_depth + 1;
        let next = match (&ann, &current) {
            (None, RiddleState::Kripke(pm)) => match update::restrict_pointed(pm, &phi) {
                Ok(x) => Some(RiddleState::Kripke(x)),
                Err(ModelError::PointEliminated) => None,
                Err(e) => return Err(e),
            },
            (Some(a), RiddleState::Kripke(pm)) => action::execute(pm, a)?.map(RiddleState::Kripke),
            (Some(a), RiddleState::Plausibility(pm)) => execute_pl(pm, a)?.map(RiddleState::Plausibility),
            (None, RiddleState::Plausibility(_)) => unreachable!("public mode runs on Kripke models"),
        };
        let announcement = match &ann {
            Some(a) => format!("[{a}]"),
            None => format!("[{}]", Announcement::PubTruth(phi.clone())),
        };
        let mut report = StepReport {
            index,
            speaker: step.speaker.clone(),
            flavor: step.flavor.keyword().to_string(),
            announcement,
            executed: next.is_some(),
            classification,
            detection,
            near_boundary,
            pairs: vec![],
            boundary_pairs: vec![],
            note: None,
        };
        match next {
            Some(state) => {
                let pairs = state.pairs();
                report.boundary_pairs =
                    pairs.iter().copied().filter(|p| dist.get(p).is_some_and(|&d| d <= radius)).collect();
                report.pairs = pairs.into_iter().collect();
                if near_boundary {
                    report.note = Some("result at the point may depend on the cut at the bound".into());
                }
                current = state;
                run.states.push(current.clone());
                run.reports.push(report);
            }
            None => {
                report.note = Some("not executable: announcement was vacuous".into());
                run.reports.push(report);
                break;
            }
        }
    }
    Ok(run)
}

/// The announcement a step stands for in a mode. `None` is state elimination.
fn announcement_for(
    mode: Mode,
    step: &Step,
    addressee: &Agent,
    phi: &Formula,
    current: &RiddleState,
) -> Result<Option<Announcement>> {
    let speaker = step.speaker.clone();
    Ok(match mode {
        Mode::Public => {
            if step.flavor != Flavor::Truthful {
                return Err(ModelError::Unsupported(
                    "public mode only has truthful announcements".into(),
                ));
            }
            None
        }
        Mode::Direct => Some(step.flavor.announcement(speaker, phi.clone())),
        Mode::Skeptical => {
            // The rejecting variant applies when the addressee already believes the opposite.
            let rejects =
                current.eval(&Formula::Believes(addressee.clone(), Box::new(Formula::not(phi.clone()))))?;
            let kw = format!("{}_sk{}", step.flavor.keyword(), if rejects { "r" } else { "" });
            Some(Announcement::from_keyword(&kw, Some(speaker), phi.clone()).map_err(ModelError::Invalid)?)
        }
        Mode::Plausible => {
            let kw = format!("{}_pl", step.flavor.keyword());
            Some(Announcement::from_keyword(&kw, Some(speaker), phi.clone()).map_err(ModelError::Invalid)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        Formula::parse_unchecked(s).unwrap()
    }

    #[test]
    fn generator_links_pairs() {
        let cfg = RiddleConfig { bound: 4, actual: (2, 3), parity: Parity::ActualOnly };
        let pm = riddle_model(&cfg).unwrap();
        assert_eq!(pm.model.len(), 4);
        let st = RiddleState::Kripke(pm.clone());
        assert_eq!(st.believed_pairs("a").unwrap(), [(2, 1), (2, 3)].into());
        assert_eq!(st.believed_pairs("b").unwrap(), [(2, 3), (4, 3)].into());
        let both = riddle_model(&RiddleConfig::new(4, (2, 3))).unwrap();
        assert_eq!(both.model.len(), 8);
    }

    #[test]
    fn nobody_knows_initially() {
        let cfg = RiddleConfig::new(10, (2, 3));
        let pm = riddle_model(&cfg).unwrap();
        let ka = expand_utterance(Utterance::KnowsNumber, &Agent::new("a"), &cfg).unwrap();
        let kb = expand_utterance(Utterance::KnowsNumber, &Agent::new("b"), &cfg).unwrap();
        assert!(!pm.eval(&ka).unwrap());
        assert!(!pm.eval(&kb).unwrap());
    }

    #[test]
    fn endpoint_knows() {
        let cfg = RiddleConfig::new(1, (0, 1));
        let pm = riddle_model(&cfg).unwrap();
        let ka = expand_utterance(Utterance::KnowsNumber, &Agent::new("a"), &cfg).unwrap();
        assert!(pm.eval(&ka).unwrap());
    }

    #[test]
    fn expansion_examples() {
        let cfg = RiddleConfig::new(2, (1, 2));
        let a = Agent::new("a");
        assert_eq!(
            expand_utterance(Utterance::KnowsNumber, &a, &cfg).unwrap(),
            f("(b0 & B{a} b0) | (b1 & B{a} b1) | (b2 & B{a} b2)")
        );
        assert_eq!(expand_utterance(Utterance::ThatsALie, &Agent::new("b"), &cfg).unwrap(), f("B{b} false"));
    }

    #[test]
    fn invalid_configs() {
        assert!(riddle_model(&RiddleConfig::new(10, (2, 4))).is_err());
        assert!(riddle_model(&RiddleConfig::new(2, (2, 3))).is_err());
    }

    #[test]
    fn scenario_json_round_trip() {
        let text = r#"{"bound": 10, "actual": [2,3], "steps": [{"speaker":"a","flavor":"lie","utterance":"knows_number"}]}"#;
        let sc = Scenario::from_json(text).unwrap();
        assert_eq!(sc.steps[0], Step::new("a", Flavor::Lying, Utterance::KnowsNumber));
        let again: Scenario = serde_json::from_str(&serde_json::to_string(&sc).unwrap()).unwrap();
        assert_eq!(again, sc);
        assert!(Scenario::from_json(r#"{"bound":1,"actual":[0,1],"steps":[{"speaker":"a","flavor":"fib","utterance":"knows_number"}]}"#).is_err());
    }

    #[test]
    fn vacuous_step_stops_the_run() {
        let mut sc = Scenario::truthful_dialogue(10, (2, 3));
        sc.steps[0].utterance = Utterance::KnowsNumber;
        let run = run_scenario(&sc, Mode::Direct).unwrap();
        assert_eq!(run.reports.len(), 1);
        assert!(!run.reports[0].executed);
        assert_eq!(run.states.len(), 1);
    }
}
