//! Multi-agent Kripke models, their frame classes, set-based evaluation,
//! JSON interchange and Graphviz output.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::StateSet;
use crate::error::{ModelError, Result};
use crate::syntax::{is_identifier, Agent, Announcement, Atom, Formula, Signature};
use crate::{action, update};

/// A Kripke model `(S, R, V)` over a fixed list of agents and atoms.
///
/// States are indices `0..n`. Names are optional: models built inside the
/// evaluator skip them and get `s0, s1, ...` on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    pub(crate) agents: Arc<[Agent]>,
    pub(crate) atoms: Arc<[Atom]>,
    pub(crate) names: Option<Arc<[String]>>,
    pub(crate) n: usize,
    /// Successor sets, agent-major: `succ[a * n + s]`.
    pub(crate) succ: Vec<StateSet>,
    /// Extension of each atom.
    pub(crate) val: Vec<StateSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelClass {
    /// No frame conditions.
    K,
    /// Transitive and euclidean.
    K45,
    /// Serial, transitive and euclidean.
    KD45,
    /// Equivalence relations.
    S5,
}

impl ModelClass {
    pub const ALL: [ModelClass; 4] = [ModelClass::K, ModelClass::K45, ModelClass::KD45, ModelClass::S5];

    /// Does a single relation (as successor sets over `n` states) belong to this class?
    pub fn admits(self, n: usize, succ: &[StateSet]) -> bool {
        let props = RelationProps::of(n, succ);
        match self {
            ModelClass::K => true,
            ModelClass::K45 => props.transitive && props.euclidean,
            ModelClass::KD45 => props.serial && props.transitive && props.euclidean,
            ModelClass::S5 => props.reflexive && props.symmetric && props.transitive,
        }
    }
}

impl std::str::FromStr for ModelClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(ModelClass::K),
            "k45" => Ok(ModelClass::K45),
            "kd45" => Ok(ModelClass::KD45),
            "s5" => Ok(ModelClass::S5),
            _ => Err(format!("unknown model class `{s}` (expected k, k45, kd45 or s5)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RelationProps {
    pub serial: bool,
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
    pub euclidean: bool,
}

impl RelationProps {
    pub fn of(n: usize, succ: &[StateSet]) -> RelationProps {
        let mut p = RelationProps {
            serial: true,
            reflexive: true,
            symmetric: true,
            transitive: true,
            euclidean: true,
        };
        for s in 0..n {
            let out = &succ[s];
            p.serial &= !out.is_empty();
            p.reflexive &= out.contains(s);
            for t in out.iter() {
                p.symmetric &= succ[t].contains(s);
                p.transitive &= succ[t].is_subset(out);
                p.euclidean &= out.is_subset(&succ[t]);
            }
        }
        p
    }
}

impl KripkeModel {
    /// A model with the given names, no arrows and every atom false.
    pub fn new(agents: Vec<Agent>, atoms: Vec<Atom>, states: Vec<String>) -> Result<KripkeModel> {
        check_names("agent", agents.iter().map(|a| a.as_str()))?;
        check_names("atom", atoms.iter().map(|p| p.as_str()))?;
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(ModelError::Invalid(format!("duplicate state `{s}`")));
            }
        }
        let n = states.len();
        Ok(KripkeModel {
            succ: vec![StateSet::empty(n); agents.len() * n],
            val: vec![StateSet::empty(n); atoms.len()],
            agents: agents.into(),
            atoms: atoms.into(),
            names: Some(states.into()),
            n,
        })
    }

    /// Assemble a model from raw parts; used by constructions that already
    /// guarantee consistent sizes.
    pub(crate) fn from_parts(
        agents: Arc<[Agent]>,
        atoms: Arc<[Atom]>,
        names: Option<Arc<[String]>>,
        n: usize,
        succ: Vec<StateSet>,
        val: Vec<StateSet>,
    ) -> KripkeModel {
        debug_assert_eq!(succ.len(), agents.len() * n);
        debug_assert_eq!(val.len(), atoms.len());
        KripkeModel { agents, atoms, names, n, succ, val }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn signature(&self) -> Signature {
        Signature {
            agents: self.agents.iter().cloned().collect(),
            atoms: self.atoms.iter().cloned().collect(),
        }
    }

    pub fn state_name(&self, s: usize) -> String {
        match &self.names {
            Some(names) => names[s].clone(),
            None => format!("s{s}"),
        }
    }

    pub fn state_names(&self) -> Vec<String> {
        (0..self.n).map(|s| self.state_name(s)).collect()
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        (0..self.n)
            .find(|&s| self.state_name(s) == name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn agent_index(&self, a: &Agent) -> Result<usize> {
        self.agents
            .iter()
            .position(|b| b == a)
            .ok_or_else(|| ModelError::UnknownAgent(a.0.clone()))
    }

    pub fn atom_index(&self, p: &Atom) -> Result<usize> {
        self.atoms
            .iter()
            .position(|q| q == p)
            .ok_or_else(|| ModelError::UnknownAtom(p.0.clone()))
    }

    /// Successors of `s` for the agent with index `a`.
    pub fn successors(&self, a: usize, s: usize) -> &StateSet {
        &self.succ[a * self.n + s]
    }

    /// All successor sets of agent `a`, indexed by state.
    pub fn relation(&self, a: usize) -> &[StateSet] {
        &self.succ[a * self.n..(a + 1) * self.n]
    }

    pub fn valuation(&self, p: usize) -> &StateSet {
        &self.val[p]
    }

    pub fn add_edge(&mut self, agent: &str, from: &str, to: &str) -> Result<()> {
        let a = self.agent_index(&Agent::new(agent))?;
        let (s, t) = (self.state_index(from)?, self.state_index(to)?);
        self.succ[a * self.n + s].insert(t);
        Ok(())
    }

    pub fn set_true(&mut self, atom: &str, state: &str) -> Result<()> {
        let p = self.atom_index(&Atom::new(atom))?;
        let s = self.state_index(state)?;
        self.val[p].insert(s);
        Ok(())
    }

    /// Make the relation of `agent` the full relation on all states.
    pub fn set_universal(&mut self, agent: &str) -> Result<()> {
        let a = self.agent_index(&Agent::new(agent))?;
        for s in 0..self.n {
            self.succ[a * self.n + s] = StateSet::full(self.n);
        }
        Ok(())
    }

    /// A copy with one more agent whose successor sets are `succ[s]`.
    pub fn with_agent(&self, agent: Agent, succ: Vec<StateSet>) -> Result<KripkeModel> {
        if self.agents.contains(&agent) {
            return Err(ModelError::Invalid(format!("agent `{agent}` already present")));
        }
        if succ.len() != self.n || succ.iter().any(|set| set.iter().any(|t| t >= self.n)) {
            return Err(ModelError::Invalid(format!("relation for `{agent}` must stay within {} states", self.n)));
        }
        let mut agents = self.agents.to_vec();
        agents.push(agent);
        check_names("agent", agents.iter().map(|a| a.as_str()))?;
        let mut all = self.succ.clone();
        all.extend(succ.iter().map(|set| StateSet::from_indices(self.n, set.iter())));
        Ok(KripkeModel { agents: agents.into(), succ: all, ..self.clone() })
    }

    pub fn point(self, name: &str) -> Result<PointedModel> {
        let point = self.state_index(name)?;
        Ok(PointedModel { model: self, point })
    }

    pub fn relation_props(&self, a: usize) -> RelationProps {
        RelationProps::of(self.n, self.relation(a))
    }

    /// Every class whose frame conditions all relations satisfy.
    pub fn class_of(&self) -> BTreeSet<ModelClass> {
        ModelClass::ALL
            .into_iter()
            .filter(|c| (0..self.agents.len()).all(|a| c.admits(self.n, self.relation(a))))
            .collect()
    }

    pub fn is_in_class(&self, class: ModelClass) -> bool {
        (0..self.agents.len()).all(|a| class.admits(self.n, self.relation(a)))
    }

    /// `{s : R_a(s) ⊆ target}`.
    pub fn box_set(&self, a: usize, target: &StateSet) -> StateSet {
        let mut out = StateSet::empty(self.n);
        for s in 0..self.n {
            if self.successors(a, s).is_subset(target) {
                out.insert(s);
            }
        }
        out
    }

    /// The set of states where `f` holds.
    pub fn extension(&self, f: &Formula) -> Result<StateSet> {
        use Formula::*;
        let n = self.n;
        Ok(match f {
            Top => StateSet::full(n),
            Bot => StateSet::empty(n),
            Atom(p) => self.val[self.atom_index(p)?].clone(),
            Not(g) => self.extension(g)?.complement(n),
            And(l, r) => {
                let mut e = self.extension(l)?;
                e.intersect_with(&self.extension(r)?);
                e
            }
            Or(l, r) => {
                let mut e = self.extension(l)?;
                e.union_with(&self.extension(r)?);
                e
            }
            Implies(l, r) => {
                let mut e = self.extension(l)?.complement(n);
                e.union_with(&self.extension(r)?);
                e
            }
            Iff(l, r) => {
                let (x, y) = (self.extension(l)?, self.extension(r)?);
                x.intersection(&y).union(&x.complement(n).intersection(&y.complement(n)))
            }
            Believes(a, g) => {
                let a = self.agent_index(a)?;
                self.box_set(a, &self.extension(g)?)
            }
            Knows(..) | CondBelieves(..) => {
                return Err(ModelError::Unsupported(format!(
                    "`{f}` (knowledge and conditional belief need a plausibility model)"
                )))
            }
            Dyn(ann, body) => {
                let t = self.transform(ann)?;
                let inner = t.model.extension(body)?;
                t.pull_back(n, &inner)
            }
        })
    }

    /// Execute `ann` at every state at once.
    pub(crate) fn transform(&self, ann: &Announcement) -> Result<Transformed> {
        use Announcement::*;
        match ann {
            PubTruth(_) | PubLie(_) | AgTruth(..) | AgLie(..) | AgBluff(..) => {
                update::transform_direct(self, ann)
            }
            SkPubTruth(_) | SkPubLie(_) | SkPubRejected(_) | SkAgTruth(..) | SkAgLie(..)
            | SkAgBluff(..) | SkAgTruthRejected(..) | SkAgLieRejected(..) | SkAgBluffRejected(..)
            | GenericAction(_) => action::transform_product(self, ann),
            PlPubTruth(_) | PlPubLie(_) | PlAgTruth(..) | PlAgLie(..) | PlAgBluff(..) => {
                Err(ModelError::Unsupported(format!(
                    "[{ann}] (plausibility announcements need a plausibility model)"
                )))
            }
        }
    }

    /// The submodel induced by `keep`, plus the old-to-new index map.
    pub fn induced(&self, keep: &StateSet) -> (KripkeModel, Vec<Option<usize>>) {
        let mut map = vec![None; self.n];
        let kept: Vec<usize> = keep.iter().collect();
        for (new, &old) in kept.iter().enumerate() {
            map[old] = Some(new);
        }
        let m = kept.len();
        let reindex = |set: &StateSet| StateSet::from_indices(m, set.iter().filter_map(|t| map[t]));
        let mut succ = Vec::with_capacity(self.agents.len() * m);
        for a in 0..self.agents.len() {
            for &s in &kept {
                succ.push(reindex(self.successors(a, s)));
            }
        }
        let val = self.val.iter().map(reindex).collect();
        let names = self.names.as_ref().map(|names| kept.iter().map(|&s| names[s].clone()).collect());
        let model =
            KripkeModel::from_parts(self.agents.clone(), self.atoms.clone(), names, m, succ, val);
        (model, map)
    }

    pub fn to_json(&self, point: Option<usize>) -> String {
        serde_json::to_string_pretty(&self.to_json_value(point)).expect("model serializes")
    }

    pub(crate) fn to_json_value(&self, point: Option<usize>) -> KripkeJson {
        let names = self.state_names();
        KripkeJson {
            agents: self.agents.iter().map(|a| a.0.clone()).collect(),
            atoms: self.atoms.iter().map(|p| p.0.clone()).collect(),
            states: names.clone(),
            val: self
                .atoms
                .iter()
                .zip(&self.val)
                .map(|(p, e)| (p.0.clone(), e.iter().map(|s| names[s].clone()).collect()))
                .collect(),
            rel: self
                .agents
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    let pairs = (0..self.n)
                        .flat_map(|s| {
                            self.successors(a, s).iter().map(move |t| (s, t)).collect::<Vec<_>>()
                        })
                        .map(|(s, t)| (names[s].clone(), names[t].clone()))
                        .collect();
                    (name.0.clone(), pairs)
                })
                .collect(),
            point: point.map(|p| names[p].clone()),
        }
    }

    pub fn from_json(text: &str) -> Result<(KripkeModel, Option<usize>)> {
        let raw: KripkeJson = serde_json::from_str(text)?;
        raw.build()
    }

    /// Graphviz rendering. The designated state, if given, is double-circled.
    pub fn to_dot(&self, point: Option<usize>) -> String {
        let mut out = String::from("digraph model {\n  node [shape=circle];\n");
        for s in 0..self.n {
            let true_atoms: Vec<&str> = self
                .atoms
                .iter()
                .zip(&self.val)
                .filter(|(_, e)| e.contains(s))
                .map(|(p, _)| p.as_str())
                .collect();
            let name = self.state_name(s);
            let shape = if Some(s) == point { ", shape=doublecircle" } else { "" };
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\\n{}\"{shape}];",
                dot_escape(&name),
                dot_escape(&name),
                dot_escape(&true_atoms.join(","))
            );
        }
        for (a, agent) in self.agents.iter().enumerate() {
            for s in 0..self.n {
                for t in self.successors(a, s).iter() {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -> \"{}\" [label=\"{}\"];",
                        dot_escape(&self.state_name(s)),
                        dot_escape(&self.state_name(t)),
                        dot_escape(agent.as_str())
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(crate) fn check_names<'a>(kind: &str, names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !is_identifier(name) {
            return Err(ModelError::Invalid(format!("`{name}` is not a valid {kind} name")));
        }
        if !seen.insert(name) {
            return Err(ModelError::Invalid(format!("duplicate {kind} `{name}`")));
        }
    }
    Ok(())
}

/// The result of executing an announcement at every state of a model.
pub(crate) struct Transformed {
    pub model: KripkeModel,
    /// States where the announcement is executable.
    pub pre: StateSet,
    /// For each executable state, the state of `model` it becomes.
    pub image: Vec<Option<usize>>,
}

impl Transformed {
    /// `{s : s ∉ pre} ∪ {s ∈ pre : image(s) ∈ inner}`.
    pub fn pull_back(&self, n: usize, inner: &StateSet) -> StateSet {
        let mut out = self.pre.complement(n);
        for s in self.pre.iter() {
            if let Some(t) = self.image[s] {
                if inner.contains(t) {
                    out.insert(s);
                }
            }
        }
        out
    }
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: usize) -> Result<PointedModel> {
        if point >= model.n {
            return Err(ModelError::Invalid(format!("point {point} out of range")));
        }
        Ok(PointedModel { model, point })
    }

    /// `M, s ⊨ f`.
    pub fn eval(&self, f: &Formula) -> Result<bool> {
        Ok(self.model.extension(f)?.contains(self.point))
    }

    pub fn point_name(&self) -> String {
        self.model.state_name(self.point)
    }

    pub fn to_json(&self) -> String {
        self.model.to_json(Some(self.point))
    }

    pub fn from_json(text: &str) -> Result<PointedModel> {
        let (model, point) = KripkeModel::from_json(text)?;
        let point = point.ok_or_else(|| ModelError::Invalid("missing `point`".into()))?;
        Ok(PointedModel { model, point })
    }

    pub fn to_dot(&self) -> String {
        self.model.to_dot(Some(self.point))
    }
}

/// On-disk representation of a Kripke model.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct KripkeJson {
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub rel: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

impl KripkeJson {
    fn build(self) -> Result<(KripkeModel, Option<usize>)> {
        let agents: Vec<Agent> = self.agents.iter().map(Agent::new).collect();
        let atoms: Vec<Atom> = self.atoms.iter().map(Atom::new).collect();
        let mut m = KripkeModel::new(agents, atoms, self.states.clone())?;
        let index: HashMap<&str, usize> =
            self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| ModelError::UnknownState(s.into()));
        for (p, states) in &self.val {
            let pi = m.atom_index(&Atom::new(p.as_str()))?;
            for s in states {
                m.val[pi].insert(lookup(s)?);
            }
        }
        for (a, pairs) in &self.rel {
            let ai = m.agent_index(&Agent::new(a.as_str()))?;
            for (s, t) in pairs {
                let (s, t) = (lookup(s)?, lookup(t)?);
                m.succ[ai * m.n + s].insert(t);
            }
        }
        let point = self.point.as_deref().map(lookup).transpose()?;
        Ok((m, point))
    }
}
