//! Plausibility models: per-agent epistemic partitions with ranks (lower is
//! more plausible), belief as truth in the most plausible states of the
//! current cell, conditional belief, knowledge, and anti-lexicographic
//! product update.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::StateSet;
use crate::error::{ModelError, Result};
use crate::kripke::{check_names, KripkeModel};
use crate::syntax::{Agent, Announcement, Atom, Formula, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlausibilityModel {
    agents: Arc<[Agent]>,
    atoms: Arc<[Atom]>,
    names: Arc<[String]>,
    n: usize,
    /// Epistemic cell of each state, agent-major.
    cell: Vec<StateSet>,
    /// Rank of each state, agent-major.
    rank: Vec<u32>,
    val: Vec<StateSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedPlausibilityModel {
    pub model: PlausibilityModel,
    pub point: usize,
}

impl PlausibilityModel {
    /// A model where every agent has one cell holding all states, all ranks
    /// zero and all atoms false.
    pub fn new(agents: Vec<Agent>, atoms: Vec<Atom>, states: Vec<String>) -> Result<Self> {
        check_names("agent", agents.iter().map(|a| a.as_str()))?;
        check_names("atom", atoms.iter().map(|p| p.as_str()))?;
        if states.iter().collect::<BTreeSet<_>>().len() != states.len() {
            return Err(ModelError::Invalid("duplicate state".into()));
        }
        let n = states.len();
        Ok(PlausibilityModel {
            cell: vec![StateSet::full(n); agents.len() * n],
            rank: vec![0; agents.len() * n],
            val: vec![StateSet::empty(n); atoms.len()],
            agents: agents.into(),
            atoms: atoms.into(),
            names: states.into(),
            n,
        })
    }

    /// Read ranks and partitions off an S5 Kripke model: each agent's
    /// equivalence classes become cells, every rank is zero.
    pub fn from_s5(m: &KripkeModel) -> Result<Self> {
        if !m.is_in_class(crate::kripke::ModelClass::S5) {
            return Err(ModelError::Invalid("relations must be equivalences".into()));
        }
        let n = m.len();
        let mut pm = PlausibilityModel::new(m.agents().to_vec(), m.atoms().to_vec(), m.state_names())?;
        for a in 0..m.agents().len() {
            for s in 0..n {
                pm.cell[a * n + s] = m.successors(a, s).clone();
            }
        }
        for p in 0..m.atoms().len() {
            pm.val[p] = m.valuation(p).clone();
        }
        Ok(pm)
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

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| ModelError::UnknownState(name.into()))
    }

    pub fn agent_index(&self, a: &Agent) -> Result<usize> {
        self.agents
            .iter()
            .position(|b| b == a)
            .ok_or_else(|| ModelError::UnknownAgent(a.0.clone()))
    }

    fn atom_index(&self, p: &Atom) -> Result<usize> {
        self.atoms
            .iter()
            .position(|q| q == p)
            .ok_or_else(|| ModelError::UnknownAtom(p.0.clone()))
    }

    pub fn cell(&self, a: usize, s: usize) -> &StateSet {
        &self.cell[a * self.n + s]
    }

    pub fn rank(&self, a: usize, s: usize) -> u32 {
        self.rank[a * self.n + s]
    }

    pub fn set_rank(&mut self, agent: &str, state: &str, rank: u32) -> Result<()> {
        let a = self.agent_index(&Agent::new(agent))?;
        let s = self.state_index(state)?;
        self.rank[a * self.n + s] = rank;
        Ok(())
    }

    pub fn set_true(&mut self, atom: &str, state: &str) -> Result<()> {
        let p = self.atom_index(&Atom::new(atom))?;
        let s = self.state_index(state)?;
        self.val[p].insert(s);
        Ok(())
    }

    /// Replace the partition of `agent` by the given cells, which must
    /// cover every state exactly once.
    pub fn set_partition(&mut self, agent: &str, cells: &[&[&str]]) -> Result<()> {
        let a = self.agent_index(&Agent::new(agent))?;
        let mut seen = StateSet::empty(self.n);
        let mut assigned = vec![StateSet::empty(self.n); self.n];
        for cell in cells {
            let set = StateSet::from_indices(
                self.n,
                cell.iter().map(|s| self.state_index(s)).collect::<Result<Vec<_>>>()?,
            );
            if set.intersects(&seen) {
                return Err(ModelError::Invalid("cells overlap".into()));
            }
            seen.union_with(&set);
            for s in set.iter() {
                assigned[s] = set.clone();
            }
        }
        if seen != StateSet::full(self.n) {
            return Err(ModelError::Invalid("cells must cover every state".into()));
        }
        for (s, c) in assigned.into_iter().enumerate() {
            self.cell[a * self.n + s] = c;
        }
        Ok(())
    }

    pub fn point(self, name: &str) -> Result<PointedPlausibilityModel> {
        let point = self.state_index(name)?;
        Ok(PointedPlausibilityModel { model: self, point })
    }

    /// Most plausible states of `cand`, ranked by agent `a`.
    fn most_plausible(&self, a: usize, cand: &StateSet) -> StateSet {
        let Some(min) = cand.iter().map(|t| self.rank(a, t)).min() else {
            return StateSet::empty(self.n);
        };
        StateSet::from_indices(self.n, cand.iter().filter(|&t| self.rank(a, t) == min))
    }

    /// Belief accessibility of agent `a`: from each state to the most
    /// plausible states of its cell.
    pub fn belief_successors(&self, a: usize, s: usize) -> StateSet {
        self.most_plausible(a, self.cell(a, s))
    }

    /// The Kripke model of belief accessibilities (always KD45).
    pub fn belief_model(&self) -> KripkeModel {
        let succ = (0..self.agents.len())
            .flat_map(|a| (0..self.n).map(move |s| (a, s)))
            .map(|(a, s)| self.belief_successors(a, s))
            .collect();
        KripkeModel::from_parts(
            self.agents.clone(),
            self.atoms.clone(),
            Some(self.names.clone()),
            self.n,
            succ,
            self.val.clone(),
        )
    }

    /// Rewrite ranks so that each cell uses consecutive naturals from zero.
    pub fn normalize_ranks(&mut self) {
        for a in 0..self.agents.len() {
            let mut done = StateSet::empty(self.n);
            for s in 0..self.n {
                if done.contains(s) {
                    continue;
                }
                let cell = self.cell(a, s).clone();
                done.union_with(&cell);
                let distinct: BTreeSet<u32> = cell.iter().map(|t| self.rank(a, t)).collect();
                let dense: HashMap<u32, u32> =
                    distinct.into_iter().enumerate().map(|(i, r)| (r, i as u32)).collect();
                for t in cell.iter() {
                    self.rank[a * self.n + t] = dense[&self.rank(a, t)];
                }
            }
        }
    }

    pub fn extension(&self, f: &Formula) -> Result<StateSet> {
        use Formula::*;
        let n = self.n;
        let for_all = |test: &dyn Fn(usize) -> bool| StateSet::from_indices(n, (0..n).filter(|&s| test(s)));
        Ok(match f {
            Top => StateSet::full(n),
            Bot => StateSet::empty(n),
            Atom(p) => self.val[self.atom_index(p)?].clone(),
            Not(g) => self.extension(g)?.complement(n),
            And(l, r) => self.extension(l)?.intersection(&self.extension(r)?),
            Or(l, r) => self.extension(l)?.union(&self.extension(r)?),
            Implies(l, r) => self.extension(l)?.complement(n).union(&self.extension(r)?),
            Iff(l, r) => {
                let (x, y) = (self.extension(l)?, self.extension(r)?);
                x.intersection(&y).union(&x.complement(n).intersection(&y.complement(n)))
            }
            Believes(a, g) => {
                let (a, e) = (self.agent_index(a)?, self.extension(g)?);
                for_all(&|s| self.belief_successors(a, s).is_subset(&e))
            }
            Knows(a, g) => {
                let (a, e) = (self.agent_index(a)?, self.extension(g)?);
                for_all(&|s| self.cell(a, s).is_subset(&e))
            }
            CondBelieves(a, c, g) => {
                let a = self.agent_index(a)?;
                let (ec, eg) = (self.extension(c)?, self.extension(g)?);
                for_all(&|s| self.most_plausible(a, &self.cell(a, s).intersection(&ec)).is_subset(&eg))
            }
            Dyn(ann, body) => {
                let (model, pre, image) = self.transform(ann)?;
                let inner = model.extension(body)?;
                let mut out = pre.complement(n);
                for s in pre.iter() {
                    if image[s].is_some_and(|t| inner.contains(t)) {
                        out.insert(s);
                    }
                }
                out
            }
        })
    }

    fn transform(&self, ann: &Announcement) -> Result<(PlausibilityModel, StateSet, Vec<Option<usize>>)> {
        match ann {
            Announcement::PubTruth(f) => {
                let pre = self.extension(f)?;
                let (model, map) = self.induced(&pre);
                Ok((model, pre, map))
            }
            a if a.is_plausibility() => {
                let pam = pl_builtin_for(a)?;
                let (model, index, pre) = self.product(&pam.model)?;
                let image = index.iter().map(|row| row[pam.point]).collect();
                Ok((model, pre[pam.point].clone(), image))
            }
            other => Err(ModelError::Unsupported(format!(
                "[{other}] on plausibility models (use truth or a *_pl flavor)"
            ))),
        }
    }

    /// Hard restriction to `keep`, with ranks renormalized.
    pub fn induced(&self, keep: &StateSet) -> (PlausibilityModel, Vec<Option<usize>>) {
        let kept: Vec<usize> = keep.iter().collect();
        let mut map = vec![None; self.n];
        for (i, &s) in kept.iter().enumerate() {
            map[s] = Some(i);
        }
        let m = kept.len();
        let reindex = |set: &StateSet| StateSet::from_indices(m, set.iter().filter_map(|t| map[t]));
        let mut out = PlausibilityModel {
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            names: kept.iter().map(|&s| self.names[s].clone()).collect(),
            n: m,
            cell: (0..self.agents.len())
                .flat_map(|a| kept.iter().map(move |&s| (a, s)))
                .map(|(a, s)| reindex(self.cell(a, s)))
                .collect(),
            rank: (0..self.agents.len())
                .flat_map(|a| kept.iter().map(move |&s| self.rank(a, s)))
                .collect(),
            val: self.val.iter().map(reindex).collect(),
        };
        out.normalize_ranks();
        (out, map)
    }

    /// Anti-lexicographic product: the action's rank decides, the state's
    /// rank breaks ties.
    #[allow(clippy::type_complexity)]
    fn product(
        &self,
        am: &PlausibilityActionModel,
    ) -> Result<(PlausibilityModel, Vec<Vec<Option<usize>>>, Vec<StateSet>)> {
        let k = am.actions.len();
        let views: Vec<(&[usize], &[u32])> = self
            .agents
            .iter()
            .map(|a| {
                am.view_for(a).ok_or_else(|| {
                    ModelError::SignatureMismatch(format!("the action model has no view for `{a}`"))
                })
            })
            .collect::<Result<_>>()?;
        let pre: Vec<StateSet> = am.pre.iter().map(|f| self.extension(f)).collect::<Result<_>>()?;
        let mut index = vec![vec![None; k]; self.n];
        let mut pairs = Vec::new();
        for (s, row) in index.iter_mut().enumerate() {
            for (x, slot) in row.iter_mut().enumerate() {
                if pre[x].contains(s) {
                    *slot = Some(pairs.len());
                    pairs.push((s, x));
                }
            }
        }
        let n = pairs.len();
        let mut cell = Vec::with_capacity(self.agents.len() * n);
        let mut rank = Vec::with_capacity(self.agents.len() * n);
        for (a, (classes, ranks)) in views.iter().enumerate() {
            for &(s, x) in &pairs {
                cell.push(StateSet::from_indices(
                    n,
                    (0..n).filter(|&j| {
                        let (t, y) = pairs[j];
                        self.cell(a, s).contains(t) && classes[x] == classes[y]
                    }),
                ));
            }
            // Lexicographic key; normalize_ranks turns it into dense ranks per cell.
            for &(s, x) in &pairs {
                rank.push(ranks[x] * (self.max_rank(a) + 1) + self.rank(a, s));
            }
        }
        let val = self
            .val
            .iter()
            .map(|e| StateSet::from_indices(n, (0..n).filter(|&i| e.contains(pairs[i].0))))
            .collect();
        let names = pairs
            .iter()
            .map(|&(s, x)| format!("({},{})", self.names[s], am.actions[x]))
            .collect();
        let mut model = PlausibilityModel {
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            names,
            n,
            cell,
            rank,
            val,
        };
        model.normalize_ranks();
        Ok((model, index, pre))
    }

    fn max_rank(&self, a: usize) -> u32 {
        (0..self.n).map(|s| self.rank(a, s)).max().unwrap_or(0)
    }

    pub fn to_json(&self, point: Option<usize>) -> String {
        let names = &self.names;
        let raw = PlausibilityJson {
            agents: self.agents.iter().map(|a| a.0.clone()).collect(),
            atoms: self.atoms.iter().map(|p| p.0.clone()).collect(),
            states: names.to_vec(),
            val: self
                .atoms
                .iter()
                .zip(&self.val)
                .map(|(p, e)| (p.0.clone(), e.iter().map(|s| names[s].clone()).collect()))
                .collect(),
            epi: self
                .agents
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    let pairs = (0..self.n)
                        .flat_map(|s| self.cell(a, s).iter().map(move |t| (s, t)).collect::<Vec<_>>())
                        .map(|(s, t)| (names[s].clone(), names[t].clone()))
                        .collect();
                    (name.0.clone(), pairs)
                })
                .collect(),
            rank: self
                .agents
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    let ranks = (0..self.n).map(|s| (names[s].clone(), self.rank(a, s))).collect();
                    (name.0.clone(), ranks)
                })
                .collect(),
            point: point.map(|p| names[p].clone()),
        };
        serde_json::to_string_pretty(&raw).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<(PlausibilityModel, Option<usize>)> {
        let raw: PlausibilityJson = serde_json::from_str(text)?;
        let mut m = PlausibilityModel::new(
            raw.agents.iter().map(Agent::new).collect(),
            raw.atoms.iter().map(Atom::new).collect(),
            raw.states.clone(),
        )?;
        let n = m.n;
        for (p, states) in &raw.val {
            let pi = m.atom_index(&Atom::new(p.as_str()))?;
            for s in states {
                let s = m.state_index(s)?;
                m.val[pi].insert(s);
            }
        }
        for a in 0..m.agents.len() {
            for s in 0..n {
                m.cell[a * n + s] = StateSet::empty(n);
            }
        }
        for (a, pairs) in &raw.epi {
            let ai = m.agent_index(&Agent::new(a.as_str()))?;
            for (s, t) in pairs {
                let (s, t) = (m.state_index(s)?, m.state_index(t)?);
                m.cell[ai * n + s].insert(t);
            }
        }
        for (ai, agent) in m.agents.iter().enumerate() {
            let props = crate::kripke::RelationProps::of(n, &m.cell[ai * n..(ai + 1) * n]);
            if !(props.reflexive && props.symmetric && props.transitive) {
                return Err(ModelError::Invalid(format!(
                    "epistemic relation of `{agent}` is not an equivalence"
                )));
            }
        }
        for (a, ranks) in &raw.rank {
            let ai = m.agent_index(&Agent::new(a.as_str()))?;
            for (s, r) in ranks {
                let s = m.state_index(s)?;
                m.rank[ai * n + s] = *r;
            }
        }
        let point = raw.point.as_deref().map(|p| m.state_index(p)).transpose()?;
        Ok((m, point))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlausibilityJson {
    agents: Vec<String>,
    atoms: Vec<String>,
    states: Vec<String>,
    #[serde(default)]
    val: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    epi: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    rank: BTreeMap<String, BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    point: Option<String>,
}

impl PointedPlausibilityModel {
    pub fn eval(&self, f: &Formula) -> Result<bool> {
        Ok(self.model.extension(f)?.contains(self.point))
    }

    pub fn point_name(&self) -> &str {
        self.model.state_name(self.point)
    }

    pub fn to_json(&self) -> String {
        self.model.to_json(Some(self.point))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let (model, point) = PlausibilityModel::from_json(text)?;
        let point = point.ok_or_else(|| ModelError::Invalid("missing `point`".into()))?;
        Ok(PointedPlausibilityModel { model, point })
    }

    /// The belief Kripke model at the same point.
    pub fn belief_model(&self) -> crate::kripke::PointedModel {
        crate::kripke::PointedModel { model: self.model.belief_model(), point: self.point }
    }
}

/// Action model with per-agent action partitions and action ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlausibilityActionModel {
    pub actions: Vec<String>,
    pub pre: Vec<Formula>,
    pub agents: Vec<Agent>,
    /// Per listed agent: class label of each action, and rank of each action.
    pub views: Vec<(Vec<usize>, Vec<u32>)>,
    /// View of agents that are not listed.
    pub others: Option<(Vec<usize>, Vec<u32>)>,
}

impl PlausibilityActionModel {
    fn view_for(&self, a: &Agent) -> Option<(&[usize], &[u32])> {
        let view = match self.agents.iter().position(|b| b == a) {
            Some(i) => &self.views[i],
            None => self.others.as_ref()?,
        };
        Some((&view.0, &view.1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedPlausibilityActionModel {
    pub model: PlausibilityActionModel,
    pub point: usize,
}

/// Public announcement that may be a lie: truth is the more plausible action.
pub fn pl_pub_action_model(f: &Formula) -> PlausibilityActionModel {
    PlausibilityActionModel {
        actions: vec!["truth_pl".into(), "lie_pl".into()],
        pre: vec![f.clone(), Formula::not(f.clone())],
        agents: vec![],
        views: vec![],
        others: Some((vec![0, 0], vec![0, 1])),
    }
}

/// Agent announcement by `speaker`. Listeners cannot tell the three actions
/// apart and find truth most plausible, then bluff, then lie.
pub fn pl_agent_action_model(speaker: &Agent, f: &Formula) -> PlausibilityActionModel {
    let b = |g: Formula| Formula::Believes(speaker.clone(), Box::new(g));
    let not_f = Formula::not(f.clone());
    PlausibilityActionModel {
        actions: vec!["bluff_pl".into(), "truth_pl".into(), "lie_pl".into()],
        pre: vec![
            Formula::not(Formula::or(b(f.clone()), b(not_f.clone()))),
            b(f.clone()),
            b(not_f),
        ],
        agents: vec![speaker.clone()],
        views: vec![(vec![0, 1, 2], vec![0, 0, 0])],
        others: Some((vec![0, 0, 0], vec![1, 0, 2])),
    }
}

pub fn pl_builtin_for(ann: &Announcement) -> Result<PointedPlausibilityActionModel> {
    use Announcement::*;
    let (model, point) = match ann {
        PlPubTruth(f) => (pl_pub_action_model(f), 0),
        PlPubLie(f) => (pl_pub_action_model(f), 1),
        PlAgBluff(a, f) => (pl_agent_action_model(a, f), 0),
        PlAgTruth(a, f) => (pl_agent_action_model(a, f), 1),
        PlAgLie(a, f) => (pl_agent_action_model(a, f), 2),
        other => return Err(ModelError::Unsupported(format!("[{other}] is not a plausibility announcement"))),
    };
    Ok(PointedPlausibilityActionModel { model, point })
}

/// Product update of pointed plausibility models; `None` when the
/// designated action is not executable at the point.
pub fn pl_product_update(
    pm: &PointedPlausibilityModel,
    pam: &PointedPlausibilityActionModel,
) -> Result<Option<PointedPlausibilityModel>> {
    let (model, index, _) = pm.model.product(&pam.model)?;
    let point = index[pm.point]
        .get(pam.point)
        .copied()
        .ok_or_else(|| ModelError::Invalid("designated action out of range".into()))?;
    Ok(point.map(|point| PointedPlausibilityModel { model, point }))
}

/// Hard restriction to the `f`-states. Fails if the point is removed.
pub fn hard_restrict(pm: &PointedPlausibilityModel, f: &Formula) -> Result<PointedPlausibilityModel> {
    let (model, map) = pm.model.induced(&pm.model.extension(f)?);
    let point = map[pm.point].ok_or(ModelError::PointEliminated)?;
    Ok(PointedPlausibilityModel { model, point })
}

/// Execute `truth` (hard restriction) or a plausibility flavor at the point.
pub fn execute_pl(pm: &PointedPlausibilityModel, ann: &Announcement) -> Result<Option<PointedPlausibilityModel>> {
    match ann {
        Announcement::PubTruth(f) => match hard_restrict(pm, f) {
            Err(ModelError::PointEliminated) => Ok(None),
            other => other.map(Some),
        },
        _ => pl_product_update(pm, &pl_builtin_for(ann)?),
    }
}

/// Every plausibility model with up to `max_states` states whose ranks are
/// at most `max_rank`.
pub fn enumerate_plausibility_models(
    max_states: usize,
    agents: &[Agent],
    atoms: &[Atom],
    max_rank: u32,
) -> Result<Vec<PlausibilityModel>> {
    if max_states > 4 {
        return Err(ModelError::Invalid("plausibility enumeration is limited to 4 states".into()));
    }
    let mut out = Vec::new();
    for n in 1..=max_states {
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let base = PlausibilityModel::new(agents.to_vec(), atoms.to_vec(), names)?;
        // One agent's view: a partition (restricted growth string) plus ranks.
        let mut views = Vec::new();
        for labels in restricted_growth(n) {
            let cells: Vec<StateSet> = (0..n)
                .map(|s| StateSet::from_indices(n, (0..n).filter(|&t| labels[t] == labels[s])))
                .collect();
            let mut ranks = vec![0u32; n];
            loop {
                views.push((cells.clone(), ranks.clone()));
                let Some(i) = ranks.iter().position(|&r| r < max_rank) else { break };
                ranks[i] += 1;
                for r in &mut ranks[..i] {
                    *r = 0;
                }
            }
        }
        let mut counter = vec![0usize; agents.len()];
        'outer: loop {
            for val in 0..1u64 << (n * atoms.len()) {
                let mut m = base.clone();
                for (a, &v) in counter.iter().enumerate() {
                    let (cells, ranks) = &views[v];
                    m.cell[a * n..(a + 1) * n].clone_from_slice(cells);
                    m.rank[a * n..(a + 1) * n].copy_from_slice(ranks);
                }
                for p in 0..atoms.len() {
                    m.val[p] = StateSet::from_bits(n, val >> (p * n));
                }
                out.push(m);
            }
            for c in counter.iter_mut().rev() {
                *c += 1;
                if *c < views.len() {
                    continue 'outer;
                }
                *c = 0;
            }
            break;
        }
    }
    Ok(out)
}

fn restricted_growth(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                let max = prefix.iter().max().copied().unwrap_or(0);
                (0..=max + 1).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}
