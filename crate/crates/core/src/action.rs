//! Action models, product update, and the built-in models for public,
//! agent and skeptical announcements.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::StateSet;
use crate::error::{ModelError, Result};
use crate::kripke::{check_names, KripkeModel, PointedModel, Transformed};
use crate::syntax::{Agent, Announcement, Formula, PointedActionModel};
use crate::update;

pub type ActionRelation = BTreeSet<(usize, usize)>;

/// An action model: actions with preconditions and per-agent accessibility.
///
/// Agents without an explicit relation use `others`. When `others` is
/// `None`, such agents make the product undefined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionModel {
    pub actions: Vec<String>,
    pub pre: Vec<Formula>,
    pub agents: Vec<Agent>,
    pub rel: Vec<ActionRelation>,
    pub others: Option<ActionRelation>,
}

impl ActionModel {
    pub fn relation_for(&self, a: &Agent) -> Option<&ActionRelation> {
        match self.agents.iter().position(|b| b == a) {
            Some(i) => Some(&self.rel[i]),
            None => self.others.as_ref(),
        }
    }

    pub fn action_index(&self, name: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn at(self, action: &str) -> Result<PointedActionModel> {
        let point = self.action_index(action)?;
        Ok(PointedActionModel { model: self, point })
    }

    pub fn from_json(text: &str) -> Result<PointedActionModel> {
        let raw: ActionModelJson = serde_json::from_str(text)?;
        check_names("agent", raw.agents.iter().map(String::as_str))?;
        let index = |s: &str| {
            raw.states.iter().position(|x| x == s).ok_or_else(|| ModelError::UnknownState(s.into()))
        };
        if raw.states.iter().collect::<BTreeSet<_>>().len() != raw.states.len() {
            return Err(ModelError::Invalid("duplicate action name".into()));
        }
        for key in raw.pre.keys() {
            index(key)?;
        }
        let mut pre = Vec::with_capacity(raw.states.len());
        for s in &raw.states {
            let text = raw
                .pre
                .get(s)
                .ok_or_else(|| ModelError::Invalid(format!("action `{s}` has no precondition")))?;
            pre.push(Formula::parse_unchecked(text)?);
        }
        let mut rel = vec![ActionRelation::new(); raw.agents.len()];
        for (a, pairs) in &raw.rel {
            let ai = raw
                .agents
                .iter()
                .position(|b| b == a)
                .ok_or_else(|| ModelError::UnknownAgent(a.clone()))?;
            for (x, y) in pairs {
                rel[ai].insert((index(x)?, index(y)?));
            }
        }
        let point = match &raw.point {
            Some(p) => index(p)?,
            None => return Err(ModelError::Invalid("missing `point`".into())),
        };
        let model = ActionModel {
            actions: raw.states,
            pre,
            agents: raw.agents.into_iter().map(Agent::new).collect(),
            rel,
            others: None,
        };
        Ok(PointedActionModel { model, point })
    }

    pub fn to_json(&self, point: Option<usize>) -> String {
        let raw = ActionModelJson {
            agents: self.agents.iter().map(|a| a.0.clone()).collect(),
            states: self.actions.clone(),
            pre: self.actions.iter().cloned().zip(self.pre.iter().map(|f| f.to_string())).collect(),
            rel: self
                .agents
                .iter()
                .zip(&self.rel)
                .map(|(a, r)| {
                    let pairs = r
                        .iter()
                        .map(|&(x, y)| (self.actions[x].clone(), self.actions[y].clone()))
                        .collect();
                    (a.0.clone(), pairs)
                })
                .collect(),
            point: point.map(|p| self.actions[p].clone()),
        };
        serde_json::to_string_pretty(&raw).expect("action model serializes")
    }
}

/// On-disk action model: the Kripke layout with `pre` in place of `val`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionModelJson {
    agents: Vec<String>,
    #[serde(alias = "actions")]
    states: Vec<String>,
    pre: BTreeMap<String, String>,
    #[serde(default)]
    rel: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    point: Option<String>,
}

fn transitive_closure(mut r: ActionRelation) -> ActionRelation {
    loop {
        let extra: Vec<(usize, usize)> = r
            .iter()
            .flat_map(|&(x, y)| r.range((y, 0)..=(y, usize::MAX)).map(move |&(_, z)| (x, z)))
            .filter(|pair| !r.contains(pair))
            .collect();
        if extra.is_empty() {
            return r;
        }
        r.extend(extra);
    }
}

fn not(f: &Formula) -> Formula {
    Formula::not(f.clone())
}

fn bel(a: &Agent, f: Formula) -> Formula {
    Formula::Believes(a.clone(), Box::new(f))
}

/// Speaker preconditions in the order bluff, truth, lie.
fn speaker_preconditions(a: &Agent, f: &Formula) -> [Formula; 3] {
    [
        not(&Formula::or(bel(a, f.clone()), bel(a, not(f)))),
        bel(a, f.clone()),
        bel(a, not(f)),
    ]
}

/// Public truth and lie as one model. Every agent ends up in the truth action.
pub fn pub_action_model(f: &Formula) -> ActionModel {
    ActionModel {
        actions: vec!["truth".into(), "lie".into()],
        pre: vec![f.clone(), not(f)],
        agents: vec![],
        rel: vec![],
        others: Some([(0, 0), (1, 0)].into_iter().collect()),
    }
}

/// Agent announcement by `speaker`. The speaker knows which action happens;
/// everybody else believes the truthful one.
pub fn agent_action_model(speaker: &Agent, f: &Formula) -> ActionModel {
    ActionModel {
        actions: vec!["bluff".into(), "truth".into(), "lie".into()],
        pre: speaker_preconditions(speaker, f).to_vec(),
        agents: vec![speaker.clone()],
        rel: vec![[(0, 0), (1, 1), (2, 2)].into_iter().collect()],
        others: Some([(0, 1), (1, 1), (2, 1)].into_iter().collect()),
    }
}

/// Public announcement to a single skeptical observer, who rejects `f` when
/// already believing its negation.
pub fn sk_pub_action_model(f: &Formula, observers: &[Agent]) -> Result<ActionModel> {
    let [x] = observers else {
        return Err(ModelError::Unsupported(format!(
            "skeptical public announcements need exactly one observer, got {}",
            observers.len()
        )));
    };
    let rejects = bel(x, not(f));
    Ok(ActionModel {
        actions: vec!["truth_sk".into(), "lie_sk".into(), "rej_sk".into()],
        pre: vec![
            Formula::and(f.clone(), not(&rejects)),
            Formula::and(not(f), not(&rejects)),
            rejects,
        ],
        agents: vec![x.clone()],
        rel: vec![[(0, 0), (1, 0), (2, 2)].into_iter().collect()],
        others: None,
    })
}

/// Agent announcement by `speaker` to a skeptical `addressee`. Further
/// agents get the addressee's accessibility.
///
/// Actions: `bluff_sk, truth_sk, lie_sk` (addressee accepts) and
/// `bluff_skr, truth_skr, lie_skr` (addressee already believes the negation).
pub fn sk_agent_action_model(speaker: &Agent, addressee: &Agent, f: &Formula) -> Result<ActionModel> {
    if speaker == addressee {
        return Err(ModelError::Invalid("speaker and addressee must differ".into()));
    }
    let rejects = bel(addressee, not(f));
    let flavors = speaker_preconditions(speaker, f);
    let mut pre: Vec<Formula> =
        flavors.iter().map(|p| Formula::and(p.clone(), not(&rejects))).collect();
    pre.extend(flavors.iter().map(|p| Formula::and(p.clone(), rejects.clone())));

    let mut hearer = ActionRelation::new();
    for x in 0..3 {
        hearer.insert((x, 1));
        for y in 3..6 {
            hearer.insert((x + 3, y));
        }
    }
    let mut teller = ActionRelation::new();
    for x in 0..3 {
        teller.extend([(x, x), (x, x + 3), (x + 3, x), (x + 3, x + 3)]);
    }
    Ok(ActionModel {
        actions: ["bluff_sk", "truth_sk", "lie_sk", "bluff_skr", "truth_skr", "lie_skr"]
            .map(String::from)
            .to_vec(),
        pre,
        agents: vec![speaker.clone(), addressee.clone()],
        rel: vec![transitive_closure(teller), transitive_closure(hearer.clone())],
        others: Some(transitive_closure(hearer)),
    })
}

/// The pointed action model behind an announcement, for a model with the
/// given agents. Skeptical public announcements take the single agent as
/// observer; skeptical agent announcements take the other agent as addressee.
pub fn builtin_for(agents: &[Agent], ann: &Announcement) -> Result<PointedActionModel> {
    use Announcement::*;
    let pointed = |model: ActionModel, name: &str| model.at(name);
    match ann {
        PubTruth(f) => pointed(pub_action_model(f), "truth"),
        PubLie(f) => pointed(pub_action_model(f), "lie"),
        AgTruth(a, f) => pointed(agent_action_model(a, f), "truth"),
        AgLie(a, f) => pointed(agent_action_model(a, f), "lie"),
        AgBluff(a, f) => pointed(agent_action_model(a, f), "bluff"),
        SkPubTruth(f) | SkPubLie(f) | SkPubRejected(f) => {
            let name = ann.keyword().expect("flavor");
            pointed(sk_pub_action_model(f, agents)?, name)
        }
        SkAgTruth(a, f) | SkAgLie(a, f) | SkAgBluff(a, f) | SkAgTruthRejected(a, f)
        | SkAgLieRejected(a, f) | SkAgBluffRejected(a, f) => {
            let others: Vec<&Agent> = agents.iter().filter(|b| *b != a).collect();
            let [b] = others[..] else {
                return Err(ModelError::Unsupported(format!(
                    "[{ann}] needs a model with exactly two agents to determine the addressee"
                )));
            };
            let name = ann.keyword().expect("flavor");
            pointed(sk_agent_action_model(a, b, f)?, name)
        }
        GenericAction(pam) => Ok(pam.clone()),
        PlPubTruth(_) | PlPubLie(_) | PlAgTruth(..) | PlAgLie(..) | PlAgBluff(..) => Err(
            ModelError::Unsupported(format!("[{ann}] needs a plausibility model")),
        ),
    }
}

/// Product of a model with an action model. `index[s][x]` is the product
/// state for `(s, x)` when `s` satisfies the precondition of `x`.
pub(crate) struct Product {
    pub model: KripkeModel,
    pub index: Vec<Vec<Option<usize>>>,
    pub pre: Vec<StateSet>,
}

pub(crate) fn product(m: &KripkeModel, am: &ActionModel, named: bool) -> Result<Product> {
    let k = am.actions.len();
    if am.pre.len() != k {
        return Err(ModelError::Invalid("one precondition per action required".into()));
    }
    let rels: Vec<&ActionRelation> = m
        .agents()
        .iter()
        .map(|a| {
            am.relation_for(a).ok_or_else(|| {
                ModelError::SignatureMismatch(format!("the action model has no relation for `{a}`"))
            })
        })
        .collect::<Result<_>>()?;
    if let Some(&(x, y)) = rels.iter().flat_map(|r| r.iter()).find(|&&(x, y)| x >= k || y >= k) {
        return Err(ModelError::Invalid(format!("action relation pair ({x}, {y}) out of range")));
    }
    let pre: Vec<StateSet> = am.pre.iter().map(|f| m.extension(f)).collect::<Result<_>>()?;
    let mut index = vec![vec![None; k]; m.len()];
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
    let mut succ = Vec::with_capacity(m.agents().len() * n);
    for (a, rel) in rels.iter().enumerate() {
        for &(s, x) in &pairs {
            let mut out = StateSet::empty(n);
            for t in m.successors(a, s).iter() {
                for &(_, y) in rel.range((x, 0)..=(x, usize::MAX)) {
                    if let Some(j) = index[t][y] {
                        out.insert(j);
                    }
                }
            }
            succ.push(out);
        }
    }
    let val = (0..m.atoms().len())
        .map(|p| StateSet::from_indices(n, (0..n).filter(|&i| m.valuation(p).contains(pairs[i].0))))
        .collect();
    let names: Option<Arc<[String]>> = named.then(|| {
        pairs
            .iter()
            .map(|&(s, x)| format!("({},{})", m.state_name(s), am.actions[x]))
            .collect()
    });
    let model = KripkeModel::from_parts(m.agents.clone(), m.atoms.clone(), names, n, succ, val);
    Ok(Product { model, index, pre })
}

pub(crate) fn transform_product(m: &KripkeModel, ann: &Announcement) -> Result<Transformed> {
    let pam = builtin_for(m.agents(), ann)?;
    if pam.point >= pam.model.actions.len() {
        return Err(ModelError::Invalid("designated action out of range".into()));
    }
    let p = product(m, &pam.model, false)?;
    Ok(Transformed {
        image: p.index.iter().map(|row| row[pam.point]).collect(),
        pre: p.pre[pam.point].clone(),
        model: p.model,
    })
}

/// The full product `M ⊗ A` with states named `(s,x)`.
pub fn product_model(m: &KripkeModel, am: &ActionModel) -> Result<KripkeModel> {
    Ok(product(m, am, true)?.model)
}

/// Product update of pointed models. `None` when the designated action is
/// not executable at the designated state.
pub fn product_update(pm: &PointedModel, pam: &PointedActionModel) -> Result<Option<PointedModel>> {
    let p = product(&pm.model, &pam.model, true)?;
    let point = p
        .index
        .get(pm.point)
        .and_then(|row| row.get(pam.point))
        .ok_or_else(|| ModelError::Invalid("designated action out of range".into()))?;
    Ok(point.map(|point| PointedModel { model: p.model, point }))
}

/// `M, s ⊨ [A, x] f`.
pub fn eval_generic(pm: &PointedModel, pam: &PointedActionModel, f: &Formula) -> Result<bool> {
    pm.eval(&Formula::dynamic(Announcement::GenericAction(pam.clone()), f.clone()))
}

/// Execute any announcement that is defined on Kripke models. Direct
/// flavors keep the state space; the others go through the product.
pub fn execute(pm: &PointedModel, ann: &Announcement) -> Result<Option<PointedModel>> {
    use Announcement::*;
    match ann {
        PubTruth(_) | PubLie(_) | AgTruth(..) | AgLie(..) | AgBluff(..) => update::announce(pm, ann),
        _ => product_update(pm, &builtin_for(pm.model.agents(), ann)?),
    }
}
