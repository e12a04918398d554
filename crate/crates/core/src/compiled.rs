//! A faster evaluator for small models, used by the validity checker.
//!
//! Formulas are compiled into one shared graph of subformulas over a fixed
//! signature, with every action model built in advance. Evaluation on a
//! model of at most 128 states uses `u128` masks and remembers each
//! (subformula, updated model) pair, so a batch of axiom instances that
//! share announcements pays for each update once. A product that would
//! exceed 128 states yields `None`; callers then fall back to
//! [`KripkeModel::extension`].

use std::collections::HashMap;

use crate::action::builtin_for;
use crate::enumerate::ModelCode;
use crate::error::{ModelError, Result};
use crate::kripke::KripkeModel;
use crate::syntax::{Agent, Announcement, Atom, Formula};

pub type Mask = u128;
pub const MAX_STATES: usize = 128;

type Id = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bot,
    Atom(usize),
    Not(Id),
    And(Id, Id),
    Or(Id, Id),
    Implies(Id, Id),
    Iff(Id, Id),
    Believes(usize, Id),
    /// `[update] body`, defined where `pre` holds.
    Dyn { pre: Id, update: Update, point: usize, body: Id },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Update {
    /// Everybody's arrows into the content.
    Arrow(Id),
    /// Every non-speaker's arrows into states where the speaker believes the content.
    AgentArrow(usize, Id),
    Product(Id),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Action {
    pre: Vec<Id>,
    shape: Id,
}

/// `shape[a][x]`: actions agent `a` considers possible when `x` happens.
type Shape = Vec<Vec<u64>>;

/// What an updated model depends on: the update kind and the extensions it
/// reads. Announcements of different formulas with the same extension share
/// one updated model.
#[derive(Clone, Debug, PartialEq, Eq)]
enum UpdateKey {
    Arrow(Mask),
    AgentArrow(usize, Mask),
    Product(Id, Vec<Mask>),
}

/// A set of formulas compiled against one signature.
#[derive(Clone, Debug, Default)]
pub struct Program {
    agents: Vec<Agent>,
    atoms: Vec<Atom>,
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
    actions: Vec<Action>,
    action_index: HashMap<Action, Id>,
    shapes: Vec<Shape>,
    shape_index: HashMap<Shape, Id>,
}

/// A small model as bit masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallModel {
    n: usize,
    agents: usize,
    /// Agent-major successor masks, `succ[a * n + s]`.
    succ: Vec<Mask>,
    val: Vec<Mask>,
}

fn full(n: usize) -> Mask {
    if n == MAX_STATES {
        !0
    } else {
        (1 << n) - 1
    }
}

impl SmallModel {
    /// `None` if the model has more than [`MAX_STATES`] states.
    pub fn from_kripke(m: &KripkeModel) -> Option<SmallModel> {
        let n = m.len();
        if n > MAX_STATES {
            return None;
        }
        let mask = |set: &crate::bitset::StateSet| set.iter().fold(0 as Mask, |acc, i| acc | 1 << i);
        let agents = m.agents().len();
        let succ = (0..agents).flat_map(|a| (0..n).map(move |s| (a, s))).map(|(a, s)| mask(m.successors(a, s))).collect();
        let val = (0..m.atoms().len()).map(|p| mask(m.valuation(p))).collect();
        Some(SmallModel { n, agents, succ, val })
    }

    /// The model behind an enumerator code with `atoms` atoms.
    pub fn from_code(code: &ModelCode, atoms: usize) -> SmallModel {
        let n = code.n;
        let row = (1u64 << n) - 1;
        let succ = code.relations.iter().flat_map(|&r| (0..n).map(move |s| ((r >> (s * n)) & row) as Mask)).collect();
        let val = (0..atoms).map(|p| ((code.valuation >> (p * n)) & row) as Mask).collect();
        SmallModel { n, agents: code.relations.len(), succ, val }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn box_set(&self, a: usize, target: Mask) -> Mask {
        let base = a * self.n;
        let mut out = 0;
        for s in 0..self.n {
            if self.succ[base + s] & !target == 0 {
                out |= 1 << s;
            }
        }
        out
    }
}

impl Program {
    pub fn new(agents: &[Agent], atoms: &[Atom]) -> Program {
        Program { agents: agents.to_vec(), atoms: atoms.to_vec(), ..Program::default() }
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Compile `f`, returning a handle for [`Evaluator::extension`].
    pub fn add(&mut self, f: &Formula) -> Result<usize> {
        self.formula(f).map(|id| id as usize)
    }

    fn intern(&mut self, node: Node) -> Id {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn agent(&self, a: &Agent) -> Result<usize> {
        self.agents.iter().position(|b| b == a).ok_or_else(|| ModelError::UnknownAgent(a.0.clone()))
    }

    fn formula(&mut self, f: &Formula) -> Result<Id> {
        use Formula as F;
        let node = match f {
            F::Top => Node::Top,
            F::Bot => Node::Bot,
            F::Atom(p) => Node::Atom(
                self.atoms.iter().position(|q| q == p).ok_or_else(|| ModelError::UnknownAtom(p.0.clone()))?,
            ),
            F::Not(g) => Node::Not(self.formula(g)?),
            F::And(l, r) => Node::And(self.formula(l)?, self.formula(r)?),
            F::Or(l, r) => Node::Or(self.formula(l)?, self.formula(r)?),
            F::Implies(l, r) => Node::Implies(self.formula(l)?, self.formula(r)?),
            F::Iff(l, r) => Node::Iff(self.formula(l)?, self.formula(r)?),
            F::Believes(a, g) => Node::Believes(self.agent(a)?, self.formula(g)?),
            F::Knows(..) | F::CondBelieves(..) => {
                return Err(ModelError::Unsupported(format!(
                    "`{f}` (knowledge and conditional belief need a plausibility model)"
                )))
            }
            F::Dyn(ann, body) => {
                let body = self.formula(body)?;
                self.announcement(ann, body)?
            }
        };
        Ok(self.intern(node))
    }

    fn announcement(&mut self, ann: &Announcement, body: Id) -> Result<Node> {
        use Announcement::*;
        Ok(match ann {
            PubTruth(f) | PubLie(f) => {
                let content = self.formula(f)?;
                let pre = match ann {
                    PubTruth(_) => content,
                    _ => self.intern(Node::Not(content)),
                };
                Node::Dyn { pre, update: Update::Arrow(content), point: 0, body }
            }
            AgTruth(a, f) | AgLie(a, f) | AgBluff(a, f) => {
                let speaker = self.agent(a)?;
                let content = self.formula(f)?;
                let not_content = self.intern(Node::Not(content));
                let yes = self.intern(Node::Believes(speaker, content));
                let no = self.intern(Node::Believes(speaker, not_content));
                let pre = match ann {
                    AgTruth(..) => yes,
                    AgLie(..) => no,
                    _ => {
                        let either = self.intern(Node::Or(yes, no));
                        self.intern(Node::Not(either))
                    }
                };
                Node::Dyn { pre, update: Update::AgentArrow(speaker, content), point: 0, body }
            }
            PlPubTruth(_) | PlPubLie(_) | PlAgTruth(..) | PlAgLie(..) | PlAgBluff(..) => {
                return Err(ModelError::Unsupported(format!(
                    "[{ann}] (plausibility announcements need a plausibility model)"
                )))
            }
            _ => {
                let pam = builtin_for(&self.agents, ann)?;
                let am = &pam.model;
                let k = am.actions.len();
                if k > 64 || pam.point >= k {
                    return Err(ModelError::Invalid("unsupported action model shape".into()));
                }
                let mut succ = Vec::with_capacity(self.agents.len());
                for a in &self.agents {
                    let rel = am.relation_for(a).ok_or_else(|| {
                        ModelError::SignatureMismatch(format!("the action model has no relation for `{a}`"))
                    })?;
                    let mut row = vec![0u64; k];
                    for &(x, y) in rel {
                        if x >= k || y >= k {
                            return Err(ModelError::Invalid(format!(
                                "action relation pair ({x}, {y}) out of range"
                            )));
                        }
                        row[x] |= 1 << y;
                    }
                    succ.push(row);
                }
                let pre = am.pre.iter().map(|f| self.formula(f)).collect::<Result<Vec<_>>>()?;
                let point_pre = pre[pam.point];
                let shape = match self.shape_index.get(&succ) {
                    Some(&id) => id,
                    None => {
                        let id = self.shapes.len() as Id;
                        self.shapes.push(succ.clone());
                        self.shape_index.insert(succ, id);
                        id
                    }
                };
                let action = Action { pre, shape };
                let id = match self.action_index.get(&action) {
                    Some(&id) => id,
                    None => {
                        let id = self.actions.len() as Id;
                        self.actions.push(action.clone());
                        self.action_index.insert(action, id);
                        id
                    }
                };
                Node::Dyn { pre: point_pre, update: Update::Product(id), point: pam.point, body }
            }
        })
    }
}

/// An updated model reachable from the loaded one.
struct Derived {
    parent: usize,
    key: UpdateKey,
    model: SmallModel,
    /// For products: `index[s * k + x]` is the state for `(s, x)`, or `u8::MAX`.
    index: Vec<u8>,
    k: usize,
}

/// Evaluates a [`Program`] on one model at a time.
pub struct Evaluator<'p> {
    program: &'p Program,
    /// Slot 0 is the loaded model; later slots are updates of earlier ones.
    models: Vec<Derived>,
    /// `memo[slot][node]`, valid when the stamp matches.
    memo: Vec<Vec<(u32, Mask)>>,
    /// Updates already resolved, as (parent slot, update, child slot).
    resolved: Vec<(usize, Update, usize)>,
    stamp: u32,
    overflow: bool,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program) -> Evaluator<'p> {
        Evaluator { program, models: Vec::new(), memo: Vec::new(), resolved: Vec::new(), stamp: 0, overflow: false }
    }

    /// Make `m` the model that [`Evaluator::extension`] refers to.
    pub fn load(&mut self, m: SmallModel) {
        debug_assert_eq!(m.agents, self.program.agents.len());
        self.models.clear();
        self.resolved.clear();
        self.models.push(Derived { parent: usize::MAX, key: UpdateKey::Arrow(0), model: m, index: vec![], k: 0 });
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.memo.iter_mut().for_each(|row| row.fill((0, 0)));
            self.stamp = 1;
        }
        self.overflow = false;
    }

    /// The extension of a compiled formula in the loaded model, or `None`
    /// when an update on the way is too large.
    pub fn extension(&mut self, formula: usize) -> Option<Mask> {
        if self.overflow {
            return None;
        }
        let out = self.eval(0, formula as Id);
        if self.overflow {
            None
        } else {
            Some(out)
        }
    }

    fn eval(&mut self, slot: usize, id: Id) -> Mask {
        if self.overflow {
            return 0;
        }
        if let Some(&(stamp, mask)) = self.memo.get(slot).and_then(|row| row.get(id as usize)) {
            if stamp == self.stamp {
                return mask;
            }
        }
        let out = self.compute(slot, id);
        if self.memo.len() <= slot {
            self.memo.resize_with(slot + 1, Vec::new);
        }
        let row = &mut self.memo[slot];
        if row.len() < self.program.nodes.len() {
            row.resize(self.program.nodes.len(), (0, 0));
        }
        row[id as usize] = (self.stamp, out);
        out
    }

    fn compute(&mut self, slot: usize, id: Id) -> Mask {
        let program = self.program;
        let n = self.models[slot].model.n;
        let all = full(n);
        match &program.nodes[id as usize] {
            Node::Top => all,
            Node::Bot => 0,
            Node::Atom(p) => self.models[slot].model.val[*p],
            Node::Not(g) => !self.eval(slot, *g) & all,
            Node::And(l, r) => self.eval(slot, *l) & self.eval(slot, *r),
            Node::Or(l, r) => self.eval(slot, *l) | self.eval(slot, *r),
            Node::Implies(l, r) => (!self.eval(slot, *l) | self.eval(slot, *r)) & all,
            Node::Iff(l, r) => !(self.eval(slot, *l) ^ self.eval(slot, *r)) & all,
            Node::Believes(a, g) => {
                let e = self.eval(slot, *g);
                self.models[slot].model.box_set(*a, e)
            }
            &Node::Dyn { pre, update, point, body } => {
                let pre = self.eval(slot, pre);
                if pre == 0 {
                    return all;
                }
                let Some(child) = self.derive(slot, update) else {
                    self.overflow = true;
                    return 0;
                };
                let inner = self.eval(child, body);
                let d = &self.models[child];
                let mut out = !pre & all;
                if d.k == 0 {
                    out |= pre & inner;
                } else {
                    for s in (0..n).filter(|s| pre >> s & 1 == 1) {
                        if inner >> d.index[s * d.k + point] & 1 == 1 {
                            out |= 1 << s;
                        }
                    }
                }
                out
            }
        }
    }

    fn derive(&mut self, parent: usize, update: Update) -> Option<usize> {
        if let Some(&(_, _, child)) = self.resolved.iter().find(|r| r.0 == parent && r.1 == update) {
            return Some(child);
        }
        let child = self.derive_new(parent, update)?;
        self.resolved.push((parent, update, child));
        Some(child)
    }

    fn derive_new(&mut self, parent: usize, update: Update) -> Option<usize> {
        let key = match update {
            Update::Arrow(c) => UpdateKey::Arrow(self.eval(parent, c)),
            Update::AgentArrow(speaker, c) => UpdateKey::AgentArrow(speaker, self.eval(parent, c)),
            Update::Product(aid) => {
                let action = &self.program.actions[aid as usize];
                let pres = action.pre.iter().map(|&p| self.eval(parent, p)).collect();
                UpdateKey::Product(action.shape, pres)
            }
        };
        if let Some(slot) = self.models.iter().position(|d| d.parent == parent && d.key == key) {
            return Some(slot);
        }
        let m = &self.models[parent].model;
        let (model, index, k) = match &key {
            &UpdateKey::Arrow(e) => (SmallModel { succ: m.succ.iter().map(|&s| s & e).collect(), ..m.clone() }, vec![], 0),
            &UpdateKey::AgentArrow(speaker, e) => {
                let believes = m.box_set(speaker, e);
                let mut next = m.clone();
                for a in (0..m.agents).filter(|&a| a != speaker) {
                    for s in &mut next.succ[a * m.n..(a + 1) * m.n] {
                        *s &= believes;
                    }
                }
                (next, vec![], 0)
            }
            UpdateKey::Product(shape, pres) => {
                let shape = &self.program.shapes[*shape as usize];
                let k = pres.len();
                let mut index = vec![u8::MAX; m.n * k];
                let mut pairs = Vec::new();
                for s in 0..m.n {
                    for (x, pre) in pres.iter().enumerate() {
                        if pre >> s & 1 == 1 {
                            if pairs.len() == MAX_STATES {
                                return None;
                            }
                            index[s * k + x] = pairs.len() as u8;
                            pairs.push((s, x));
                        }
                    }
                }
                let n2 = pairs.len();
                let mut succ = Vec::with_capacity(m.agents * n2);
                for (a, row) in shape.iter().enumerate().take(m.agents) {
                    for &(s, x) in &pairs {
                        let mut out: Mask = 0;
                        let targets = m.succ[a * m.n + s];
                        let actions = row[x];
                        for t in (0..m.n).filter(|t| targets >> t & 1 == 1) {
                            for y in (0..k).filter(|y| actions >> y & 1 == 1) {
                                let j = index[t * k + y];
                                if j != u8::MAX {
                                    out |= 1 << j;
                                }
                            }
                        }
                        succ.push(out);
                    }
                }
                let val = m
                    .val
                    .iter()
                    .map(|&v| pairs.iter().enumerate().fold(0, |acc, (i, &(s, _))| acc | ((v >> s & 1) << i)))
                    .collect();
                (SmallModel { n: n2, agents: m.agents, succ, val }, index, k)
            }
        };
        self.models.push(Derived { parent, key, model, index, k });
        Some(self.models.len() - 1)
    }
}
