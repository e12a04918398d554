//! Reduction of announcement formulas to the static language, a bounded
//! validity oracle, and alternating disjunctive forms for strict announcements.
//!
//! # Termination of `translate`
//!
//! Rewriting always picks an innermost announcement, one whose announced
//! formula and scope contain no announcement. Each rule replaces it by
//! announcements whose scopes are strictly smaller subformulas of the old
//! scope, and it never copies or creates an announcement that still has an
//! announcement inside it. So the pair (number of announcements that are not
//! innermost, multiset of scope sizes of innermost announcements) decreases
//! lexicographically at each step. [`rewrite_measure`] computes it.

use std::collections::{BTreeSet, HashMap};

use crate::action::builtin_for;
use crate::compiled::{Evaluator, Program, SmallModel};
use crate::enumerate::Enumeration;
use crate::error::{ModelError, Result};
use crate::kripke::{KripkeModel, ModelClass, PointedModel};
use crate::syntax::{Agent, Announcement, Atom, Formula};
use crate::update;

/// One rewrite: the axiom used and the whole formula before and after.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub axiom: &'static str,
    pub before: Formula,
    pub after: Formula,
}

pub type RewriteTrace = Vec<RewriteStep>;

/// Which belief axiom to use for an agent announcement in the scope of the
/// speaker's own belief.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpeakerAxioms {
    /// Sound on all models: after the update the speaker may reach states
    /// where a different flavor was executable, so all three are covered.
    #[default]
    General,
    /// The compact form that keeps the flavor; sound on transitive models only.
    Transitive,
}

#[derive(Clone, Debug, Default)]
pub struct Translator {
    pub speaker_axioms: SpeakerAxioms,
    /// Agents used to resolve skeptical announcements. Defaults to the
    /// agents occurring in the formula.
    pub agents: Option<Vec<Agent>>,
}

/// Announcement-free equivalent of `f`, with the full rewrite trace.
pub fn translate(f: &Formula) -> Result<(Formula, RewriteTrace)> {
    Translator::default().translate(f)
}

impl Translator {
    pub fn transitive() -> Translator {
        Translator { speaker_axioms: SpeakerAxioms::Transitive, agents: None }
    }

    fn agents_for(&self, f: &Formula) -> Vec<Agent> {
        self.agents.clone().unwrap_or_else(|| f.signature().agents.into_iter().collect())
    }

    /// Rewrite step by step, recording every step.
    pub fn translate(&self, f: &Formula) -> Result<(Formula, RewriteTrace)> {
        let agents = self.agents_for(f);
        let mut trace = Vec::new();
        let mut current = f.clone();
        while let Some((next, axiom)) = self.step(&current, &agents)? {
            trace.push(RewriteStep { axiom, before: current, after: next.clone() });
            current = next;
        }
        Ok((current, trace))
    }

    /// Same result as [`Translator::translate`], without building the trace.
    pub fn reduce(&self, f: &Formula) -> Result<Formula> {
        let agents = self.agents_for(f);
        self.reduce_in(f, &agents)
    }

    fn reduce_in(&self, f: &Formula, agents: &[Agent]) -> Result<Formula> {
        use Formula::*;
        let r = |g: &Formula| self.reduce_in(g, agents).map(Box::new);
        Ok(match f {
            Top | Bot | Atom(_) => f.clone(),
            Not(g) => Not(r(g)?),
            And(l, x) => And(r(l)?, r(x)?),
            Or(l, x) => Or(r(l)?, r(x)?),
            Implies(l, x) => Implies(r(l)?, r(x)?),
            Iff(l, x) => Iff(r(l)?, r(x)?),
            Believes(a, g) => Believes(a.clone(), r(g)?),
            Knows(a, g) => Knows(a.clone(), r(g)?),
            CondBelieves(a, c, g) => CondBelieves(a.clone(), r(c)?, r(g)?),
            Dyn(ann, body) => {
                let mut err = None;
                let ann = ann.map_formulas(&mut |g| {
                    self.reduce_in(g, agents).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        Formula::Top
                    })
                });
                if let Some(e) = err {
                    return Err(e);
                }
                let body = self.reduce_in(body, agents)?;
                self.push(&ann, &body, agents)?
            }
        })
    }

    /// Push a static announcement through a static scope completely.
    fn push(&self, ann: &Announcement, body: &Formula, agents: &[Agent]) -> Result<Formula> {
        let (_, once) = self.rule(ann, body, agents)?;
        self.resolve(&once, agents)
    }

    /// Replace the announcements created by one rule application.
    fn resolve(&self, f: &Formula, agents: &[Agent]) -> Result<Formula> {
        use Formula::*;
        let r = |g: &Formula| self.resolve(g, agents).map(Box::new);
        Ok(match f {
            Top | Bot | Atom(_) => f.clone(),
            Not(g) => Not(r(g)?),
            And(l, x) => And(r(l)?, r(x)?),
            Or(l, x) => Or(r(l)?, r(x)?),
            Implies(l, x) => Implies(r(l)?, r(x)?),
            Iff(l, x) => Iff(r(l)?, r(x)?),
            Believes(a, g) => Believes(a.clone(), r(g)?),
            Knows(a, g) => Knows(a.clone(), r(g)?),
            CondBelieves(a, c, g) => CondBelieves(a.clone(), r(c)?, r(g)?),
            Dyn(ann, body) => self.push(ann, body, agents)?,
        })
    }

    /// Rewrite the leftmost innermost announcement once.
    fn step(&self, f: &Formula, agents: &[Agent]) -> Result<Option<(Formula, &'static str)>> {
        use Formula::*;
        let un = |g: &Formula, wrap: &dyn Fn(Box<Formula>) -> Formula| -> Result<Option<(Formula, &'static str)>> {
            Ok(self.step(g, agents)?.map(|(g2, ax)| (wrap(Box::new(g2)), ax)))
        };
        let bin = |l: &Formula, r: &Formula, wrap: &dyn Fn(Box<Formula>, Box<Formula>) -> Formula| -> Result<Option<(Formula, &'static str)>> {
            if let Some((l2, ax)) = self.step(l, agents)? {
                return Ok(Some((wrap(Box::new(l2), Box::new(r.clone())), ax)));
            }
            Ok(self.step(r, agents)?.map(|(r2, ax)| (wrap(Box::new(l.clone()), Box::new(r2)), ax)))
        };
        match f {
            Top | Bot | Atom(_) => Ok(None),
            Not(g) => un(g, &Not),
            And(l, r) => bin(l, r, &And),
            Or(l, r) => bin(l, r, &Or),
            Implies(l, r) => bin(l, r, &Implies),
            Iff(l, r) => bin(l, r, &Iff),
            Believes(a, g) => un(g, &|b| Believes(a.clone(), b)),
            Knows(a, g) => un(g, &|b| Knows(a.clone(), b)),
            CondBelieves(a, c, g) => bin(c, g, &|c, g| CondBelieves(a.clone(), c, g)),
            Dyn(ann, body) => {
                // First the announced formulas, in order.
                let contents: Vec<Formula> = match &**ann {
                    Announcement::GenericAction(pam) => pam.model.pre.clone(),
                    other => vec![other.content().expect("flavor has content").clone()],
                };
                for (i, c) in contents.iter().enumerate() {
                    if let Some((c2, ax)) = self.step(c, agents)? {
                        let mut k = 0;
                        let ann2 = ann.map_formulas(&mut |g| {
                            let out = if k == i { c2.clone() } else { g.clone() };
                            k += 1;
                            out
                        });
                        return Ok(Some((Formula::dynamic(ann2, (**body).clone()), ax)));
                    }
                }
                if let Some((b2, ax)) = self.step(body, agents)? {
                    return Ok(Some((Formula::dynamic((**ann).clone(), b2), ax)));
                }
                let (ax, out) = self.rule(ann, body, agents)?;
                Ok(Some((out, ax)))
            }
        }
    }

    /// One reduction axiom for `[ann] body`, with `ann` and `body` static.
    fn rule(&self, ann: &Announcement, body: &Formula, agents: &[Agent]) -> Result<(&'static str, Formula)> {
        use Formula::*;
        if ann.is_plausibility() {
            return Err(ModelError::Unsupported(format!(
                "no reduction axioms for [{ann}] (plausibility announcements)"
            )));
        }
        let pre = precondition_of(ann, agents)?;
        let d = |g: &Formula| Formula::dynamic(ann.clone(), g.clone());
        let guard = |g: Formula| Formula::implies(pre.clone(), g);
        Ok(match body {
            Top => ("top", Top),
            Bot => ("bot", Formula::not(pre.clone())),
            Atom(_) => ("atom", guard(body.clone())),
            Not(g) => ("negation", guard(Formula::not(d(g)))),
            And(l, r) => ("conjunction", Formula::and(d(l), d(r))),
            Or(l, r) => ("disjunction", guard(Formula::or(d(l), d(r)))),
            Implies(l, r) => ("implication", Formula::implies(d(l), d(r))),
            Iff(l, r) => ("equivalence", guard(Formula::iff(d(l), d(r)))),
            Believes(c, g) => self.belief_rule(ann, c, g, &pre, agents)?,
            Knows(..) | CondBelieves(..) => {
                return Err(ModelError::Unsupported(format!(
                    "no reduction axioms for `{body}` (knowledge and conditional belief)"
                )))
            }
            Dyn(..) => unreachable!("rule is only applied to static scopes"),
        })
    }

    fn belief_rule(
        &self,
        ann: &Announcement,
        c: &Agent,
        g: &Formula,
        pre: &Formula,
        agents: &[Agent],
    ) -> Result<(&'static str, Formula)> {
        use Announcement::*;
        let b = |x: Formula| Formula::Believes(c.clone(), Box::new(x));
        let after = |a: Announcement| Formula::dynamic(a, g.clone());
        let guard = |x: Formula| Formula::implies(pre.clone(), x);
        Ok(match ann {
            PubTruth(f) => ("public-truth-belief", guard(b(after(PubTruth(f.clone()))))),
            PubLie(f) => ("public-lie-belief", guard(b(after(PubTruth(f.clone()))))),
            AgTruth(a, f) | AgLie(a, f) | AgBluff(a, f) if a != c => {
                let name = match ann {
                    AgTruth(..) => "agent-truth-listener",
                    AgLie(..) => "agent-lie-listener",
                    _ => "agent-bluff-listener",
                };
                (name, guard(b(after(AgTruth(a.clone(), f.clone())))))
            }
            AgTruth(a, f) | AgLie(a, f) | AgBluff(a, f) => {
                let name = match ann {
                    AgTruth(..) => "agent-truth-speaker",
                    AgLie(..) => "agent-lie-speaker",
                    _ => "agent-bluff-speaker",
                };
                let inner = match self.speaker_axioms {
                    SpeakerAxioms::Transitive => after(ann.clone()),
                    SpeakerAxioms::General => Formula::conj([
                        after(AgTruth(a.clone(), f.clone())),
                        after(AgLie(a.clone(), f.clone())),
                        after(AgBluff(a.clone(), f.clone())),
                    ]),
                };
                (name, guard(b(inner)))
            }
            _ => {
                // Everything else reduces through its action model.
                let pam = builtin_for(agents, ann)?;
                let rel = pam.model.relation_for(c).ok_or_else(|| {
                    ModelError::SignatureMismatch(format!("the action model has no relation for `{c}`"))
                })?;
                let targets: Vec<Formula> = rel
                    .range((pam.point, 0)..=(pam.point, usize::MAX))
                    .map(|&(_, y)| b(after(action_announcement(ann, &pam, y))))
                    .collect();
                ("action-belief", guard(Formula::conj(targets)))
            }
        })
    }
}

/// The announcement executing action `y` of the model behind `ann`.
fn action_announcement(
    ann: &Announcement,
    pam: &crate::syntax::PointedActionModel,
    y: usize,
) -> Announcement {
    match ann {
        Announcement::GenericAction(_) => Announcement::GenericAction(crate::syntax::PointedActionModel {
            model: pam.model.clone(),
            point: y,
        }),
        _ => {
            let content = ann.content().expect("flavor has content").clone();
            Announcement::from_keyword(&pam.model.actions[y], ann.speaker().cloned(), content)
                .expect("built-in action names are surface keywords")
        }
    }
}

/// Precondition of an announcement as a formula.
pub fn precondition_of(ann: &Announcement, agents: &[Agent]) -> Result<Formula> {
    use Announcement::*;
    match ann {
        PubTruth(_) | PubLie(_) | AgTruth(..) | AgLie(..) | AgBluff(..) => update::precondition(ann),
        _ => {
            let pam = builtin_for(agents, ann)?;
            pam.model
                .pre
                .get(pam.point)
                .cloned()
                .ok_or_else(|| ModelError::Invalid("designated action out of range".into()))
        }
    }
}

/// `(announcements that are not innermost, scope sizes of innermost ones
/// sorted descending)`. Decreases lexicographically along every trace.
pub fn rewrite_measure(f: &Formula) -> (usize, Vec<usize>) {
    fn walk(f: &Formula, outer: &mut usize, inner: &mut Vec<usize>) {
        use Formula::*;
        match f {
            Top | Bot | Atom(_) => {}
            Not(g) | Believes(_, g) | Knows(_, g) => walk(g, outer, inner),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) | CondBelieves(_, l, r) => {
                walk(l, outer, inner);
                walk(r, outer, inner);
            }
            Dyn(ann, body) => {
                let contents: Vec<&Formula> = match &**ann {
                    Announcement::GenericAction(pam) => pam.model.pre.iter().collect(),
                    other => vec![other.content().expect("flavor has content")],
                };
                if body.has_announcements() || contents.iter().any(|c| c.has_announcements()) {
                    *outer += 1;
                } else {
                    inner.push(body.size());
                }
                for c in contents {
                    walk(c, outer, inner);
                }
                walk(body, outer, inner);
            }
        }
    }
    let (mut outer, mut inner) = (0, Vec::new());
    walk(f, &mut outer, &mut inner);
    inner.sort_unstable_by(|a, b| b.cmp(a));
    (outer, inner)
}

/// Smallest countermodel to `f` among models of the class with at most
/// `max_states` states, or `None` if `f` holds everywhere. Isomorphic copies
/// are skipped, which does not change the verdict.
pub fn check_validity(
    f: &Formula,
    class: ModelClass,
    max_states: usize,
    agents: &[Agent],
    atoms: &[Atom],
) -> Result<Option<PointedModel>> {
    let mut found = find_countermodels(std::slice::from_ref(f), class, max_states, agents, atoms)?;
    Ok(found.pop().flatten())
}

/// [`check_validity`] for many formulas in one pass over the models.
pub fn find_countermodels(
    fs: &[Formula],
    class: ModelClass,
    max_states: usize,
    agents: &[Agent],
    atoms: &[Atom],
) -> Result<Vec<Option<PointedModel>>> {
    let mut program = Program::new(agents, atoms);
    let roots: Vec<usize> = fs.iter().map(|f| program.add(f)).collect::<Result<_>>()?;
    let mut eval = Evaluator::new(&program);
    let mut out: Vec<Option<PointedModel>> = vec![None; fs.len()];
    let mut open: Vec<usize> = (0..fs.len()).collect();
    let mut models = Enumeration::new(class, max_states, agents, atoms).up_to_isomorphism(true).iter()?;
    while let Some(code) = models.next_code() {
        eval.load(SmallModel::from_code(&code, atoms.len()));
        let mut slow: Option<KripkeModel> = None;
        let mut still_open = Vec::with_capacity(open.len());
        for &i in &open {
            let failing = match eval.extension(roots[i]) {
                Some(e) => (0..code.n).find(|&s| e >> s & 1 == 0),
                None => {
                    let m = slow.get_or_insert_with(|| models.build(&code));
                    let ext = m.extension(&fs[i])?;
                    (0..code.n).find(|&s| !ext.contains(s))
                }
            };
            match failing {
                Some(point) => out[i] = Some(PointedModel { model: models.build(&code), point }),
                None => still_open.push(i),
            }
        }
        open = still_open;
        if open.is_empty() {
            break;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Alternating disjunctive forms (KD45).

/// Options for the normal form construction.
#[derive(Clone, Debug)]
pub struct AdfOptions {
    /// Largest number of disjuncts or clauses allowed in any intermediate form.
    pub max_terms: usize,
    /// Model size for the equivalence check that accepts a result.
    pub oracle_states: usize,
}

impl Default for AdfOptions {
    fn default() -> Self {
        AdfOptions { max_terms: 4096, oracle_states: 3 }
    }
}

/// `B_b (cover_0 | ... | cover_n) & ~B_b ~cover_0 & ... & ~B_b ~cover_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub agent: Agent,
    pub cover: Vec<Formula>,
}

/// A propositional part and at most one block per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdfDisjunct {
    pub objective: Formula,
    pub blocks: Vec<Block>,
}

/// A disjunction of [`AdfDisjunct`]s. The empty disjunction is `false`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adf {
    pub disjuncts: Vec<AdfDisjunct>,
}

impl Block {
    pub fn to_formula(&self) -> Formula {
        let b = |f: Formula| Formula::Believes(self.agent.clone(), Box::new(f));
        let mut parts = vec![b(Formula::disj(self.cover.iter().cloned()))];
        parts.extend(self.cover.iter().map(|c| Formula::not(b(negate(c)))));
        Formula::conj(parts)
    }
}

impl AdfDisjunct {
    pub fn to_formula(&self) -> Formula {
        let mut parts = Vec::new();
        if self.objective != Formula::Top {
            parts.push(self.objective.clone());
        }
        parts.extend(self.blocks.iter().map(Block::to_formula));
        Formula::conj(parts)
    }
}

impl Adf {
    pub fn to_formula(&self) -> Formula {
        Formula::disj(self.disjuncts.iter().map(AdfDisjunct::to_formula))
    }
}

fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => (**g).clone(),
        Formula::Top => Formula::Bot,
        Formula::Bot => Formula::Top,
        other => Formula::not(other.clone()),
    }
}

/// Literal over a unit: an atom or a belief formula `B_b chi`.
type Lit = (Formula, bool);

fn lit_formula((unit, positive): &Lit) -> Formula {
    if *positive {
        unit.clone()
    } else {
        Formula::not(unit.clone())
    }
}

fn unit_agent(unit: &Formula) -> Option<&Agent> {
    match unit {
        Formula::Believes(a, _) => Some(a),
        _ => None,
    }
}

/// Disjunctive normal form over units. Conjuncts are sorted and free of
/// complementary literals.
fn dnf(f: &Formula, positive: bool, limit: usize) -> Result<Vec<Vec<Lit>>> {
    use Formula::*;
    let too_big = || ModelError::Unsupported(format!("normal form exceeds {limit} terms"));
    Ok(match (f, positive) {
        (Top, true) | (Bot, false) => vec![vec![]],
        (Top, false) | (Bot, true) => vec![],
        (Atom(_), _) | (Believes(..), _) => vec![vec![(f.clone(), positive)]],
        (Not(g), _) => dnf(g, !positive, limit)?,
        (And(l, r), true) | (Or(l, r), false) => {
            let (x, y) = (dnf(l, positive, limit)?, dnf(r, positive, limit)?);
            if x.len() * y.len() > limit {
                return Err(too_big());
            }
            let mut out = Vec::new();
            for cx in &x {
                'pair: for cy in &y {
                    let mut c: Vec<Lit> = cx.clone();
                    for l in cy {
                        if c.iter().any(|(u, p)| u == &l.0 && *p != l.1) {
                            continue 'pair;
                        }
                        if !c.contains(l) {
                            c.push(l.clone());
                        }
                    }
                    out.push(c);
                }
            }
            dedup_terms(out)
        }
        (Or(l, r), true) | (And(l, r), false) => {
            let mut out = dnf(l, positive, limit)?;
            out.extend(dnf(r, positive, limit)?);
            if out.len() > limit {
                return Err(too_big());
            }
            dedup_terms(out)
        }
        (Implies(l, r), _) => dnf(&Formula::or(Formula::not((**l).clone()), (**r).clone()), positive, limit)?,
        (Iff(l, r), _) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            let both = Formula::and(l.clone(), r.clone());
            let neither = Formula::and(Formula::not(l), Formula::not(r));
            dnf(&Formula::or(both, neither), positive, limit)?
        }
        (Knows(..), _) | (CondBelieves(..), _) | (Dyn(..), _) => {
            return Err(ModelError::Unsupported(format!(
                "normal forms are defined for static belief formulas, got `{f}`"
            )))
        }
    })
}

fn sort_key(l: &Lit) -> (String, bool) {
    (l.0.to_string(), l.1)
}

/// Sort literals, drop duplicate terms and terms subsumed by shorter ones.
fn dedup_terms(terms: Vec<Vec<Lit>>) -> Vec<Vec<Lit>> {
    let mut terms: Vec<Vec<Lit>> = terms
        .into_iter()
        .map(|mut t| {
            t.sort_by_key(sort_key);
            t
        })
        .collect();
    terms.sort_by_key(|t| t.len());
    let mut out: Vec<Vec<Lit>> = Vec::new();
    for t in terms {
        if !out.iter().any(|s| s.iter().all(|l| t.contains(l))) {
            out.push(t);
        }
    }
    out
}

fn conj_lits(lits: &[Lit]) -> Formula {
    Formula::conj(lits.iter().map(lit_formula))
}

fn disj_lits(lits: &[Lit]) -> Formula {
    Formula::disj(lits.iter().map(lit_formula))
}

/// Rewrite so that no `B_b` occurs directly (without another agent's
/// modality in between) inside the scope of a `B_b`, using the KD45 laws
/// `B_b (o | s) <-> B_b o | s` for `b`-subjective `s` and `B_b false <-> false`.
pub fn flatten(f: &Formula, limit: usize) -> Result<Formula> {
    use Formula::*;
    let r = |g: &Formula| flatten(g, limit).map(Box::new);
    Ok(match f {
        Top | Bot | Atom(_) => f.clone(),
        Not(g) => Not(r(g)?),
        And(l, x) => And(r(l)?, r(x)?),
        Or(l, x) => Or(r(l)?, r(x)?),
        Implies(l, x) => Implies(r(l)?, r(x)?),
        Iff(l, x) => Iff(r(l)?, r(x)?),
        Believes(b, g) => {
            let inner = flatten(g, limit)?;
            // CNF of the scope, as the DNF of its negation with literals flipped.
            let clauses = dnf(&inner, false, limit)?;
            let mut parts = Vec::new();
            for clause in clauses {
                let lits: Vec<Lit> = clause.into_iter().map(|(u, p)| (u, !p)).collect();
                let (subj, obj): (Vec<Lit>, Vec<Lit>) =
                    lits.into_iter().partition(|(u, _)| unit_agent(u) == Some(b));
                let mut disjuncts = Vec::new();
                if !obj.is_empty() {
                    disjuncts.push(Formula::Believes(b.clone(), Box::new(disj_lits(&obj))));
                }
                disjuncts.extend(subj.iter().map(lit_formula));
                parts.push(Formula::disj(disjuncts));
            }
            Formula::conj(parts)
        }
        Knows(..) | CondBelieves(..) | Dyn(..) => {
            return Err(ModelError::Unsupported(format!(
                "normal forms are defined for static belief formulas, got `{f}`"
            )))
        }
    })
}

fn build_adf(f: &Formula, limit: usize) -> Result<Adf> {
    let mut disjuncts = Vec::new();
    for term in dnf(f, true, limit)? {
        let objective: Vec<Lit> = term.iter().filter(|(u, _)| unit_agent(u).is_none()).cloned().collect();
        let mut by_agent: Vec<(Agent, Vec<Formula>, Vec<Formula>)> = Vec::new();
        for (unit, positive) in &term {
            let Formula::Believes(b, scope) = unit else { continue };
            let idx = match by_agent.iter().position(|(a, _, _)| a == b) {
                Some(i) => i,
                None => {
                    by_agent.push((b.clone(), vec![], vec![]));
                    by_agent.len() - 1
                }
            };
            if *positive {
                by_agent[idx].1.push((**scope).clone());
            } else {
                by_agent[idx].2.push((**scope).clone());
            }
        }
        let mut blocks = Vec::new();
        let mut consistent = true;
        for (agent, believed, doubted) in by_agent {
            let chi = Formula::conj(believed);
            let mut cover = vec![simplify_adf(&chi, limit)?];
            for theta in doubted {
                cover.push(simplify_adf(&Formula::and(chi.clone(), negate(&theta)), limit)?);
            }
            // KD45: the agent must consider some state possible.
            if cover.contains(&Formula::Bot) {
                consistent = false;
                break;
            }
            cover.dedup();
            blocks.push(Block { agent, cover });
        }
        if consistent {
            blocks.sort_by(|x, y| x.agent.cmp(&y.agent));
            disjuncts.push(AdfDisjunct { objective: conj_lits(&objective), blocks });
        }
    }
    Ok(Adf { disjuncts })
}

/// Normalize a subformula inside a block, as a formula.
fn simplify_adf(f: &Formula, limit: usize) -> Result<Formula> {
    Ok(build_adf(f, limit)?.to_formula())
}

/// Alternating disjunctive form of a static belief formula, accepted only
/// if the KD45 equivalence oracle confirms it.
pub fn adf(f: &Formula, opts: &AdfOptions) -> Result<Adf> {
    let flat = flatten(f, opts.max_terms)?;
    let out = build_adf(&flat, opts.max_terms)?;
    confirm_equivalent(f, &out.to_formula(), opts.oracle_states)?;
    Ok(out)
}

fn confirm_equivalent(f: &Formula, g: &Formula, states: usize) -> Result<()> {
    let mut sig = f.signature();
    let other = g.signature();
    sig.agents.extend(other.agents);
    sig.atoms.extend(other.atoms);
    let agents: Vec<Agent> = sig.agents.into_iter().collect();
    let atoms: Vec<Atom> = sig.atoms.into_iter().collect();
    let claim = Formula::iff(f.clone(), g.clone());
    match check_validity(&claim, ModelClass::KD45, states, &agents, &atoms)? {
        None => Ok(()),
        Some(cm) => Err(ModelError::Inconsistent(format!(
            "normal form `{g}` is not equivalent to `{f}`; countermodel: {}",
            cm.to_json()
        ))),
    }
}

/// A strict version of `speaker` announcing `f`: a formula `g` with
/// `B_speaker g` equivalent to `B_speaker f` over KD45, in the shape
/// `chi & ~B_a ~psi_1 & ... & ~B_a ~psi_n`.
///
/// Fails when the belief `B_speaker f` has no single-block normal form,
/// as for `B{a} p | B{a} q`.
pub fn strictify(speaker: &Agent, f: &Formula, opts: &AdfOptions) -> Result<Formula> {
    let b = |g: Formula| Formula::Believes(speaker.clone(), Box::new(g));
    let belief = b(f.clone());
    let normal = adf(&belief, opts)?;
    let out = match &normal.disjuncts[..] {
        [] => Formula::Bot,
        [d] if d.blocks.is_empty() && d.objective == Formula::Top => Formula::Top,
        [d] if d.objective == Formula::Top && d.blocks.len() == 1 && d.blocks[0].agent == *speaker => {
            let cover = &d.blocks[0].cover;
            // cover[0] is the believed formula; its possibility follows from belief.
            let mut parts = vec![cover[0].clone()];
            parts.extend(cover[1..].iter().map(|c| Formula::not(b(negate(c)))));
            Formula::conj(parts)
        }
        _ => {
            return Err(ModelError::Unsupported(format!(
                "`{belief}` has no strict form: its normal form `{}` is not a single {speaker}-block",
                normal.to_formula()
            )))
        }
    };
    confirm_equivalent(&belief, &b(out.clone()), opts.oracle_states)?;
    Ok(out)
}

/// Does some `B_a` occur inside the scope of a `B_a` without a modality of
/// another agent in between?
pub fn has_stacked_modalities(f: &Formula) -> bool {
    fn go(f: &Formula, scope: Option<&Agent>) -> bool {
        use Formula::*;
        match f {
            Top | Bot | Atom(_) => false,
            Not(g) => go(g, scope),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => go(l, scope) || go(r, scope),
            Believes(a, g) | Knows(a, g) => scope == Some(a) || go(g, Some(a)),
            CondBelieves(a, c, g) => scope == Some(a) || go(c, Some(a)) || go(g, Some(a)),
            Dyn(_, g) => go(g, scope),
        }
    }
    go(f, None)
}

/// Keep the first formula of each extension on `m`.
pub fn distinct_by_extension<'a>(
    fs: impl IntoIterator<Item = &'a Formula>,
    m: &crate::kripke::KripkeModel,
) -> Result<Vec<&'a Formula>> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for f in fs {
        let e = m.extension(f)?;
        if seen.insert(e, ()).is_none() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Atoms and agents used by a collection of formulas.
pub fn joint_signature<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> (Vec<Agent>, Vec<Atom>) {
    let (mut agents, mut atoms) = (BTreeSet::new(), BTreeSet::new());
    for f in fs {
        let s = f.signature();
        agents.extend(s.agents);
        atoms.extend(s.atoms);
    }
    (agents.into_iter().collect(), atoms.into_iter().collect())
}
