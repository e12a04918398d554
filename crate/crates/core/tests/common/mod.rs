//! Shared fixtures for the integration tests: names, formula shorthands and
//! the reduction-axiom instances checked against the enumerator.
#![allow(dead_code)]

use mendax::action::{
    agent_action_model, pub_action_model, sk_agent_action_model, sk_pub_action_model, ActionModel,
};
use mendax::syntax::PointedActionModel;
use mendax::{Agent, Announcement, Atom, Formula};

pub fn f(s: &str) -> Formula {
    Formula::parse_unchecked(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn agents(names: &[&str]) -> Vec<Agent> {
    names.iter().map(|a| Agent::new(*a)).collect()
}

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|p| Atom::new(*p)).collect()
}

/// One axiom instance: a name for reports and the biconditional to check.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub formula: Formula,
}

fn inst(name: impl Into<String>, formula: Formula) -> Instance {
    Instance { name: name.into(), formula }
}

fn b(x: &str, g: Formula) -> Formula {
    Formula::believes(x, g)
}

fn after(ann: Announcement, g: &Formula) -> Formula {
    Formula::dynamic(ann, g.clone())
}

/// Believed public announcement `[truth phi] g & [lie phi] g`: the arrow
/// update with no precondition.
pub fn believed(phi: &Formula, g: &Formula) -> Formula {
    Formula::and(after(Announcement::PubTruth(phi.clone()), g), after(Announcement::PubLie(phi.clone()), g))
}

/// Belief axioms for announcements that keep the state space, with `phi`
/// and `psi` arbitrary. Speaker `a`, listener `b`.
pub fn direct_axioms(phi: &Formula, psi: &Formula) -> Vec<Instance> {
    use Announcement::*;
    let a = Agent::new("a");
    let not_phi = Formula::not(phi.clone());
    let yes = b("a", phi.clone());
    let no = b("a", not_phi.clone());
    let neither = Formula::not(Formula::or(yes.clone(), no.clone()));
    let truth_a = || AgTruth(a.clone(), phi.clone());
    let mut out = vec![
        inst(
            "truthful public announcement",
            Formula::iff(
                after(PubTruth(phi.clone()), &b("a", psi.clone())),
                Formula::implies(phi.clone(), b("a", after(PubTruth(phi.clone()), psi))),
            ),
        ),
        inst(
            "lying public announcement",
            Formula::iff(
                after(PubLie(phi.clone()), &b("a", psi.clone())),
                Formula::implies(not_phi.clone(), b("a", after(PubTruth(phi.clone()), psi))),
            ),
        ),
        inst(
            "believed public announcement",
            Formula::iff(believed(phi, &b("a", psi.clone())), b("a", Formula::implies(phi.clone(), believed(phi, psi)))),
        ),
    ];
    let flavors = [
        ("truthful", AgTruth(a.clone(), phi.clone()), yes),
        ("lying", AgLie(a.clone(), phi.clone()), no),
        ("bluffing", AgBluff(a.clone(), phi.clone()), neither),
    ];
    for (word, ann, pre) in flavors {
        out.push(inst(
            format!("{word} agent announcement, listener"),
            Formula::iff(
                after(ann.clone(), &b("b", psi.clone())),
                Formula::implies(pre.clone(), b("b", after(truth_a(), psi))),
            ),
        ));
        out.push(inst(
            format!("{word} agent announcement, speaker"),
            Formula::iff(
                after(ann.clone(), &b("a", psi.clone())),
                Formula::implies(pre, b("a", after(ann, psi))),
            ),
        ));
    }
    out
}

/// The three belief axioms for public announcements to one skeptical agent `a`.
pub fn skeptical_public_axioms(phi: &Formula, psi: &Formula) -> Vec<Instance> {
    use Announcement::*;
    let not_phi = Formula::not(phi.clone());
    let rejects = b("a", not_phi.clone());
    let open = Formula::not(rejects.clone());
    vec![
        inst(
            "skeptical truthful public announcement",
            Formula::iff(
                after(SkPubTruth(phi.clone()), &b("a", psi.clone())),
                Formula::implies(Formula::and(phi.clone(), open.clone()), b("a", after(SkPubTruth(phi.clone()), psi))),
            ),
        ),
        inst(
            "skeptical lying public announcement",
            Formula::iff(
                after(SkPubLie(phi.clone()), &b("a", psi.clone())),
                Formula::implies(Formula::and(not_phi, open), b("a", after(SkPubTruth(phi.clone()), psi))),
            ),
        ),
        inst(
            "rejected public announcement",
            Formula::iff(after(SkPubRejected(phi.clone()), &b("a", psi.clone())), Formula::implies(rejects, b("a", psi.clone()))),
        ),
    ]
}

/// The two axioms for `a` lying to a skeptical `b` who accepts the lie.
pub fn skeptical_lying_axioms(phi: &Formula, psi: &Formula) -> Vec<Instance> {
    use Announcement::*;
    let a = Agent::new("a");
    let pre = Formula::and(b("a", Formula::not(phi.clone())), Formula::not(b("b", Formula::not(phi.clone()))));
    vec![
        inst(
            "skeptical lie, addressee",
            Formula::iff(
                after(SkAgLie(a.clone(), phi.clone()), &b("b", psi.clone())),
                Formula::implies(pre.clone(), b("b", after(SkAgTruth(a.clone(), phi.clone()), psi))),
            ),
        ),
        inst(
            "skeptical lie, speaker",
            Formula::iff(
                after(SkAgLie(a.clone(), phi.clone()), &b("a", psi.clone())),
                Formula::implies(
                    pre,
                    Formula::and(
                        b("a", after(SkAgLie(a.clone(), phi.clone()), psi)),
                        b("a", after(SkAgLieRejected(a.clone(), phi.clone()), psi)),
                    ),
                ),
            ),
        ),
    ]
}

/// The general belief axiom `[M,x] B_c psi <-> (pre(x) -> /\ {B_c [M,y] psi | x R_c y})`
/// for every action `x` of `model` and every agent `c`.
pub fn action_axioms(label: &str, model: &ActionModel, agents: &[Agent], psi: &Formula) -> Vec<Instance> {
    let at = |x: usize| Announcement::GenericAction(PointedActionModel { model: model.clone(), point: x });
    let mut out = Vec::new();
    for c in agents {
        let rel = model.relation_for(c).expect("built-in models cover every agent");
        for x in 0..model.actions.len() {
            let targets = rel.iter().filter(|&&(from, _)| from == x).map(|&(_, y)| b(c.as_str(), after(at(y), psi)));
            out.push(inst(
                format!("action belief, {label} at {}, agent {c}", model.actions[x]),
                Formula::iff(
                    after(at(x), &b(c.as_str(), psi.clone())),
                    Formula::implies(model.pre[x].clone(), Formula::conj(targets)),
                ),
            ));
        }
    }
    out
}

/// The built-in action models over `phi`, for two agents `a` and `b`
/// (speaker `a`, addressee `b`).
pub fn two_agent_builtins(phi: &Formula) -> Vec<(&'static str, ActionModel)> {
    let a = Agent::new("a");
    vec![
        ("public", pub_action_model(phi)),
        ("agent", agent_action_model(&a, phi)),
        ("skeptical agent", sk_agent_action_model(&a, &Agent::new("b"), phi).expect("two agents")),
    ]
}

/// The skeptical public model for the single observer `a`.
pub fn one_agent_builtin(phi: &Formula) -> ActionModel {
    sk_pub_action_model(phi, &[Agent::new("a")]).expect("one observer")
}
