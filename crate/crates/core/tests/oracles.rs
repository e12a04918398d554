//! Hand-computed answers on two-state models and the riddle.

mod common;

use std::collections::BTreeSet;

use common::{agents, atoms, f};
use mendax::action::{execute, product_update, pub_action_model};
use mendax::bisim::bisimilar;
use mendax::normalform::{check_validity, strictify, translate, AdfOptions};
use mendax::plausibility::PointedPlausibilityModel;
use mendax::riddle::{run_scenario, Mode, Scenario};
use mendax::update::{announce, classify, detect, restrict_pointed, Detection, Flavor};
use mendax::{Agent, Announcement, ModelClass, PointedModel};

/// `a` knows whether `p`; `b` cannot tell the states apart. `p` is true.
const INFORMED: &str = r#"{
  "agents": ["a", "b"], "atoms": ["p"], "states": ["s0", "s1"],
  "val": {"p": ["s0"]},
  "rel": {"a": [["s0","s0"], ["s1","s1"]],
          "b": [["s0","s0"], ["s0","s1"], ["s1","s0"], ["s1","s1"]]},
  "point": "s0"
}"#;

/// `a` wrongly believes `p`.
const MISTAKEN: &str = r#"{
  "agents": ["a"], "atoms": ["p"], "states": ["np", "p"],
  "val": {"p": ["p"]},
  "rel": {"a": [["np","p"], ["p","p"]]},
  "point": "np"
}"#;

fn model(text: &str) -> PointedModel {
    PointedModel::from_json(text).unwrap()
}

fn holds(pm: &PointedModel, text: &str) -> bool {
    pm.eval(&f(text)).unwrap_or_else(|e| panic!("{text}: {e}"))
}

#[test]
fn agent_announcements_on_the_informed_model() {
    let pm = model(INFORMED);
    assert!(!holds(&pm, "B{b} p"));
    assert!(holds(&pm, "[truth{a} p] (B{b} p & B{a} p)"));
    // a cannot lie about p, so the box is vacuous.
    assert!(holds(&pm, "[lie{a} p] false"));
    assert!(holds(&pm, "[bluff{a} p] false"));
    // Lying that ~p cuts b's arrow to s0 and leaves only the ~p state.
    assert!(holds(&pm, "[lie{a} ~p] (B{b} ~p & B{b} B{a} ~p)"));
    assert!(holds(&pm, "[lie{a} ~p] B{a} p"));
}

#[test]
fn flavor_and_detection() {
    let pm = model(INFORMED);
    let (a, b) = (Agent::new("a"), Agent::new("b"));
    assert_eq!(classify(&pm, &a, &f("p")).unwrap(), Flavor::Truthful);
    assert_eq!(classify(&pm, &a, &f("~p")).unwrap(), Flavor::Lying);
    assert_eq!(classify(&pm, &b, &f("p")).unwrap(), Flavor::Bluffing);
    assert_eq!(detect(&pm, &b, &a, &f("p")).unwrap(), Detection::Neither);

    // After a truthfully says p, b knows a believes p, so a later ~p from a is a lie to b.
    let after = announce(&pm, &Announcement::AgTruth(a.clone(), f("p"))).unwrap().unwrap();
    assert_eq!(detect(&after, &b, &a, &f("~p")).unwrap(), Detection::BelievesLie);
}

#[test]
fn public_lie_and_truth_on_the_mistaken_model() {
    let pm = model(MISTAKEN);
    assert!(holds(&pm, "B{a} p & ~p"));
    assert!(holds(&pm, "[lie p] B{a} p"));
    assert!(holds(&pm, "[truth p] false"));
    // Arrow elimination leaves a believing everything.
    assert!(holds(&pm, "[truth ~p] B{a} false"));

    let cut = restrict_pointed(&pm, &f("~p")).unwrap();
    assert_eq!(cut.model.len(), 1);
    assert!(cut.model.is_in_class(ModelClass::K45));
    assert!(!cut.model.is_in_class(ModelClass::KD45));
}

#[test]
fn product_update_matches_the_direct_update() {
    let pm = model(INFORMED);
    let public = pub_action_model(&f("p")).at("truth").unwrap();
    let via_product = product_update(&pm, &public).unwrap().unwrap();
    let direct = announce(&pm, &Announcement::PubTruth(f("p"))).unwrap().unwrap();
    assert!(bisimilar(&via_product, &direct).unwrap());

    let ann = Announcement::AgLie(Agent::new("a"), f("~p"));
    let executed = execute(&pm, &ann).unwrap().unwrap();
    assert!(bisimilar(&executed, &announce(&pm, &ann).unwrap().unwrap()).unwrap());
    assert!(execute(&pm, &Announcement::AgLie(Agent::new("a"), f("p"))).unwrap().is_none());
}

#[test]
fn plausibility_belief_and_revision() {
    let pm = PointedPlausibilityModel::from_json(
        r#"{
          "agents": ["a"], "atoms": ["p"], "states": ["s0", "s1"],
          "val": {"p": ["s0"]},
          "epi": {"a": [["s0","s0"], ["s0","s1"], ["s1","s0"], ["s1","s1"]]},
          "rank": {"a": {"s0": 0, "s1": 1}},
          "point": "s1"
        }"#,
    )
    .unwrap();
    let holds = |text: &str| pm.eval(&f(text)).unwrap();
    assert!(holds("B{a} p"));
    assert!(!holds("K{a} p"));
    assert!(holds("K{a} (p | ~p)"));
    assert!(holds("[truth_pl ~p] B{a} ~p"));
    assert!(pm.eval(&mendax::Formula::cond_believes("a", f("~p"), f("~p"))).unwrap());
    assert!(pm.eval(&mendax::Formula::cond_believes("a", f("true"), f("p"))).unwrap());
}

#[test]
fn translation_of_a_public_announcement() {
    let (out, trace) = translate(&f("[truth p] B{a} q")).unwrap();
    assert!(!out.has_announcements());
    assert!(!trace.is_empty());
    let claim = mendax::Formula::iff(out, f("p -> B{a} (p -> q)"));
    assert!(check_validity(&claim, ModelClass::K, 3, &agents(&["a"]), &atoms(&["p", "q"])).unwrap().is_none());
}

#[test]
fn moore_sentence_is_refuted_and_strict_forms_are_found() {
    let moore = f("[truth (p & ~B{a} p)] (p & ~B{a} p)");
    let counter = check_validity(&moore, ModelClass::KD45, 2, &agents(&["a"]), &atoms(&["p"])).unwrap();
    let counter = counter.expect("a countermodel exists");
    assert!(!counter.eval(&moore).unwrap());

    let a = Agent::new("a");
    assert_eq!(strictify(&a, &f("p"), &AdfOptions::default()).unwrap(), f("p"));
    assert!(strictify(&a, &f("B{a} p | B{a} q"), &AdfOptions::default()).is_err());
}

#[test]
fn truthful_riddle_dialogue_ends_in_common_certainty() {
    let run = run_scenario(&Scenario::truthful_dialogue(10, (2, 3)), Mode::Public).unwrap();
    assert!(run.completed());
    let last = run.final_state();
    let only: BTreeSet<_> = [(2, 3)].into();
    assert_eq!(last.believed_pairs("a").unwrap(), only);
    assert_eq!(last.believed_pairs("b").unwrap(), only);

    let start = &run.states[0];
    assert_eq!(start.believed_pairs("a").unwrap(), [(2, 1), (2, 3)].into());
    assert_eq!(start.believed_pairs("b").unwrap(), [(2, 3), (4, 3)].into());
}
