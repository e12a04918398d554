//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes and returns strings (JSON where structured). The plain
//! functions below the wasm wrappers hold the logic and are tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use mendax::action;
use mendax::normalform::check_validity;
use mendax::plausibility::{execute_pl, PointedPlausibilityModel};
use mendax::riddle::{run_scenario, Mode, RiddleState, Scenario};
use mendax::syntax::parse_announcement;
use mendax::{parse, Agent, Atom, Formula, KripkeModel, ModelClass, PointedModel};

mod svg;

fn js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

/// Evaluate `formula` at the designated state. Returns `true` or `false`.
#[wasm_bindgen]
pub fn check(model_json: &str, formula: &str) -> Result<bool, JsValue> {
    check_formula(model_json, formula).map_err(js)
}

/// Apply an announcement. Returns `{executed, model, svg}` as JSON.
#[wasm_bindgen]
pub fn update(model_json: &str, announcement: &str) -> Result<String, JsValue> {
    apply_announcement(model_json, announcement).map_err(js)
}

/// Draw a model as SVG.
#[wasm_bindgen]
pub fn draw(model_json: &str) -> Result<String, JsValue> {
    load(model_json).map(|m| svg::model(&m.kripke())).map_err(js)
}

/// Run a riddle scenario. Returns the run report with an SVG per state.
#[wasm_bindgen]
pub fn riddle(scenario_json: &str, mode: &str) -> Result<String, JsValue> {
    riddle_run(scenario_json, mode).map_err(js)
}

/// Bounded validity check. Returns `{valid, countermodel?, svg?}` as JSON.
#[wasm_bindgen]
pub fn validity(formula: &str, class: &str, states: usize) -> Result<String, JsValue> {
    validity_check(formula, class, states).map_err(js)
}

enum Loaded {
    Kripke(PointedModel),
    Plausibility(PointedPlausibilityModel),
}

impl Loaded {
    fn kripke(&self) -> PointedModel {
        match self {
            Loaded::Kripke(pm) => pm.clone(),
            Loaded::Plausibility(pm) => pm.belief_model(),
        }
    }
}

fn load(text: &str) -> Result<Loaded, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("model is not JSON: {e}"))?;
    if value.get("epi").is_some() || value.get("rank").is_some() {
        PointedPlausibilityModel::from_json(text).map(Loaded::Plausibility).map_err(|e| e.to_string())
    } else {
        PointedModel::from_json(text).map(Loaded::Kripke).map_err(|e| e.to_string())
    }
}

pub fn check_formula(model_json: &str, formula: &str) -> Result<bool, String> {
    let m = load(model_json)?;
    let sig = match &m {
        Loaded::Kripke(pm) => pm.model.signature(),
        Loaded::Plausibility(pm) => pm.model.signature(),
    };
    let f = parse(formula, &sig).map_err(|e| e.to_string())?;
    match &m {
        Loaded::Kripke(pm) => pm.eval(&f),
        Loaded::Plausibility(pm) => pm.eval(&f),
    }
    .map_err(|e| e.to_string())
}

pub fn apply_announcement(model_json: &str, announcement: &str) -> Result<String, String> {
    let m = load(model_json)?;
    let (model, picture) = match &m {
        Loaded::Kripke(pm) => {
            let ann = parse_announcement(announcement, &pm.model.signature()).map_err(|e| e.to_string())?;
            match action::execute(pm, &ann).map_err(|e| e.to_string())? {
                Some(next) => (Some(next.to_json()), Some(svg::model(&next))),
                None => (None, None),
            }
        }
        Loaded::Plausibility(pm) => {
            let ann = parse_announcement(announcement, &pm.model.signature()).map_err(|e| e.to_string())?;
            match execute_pl(pm, &ann).map_err(|e| e.to_string())? {
                Some(next) => (Some(next.to_json()), Some(svg::model(&next.belief_model()))),
                None => (None, None),
            }
        }
    };
    Ok(json!({ "executed": model.is_some(), "model": model, "svg": picture }).to_string())
}

pub fn riddle_run(scenario_json: &str, mode: &str) -> Result<String, String> {
    let sc = Scenario::from_json(scenario_json).map_err(|e| e.to_string())?;
    let mode: Mode = mode.parse().map_err(|e: mendax::ModelError| e.to_string())?;
    let run = run_scenario(&sc, mode).map_err(|e| e.to_string())?;
    let pictures: Vec<String> = run.states.iter().map(|s: &RiddleState| svg::riddle(s)).collect();
    let mut out = run.to_json();
    out["svg"] = json!(pictures);
    Ok(out.to_string())
}

pub fn validity_check(formula: &str, class: &str, states: usize) -> Result<String, String> {
    if !(1..=3).contains(&states) {
        return Err("the demo enumerates up to 3 states".into());
    }
    let class: ModelClass = class.parse()?;
    let f = Formula::parse_unchecked(formula).map_err(|e| e.to_string())?;
    let sig = f.signature();
    let mut agents: Vec<Agent> = sig.agents.into_iter().collect();
    let atoms: Vec<Atom> = sig.atoms.into_iter().collect();
    if agents.is_empty() {
        agents.push(Agent::new("a"));
    }
    if agents.len() > 2 || atoms.len() > 2 {
        return Err("the demo allows at most two agents and two atoms".into());
    }
    match check_validity(&f, class, states, &agents, &atoms).map_err(|e| e.to_string())? {
        None => Ok(json!({ "valid": true }).to_string()),
        Some(c) => {
            let model: Value = serde_json::from_str(&c.to_json()).expect("model JSON");
            Ok(json!({ "valid": false, "countermodel": model, "svg": svg::model(&c) }).to_string())
        }
    }
}

/// A starting model for the page: `b` is uncertain about `p`, `a` knows it.
pub fn sample_model() -> String {
    let mut m = KripkeModel::new(
        vec![Agent::new("a"), Agent::new("b")],
        vec![Atom::new("p")],
        vec!["s0".into(), "s1".into()],
    )
    .expect("valid names");
    m.set_true("p", "s0").expect("known atom");
    m.set_universal("b").expect("known agent");
    m.add_edge("a", "s0", "s0").expect("known state");
    m.add_edge("a", "s1", "s1").expect("known state");
    m.to_json(Some(0))
}

#[wasm_bindgen]
pub fn example_model() -> String {
    sample_model()
}
