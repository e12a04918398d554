//! Small formula families for exhaustive checks.

use crate::syntax::{Agent, Atom, Formula};

/// Literals, then beliefs and disbeliefs of lower layers, up to modal depth
/// `depth`. Each layer adds `B{x} g` and `~B{x} g` for every agent `x` and
/// every `g` of the previous layer or `false`.
///
/// With one atom and two agents the sizes are 2, 14 and 62 for depths 0 to 2.
pub fn family(agents: &[Agent], atoms: &[Atom], depth: usize) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for p in atoms {
        let lit = Formula::Atom(p.clone());
        out.push(lit.clone());
        out.push(Formula::not(lit));
    }
    for _ in 0..depth {
        let mut layer = Vec::new();
        for x in agents {
            for g in out.iter().chain([&Formula::Bot]) {
                let b = Formula::Believes(x.clone(), Box::new(g.clone()));
                layer.push(b.clone());
                layer.push(Formula::not(b));
            }
        }
        for f in layer {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

/// Moorean formulas `p & ~B{x} p`, which tend to become false when announced.
pub fn moorean(agents: &[Agent], atoms: &[Atom]) -> Vec<Formula> {
    atoms
        .iter()
        .flat_map(|p| {
            agents.iter().map(move |x| {
                let p = Formula::Atom(p.clone());
                Formula::and(p.clone(), Formula::not(Formula::Believes(x.clone(), Box::new(p))))
            })
        })
        .collect()
}
