//! Bisimilarity by partition refinement.

use std::collections::HashMap;

use crate::bitset::StateSet;
use crate::error::{ModelError, Result};
use crate::kripke::{KripkeModel, PointedModel};

/// Coarsest bisimulation on a single model: block id per state.
pub fn bisimulation_blocks(m: &KripkeModel) -> Vec<usize> {
    let n = m.len();
    let agents = m.agents().len();
    let rel = |a: usize, s: usize| m.successors(a, s);
    let val = |s: usize| (0..m.atoms().len()).map(|p| m.valuation(p).contains(s)).collect::<Vec<_>>();
    refine(n, agents, rel, val)
}

fn refine<'a>(
    n: usize,
    agents: usize,
    rel: impl Fn(usize, usize) -> &'a StateSet,
    val: impl Fn(usize) -> Vec<bool>,
) -> Vec<usize> {
    let mut block = renumber((0..n).map(val).collect());
    loop {
        let signatures: Vec<(usize, Vec<Vec<usize>>)> = (0..n)
            .map(|s| {
                let succ_blocks = (0..agents)
                    .map(|a| {
                        let mut bs: Vec<usize> = rel(a, s).iter().map(|t| block[t]).collect();
                        bs.sort_unstable();
                        bs.dedup();
                        bs
                    })
                    .collect();
                (block[s], succ_blocks)
            })
            .collect();
        let next = renumber(signatures);
        let stable = next.iter().max() == block.iter().max();
        block = next;
        if stable {
            return block;
        }
    }
}

fn renumber<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

/// Are the two pointed models bisimilar? Both must use the same agents and
/// atoms (by name, in any order).
pub fn bisimilar(x: &PointedModel, y: &PointedModel) -> Result<bool> {
    let (bx, by) = joint_blocks(&x.model, &y.model)?;
    Ok(bx[x.point] == by[y.point])
}

/// Coarsest bisimulation on the disjoint union of two models, as block ids
/// for the states of each. States `s` of `m1` and `t` of `m2` are bisimilar
/// iff their ids agree.
pub fn joint_blocks(m1: &KripkeModel, m2: &KripkeModel) -> Result<(Vec<usize>, Vec<usize>)> {
    let sig = |m: &KripkeModel| {
        let mut a: Vec<_> = m.agents().iter().map(|a| a.0.clone()).collect();
        let mut p: Vec<_> = m.atoms().iter().map(|p| p.0.clone()).collect();
        a.sort();
        p.sort();
        (a, p)
    };
    if sig(m1) != sig(m2) {
        return Err(ModelError::SignatureMismatch(
            "bisimilarity needs both models over the same agents and atoms".into(),
        ));
    }
    let n1 = m1.len();
    let n = n1 + m2.len();
    // Successor sets of the disjoint union, agents in the order of the first model.
    let agent_map: Vec<usize> =
        m1.agents().iter().map(|a| m2.agent_index(a)).collect::<Result<_>>()?;
    let atom_map: Vec<usize> = m1.atoms().iter().map(|p| m2.atom_index(p)).collect::<Result<_>>()?;
    let mut succ = Vec::with_capacity(agent_map.len() * n);
    for (a1, &a2) in agent_map.iter().enumerate() {
        for s in 0..n1 {
            succ.push(StateSet::from_indices(n, m1.successors(a1, s).iter()));
        }
        for s in 0..m2.len() {
            succ.push(StateSet::from_indices(n, m2.successors(a2, s).iter().map(|t| t + n1)));
        }
    }
    let val = |s: usize| -> Vec<bool> {
        if s < n1 {
            (0..atom_map.len()).map(|p| m1.valuation(p).contains(s)).collect()
        } else {
            atom_map.iter().map(|&p| m2.valuation(p).contains(s - n1)).collect()
        }
    };
    let mut block = refine(n, agent_map.len(), |a, s| &succ[a * n + s], val);
    let second = block.split_off(n1);
    Ok((block, second))
}
