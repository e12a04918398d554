//! Exhaustive enumeration of small Kripke models.
//!
//! Models come out in order of increasing size, so the first hit of a search
//! is a smallest one. Relations are encoded as `n*n`-bit codes (bit `s*n+t`
//! means `s -> t`), valuations as `n*atoms`-bit codes.

use std::sync::Arc;

use crate::bitset::StateSet;
use crate::error::{ModelError, Result};
use crate::kripke::{KripkeModel, ModelClass};
use crate::syntax::{Agent, Atom};

/// Largest model size the enumerator accepts.
pub const MAX_ENUM_STATES: usize = 5;

fn successor_sets(n: usize, code: u64) -> Vec<StateSet> {
    (0..n).map(|s| StateSet::from_bits(n, (code >> (s * n)) & ((1 << n) - 1))).collect()
}

/// All relation codes on `n` states that the class admits.
pub fn admissible_relations(n: usize, class: ModelClass) -> Vec<u64> {
    (0..1u64 << (n * n)).filter(|&code| class.admits(n, &successor_sets(n, code))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn permute_relation(n: usize, code: u64, pi: &[usize]) -> u64 {
    let mut out = 0;
    for s in 0..n {
        for t in 0..n {
            if code >> (s * n + t) & 1 == 1 {
                out |= 1 << (pi[s] * n + pi[t]);
            }
        }
    }
    out
}

fn permute_valuation(n: usize, atoms: usize, code: u64, pi: &[usize]) -> u64 {
    let mut out = 0;
    for p in 0..atoms {
        for (s, &to) in pi.iter().enumerate().take(n) {
            if code >> (p * n + s) & 1 == 1 {
                out |= 1 << (p * n + to);
            }
        }
    }
    out
}

/// Enumeration of all models with `1..=max_states` states over fixed agents
/// and atoms whose relations all belong to a class.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub class: ModelClass,
    pub max_states: usize,
    pub agents: Vec<Agent>,
    pub atoms: Vec<Atom>,
    /// Skip all but one model of each isomorphism class.
    pub up_to_isomorphism: bool,
}

impl Enumeration {
    pub fn new(class: ModelClass, max_states: usize, agents: &[Agent], atoms: &[Atom]) -> Enumeration {
        Enumeration {
            class,
            max_states,
            agents: agents.to_vec(),
            atoms: atoms.to_vec(),
            up_to_isomorphism: false,
        }
    }

    pub fn up_to_isomorphism(mut self, yes: bool) -> Enumeration {
        self.up_to_isomorphism = yes;
        self
    }

    pub fn iter(&self) -> Result<ModelIter> {
        if self.max_states > MAX_ENUM_STATES {
            return Err(ModelError::Invalid(format!(
                "enumeration is limited to {MAX_ENUM_STATES} states"
            )));
        }
        if self.max_states * self.atoms.len() > 63 {
            return Err(ModelError::Invalid("too many atoms to enumerate".into()));
        }
        KripkeModel::new(self.agents.clone(), self.atoms.clone(), vec![])?;
        Ok(ModelIter {
            spec: self.clone(),
            agents: self.agents.clone().into(),
            atoms: self.atoms.clone().into(),
            level: None,
            n: 0,
        })
    }
}

/// All models of the class up to `max_states` states, isomorphic copies included.
pub fn enumerate_models(
    max_states: usize,
    agents: &[Agent],
    atoms: &[Atom],
    class: ModelClass,
) -> Result<ModelIter> {
    Enumeration::new(class, max_states, agents, atoms).iter()
}

struct Level {
    names: Arc<[String]>,
    relations: Vec<u64>,
    /// `permuted[r][k]`: relation `relations[r]` under permutation `k`.
    permuted: Vec<Vec<u64>>,
    perms: Vec<Vec<usize>>,
    rel_counter: Vec<usize>,
    val: u64,
    done: bool,
}

/// A model as the enumerator sees it: one relation code per agent and a
/// valuation code (bit `p*n+s` means atom `p` holds at `s`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCode {
    pub n: usize,
    pub relations: Vec<u64>,
    pub valuation: u64,
}

pub struct ModelIter {
    spec: Enumeration,
    agents: Arc<[Agent]>,
    atoms: Arc<[Atom]>,
    level: Option<Level>,
    n: usize,
}

impl ModelIter {
    fn start_level(&mut self) -> bool {
        self.n += 1;
        if self.n > self.spec.max_states {
            return false;
        }
        let n = self.n;
        let relations = admissible_relations(n, self.spec.class);
        let perms = if self.spec.up_to_isomorphism { permutations(n) } else { vec![] };
        let permuted = relations
            .iter()
            .map(|&r| perms.iter().map(|pi| permute_relation(n, r, pi)).collect())
            .collect();
        let done = relations.is_empty() && !self.agents.is_empty();
        self.level = Some(Level {
            names: (0..n).map(|i| format!("s{i}")).collect(),
            relations,
            permuted,
            perms,
            rel_counter: vec![0; self.agents.len()],
            val: 0,
            done,
        });
        true
    }

    fn is_canonical(&self, lv: &Level) -> bool {
        let n = self.n;
        let atoms = self.atoms.len();
        for (k, pi) in lv.perms.iter().enumerate() {
            // Compare (relations..., valuation) lexicographically with the permuted copy.
            let mut ordering = std::cmp::Ordering::Equal;
            for &r in &lv.rel_counter {
                ordering = lv.relations[r].cmp(&lv.permuted[r][k]);
                if ordering.is_ne() {
                    break;
                }
            }
            if ordering.is_eq() {
                ordering = lv.val.cmp(&permute_valuation(n, atoms, lv.val, pi));
            }
            if ordering.is_gt() {
                return false;
            }
        }
        true
    }
}

fn advance(lv: &mut Level, n: usize, atoms: usize) {
    let val_limit = 1u64 << (n * atoms);
    lv.val += 1;
    if lv.val < val_limit {
        return;
    }
    lv.val = 0;
    for c in lv.rel_counter.iter_mut().rev() {
        *c += 1;
        if *c < lv.relations.len() {
            return;
        }
        *c = 0;
    }
    lv.done = true;
}

impl ModelIter {
    /// The next model as codes, without building it.
    pub fn next_code(&mut self) -> Option<ModelCode> {
        loop {
            if self.level.as_ref().is_none_or(|lv| lv.done) && !self.start_level() {
                return None;
            }
            let mut lv = self.level.take().expect("level started");
            let mut found = None;
            while !lv.done {
                if !self.spec.up_to_isomorphism || self.is_canonical(&lv) {
                    found = Some(ModelCode {
                        n: self.n,
                        relations: lv.rel_counter.iter().map(|&r| lv.relations[r]).collect(),
                        valuation: lv.val,
                    });
                }
                advance(&mut lv, self.n, self.atoms.len());
                if found.is_some() {
                    break;
                }
            }
            self.level = Some(lv);
            if found.is_some() {
                return found;
            }
        }
    }

    /// Build the model described by `code` over this enumeration's signature.
    pub fn build(&self, code: &ModelCode) -> KripkeModel {
        let n = code.n;
        let mut succ = Vec::with_capacity(self.agents.len() * n);
        for &r in &code.relations {
            succ.extend(successor_sets(n, r));
        }
        let val = (0..self.atoms.len()).map(|p| StateSet::from_bits(n, code.valuation >> (p * n))).collect();
        let names = match &self.level {
            Some(lv) if lv.names.len() == n => Some(lv.names.clone()),
            _ => Some((0..n).map(|i| format!("s{i}")).collect()),
        };
        KripkeModel::from_parts(self.agents.clone(), self.atoms.clone(), names, n, succ, val)
    }
}

impl Iterator for ModelIter {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        self.next_code().map(|code| self.build(&code))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> (Vec<Agent>, Vec<Atom>) {
        (vec![Agent::new("a")], xs.iter().map(|p| Atom::new(*p)).collect())
    }

    #[test]
    fn one_state_k_models() {
        let (agents, atoms) = names(&["p"]);
        assert_eq!(enumerate_models(1, &agents, &atoms, ModelClass::K).unwrap().count(), 4);
    }

    #[test]
    fn relation_counts_per_class() {
        assert_eq!(admissible_relations(2, ModelClass::K).len(), 16);
        assert_eq!(admissible_relations(2, ModelClass::S5).len(), 2);
        assert_eq!(admissible_relations(3, ModelClass::S5).len(), 5);
        // disjoint clusters that see exactly themselves, every other state sees one cluster
        assert_eq!(admissible_relations(3, ModelClass::KD45).len(), 17);
    }

    #[test]
    fn isomorphism_reduction_keeps_one_per_class() {
        let (agents, atoms) = names(&["p"]);
        let all: Vec<_> = enumerate_models(2, &agents, &atoms, ModelClass::K).unwrap().collect();
        let reduced: Vec<_> = Enumeration::new(ModelClass::K, 2, &agents, &atoms)
            .up_to_isomorphism(true)
            .iter()
            .unwrap()
            .collect();
        assert_eq!(all.len(), 4 + 16 * 4);
        // 2-state orbits: 64 labelled models, swap symmetry fixes 8 of them
        assert_eq!(reduced.len(), 4 + (64 + 8) / 2);
    }

    #[test]
    fn no_agents_still_enumerates_valuations() {
        let models: Vec<_> =
            enumerate_models(2, &[], &[Atom::new("p")], ModelClass::K).unwrap().collect();
        assert_eq!(models.len(), 2 + 4);
    }
}
