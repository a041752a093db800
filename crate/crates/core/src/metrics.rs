//! Representation-size measures and mapping statistics.
//!
//! A flat dataset with predicates of arity `a_i` holding `m_i` facts costs
//! `sum(1 + a_i * m_i)` symbols: each predicate once, then all arguments.
//! A meta-fact set is measured the same way, plus the cost of every
//! meta-constant reachable from it: `1 + 2m` symbols for a node with `m`
//! runs (leaves) or `m` children (internal nodes), since each entry is a
//! (meta-)constant together with a repetition count.

use std::collections::{BTreeSet, HashMap};

use crate::dict::Predicate;
use crate::meta::{MetaFactSet, MetaId, MuMapping, NodeDef, View};
use crate::model::Fact;

/// Symbol count of a flat fact list.
pub fn repsize_flat<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> u64 {
    let mut per_pred: HashMap<Predicate, (u64, u64)> = HashMap::new();
    for fact in facts {
        let entry = per_pred
            .entry(fact.predicate)
            .or_insert((fact.args.len() as u64, 0));
        entry.1 += 1;
    }
    per_pred
        .values()
        .map(|(arity, count)| 1 + arity * count)
        .sum()
}

/// Meta-constants reachable from the arguments of `set`, including every
/// descendant. Orphans left behind by leaf redefinitions are excluded.
pub fn reachable_nodes(set: &MetaFactSet, mu: &MuMapping) -> BTreeSet<MetaId> {
    let mut reachable = BTreeSet::new();
    let mut stack: Vec<MetaId> = Vec::new();
    for pred in set.predicates() {
        for fact in set.facts(pred, View::All) {
            stack.extend(fact.args.iter().copied());
        }
    }
    while let Some(id) = stack.pop() {
        if !reachable.insert(id) {
            continue;
        }
        if let NodeDef::Internal(children) = mu.def(id) {
            stack.extend(children.iter().copied());
        }
    }
    reachable
}

/// Symbol count of the mapping entries for the given meta-constants.
pub fn repsize_mapping(nodes: &BTreeSet<MetaId>, mu: &MuMapping) -> u64 {
    nodes
        .iter()
        .map(|id| match mu.def(*id) {
            NodeDef::Leaf(runs) => 1 + 2 * runs.len() as u64,
            NodeDef::Internal(children) => 1 + 2 * children.len() as u64,
        })
        .sum()
}

/// Symbol count of the pair (meta-fact set, mapping restricted to what the
/// set reaches).
pub fn repsize_compressed(set: &MetaFactSet, mu: &MuMapping) -> u64 {
    let mut fact_part = 0u64;
    for pred in set.predicates() {
        let mut count = 0u64;
        let mut arity = 0u64;
        for fact in set.facts(pred, View::All) {
            arity = fact.args.len() as u64;
            count += 1;
        }
        if count > 0 {
            fact_part += 1 + arity * count;
        }
    }
    fact_part + repsize_mapping(&reachable_nodes(set, mu), mu)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuStats {
    pub avg_len: f64,
    pub max_len: u64,
    pub max_depth: u32,
}

/// Unfolding-length and depth statistics over the meta-constants reachable
/// from `set`. A leaf has depth one; an internal node is one deeper than its
/// deepest child.
pub fn mu_stats(set: &MetaFactSet, mu: &MuMapping) -> MuStats {
    let nodes = reachable_nodes(set, mu);
    if nodes.is_empty() {
        return MuStats {
            avg_len: 0.0,
            max_len: 0,
            max_depth: 0,
        };
    }
    let mut depth_memo: HashMap<MetaId, u32> = HashMap::new();
    let mut total_len = 0u64;
    let mut max_len = 0u64;
    let mut max_depth = 0u32;
    for id in &nodes {
        let len = mu.len(*id);
        total_len += len;
        max_len = max_len.max(len);
        max_depth = max_depth.max(depth(*id, mu, &mut depth_memo));
    }
    MuStats {
        avg_len: total_len as f64 / nodes.len() as f64,
        max_len,
        max_depth,
    }
}

fn depth(id: MetaId, mu: &MuMapping, memo: &mut HashMap<MetaId, u32>) -> u32 {
    if let Some(d) = memo.get(&id) {
        return *d;
    }
    let d = match mu.def(id) {
        NodeDef::Leaf(_) => 1,
        NodeDef::Internal(children) => {
            1 + children
                .clone()
                .into_iter()
                .map(|c| depth(c, mu, memo))
                .max()
                .expect("internal nodes are nonempty")
        }
    };
    memo.insert(id, d);
    d
}
