//! Shared test support: independent expansion oracles, brute-force join
//! semantics, and seeded random generators for structures and whole
//! program/dataset instances.
//!
//! The expanders here walk node definitions directly and sort, deliberately
//! bypassing the merge cursors of the library, so agreement between the two
//! routes is evidence rather than tautology.

#![allow(dead_code)]

use std::collections::HashMap;

use metalog_core::dict::{Constant, Predicate, Variable};
use metalog_core::meta::{MetaFact, MetaFactSet, MetaId, MuMapping, NodeDef, View};
use metalog_core::model::{Atom, Dataset, Fact, Program, Rule, Term};
use metalog_core::stream::MetaSub;

use rand::rngs::StdRng;
use rand::Rng;

/// Sorted multiset a node denotes, computed by recursive definition walking
/// plus a final sort.
pub fn node_multiset(mu: &MuMapping, id: MetaId) -> Vec<Constant> {
    fn collect(mu: &MuMapping, id: MetaId, out: &mut Vec<Constant>) {
        match mu.def(id) {
            NodeDef::Leaf(runs) => {
                for run in runs {
                    for _ in 0..run.count {
                        out.push(run.constant);
                    }
                }
            }
            NodeDef::Internal(children) => {
                for c in children.clone() {
                    collect(mu, c, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    collect(mu, id, &mut out);
    out.sort();
    out
}

/// Plain rows a meta-substitution represents, over the given variable order.
pub fn sub_rows(mu: &MuMapping, sub: &MetaSub, vars: &[Variable]) -> Vec<Vec<Constant>> {
    let columns: Vec<Vec<Constant>> = vars
        .iter()
        .map(|v| node_multiset(mu, sub.get(*v).expect("variable bound")))
        .collect();
    let len = columns.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect()
}

/// Rows of a whole meta-substitution set, concatenated.
pub fn subs_rows(mu: &MuMapping, subs: &[MetaSub], vars: &[Variable]) -> Vec<Vec<Constant>> {
    subs.iter().flat_map(|s| sub_rows(mu, s, vars)).collect()
}

/// Plain facts a meta-fact set represents, computed through the test-side
/// expander.
pub fn set_rows(mu: &MuMapping, set: &MetaFactSet) -> Vec<Fact> {
    let mut out = Vec::new();
    for pred in set.predicates() {
        for fact in set.facts(pred, View::All) {
            let columns: Vec<Vec<Constant>> =
                fact.args.iter().map(|a| node_multiset(mu, *a)).collect();
            for i in 0..fact.len as usize {
                out.push(Fact::new(pred, columns.iter().map(|c| c[i]).collect()));
            }
        }
    }
    out
}

pub fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

/// Brute-force semi-join: rows of `filtered` having some `filter` row equal
/// on the key columns. `key_positions` index into the filtered row;
/// `filter_rows` are already projected onto the key.
pub fn semi_join_bf(
    filter_rows: &[Vec<Constant>],
    filtered_rows: &[Vec<Constant>],
    key_positions: &[usize],
) -> Vec<Vec<Constant>> {
    filtered_rows
        .iter()
        .filter(|row| {
            let key: Vec<Constant> = key_positions.iter().map(|p| row[*p]).collect();
            filter_rows.contains(&key)
        })
        .cloned()
        .collect()
}

/// Brute-force natural join of rows over explicit variable orders.
pub fn natural_join_bf(
    left_vars: &[Variable],
    left_rows: &[Vec<Constant>],
    right_vars: &[Variable],
    right_rows: &[Vec<Constant>],
) -> Vec<Vec<Constant>> {
    let shared: Vec<(usize, usize)> = left_vars
        .iter()
        .enumerate()
        .filter_map(|(li, lv)| right_vars.iter().position(|rv| rv == lv).map(|ri| (li, ri)))
        .collect();
    let out_vars: Vec<Variable> = {
        let mut vs = left_vars.to_vec();
        for rv in right_vars {
            if !vs.contains(rv) {
                vs.push(*rv);
            }
        }
        vs
    };
    let mut out = Vec::new();
    for l in left_rows {
        for r in right_rows {
            if shared.iter().all(|(li, ri)| l[*li] == r[*ri]) {
                let row: Vec<Constant> = out_vars
                    .iter()
                    .map(|v| {
                        if let Some(li) = left_vars.iter().position(|lv| lv == v) {
                            l[li]
                        } else {
                            let ri = right_vars.iter().position(|rv| rv == v).unwrap();
                            r[ri]
                        }
                    })
                    .collect();
                out.push(row);
            }
        }
    }
    out
}

/// Output variable order of a natural join: left variables then new right
/// variables.
pub fn join_output_vars(left_vars: &[Variable], right_vars: &[Variable]) -> Vec<Variable> {
    let mut vs = left_vars.to_vec();
    for rv in right_vars {
        if !vs.contains(rv) {
            vs.push(*rv);
        }
    }
    vs
}

/// Builds random meta-constants of prescribed unfolding lengths, mixing
/// leaves, internal nodes, and shared references to earlier nodes.
pub struct NodeGen {
    pub pool: u32,
    by_len: HashMap<u64, Vec<MetaId>>,
}

impl NodeGen {
    pub fn new(pool: u32) -> NodeGen {
        NodeGen {
            pool,
            by_len: HashMap::new(),
        }
    }

    pub fn column(&mut self, mu: &mut MuMapping, rng: &mut StdRng, len: u64, depth: u32) -> MetaId {
        // occasionally share an existing node of the right length
        if rng.gen_bool(0.25) {
            if let Some(candidates) = self.by_len.get(&len) {
                if !candidates.is_empty() {
                    return candidates[rng.gen_range(0..candidates.len())];
                }
            }
        }
        let id = if depth == 0 || len < 2 || rng.gen_bool(0.5) {
            let mut cs: Vec<Constant> = (0..len)
                .map(|_| Constant(rng.gen_range(0..self.pool)))
                .collect();
            cs.sort();
            mu.leaf_from_sorted(cs)
        } else {
            let parts = rng.gen_range(2..=3.min(len));
            let mut lens = vec![1u64; parts as usize];
            for _ in 0..(len - parts) {
                let slot = rng.gen_range(0..lens.len());
                lens[slot] += 1;
            }
            let children: Vec<MetaId> = lens
                .into_iter()
                .map(|l| self.column(mu, rng, l, depth - 1))
                .collect();
            mu.internal(children)
        };
        self.by_len.entry(len).or_default().push(id);
        id
    }

    pub fn meta_sub(
        &mut self,
        mu: &mut MuMapping,
        rng: &mut StdRng,
        vars: &[Variable],
        len: u64,
        depth: u32,
    ) -> MetaSub {
        let bindings: Vec<(Variable, MetaId)> = vars
            .iter()
            .map(|v| (*v, self.column(mu, rng, len, depth)))
            .collect();
        MetaSub::new(bindings, mu)
    }
}

/// Snapshot of every allocated node's denotation, for checking that an
/// operation preserved all pre-existing unfoldings.
pub fn snapshot_all(mu: &MuMapping) -> Vec<Vec<Constant>> {
    (0..mu.node_count() as u32)
        .map(|i| node_multiset(mu, MetaId(i)))
        .collect()
}

pub fn assert_snapshot_preserved(mu: &MuMapping, snapshot: &[Vec<Constant>]) {
    for (i, before) in snapshot.iter().enumerate() {
        let after = node_multiset(mu, MetaId(i as u32));
        assert_eq!(
            *before, after,
            "pre-existing node {i} changed its unfolding"
        );
    }
}

/// A random datalog instance within the fuzzing envelope: a few unary and
/// binary predicates, rules with up to three body atoms mixing variables,
/// repeated variables, and constants, and a small constant pool.
pub struct FuzzInstance {
    pub program: Program,
    pub data: Dataset,
}

pub fn random_instance(rng: &mut StdRng) -> FuzzInstance {
    let pool = rng.gen_range(2..=30u32);
    let pred_count = rng.gen_range(1..=4usize);
    let arities: Vec<usize> = (0..pred_count).map(|_| rng.gen_range(1..=2)).collect();
    let var_pool: Vec<Variable> = (0..4).map(Variable).collect();

    let fact_count = rng.gen_range(0..=200usize);
    let mut data = Dataset::new();
    for _ in 0..fact_count {
        let p = rng.gen_range(0..pred_count);
        let args: Vec<Constant> = (0..arities[p])
            .map(|_| Constant(rng.gen_range(0..pool)))
            .collect();
        data.insert(Fact::new(Predicate(p as u32), args));
    }

    let rule_count = rng.gen_range(0..=6usize);
    let mut rules = Vec::new();
    for _ in 0..rule_count {
        let body_len = rng.gen_range(0..=3usize);
        let mut body = Vec::new();
        let mut body_vars: Vec<Variable> = Vec::new();
        for _ in 0..body_len {
            let p = rng.gen_range(0..pred_count);
            let terms: Vec<Term> = (0..arities[p])
                .map(|_| {
                    if rng.gen_bool(0.8) {
                        let v = var_pool[rng.gen_range(0..var_pool.len())];
                        if !body_vars.contains(&v) {
                            body_vars.push(v);
                        }
                        Term::Var(v)
                    } else {
                        Term::Const(Constant(rng.gen_range(0..pool)))
                    }
                })
                .collect();
            body.push(Atom::new(Predicate(p as u32), terms));
        }
        let hp = rng.gen_range(0..pred_count);
        let head_terms: Vec<Term> = (0..arities[hp])
            .map(|_| {
                if !body_vars.is_empty() && rng.gen_bool(0.8) {
                    Term::Var(body_vars[rng.gen_range(0..body_vars.len())])
                } else {
                    Term::Const(Constant(rng.gen_range(0..pool)))
                }
            })
            .collect();
        let rule = Rule {
            head: Atom::new(Predicate(hp as u32), head_terms),
            body,
        };
        debug_assert!(rule.check_safety().is_ok());
        rules.push(rule);
    }
    FuzzInstance {
        program: Program::new(rules),
        data,
    }
}

/// Builds a random meta-fact set over one predicate, for dedup fuzzing.
pub fn random_meta_fact_set(
    mu: &mut MuMapping,
    rng: &mut StdRng,
    gen: &mut NodeGen,
    predicate: Predicate,
    arity: usize,
    max_facts: usize,
) -> MetaFactSet {
    let mut set = MetaFactSet::new();
    for _ in 0..rng.gen_range(0..=max_facts) {
        let len = rng.gen_range(1..=6u64);
        let args: Vec<MetaId> = (0..arity).map(|_| gen.column(mu, rng, len, 2)).collect();
        set.insert(MetaFact::new(predicate, args, mu), 0);
    }
    set
}
