//! Duplicate elimination: a merge-anti-join of newly derived meta-facts
//! against the store, per predicate, which also removes duplicates inside
//! the new set itself.

use crate::dict::Variable;
use crate::join::{shuffle, SurvivorSet};
use crate::meta::{evaluate, MetaFact, MetaFactSet, MuMapping, View};
use crate::model::{Atom, Term};
use crate::stream::SubstQueue;

/// Returns meta-facts representing exactly the facts represented by `fresh`
/// but not by `store`, duplicate-free. Both sets stream in sorted order over
/// fresh positional variables; store rows preceding the current fresh row
/// are skipped, equal rows mark it as a duplicate, and equal rows within
/// `fresh` are consumed together so each fact survives at most once.
pub fn elim_dup(fresh: &MetaFactSet, store: &MetaFactSet, mu: &mut MuMapping) -> Vec<MetaFact> {
    let mut delta = Vec::new();
    let predicates: Vec<_> = fresh.predicates().collect();
    for predicate in predicates {
        let arity = match fresh.facts(predicate, View::All).next() {
            Some(fact) => fact.args.len(),
            None => continue,
        };
        let vars: Vec<Variable> = (0..arity).map(Variable::synthetic).collect();
        let atom = Atom::new(predicate, vars.iter().map(|v| Term::Var(*v)).collect());
        let fresh_subs = evaluate(&atom, fresh, View::All, mu);
        let store_subs = evaluate(&atom, store, View::All, mu);
        let mut f = SubstQueue::new(&vars, fresh_subs, mu);
        let mut g = SubstQueue::new(&vars, store_subs, mu);
        let mut survivors = SurvivorSet::new();
        while !f.is_empty() {
            let key = f.peek_key().unwrap().to_vec();
            let (sub_idx, idx) = f.peek().unwrap();
            let mut not_dup = true;
            while !g.is_empty() && g.peek_key().unwrap() < key.as_slice() {
                g.next(mu);
            }
            if !g.is_empty() && g.peek_key().unwrap() == key.as_slice() {
                not_dup = false;
            }
            if not_dup {
                survivors.add(f.sub(sub_idx), idx);
            }
            // consume this row and every equal one within the new set
            while !f.is_empty() && f.peek_key().unwrap() == key.as_slice() {
                f.next(mu);
            }
        }
        for sigma in shuffle(survivors, mu) {
            let args = vars
                .iter()
                .map(|v| sigma.get(*v).expect("column for every position"))
                .collect();
            delta.push(MetaFact::new(predicate, args, mu));
        }
    }
    delta
}
