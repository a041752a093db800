//! Plain-fact reference engine and cross-engine verification.
//!
//! This is the correctness oracle: a straightforward least-fixpoint
//! computation over plain facts, sharing only the ingestion types with the
//! compressed engine. Rule bodies are evaluated left to right with a hash
//! index built per atom on the positions that are bound at that point.

use std::collections::{HashMap, HashSet};

use crate::dict::{Constant, Predicate, Variable};
use crate::engine::{materialise, EngineError};
use crate::model::{Dataset, Fact, Program, Rule, Term};

/// Computes the materialisation of `program` over `data` by naive fixpoint
/// iteration: apply every rule to the whole set until nothing new appears.
pub fn mat_reference(program: &Program, data: &Dataset) -> Result<Dataset, EngineError> {
    program.check_safety().map_err(EngineError::UnsafeProgram)?;
    let mut facts: Dataset = data.iter().cloned().collect();
    let mut by_pred: HashMap<Predicate, Vec<Fact>> = HashMap::new();
    for fact in &facts {
        by_pred
            .entry(fact.predicate)
            .or_default()
            .push(fact.clone());
    }
    loop {
        let mut derived: Vec<Fact> = Vec::new();
        for rule in &program.rules {
            apply_rule(rule, &by_pred, &mut derived);
        }
        let mut grew = false;
        for fact in derived {
            if facts.insert(fact.clone()) {
                by_pred.entry(fact.predicate).or_default().push(fact);
                grew = true;
            }
        }
        if !grew {
            return Ok(facts);
        }
    }
}

/// All rule consequences over the current fact set, duplicates included.
fn apply_rule(rule: &Rule, by_pred: &HashMap<Predicate, Vec<Fact>>, out: &mut Vec<Fact>) {
    let mut subs: Vec<HashMap<Variable, Constant>> = vec![HashMap::new()];
    let mut bound: HashSet<Variable> = HashSet::new();
    for atom in &rule.body {
        if subs.is_empty() {
            return;
        }
        // positions whose value is fixed by constants or already-bound vars
        let key_positions: Vec<usize> = atom
            .terms
            .iter()
            .enumerate()
            .filter(|(_, t)| match t {
                Term::Const(_) => true,
                Term::Var(v) => bound.contains(v),
            })
            .map(|(i, _)| i)
            .collect();
        let mut index: HashMap<Vec<Constant>, Vec<&Fact>> = HashMap::new();
        if let Some(facts) = by_pred.get(&atom.predicate) {
            for fact in facts {
                let key: Vec<Constant> = key_positions.iter().map(|p| fact.args[*p]).collect();
                index.entry(key).or_default().push(fact);
            }
        }
        let mut next_subs = Vec::new();
        for sub in &subs {
            let key: Vec<Constant> = key_positions
                .iter()
                .map(|p| match &atom.terms[*p] {
                    Term::Const(c) => *c,
                    Term::Var(v) => sub[v],
                })
                .collect();
            let Some(candidates) = index.get(&key) else {
                continue;
            };
            'facts: for fact in candidates {
                let mut extended = sub.clone();
                for (pos, term) in atom.terms.iter().enumerate() {
                    match term {
                        Term::Const(c) => {
                            if fact.args[pos] != *c {
                                continue 'facts;
                            }
                        }
                        Term::Var(v) => match extended.get(v) {
                            Some(c) if *c != fact.args[pos] => continue 'facts,
                            Some(_) => {}
                            None => {
                                extended.insert(*v, fact.args[pos]);
                            }
                        },
                    }
                }
                next_subs.push(extended);
            }
        }
        for t in &atom.terms {
            if let Term::Var(v) = t {
                bound.insert(*v);
            }
        }
        subs = next_subs;
    }
    for sub in &subs {
        let args: Vec<Constant> = rule
            .head
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => *c,
                Term::Var(v) => sub[v],
            })
            .collect();
        out.push(Fact::new(rule.head.predicate, args));
    }
}

/// Outcome of running both engines on the same input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub equal: bool,
    pub reference_count: usize,
    pub compressed_count: usize,
    /// Facts the oracle derived but the compressed engine did not (sample).
    pub missing: Vec<Fact>,
    /// Facts the compressed engine derived but the oracle did not (sample).
    pub extra: Vec<Fact>,
}

/// Diffs two fact sets, sampling up to `sample` facts per direction in
/// sorted order.
pub fn diff_report(
    reference: &HashSet<Fact>,
    compressed: &HashSet<Fact>,
    sample: usize,
) -> VerifyReport {
    let mut missing: Vec<Fact> = reference.difference(compressed).cloned().collect();
    let mut extra: Vec<Fact> = compressed.difference(reference).cloned().collect();
    missing.sort();
    extra.sort();
    missing.truncate(sample);
    extra.truncate(sample);
    VerifyReport {
        equal: missing.is_empty() && extra.is_empty() && reference.len() == compressed.len(),
        reference_count: reference.len(),
        compressed_count: compressed.len(),
        missing,
        extra,
    }
}

/// Runs both engines and compares their expansions.
pub fn verify(
    program: &Program,
    data: &Dataset,
    sample: usize,
) -> Result<VerifyReport, EngineError> {
    let reference: HashSet<Fact> = mat_reference(program, data)?.iter().cloned().collect();
    let mat = materialise(program, data)?;
    let compressed: HashSet<Fact> = mat.expand().into_iter().collect();
    Ok(diff_report(&reference, &compressed, sample))
}
