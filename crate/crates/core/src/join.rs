//! Join kernels over meta-substitutions: structure-sharing shuffle,
//! merge-based semi-join, key-grouped cross-join, and atom matching with
//! repeated variables and constants.

use std::collections::HashMap;

use crate::compress::compress;
use crate::dict::{Constant, Variable};
use crate::meta::{evaluate, MetaFactSet, MetaId, MuMapping, Run, View};
use crate::model::{Atom, Term};
use crate::stream::{MetaSub, SubstQueue};

/// Pairs `(rho, j)` of a meta-substitution and a surviving row index,
/// grouped per substitution. Indexes arrive in increasing order because
/// queues enumerate each substitution's rows in order.
#[derive(Debug, Default)]
pub struct SurvivorSet {
    order: Vec<u64>,
    entries: HashMap<u64, (MetaSub, Vec<u64>)>,
}

impl SurvivorSet {
    pub fn new() -> SurvivorSet {
        SurvivorSet::default()
    }

    pub fn add(&mut self, sub: &MetaSub, index: u64) {
        let entry = self.entries.entry(sub.seq()).or_insert_with(|| {
            self.order.push(sub.seq());
            (sub.clone(), Vec::new())
        });
        debug_assert!(entry.1.last().is_none_or(|last| *last < index));
        entry.1.push(index);
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn into_groups(mut self) -> Vec<(MetaSub, Vec<u64>)> {
        self.order
            .iter()
            .map(|seq| self.entries.remove(seq).expect("entry for every seq"))
            .collect()
    }
}

/// Reorganises survivors into meta-substitutions with structure sharing.
///
/// A substitution whose every index survived is returned unchanged. For the
/// rest, every leaf under each bound meta-constant is split into a fresh
/// surviving part and a fresh non-surviving part; the old leaf is redefined
/// as the pair, which leaves all existing unfoldings intact because
/// unfoldings are sorted merges. The output binds each variable to the
/// concatenation of the surviving parts, or to a single part directly when
/// there is only one. Row `k` of an output equals row `X[k]` of its source.
pub fn shuffle(survivors: SurvivorSet, mu: &mut MuMapping) -> Vec<MetaSub> {
    let mut out = Vec::new();
    for (rho, indexes) in survivors.into_groups() {
        debug_assert!(!indexes.is_empty());
        if indexes.len() as u64 == rho.len() {
            out.push(rho);
            continue;
        }
        let mut bindings: Vec<(Variable, MetaId)> = Vec::with_capacity(rho.bindings().len());
        for (var, root) in rho.bindings().iter().copied() {
            bindings.push((var, select_indexes(root, &indexes, mu)));
        }
        out.push(MetaSub::new(bindings, mu));
    }
    out
}

/// Restricts `root` to the rows of `indexes` (1-based, sorted) by splitting
/// its leaves in place and returns a meta-constant denoting exactly those
/// rows.
fn select_indexes(root: MetaId, indexes: &[u64], mu: &mut MuMapping) -> MetaId {
    mu.uniquify_occurrences(root);
    let occurrences = mu.leaf_occurrences(root);
    let mut ins: Vec<Vec<Run>> = vec![Vec::new(); occurrences.len()];
    let mut outs: Vec<Vec<Run>> = vec![Vec::new(); occurrences.len()];
    let mut cursor = mu.cursor(root).expect("root in store");
    let mut next_survivor = 0usize;
    let mut position = 0u64;
    while let Some((c, slot)) = cursor.next(mu) {
        position += 1;
        let surviving = next_survivor < indexes.len() && indexes[next_survivor] == position;
        if surviving {
            next_survivor += 1;
        }
        let side = if surviving {
            &mut ins[slot]
        } else {
            &mut outs[slot]
        };
        match side.last_mut() {
            Some(run) if run.constant == c => run.count += 1,
            _ => side.push(Run {
                constant: c,
                count: 1,
            }),
        }
    }
    debug_assert_eq!(next_survivor, indexes.len(), "survivor index out of range");

    let mut parts = Vec::new();
    for (slot, leaf) in occurrences.iter().enumerate() {
        let in_runs = std::mem::take(&mut ins[slot]);
        let out_runs = std::mem::take(&mut outs[slot]);
        if in_runs.is_empty() {
            continue;
        }
        if out_runs.is_empty() {
            // the whole leaf survived; reference it directly
            parts.push(*leaf);
        } else {
            let (part_in, _) = mu.split_leaf(*leaf, in_runs, out_runs);
            parts.push(part_in);
        }
    }
    debug_assert!(!parts.is_empty());
    if parts.len() == 1 {
        parts[0]
    } else {
        mu.internal(parts)
    }
}

/// Semi-join: returns the rows of `filtered` that agree with some row of
/// `filter` on `key`, reorganised by [`shuffle`]. The filter side's domains
/// must be contained in the filtered side's. An empty key means the filter
/// side is ground: it either passes everything through or nothing.
pub fn sjoin(
    filter: &[MetaSub],
    filtered: &[MetaSub],
    key: &[Variable],
    mu: &mut MuMapping,
) -> Vec<MetaSub> {
    if key.is_empty() {
        return if filter.is_empty() {
            Vec::new()
        } else {
            filtered.to_vec()
        };
    }
    if filter.is_empty() || filtered.is_empty() {
        return Vec::new();
    }
    let mut f = SubstQueue::new(key, filter.to_vec(), mu);
    let mut g = SubstQueue::new(key, filtered.to_vec(), mu);
    let mut survivors = SurvivorSet::new();
    while !f.is_empty() && !g.is_empty() {
        let ord = f.peek_key().unwrap().cmp(g.peek_key().unwrap());
        if ord == std::cmp::Ordering::Less {
            f.next(mu);
        } else {
            let drained = g.next(mu).unwrap();
            if ord == std::cmp::Ordering::Equal {
                survivors.add(g.sub(drained.sub_idx), drained.idx);
            }
        }
    }
    shuffle(survivors, mu)
}

/// Cross-join of `left` and `right` on the shared variables `key`, which
/// must be a proper subset of both domains (or empty, giving a product).
/// Right-side rows are grouped by key, each group compressed once, and every
/// left row of the group is extended with fresh repeated-constant leaves for
/// its own variables. Equal (constant, length) leaves are reused within one
/// call.
pub fn xjoin(
    left: &[MetaSub],
    right: &[MetaSub],
    key: &[Variable],
    mu: &mut MuMapping,
) -> Vec<MetaSub> {
    if left.is_empty() || right.is_empty() {
        return Vec::new();
    }
    let mut f = SubstQueue::new(key, left.to_vec(), mu);
    let mut g = SubstQueue::new(key, right.to_vec(), mu);
    let f_domain: Vec<Variable> = f.domain().to_vec();
    let g_domain: Vec<Variable> = g.domain().to_vec();
    let rest: Vec<(usize, Variable)> = g_domain
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, v)| !key.contains(v))
        .collect();
    debug_assert!(
        !rest.is_empty(),
        "cross-join right side has no private variables"
    );
    let rest_domain: Vec<Variable> = rest.iter().map(|(_, v)| *v).collect();
    let rest_positions: Vec<usize> = rest.iter().map(|(p, _)| *p).collect();

    let mut leaf_cache: HashMap<(Constant, u64), MetaId> = HashMap::new();
    let mut out = Vec::new();
    while !f.is_empty() && !g.is_empty() {
        let ord = f.peek_key().unwrap().cmp(g.peek_key().unwrap());
        match ord {
            std::cmp::Ordering::Less => {
                f.next(mu);
            }
            std::cmp::Ordering::Greater => {
                g.next(mu);
            }
            std::cmp::Ordering::Equal => {
                let group_key = f.peek_key().unwrap().to_vec();
                // collect and compress the right-side group, join variables removed
                let mut rows = Vec::new();
                while !g.is_empty() && g.peek_key().unwrap() == group_key.as_slice() {
                    let drained = g.next(mu).unwrap();
                    rows.push(rest_positions.iter().map(|p| drained.row[*p]).collect());
                }
                let compressed =
                    compress(&rest_domain, &rows, mu).expect("group rows share the right domain");
                // emit one extension per left row and compressed group member
                while !f.is_empty() && f.peek_key().unwrap() == group_key.as_slice() {
                    let drained = f.next(mu).unwrap();
                    for beta in &compressed {
                        let beta_len = beta.len();
                        let mut bindings: Vec<(Variable, MetaId)> = beta.bindings().to_vec();
                        for (pos, var) in f_domain.iter().enumerate() {
                            let c = drained.row[pos];
                            let node = *leaf_cache
                                .entry((c, beta_len))
                                .or_insert_with(|| mu.repeated_leaf(c, beta_len));
                            bindings.push((*var, node));
                        }
                        out.push(MetaSub::new(bindings, mu));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum PositionCheck {
    /// First occurrence of a variable; nothing to verify.
    Free,
    /// Repeated variable: must equal the value at the given earlier position.
    EqualsPosition(usize),
    /// Constant position: must equal the constant.
    EqualsConstant(Constant),
}

/// Matches a body atom against a view of the fact set. Atoms with pairwise
/// distinct variables and no constants are evaluated directly; otherwise the
/// atom is renamed apart, rows violating the repetition or constant
/// requirements are filtered out index by index, and the survivors are
/// shuffled and restricted to the atom's original variables. A ground atom
/// yields the empty meta-substitution exactly when some row matches.
pub fn match_atom(atom: &Atom, set: &MetaFactSet, view: View, mu: &mut MuMapping) -> Vec<MetaSub> {
    if atom.has_distinct_variables() {
        return evaluate(atom, set, view, mu);
    }

    let arity = atom.terms.len();
    let renamed_vars: Vec<Variable> = (0..arity).map(Variable::synthetic).collect();
    let mut checks: Vec<PositionCheck> = Vec::with_capacity(arity);
    // original variable -> position of its first occurrence
    let mut first_position: Vec<(Variable, usize)> = Vec::new();
    for (pos, term) in atom.terms.iter().enumerate() {
        match term {
            Term::Const(c) => checks.push(PositionCheck::EqualsConstant(*c)),
            Term::Var(v) => match first_position.iter().find(|(fv, _)| fv == v) {
                Some((_, first)) => checks.push(PositionCheck::EqualsPosition(*first)),
                None => {
                    first_position.push((*v, pos));
                    checks.push(PositionCheck::Free);
                }
            },
        }
    }
    let renamed_atom = Atom::new(
        atom.predicate,
        renamed_vars.iter().map(|v| Term::Var(*v)).collect(),
    );
    let candidates = evaluate(&renamed_atom, set, view, mu);

    // variables whose columns the output keeps, in renamed space
    let kept_renamed: Vec<Variable> = first_position
        .iter()
        .map(|(_, pos)| renamed_vars[*pos])
        .collect();

    let mut survivors = SurvivorSet::new();
    let mut restricted_cache: HashMap<u64, MetaSub> = HashMap::new();
    let mut any_row_matched = false;
    for rho in &candidates {
        let mut cursors: Vec<_> = (0..arity)
            .map(|pos| {
                mu.cursor(rho.get(renamed_vars[pos]).expect("positional binding"))
                    .expect("binding in store")
            })
            .collect();
        let mut values = vec![Constant(0); arity];
        for i in 1..=rho.len() {
            for (pos, cursor) in cursors.iter_mut().enumerate() {
                values[pos] = cursor.next(mu).expect("column shorter than length").0;
            }
            let ok = checks.iter().enumerate().all(|(pos, check)| match check {
                PositionCheck::Free => true,
                PositionCheck::EqualsPosition(first) => values[pos] == values[*first],
                PositionCheck::EqualsConstant(c) => values[pos] == *c,
            });
            if ok {
                any_row_matched = true;
                if !kept_renamed.is_empty() {
                    let restricted = restricted_cache
                        .entry(rho.seq())
                        .or_insert_with(|| rho.restrict(&kept_renamed, mu));
                    survivors.add(restricted, i);
                }
            }
        }
    }

    if first_position.is_empty() {
        // ground atom: an existence filter
        return if any_row_matched {
            vec![MetaSub::empty(mu)]
        } else {
            Vec::new()
        };
    }

    let shuffled = shuffle(survivors, mu);
    // rename the kept positions back to the atom's own variables
    shuffled
        .into_iter()
        .map(|sigma| {
            let bindings: Vec<(Variable, MetaId)> = first_position
                .iter()
                .map(|(v, pos)| {
                    (
                        *v,
                        sigma.get(renamed_vars[*pos]).expect("kept column present"),
                    )
                })
                .collect();
            MetaSub::new(bindings, mu)
        })
        .collect()
}

/// Expands a set of meta-substitutions into plain rows over `vars`.
/// Convenience used by the engine's callers and tests.
pub fn expand_subs(subs: &[MetaSub], vars: &[Variable], mu: &MuMapping) -> Vec<Vec<Constant>> {
    let mut rows = Vec::new();
    for sub in subs {
        let mut cursors: Vec<_> = vars
            .iter()
            .map(|v| {
                mu.cursor(sub.get(*v).expect("variable bound"))
                    .expect("in store")
            })
            .collect();
        for _ in 0..sub.len() {
            rows.push(
                cursors
                    .iter_mut()
                    .map(|c| c.next(mu).expect("column length").0)
                    .collect(),
            );
        }
    }
    rows
}
