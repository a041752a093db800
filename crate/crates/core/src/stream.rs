//! Meta-substitutions and ordered enumeration of the plain substitutions
//! they represent.
//!
//! A meta-substitution maps variables to meta-constants of one common
//! unfolding length `n`; it stands for the `n` plain substitutions obtained
//! by reading all columns at the same index. [`SubstQueue`] enumerates
//! `(meta-substitution, index)` pairs in lexicographic order of their plain
//! substitutions over a fixed variable vector, which is what every merge-join
//! in the engine runs on. Because unfoldings are sorted, advancing a pair's
//! index never moves it backwards in that order.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::dict::{Constant, Variable};
use crate::meta::{MetaId, MuMapping, StoreError, UnfoldCursor};

/// A mapping of variables to meta-constants of equal unfolding length.
/// Carries a creation sequence number used as a deterministic queue
/// tie-break and as identity when survivor indexes are grouped.
#[derive(Debug, Clone)]
pub struct MetaSub {
    bindings: Vec<(Variable, MetaId)>,
    len: u64,
    seq: u64,
}

impl MetaSub {
    /// Builds a meta-substitution; all bound meta-constants must unfold to
    /// the same length.
    pub fn new(mut bindings: Vec<(Variable, MetaId)>, mu: &MuMapping) -> MetaSub {
        bindings.sort_by_key(|(v, _)| *v);
        debug_assert!(
            bindings.windows(2).all(|w| w[0].0 != w[1].0),
            "duplicate variable in meta-substitution"
        );
        let len = bindings.first().map_or(0, |(_, a)| mu.len(*a));
        assert!(
            bindings.iter().all(|(_, a)| mu.len(*a) == len),
            "meta-substitution images must share one unfolding length"
        );
        MetaSub {
            bindings,
            len,
            seq: mu.fresh_sub_seq(),
        }
    }

    /// The empty meta-substitution. It has no indices of its own and stands
    /// for the single empty plain substitution.
    pub fn empty(mu: &MuMapping) -> MetaSub {
        MetaSub {
            bindings: Vec::new(),
            len: 0,
            seq: mu.fresh_sub_seq(),
        }
    }

    pub fn get(&self, v: Variable) -> Option<MetaId> {
        self.bindings
            .binary_search_by_key(&v, |(bv, _)| *bv)
            .ok()
            .map(|i| self.bindings[i].1)
    }

    pub fn bindings(&self) -> &[(Variable, MetaId)] {
        &self.bindings
    }

    pub fn domain(&self) -> impl Iterator<Item = Variable> + '_ {
        self.bindings.iter().map(|(v, _)| *v)
    }

    pub fn domain_is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Common unfolding length; 0 iff the domain is empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    /// A copy restricted to the given variables, with a fresh sequence
    /// number. Variables absent from the domain are ignored.
    pub fn restrict(&self, keep: &[Variable], mu: &MuMapping) -> MetaSub {
        let bindings: Vec<(Variable, MetaId)> = self
            .bindings
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .copied()
            .collect();
        if bindings.is_empty() {
            return MetaSub::empty(mu);
        }
        MetaSub::new(bindings, mu)
    }
}

/// The `i`-th plain substitution a meta-substitution represents (1-based),
/// as (variable, constant) pairs in domain order.
pub fn subst(
    sub: &MetaSub,
    i: u64,
    mu: &MuMapping,
) -> Result<Vec<(Variable, Constant)>, StoreError> {
    if i < 1 || i > sub.len {
        return Err(StoreError::IndexOutOfRange {
            index: i,
            len: sub.len,
        });
    }
    sub.bindings
        .iter()
        .map(|(v, a)| mu.index_at(*a, i).map(|c| (*v, c)))
        .collect()
}

/// Lexicographic comparison of `subst(sigma, i)` and `subst(tau, j)` over the
/// variable vector `vars`. The empty vector compares equal, which makes
/// fully ground atoms act as existence filters in joins.
pub fn compare_pairs(
    sigma: &MetaSub,
    i: u64,
    tau: &MetaSub,
    j: u64,
    vars: &[Variable],
    mu: &MuMapping,
) -> Ordering {
    for v in vars {
        let a = mu
            .index_at(sigma.get(*v).expect("variable outside domain"), i)
            .expect("index within bounds");
        let b = mu
            .index_at(tau.get(*v).expect("variable outside domain"), j)
            .expect("index within bounds");
        match a.cmp(&b) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// A pair drained from a queue: which substitution it came from, its index,
/// its key-variable values, and its full row over the queue domain.
#[derive(Debug, Clone)]
pub struct DrainedPair {
    pub sub_idx: usize,
    pub idx: u64,
    pub key: Vec<Constant>,
    pub row: Vec<Constant>,
}

struct PairState {
    sub_idx: usize,
    idx: u64,
    cursors: Vec<UnfoldCursor>,
    row: Vec<Constant>,
}

type HeapEntry = Reverse<(Vec<Constant>, u64, u64, usize)>;

/// Priority queue of `(meta-substitution, index)` pairs ordered by the
/// lexicographic comparison of their plain substitutions over `key_vars`,
/// with ties broken by (creation number, index). `next` consumes the minimal
/// pair and re-inserts its successor index, so a full drain enumerates every
/// represented substitution in non-decreasing key order.
///
/// All queued substitutions must share one domain and have nonempty domains;
/// callers handle the empty meta-substitution separately.
pub struct SubstQueue {
    domain: Vec<Variable>,
    key_positions: Vec<usize>,
    subs: Vec<MetaSub>,
    pairs: Vec<PairState>,
    heap: BinaryHeap<HeapEntry>,
}

impl SubstQueue {
    pub fn new(key_vars: &[Variable], subs: Vec<MetaSub>, mu: &MuMapping) -> SubstQueue {
        if subs.is_empty() {
            return SubstQueue {
                domain: Vec::new(),
                key_positions: Vec::new(),
                subs,
                pairs: Vec::new(),
                heap: BinaryHeap::new(),
            };
        }
        let domain: Vec<Variable> = subs
            .first()
            .map(|s| s.domain().collect())
            .unwrap_or_default();
        debug_assert!(
            subs.iter()
                .all(|s| s.domain().collect::<Vec<_>>() == domain),
            "queued substitutions must share a domain"
        );
        let key_positions: Vec<usize> = key_vars
            .iter()
            .map(|k| {
                domain
                    .iter()
                    .position(|d| d == k)
                    .expect("key variable outside the queue domain")
            })
            .collect();
        let mut pairs = Vec::with_capacity(subs.len());
        let mut heap = BinaryHeap::with_capacity(subs.len());
        for (sub_idx, sub) in subs.iter().enumerate() {
            assert!(sub.len() >= 1, "cannot queue an empty meta-substitution");
            let mut cursors: Vec<UnfoldCursor> = sub
                .bindings()
                .iter()
                .map(|(_, a)| mu.cursor(*a).expect("binding outside the store"))
                .collect();
            let row: Vec<Constant> = cursors
                .iter_mut()
                .map(|c| c.next(mu).expect("nonempty unfolding").0)
                .collect();
            let key: Vec<Constant> = key_positions.iter().map(|p| row[*p]).collect();
            heap.push(Reverse((key, sub.seq(), 1, sub_idx)));
            pairs.push(PairState {
                sub_idx,
                idx: 1,
                cursors,
                row,
            });
        }
        SubstQueue {
            domain,
            key_positions,
            subs,
            pairs,
            heap,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn domain(&self) -> &[Variable] {
        &self.domain
    }

    pub fn sub(&self, sub_idx: usize) -> &MetaSub {
        &self.subs[sub_idx]
    }

    /// Key of the minimal pair, without consuming it.
    pub fn peek_key(&self) -> Option<&[Constant]> {
        self.heap
            .peek()
            .map(|Reverse((key, _, _, _))| key.as_slice())
    }

    /// Minimal pair as (substitution index, pair index), without consuming.
    pub fn peek(&self) -> Option<(usize, u64)> {
        self.heap
            .peek()
            .map(|Reverse((_, _, idx, pair))| (self.pairs[*pair].sub_idx, *idx))
    }

    /// Consumes the minimal pair, re-inserting its successor index if the
    /// substitution has more rows.
    pub fn next(&mut self, mu: &MuMapping) -> Option<DrainedPair> {
        let Reverse((key, seq, idx, pair_idx)) = self.heap.pop()?;
        mu.note_queue_step();
        let pair = &mut self.pairs[pair_idx];
        let drained = DrainedPair {
            sub_idx: pair.sub_idx,
            idx,
            key,
            row: pair.row.clone(),
        };
        let len = self.subs[pair.sub_idx].len();
        if idx < len {
            for (slot, cursor) in pair.cursors.iter_mut().enumerate() {
                pair.row[slot] = cursor.next(mu).expect("column shorter than length").0;
            }
            let key: Vec<Constant> = self.key_positions.iter().map(|p| pair.row[*p]).collect();
            pair.idx = idx + 1;
            self.heap.push(Reverse((key, seq, idx + 1, pair_idx)));
        }
        Some(drained)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu_with(cols: &[&[u32]]) -> (MuMapping, Vec<MetaId>) {
        let mut mu = MuMapping::new();
        let ids = cols
            .iter()
            .map(|c| mu.leaf_from_sorted(c.iter().map(|&x| Constant(x))))
            .collect();
        (mu, ids)
    }

    #[test]
    fn subst_reads_one_index_across_columns() {
        // x -> a1.a2, y -> d.d
        let (mu, ids) = mu_with(&[&[0, 1], &[5, 5]]);
        let x = Variable(0);
        let y = Variable(1);
        let sigma = MetaSub::new(vec![(x, ids[0]), (y, ids[1])], &mu);
        assert_eq!(
            subst(&sigma, 1, &mu).unwrap(),
            vec![(x, Constant(0)), (y, Constant(5))]
        );
        assert_eq!(
            subst(&sigma, 2, &mu).unwrap(),
            vec![(x, Constant(1)), (y, Constant(5))]
        );
        assert!(subst(&sigma, 3, &mu).is_err());
    }

    #[test]
    fn empty_domain_has_no_indices() {
        let mu = MuMapping::new();
        let sigma = MetaSub::empty(&mu);
        assert_eq!(sigma.len(), 0);
        assert!(subst(&sigma, 1, &mu).is_err());
    }

    #[test]
    fn compare_is_lexicographic() {
        let (mu, ids) = mu_with(&[&[0], &[1], &[3], &[4]]);
        let x = Variable(0);
        let y = Variable(1);
        let s1 = MetaSub::new(vec![(x, ids[0]), (y, ids[2])], &mu);
        let s2 = MetaSub::new(vec![(x, ids[1]), (y, ids[3])], &mu);
        assert_eq!(compare_pairs(&s1, 1, &s2, 1, &[x], &mu), Ordering::Less);
        assert_eq!(compare_pairs(&s1, 1, &s1, 1, &[x, y], &mu), Ordering::Equal);
        assert_eq!(compare_pairs(&s1, 1, &s2, 1, &[], &mu), Ordering::Equal);
    }

    #[test]
    fn queue_orders_drains_and_advances() {
        // sigma1: x -> a1.a2, y -> d.d; sigma2: x -> b1, y -> c1 with a < b
        let mut mu = MuMapping::new();
        let a = mu.leaf_from_sorted([Constant(0), Constant(1)]);
        let d = mu.repeated_leaf(Constant(9), 2);
        let b = mu.leaf_from_sorted([Constant(2)]);
        let c = mu.leaf_from_sorted([Constant(3)]);
        let x = Variable(0);
        let y = Variable(1);
        let s1 = MetaSub::new(vec![(x, a), (y, d)], &mu);
        let s2 = MetaSub::new(vec![(x, b), (y, c)], &mu);
        let s1_seq = s1.seq();
        let mut q = SubstQueue::new(&[x, y], vec![s1, s2], &mu);

        let (peek_sub, peek_idx) = q.peek().unwrap();
        assert_eq!((peek_sub, peek_idx), (0, 1));
        let first = q.next(&mu).unwrap();
        assert_eq!(first.key, vec![Constant(0), Constant(9)]);
        assert_eq!((first.sub_idx, first.idx), (0, 1));
        assert_eq!(q.sub(first.sub_idx).seq(), s1_seq);

        // successor of sigma1 was re-inserted and still precedes sigma2
        let second = q.next(&mu).unwrap();
        assert_eq!((second.sub_idx, second.idx), (0, 2));
        assert_eq!(second.key, vec![Constant(1), Constant(9)]);

        // exhausting a substitution does not re-insert
        let third = q.next(&mu).unwrap();
        assert_eq!((third.sub_idx, third.idx), (1, 1));
        assert!(q.next(&mu).is_none());
        assert!(q.is_empty());
    }

    #[test]
    fn drain_is_sorted_and_complete() {
        let mut mu = MuMapping::new();
        let a = mu.leaf_from_sorted([Constant(2), Constant(4), Constant(6)]);
        let b = mu.leaf_from_sorted([Constant(1), Constant(4), Constant(9)]);
        let x = Variable(0);
        let s1 = MetaSub::new(vec![(x, a)], &mu);
        let s2 = MetaSub::new(vec![(x, b)], &mu);
        let mut q = SubstQueue::new(&[x], vec![s1, s2], &mu);
        let mut keys = Vec::new();
        while let Some(d) = q.next(&mu) {
            keys.push(d.key[0]);
        }
        let mut expected = vec![
            Constant(1),
            Constant(2),
            Constant(4),
            Constant(4),
            Constant(6),
            Constant(9),
        ];
        assert_eq!(keys, expected);
        expected.sort();
        assert_eq!(keys, expected);
    }
}
