//! The meta-constant store: the mapping from meta-constants to the sorted
//! constant sequences they denote, plus meta-facts and their set.
//!
//! A meta-constant is either a leaf (a run-length-encoded, sorted sequence of
//! constants) or an internal node (a sequence of child meta-constants). The
//! sequence a node denotes — its *unfolding* — is always sorted: for internal
//! nodes it is defined as the sorted merge of the children's unfoldings, so
//! children may be stored in any order and a leaf may later be split into an
//! in/out pair without changing any unfolding that contains it.
//!
//! Unfolding length and tail (the last, maximal constant) are cached per node
//! because they sit on the hot paths of compression and join streaming.

use std::cell::Cell;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::dict::{Constant, Predicate, Variable};
use crate::model::{Atom, Dataset, Fact, Term};
use crate::stream::MetaSub;

/// Identifier of a meta-constant inside one [`MuMapping`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetaId(pub u32);

/// One run of a run-length-encoded leaf: `constant` repeated `count` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub constant: Constant,
    pub count: u64,
}

/// Definition of a meta-constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeDef {
    /// Sorted constants, adjacent equal constants merged into one run.
    Leaf(Vec<Run>),
    /// Child meta-constants; the unfolding is the sorted merge of theirs.
    Internal(Vec<MetaId>),
}

#[derive(Debug, Clone)]
struct Node {
    def: NodeDef,
    len: u64,
    tail: Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("unknown meta-constant {0:?}")]
    UnknownMeta(MetaId),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: u64, len: u64 },
}

/// The mapping from meta-constants to their definitions, realised as an
/// append-only arena. Also hosts the two cheap counters the engine reports:
/// substitution sequence numbers (queue tie-breaking) and queue steps.
#[derive(Debug, Default)]
pub struct MuMapping {
    nodes: Vec<Node>,
    sub_seq: Cell<u64>,
    queue_steps: Cell<u64>,
}

impl MuMapping {
    pub fn new() -> MuMapping {
        MuMapping::default()
    }

    fn node(&self, a: MetaId) -> &Node {
        &self.nodes[a.0 as usize]
    }

    fn push(&mut self, node: Node) -> MetaId {
        let id = MetaId(self.nodes.len() as u32);
        self.nodes.push(node);
        id
    }

    /// Number of meta-constants allocated so far (including any orphaned by
    /// later redefinitions).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, a: MetaId) -> bool {
        (a.0 as usize) < self.nodes.len()
    }

    pub fn fresh_sub_seq(&self) -> u64 {
        let s = self.sub_seq.get();
        self.sub_seq.set(s + 1);
        s
    }

    pub(crate) fn note_queue_step(&self) {
        self.queue_steps.set(self.queue_steps.get() + 1);
    }

    pub fn queue_steps(&self) -> u64 {
        self.queue_steps.get()
    }

    /// Creates a leaf from runs that must already be sorted and merged.
    pub fn leaf(&mut self, runs: Vec<Run>) -> MetaId {
        assert!(!runs.is_empty(), "leaf meta-constants are never empty");
        debug_assert!(
            runs.windows(2).all(|w| w[0].constant < w[1].constant),
            "leaf runs must be strictly sorted and merged"
        );
        debug_assert!(runs.iter().all(|r| r.count >= 1));
        let len = runs.iter().map(|r| r.count).sum();
        let tail = runs.last().unwrap().constant;
        self.push(Node {
            def: NodeDef::Leaf(runs),
            len,
            tail,
        })
    }

    /// Creates a leaf from a sorted sequence of constants, run-length
    /// encoding it along the way.
    pub fn leaf_from_sorted(&mut self, constants: impl IntoIterator<Item = Constant>) -> MetaId {
        let mut runs: Vec<Run> = Vec::new();
        for c in constants {
            match runs.last_mut() {
                Some(r) if r.constant == c => r.count += 1,
                Some(r) => {
                    assert!(r.constant < c, "leaf input not sorted");
                    runs.push(Run {
                        constant: c,
                        count: 1,
                    });
                }
                None => runs.push(Run {
                    constant: c,
                    count: 1,
                }),
            }
        }
        self.leaf(runs)
    }

    /// Creates a leaf denoting `constant` repeated `count` times.
    pub fn repeated_leaf(&mut self, constant: Constant, count: u64) -> MetaId {
        assert!(count >= 1);
        self.leaf(vec![Run { constant, count }])
    }

    /// Creates an internal node over the given children.
    pub fn internal(&mut self, children: Vec<MetaId>) -> MetaId {
        assert!(
            !children.is_empty(),
            "internal nodes need at least one child"
        );
        let len = children.iter().map(|c| self.node(*c).len).sum();
        let tail = children.iter().map(|c| self.node(*c).tail).max().unwrap();
        self.push(Node {
            def: NodeDef::Internal(children),
            len,
            tail,
        })
    }

    /// Appends a constant to a leaf created by the caller. The constant must
    /// not precede the leaf's tail, so the leaf stays sorted; an equal
    /// constant extends the last run instead of adding one.
    pub fn append_to_leaf(&mut self, a: MetaId, c: Constant) {
        let node = &mut self.nodes[a.0 as usize];
        let NodeDef::Leaf(runs) = &mut node.def else {
            panic!("append_to_leaf on internal node");
        };
        let last = runs.last_mut().expect("leaves are nonempty");
        assert!(last.constant <= c, "append would break leaf order");
        if last.constant == c {
            last.count += 1;
        } else {
            runs.push(Run {
                constant: c,
                count: 1,
            });
        }
        node.len += 1;
        node.tail = c;
    }

    /// Splits a leaf into two fresh leaves and redefines it as the internal
    /// node over them. Both run vectors must be nonempty and partition the
    /// original leaf's multiset, so every unfolding through the old leaf is
    /// preserved.
    pub fn split_leaf(
        &mut self,
        a: MetaId,
        in_runs: Vec<Run>,
        out_runs: Vec<Run>,
    ) -> (MetaId, MetaId) {
        debug_assert!(matches!(self.node(a).def, NodeDef::Leaf(_)));
        let part_in = self.leaf(in_runs);
        let part_out = self.leaf(out_runs);
        let len = self.node(part_in).len + self.node(part_out).len;
        let tail = self.node(part_in).tail.max(self.node(part_out).tail);
        let node = &mut self.nodes[a.0 as usize];
        debug_assert_eq!(node.len, len, "split must preserve unfolding length");
        debug_assert_eq!(node.tail, tail, "split must preserve the tail");
        node.def = NodeDef::Internal(vec![part_in, part_out]);
        (part_in, part_out)
    }

    pub fn len(&self, a: MetaId) -> u64 {
        self.node(a).len
    }

    pub fn tail(&self, a: MetaId) -> Constant {
        self.node(a).tail
    }

    pub fn def(&self, a: MetaId) -> &NodeDef {
        &self.node(a).def
    }

    pub fn is_leaf(&self, a: MetaId) -> bool {
        matches!(self.node(a).def, NodeDef::Leaf(_))
    }

    /// Leaf occurrences under `root` in depth-first order. A leaf shared by
    /// several branches appears once per occurrence.
    pub fn leaf_occurrences(&self, root: MetaId) -> Vec<MetaId> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            match &self.node(id).def {
                NodeDef::Leaf(_) => out.push(id),
                NodeDef::Internal(children) => {
                    // preserve child order in the output
                    stack.extend(children.iter().rev());
                }
            }
        }
        out
    }

    /// Ensures every node occurs at most once under `root`, deep-copying
    /// repeated occurrences. Copies are content-equal, so no unfolding
    /// changes; parents shared with other roots keep denoting the same
    /// sequence. Needed before splitting leaves in place: one leaf cannot be
    /// redefined two ways.
    pub fn uniquify_occurrences(&mut self, root: MetaId) {
        let mut seen = std::collections::HashSet::new();
        seen.insert(root);
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let children = match &self.node(id).def {
                NodeDef::Leaf(_) => continue,
                NodeDef::Internal(children) => children.clone(),
            };
            let mut replaced = children.clone();
            for (slot, child) in children.iter().enumerate() {
                if seen.contains(child) {
                    let copy = self.deep_copy(*child);
                    self.mark_subtree_seen(copy, &mut seen);
                    replaced[slot] = copy;
                    stack.push(copy);
                } else {
                    seen.insert(*child);
                    stack.push(*child);
                }
            }
            if replaced != children {
                let len = self.node(id).len;
                let tail = self.node(id).tail;
                let node = &mut self.nodes[id.0 as usize];
                node.def = NodeDef::Internal(replaced);
                node.len = len;
                node.tail = tail;
            }
        }
    }

    fn deep_copy(&mut self, a: MetaId) -> MetaId {
        match self.node(a).def.clone() {
            NodeDef::Leaf(runs) => self.leaf(runs),
            NodeDef::Internal(children) => {
                let copied: Vec<MetaId> = children.into_iter().map(|c| self.deep_copy(c)).collect();
                self.internal(copied)
            }
        }
    }

    fn mark_subtree_seen(&self, a: MetaId, seen: &mut std::collections::HashSet<MetaId>) {
        seen.insert(a);
        if let NodeDef::Internal(children) = &self.node(a).def {
            for c in children.clone() {
                self.mark_subtree_seen(c, seen);
            }
        }
    }

    /// A resumable cursor over the unfolding of `a`.
    pub fn cursor(&self, a: MetaId) -> Result<UnfoldCursor, StoreError> {
        if !self.contains(a) {
            return Err(StoreError::UnknownMeta(a));
        }
        Ok(UnfoldCursor::new(self, self.leaf_occurrences(a)))
    }

    /// Iterates the unfolding of `a` in sorted order.
    pub fn unfold(&self, a: MetaId) -> Result<UnfoldIter<'_>, StoreError> {
        Ok(UnfoldIter {
            cursor: self.cursor(a)?,
            mu: self,
        })
    }

    /// The constant at 1-based position `i` of the unfolding of `a`.
    pub fn index_at(&self, a: MetaId, i: u64) -> Result<Constant, StoreError> {
        if !self.contains(a) {
            return Err(StoreError::UnknownMeta(a));
        }
        let len = self.len(a);
        if i < 1 || i > len {
            return Err(StoreError::IndexOutOfRange { index: i, len });
        }
        let mut cursor = self.cursor(a)?;
        let mut value = None;
        for _ in 0..i {
            value = cursor.next(self).map(|(c, _)| c);
        }
        Ok(value.expect("cursor shorter than cached length"))
    }

    /// Collects the full unfolding of `a` into a vector.
    pub fn unfold_vec(&self, a: MetaId) -> Vec<Constant> {
        self.unfold(a).expect("unknown meta-constant").collect()
    }
}

/// Streams the sorted merge of a fixed list of leaf occurrences. Yields each
/// constant together with the occurrence slot it came from, which is what
/// leaf splitting needs to attribute positions to leaves.
#[derive(Debug, Clone)]
pub struct UnfoldCursor {
    streams: Vec<StreamState>,
    heap: BinaryHeap<Reverse<(Constant, usize)>>,
}

#[derive(Debug, Clone)]
struct StreamState {
    leaf: MetaId,
    run: usize,
    emitted_in_run: u64,
}

impl UnfoldCursor {
    fn new(mu: &MuMapping, occurrences: Vec<MetaId>) -> UnfoldCursor {
        let mut heap = BinaryHeap::with_capacity(occurrences.len());
        let mut streams = Vec::with_capacity(occurrences.len());
        for (slot, leaf) in occurrences.iter().enumerate() {
            let NodeDef::Leaf(runs) = &mu.node(*leaf).def else {
                panic!("occurrence list must contain leaves");
            };
            heap.push(Reverse((runs[0].constant, slot)));
            streams.push(StreamState {
                leaf: *leaf,
                run: 0,
                emitted_in_run: 0,
            });
        }
        UnfoldCursor { streams, heap }
    }

    /// Next constant of the merged unfolding, with its occurrence slot.
    pub fn next(&mut self, mu: &MuMapping) -> Option<(Constant, usize)> {
        let Reverse((c, slot)) = self.heap.pop()?;
        let state = &mut self.streams[slot];
        let NodeDef::Leaf(runs) = &mu.node(state.leaf).def else {
            panic!("leaf redefined while a cursor was live");
        };
        state.emitted_in_run += 1;
        if state.emitted_in_run == runs[state.run].count {
            state.run += 1;
            state.emitted_in_run = 0;
            if state.run < runs.len() {
                self.heap.push(Reverse((runs[state.run].constant, slot)));
            }
        } else {
            self.heap.push(Reverse((c, slot)));
        }
        Some((c, slot))
    }
}

/// Iterator form of [`UnfoldCursor`] bound to its store.
pub struct UnfoldIter<'a> {
    cursor: UnfoldCursor,
    mu: &'a MuMapping,
}

impl Iterator for UnfoldIter<'_> {
    type Item = Constant;
    fn next(&mut self) -> Option<Constant> {
        self.cursor.next(self.mu).map(|(c, _)| c)
    }
}

/// A predicate applied to meta-constants of equal unfolding length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaFact {
    pub predicate: Predicate,
    pub args: Vec<MetaId>,
    pub len: u64,
}

impl MetaFact {
    pub fn new(predicate: Predicate, args: Vec<MetaId>, mu: &MuMapping) -> MetaFact {
        assert!(!args.is_empty(), "nullary meta-facts are not representable");
        let len = mu.len(args[0]);
        assert!(
            args.iter().all(|a| mu.len(*a) == len),
            "meta-fact arguments must share one unfolding length"
        );
        MetaFact {
            predicate,
            args,
            len,
        }
    }
}

/// Which rows of a [`MetaFactSet`] an operation sees, selected by round tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    All,
    /// Rows inserted exactly in the given round.
    Delta(u32),
    /// Rows inserted strictly before the given round.
    Older(u32),
}

impl View {
    fn admits(&self, round: u32) -> bool {
        match *self {
            View::All => true,
            View::Delta(r) => round == r,
            View::Older(r) => round < r,
        }
    }
}

#[derive(Debug, Clone)]
struct TaggedFact {
    fact: MetaFact,
    round: u32,
}

/// Meta-facts partitioned by predicate, each row tagged with the round in
/// which it entered the set. Tag comparison realises the three views a
/// seminaïve round needs without copying anything.
#[derive(Debug, Clone, Default)]
pub struct MetaFactSet {
    by_pred: std::collections::BTreeMap<Predicate, Vec<TaggedFact>>,
}

impl MetaFactSet {
    pub fn new() -> MetaFactSet {
        MetaFactSet::default()
    }

    /// Inserts a row with its round tag. Rows stay sorted by tag (stable
    /// within a tag), so tags are monotone in storage order; in the common
    /// case of a growing round counter this is a plain append.
    pub fn insert(&mut self, fact: MetaFact, round: u32) {
        let rows = self.by_pred.entry(fact.predicate).or_default();
        let at = rows.partition_point(|t| t.round <= round);
        rows.insert(at, TaggedFact { fact, round });
    }

    pub fn predicates(&self) -> impl Iterator<Item = Predicate> + '_ {
        self.by_pred.keys().copied()
    }

    pub fn facts(&self, predicate: Predicate, view: View) -> impl Iterator<Item = &MetaFact> {
        self.by_pred
            .get(&predicate)
            .into_iter()
            .flatten()
            .filter(move |t| view.admits(t.round))
            .map(|t| &t.fact)
    }

    pub fn view_is_empty(&self, view: View) -> bool {
        self.by_pred
            .values()
            .all(|rows| rows.iter().all(|t| !view.admits(t.round)))
    }

    pub fn meta_fact_count(&self) -> usize {
        self.by_pred.values().map(Vec::len).sum()
    }

    /// Total unfolding length over all rows; equals the expanded fact count
    /// because the engine keeps expansions duplicate-free.
    pub fn expanded_len(&self) -> u64 {
        self.by_pred.values().flatten().map(|t| t.fact.len).sum()
    }

    /// Removes and returns all rows of unfolding length one for `predicate`.
    pub(crate) fn take_unit_facts(&mut self, predicate: Predicate) -> Vec<(MetaFact, u32)> {
        let Some(rows) = self.by_pred.get_mut(&predicate) else {
            return Vec::new();
        };
        let mut units = Vec::new();
        rows.retain(|t| {
            if t.fact.len == 1 {
                units.push((t.fact.clone(), t.round));
                false
            } else {
                true
            }
        });
        units
    }

    /// Expands every meta-fact into plain facts.
    pub fn expand(&self, mu: &MuMapping) -> Vec<Fact> {
        let mut out = Vec::new();
        for rows in self.by_pred.values() {
            for t in rows {
                expand_meta_fact(&t.fact, mu, &mut out);
            }
        }
        out
    }
}

fn expand_meta_fact(fact: &MetaFact, mu: &MuMapping, out: &mut Vec<Fact>) {
    let mut cursors: Vec<UnfoldCursor> = fact
        .args
        .iter()
        .map(|a| mu.cursor(*a).expect("meta-fact argument missing"))
        .collect();
    for _ in 0..fact.len {
        let args: Vec<Constant> = cursors
            .iter_mut()
            .map(|c| c.next(mu).expect("column shorter than meta-fact length").0)
            .collect();
        out.push(Fact::new(fact.predicate, args));
    }
}

/// Pattern evaluation over meta-facts: one meta-substitution per row with the
/// atom's predicate, binding the atom's variables positionally. The atom must
/// be constant-free with pairwise distinct variables.
pub fn evaluate(atom: &Atom, set: &MetaFactSet, view: View, mu: &MuMapping) -> Vec<MetaSub> {
    debug_assert!(atom.has_distinct_variables());
    let vars: Vec<Variable> = atom
        .terms
        .iter()
        .map(|t| match t {
            Term::Var(v) => *v,
            Term::Const(_) => unreachable!("evaluate requires a constant-free atom"),
        })
        .collect();
    set.facts(atom.predicate, view)
        .map(|fact| {
            let bindings: Vec<(Variable, MetaId)> = vars
                .iter()
                .copied()
                .zip(fact.args.iter().copied())
                .collect();
            MetaSub::new(bindings, mu)
        })
        .collect()
}

/// Pattern evaluation over a plain dataset, yielding plain substitutions as
/// (variable, constant) rows in the atom's variable order.
pub fn evaluate_plain(atom: &Atom, data: &Dataset) -> Vec<Vec<(Variable, Constant)>> {
    debug_assert!(atom.has_distinct_variables());
    let vars: Vec<Variable> = atom
        .terms
        .iter()
        .map(|t| match t {
            Term::Var(v) => *v,
            Term::Const(_) => unreachable!("evaluate requires a constant-free atom"),
        })
        .collect();
    data.iter()
        .filter(|f| f.predicate == atom.predicate)
        .map(|f| vars.iter().copied().zip(f.args.iter().copied()).collect())
        .collect()
}
