//! The materialisation engine: dataset compression followed by a seminaïve
//! fixpoint over meta-facts.
//!
//! Each round applies every rule once per pivot position: body atoms before
//! the pivot are matched against rows older than the last delta, the pivot
//! against the delta itself, and later atoms against everything, so no rule
//! instance is derived from pre-delta rows twice. Joins dispatch to a
//! semi-join when one side's variables contain the other's and to a
//! cross-join otherwise. Newly derived meta-facts pass through duplicate
//! elimination before becoming the next delta.

use std::collections::HashMap;

use crate::compress::compress;
use crate::dedup::elim_dup;
use crate::dict::{Constant, Variable};
use crate::join::{match_atom, sjoin, xjoin};
use crate::meta::{MetaFact, MetaFactSet, MetaId, MuMapping, View};
use crate::model::{Atom, Dataset, Fact, Program, Rule, Term};
use crate::stream::MetaSub;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("unsafe program: head variable {0:?} does not occur in the rule body")]
    UnsafeProgram(Variable),
}

/// Counters reported after a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// Rounds executed, including the final one that derived nothing.
    pub rounds: u32,
    /// (rule, pivot) evaluations attempted.
    pub rule_applications: u64,
    /// Meta-constants allocated, including ones orphaned by redefinitions.
    pub mu_nodes: usize,
    /// Priority-queue pops across all kernels.
    pub queue_steps: u64,
    pub meta_facts: usize,
    pub expanded_facts: u64,
}

/// Result of materialisation: the meta-fact set, its mapping, and counters.
#[derive(Debug)]
pub struct Materialisation {
    pub meta: MetaFactSet,
    pub mu: MuMapping,
    pub stats: EngineStats,
}

impl Materialisation {
    /// Expands every meta-fact into plain facts. The engine keeps the
    /// represented set duplicate-free, so this has no repeats.
    pub fn expand(&self) -> Vec<Fact> {
        self.meta.expand(&self.mu)
    }
}

/// Sorts rows lexicographically with the column having the fewest distinct
/// values as primary key (ties by position), maximising run-length sharing
/// in the leading columns.
fn sort_rows_for_compression(rows: &mut [Vec<Constant>]) {
    let Some(first) = rows.first() else { return };
    let arity = first.len();
    let mut column_order: Vec<usize> = (0..arity).collect();
    let distinct: Vec<usize> = (0..arity)
        .map(|k| {
            let mut values: Vec<Constant> = rows.iter().map(|r| r[k]).collect();
            values.sort();
            values.dedup();
            values.len()
        })
        .collect();
    column_order.sort_by_key(|k| (distinct[*k], *k));
    rows.sort_by(|a, b| {
        for k in &column_order {
            match a[*k].cmp(&b[*k]) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Compresses a plain dataset into meta-facts tagged as round 0.
pub fn compress_dataset(data: &Dataset, mu: &mut MuMapping) -> MetaFactSet {
    let mut by_pred: std::collections::BTreeMap<_, Vec<Vec<Constant>>> =
        std::collections::BTreeMap::new();
    for fact in data {
        by_pred
            .entry(fact.predicate)
            .or_default()
            .push(fact.args.clone());
    }
    let mut set = MetaFactSet::new();
    for (predicate, mut rows) in by_pred {
        sort_rows_for_compression(&mut rows);
        let arity = rows[0].len();
        let vars: Vec<Variable> = (0..arity).map(Variable::synthetic).collect();
        for tau in compress(&vars, &rows, mu).expect("facts of one predicate share an arity") {
            let args = vars
                .iter()
                .map(|v| tau.get(*v).expect("column per position"))
                .collect();
            set.insert(MetaFact::new(predicate, args, mu), 0);
        }
    }
    set
}

/// Cache of fresh repeated-constant leaves for head constants, keyed by
/// (constant, length).
type ConstLeafCache = HashMap<(Constant, u64), MetaId>;

/// Instantiates a rule head under a meta-substitution. A head constant
/// becomes a repeated-constant leaf of the substitution's length; a repeated
/// head variable reuses its meta-constant. The empty meta-substitution
/// stands for one plain substitution, so it emits a meta-fact of length one.
fn instantiate_head(
    head: &Atom,
    sigma: &MetaSub,
    mu: &mut MuMapping,
    cache: &mut ConstLeafCache,
) -> MetaFact {
    let len = if sigma.domain_is_empty() {
        1
    } else {
        sigma.len()
    };
    let args: Vec<MetaId> = head
        .terms
        .iter()
        .map(|t| match t {
            Term::Var(v) => sigma.get(*v).expect("safety guarantees a binding"),
            Term::Const(c) => *cache
                .entry((*c, len))
                .or_insert_with(|| mu.repeated_leaf(*c, len)),
        })
        .collect();
    MetaFact::new(head.predicate, args, mu)
}

fn is_subset(inner: &[Variable], outer: &[Variable]) -> bool {
    inner.iter().all(|v| outer.contains(v))
}

/// Evaluates one rule for one pivot position, appending head meta-facts for
/// every surviving meta-substitution.
fn apply_rule_pivot(
    rule: &Rule,
    pivot: usize,
    delta_round: u32,
    store: &MetaFactSet,
    mu: &mut MuMapping,
    cache: &mut ConstLeafCache,
    derived: &mut Vec<MetaFact>,
) {
    let mut joined: Vec<MetaSub> = Vec::new();
    let mut seen_vars: Vec<Variable> = Vec::new();
    for (j, atom) in rule.body.iter().enumerate() {
        let view = match j.cmp(&pivot) {
            std::cmp::Ordering::Less => View::Older(delta_round),
            std::cmp::Ordering::Equal => View::Delta(delta_round),
            std::cmp::Ordering::Greater => View::All,
        };
        let matches = match_atom(atom, store, view, mu);
        let atom_vars = atom.variables();
        if j == 0 || seen_vars.is_empty() {
            joined = matches;
        } else if is_subset(&seen_vars, &atom_vars) {
            let key = seen_vars.clone();
            joined = sjoin(&joined, &matches, &key, mu);
        } else if is_subset(&atom_vars, &seen_vars) {
            let key: Vec<Variable> = seen_vars
                .iter()
                .copied()
                .filter(|v| atom_vars.contains(v))
                .collect();
            joined = sjoin(&matches, &joined, &key, mu);
        } else {
            let key: Vec<Variable> = seen_vars
                .iter()
                .copied()
                .filter(|v| atom_vars.contains(v))
                .collect();
            joined = xjoin(&joined, &matches, &key, mu);
        }
        for v in atom_vars {
            if !seen_vars.contains(&v) {
                seen_vars.push(v);
            }
        }
        if joined.is_empty() {
            return;
        }
    }
    for sigma in &joined {
        derived.push(instantiate_head(&rule.head, sigma, mu, cache));
    }
}

/// Re-compresses all meta-facts of unfolding length one, per predicate,
/// keeping delta-tagged and older rows in separate groups so the seminaïve
/// bookkeeping survives. Groups of one row are left as they are.
fn recompress_unit_facts(store: &mut MetaFactSet, current_round: u32, mu: &mut MuMapping) {
    let predicates: Vec<_> = store.predicates().collect();
    for predicate in predicates {
        let units = store.take_unit_facts(predicate);
        if units.is_empty() {
            continue;
        }
        let delta_group: Vec<&MetaFact> = units
            .iter()
            .filter(|(_, r)| *r == current_round)
            .map(|(f, _)| f)
            .collect();
        let older: Vec<(&MetaFact, u32)> = units
            .iter()
            .filter(|(_, r)| *r < current_round)
            .map(|(f, r)| (f, *r))
            .collect();
        let older_tag = older.iter().map(|(_, r)| *r).max().unwrap_or(0);
        let older_group: Vec<&MetaFact> = older.iter().map(|(f, _)| *f).collect();
        for (group, tag) in [(delta_group, current_round), (older_group, older_tag)] {
            if group.is_empty() {
                continue;
            }
            if group.len() == 1 {
                store.insert(group[0].clone(), tag);
                continue;
            }
            let arity = group[0].args.len();
            let mut rows: Vec<Vec<Constant>> = group
                .iter()
                .map(|f| {
                    f.args
                        .iter()
                        .map(|a| mu.index_at(*a, 1).expect("unit fact has one row"))
                        .collect()
                })
                .collect();
            sort_rows_for_compression(&mut rows);
            let vars: Vec<Variable> = (0..arity).map(Variable::synthetic).collect();
            for tau in compress(&vars, &rows, mu).expect("rows share the arity") {
                let args = vars.iter().map(|v| tau.get(*v).expect("column")).collect();
                store.insert(MetaFact::new(predicate, args, mu), tag);
            }
        }
    }
}

/// Computes the materialisation of `program` over `data` as meta-facts.
pub fn materialise(program: &Program, data: &Dataset) -> Result<Materialisation, EngineError> {
    program.check_safety().map_err(EngineError::UnsafeProgram)?;

    let mut mu = MuMapping::new();
    let mut store = compress_dataset(data, &mut mu);
    let mut cache: ConstLeafCache = HashMap::new();
    let mut stats = EngineStats::default();

    // rules with empty bodies assert their (ground) heads once, in round 1
    let mut pending_axioms: Vec<&Rule> =
        program.rules.iter().filter(|r| r.body.is_empty()).collect();

    let mut round = 0u32;
    loop {
        let delta_round = round;
        if store.view_is_empty(View::Delta(delta_round)) && pending_axioms.is_empty() {
            break;
        }
        let current_round = round + 1;
        let mut derived: Vec<MetaFact> = Vec::new();
        for rule in pending_axioms.drain(..) {
            let empty = MetaSub::empty(&mu);
            derived.push(instantiate_head(&rule.head, &empty, &mut mu, &mut cache));
        }
        for rule in &program.rules {
            for pivot in 0..rule.body.len() {
                stats.rule_applications += 1;
                apply_rule_pivot(
                    rule,
                    pivot,
                    delta_round,
                    &store,
                    &mut mu,
                    &mut cache,
                    &mut derived,
                );
            }
        }
        let mut fresh = MetaFactSet::new();
        for fact in derived {
            fresh.insert(fact, current_round);
        }
        let delta = elim_dup(&fresh, &store, &mut mu);
        round = current_round;
        if delta.is_empty() {
            break;
        }
        for fact in delta {
            store.insert(fact, current_round);
        }
        recompress_unit_facts(&mut store, current_round, &mut mu);
    }

    stats.rounds = round;
    stats.mu_nodes = mu.node_count();
    stats.queue_steps = mu.queue_steps();
    stats.meta_facts = store.meta_fact_count();
    stats.expanded_facts = store.expanded_len();
    Ok(Materialisation {
        meta: store,
        mu,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dict::Vocabulary;
    use crate::meta::NodeDef;
    use crate::parse::{parse_program, parse_triples};
    use crate::synth;
    use std::collections::HashSet;

    /// Explicit facts of the bundled example family with constants
    /// registered in subscript order: a_1 .. a_2n, b_i, c_i, d, e_i.
    fn family_dataset(n: usize, m: usize) -> (Vocabulary, Dataset, Program) {
        let mut vocab = Vocabulary::new();
        let a: Vec<Constant> = (1..=2 * n)
            .map(|i| vocab.constant(&format!("a{i}")))
            .collect();
        let b: Vec<Constant> = (1..=m).map(|i| vocab.constant(&format!("b{i}"))).collect();
        let c: Vec<Constant> = (1..=m).map(|i| vocab.constant(&format!("c{i}"))).collect();
        let d = vocab.constant("d");
        let e: Vec<Constant> = (1..=m).map(|i| vocab.constant(&format!("e{i}"))).collect();
        let p = vocab.predicate("P", 2).unwrap();
        let r = vocab.predicate("R", 1).unwrap();
        let t = vocab.predicate("T", 2).unwrap();
        let mut data = Dataset::new();
        for a_i in &a {
            data.insert(Fact::new(p, vec![*a_i, d]));
        }
        for (b_i, c_i) in b.iter().zip(&c) {
            data.insert(Fact::new(p, vec![*b_i, *c_i]));
        }
        for i in 1..=n {
            data.insert(Fact::new(r, vec![a[2 * i - 1]]));
        }
        for e_i in &e {
            data.insert(Fact::new(t, vec![d, *e_i]));
        }
        let program = parse_program(synth::example_rules(), &mut vocab).unwrap();
        (vocab, data, program)
    }

    #[test]
    fn compress_dataset_reproduces_family_structure() {
        let (vocab, data, _) = family_dataset(1, 1);
        let mut mu = MuMapping::new();
        let set = compress_dataset(&data, &mut mu);

        let decode = |c: Constant| vocab.decode_constant(c).to_owned();
        let mut summary: Vec<(String, Vec<Vec<String>>)> = Vec::new();
        for pred in set.predicates() {
            for fact in set.facts(pred, View::All) {
                let cols: Vec<Vec<String>> = fact
                    .args
                    .iter()
                    .map(|a| mu.unfold_vec(*a).into_iter().map(decode).collect())
                    .collect();
                summary.push((vocab.decode_predicate(pred).to_owned(), cols));
            }
        }
        // P(b, c), P(a, d*2), R(a2), T(d, e1)
        assert!(summary.contains(&("P".into(), vec![vec!["b1".into()], vec!["c1".into()]])));
        assert!(summary.contains(&(
            "P".into(),
            vec![vec!["a1".into(), "a2".into()], vec!["d".into(), "d".into()]]
        )));
        assert!(summary.contains(&("R".into(), vec![vec!["a2".into()]])));
        assert!(summary.contains(&("T".into(), vec![vec!["d".into()], vec!["e1".into()]])));
        assert_eq!(set.meta_fact_count(), 4);
    }

    #[test]
    fn compress_dataset_single_column_sorts() {
        let mut vocab = Vocabulary::new();
        let q = vocab.predicate("Q", 1).unwrap();
        let c1 = vocab.constant("c1");
        let c2 = vocab.constant("c2");
        let c3 = vocab.constant("c3");
        let mut data = Dataset::new();
        data.insert(Fact::new(q, vec![c1]));
        data.insert(Fact::new(q, vec![c3]));
        data.insert(Fact::new(q, vec![c2]));
        let mut mu = MuMapping::new();
        let set = compress_dataset(&data, &mut mu);
        assert_eq!(set.meta_fact_count(), 1);
        let fact = set.facts(q, View::All).next().unwrap();
        assert_eq!(mu.unfold_vec(fact.args[0]), vec![c1, c2, c3]);
    }

    #[test]
    fn compress_dataset_empty() {
        let mut mu = MuMapping::new();
        let set = compress_dataset(&Dataset::new(), &mut mu);
        assert_eq!(set.meta_fact_count(), 0);
    }

    fn expanded_set(mat: &Materialisation) -> HashSet<Fact> {
        mat.expand().into_iter().collect()
    }

    #[test]
    fn family_n1_m1_materialises_to_eight_facts() {
        let (mut vocab, data, program) = family_dataset(1, 1);
        let mat = materialise(&program, &data).unwrap();
        let got = expanded_set(&mat);
        assert_eq!(got.len(), 8);
        assert_eq!(mat.expand().len(), 8, "expansion must be duplicate-free");

        let p = vocab.predicate("P", 2).unwrap();
        let s = vocab.predicate("S", 2).unwrap();
        let a2 = vocab.constant("a2");
        let d = vocab.constant("d");
        let e1 = vocab.constant("e1");
        for fact in [
            Fact::new(s, vec![a2, d]),
            Fact::new(p, vec![a2, e1]),
            Fact::new(s, vec![a2, e1]),
        ] {
            assert!(got.contains(&fact), "missing derived fact {fact:?}");
        }
        for fact in &data {
            assert!(got.contains(fact), "explicit fact lost");
        }
        assert_eq!(mat.stats.rounds, 4);
    }

    #[test]
    fn empty_program_returns_the_dataset() {
        let (_vocab, data, _) = family_dataset(2, 3);
        let program = Program::default();
        let mat = materialise(&program, &data).unwrap();
        let got = expanded_set(&mat);
        let want: HashSet<Fact> = data.iter().cloned().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn single_body_atom_rule_derives_one_meta_fact() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples(
            "<b1> <P> <c1> .\n<b2> <P> <c2> .\n<b3> <P> <c3> .\n",
            &mut vocab,
        )
        .unwrap();
        let program = parse_program("W(?x,?y) :- P(?x,?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 2).unwrap();
        let w_facts: Vec<_> = mat.meta.facts(w, View::All).collect();
        assert_eq!(w_facts.len(), 1, "one meta-fact covers all consequences");
        assert_eq!(w_facts[0].len, 3);
    }

    #[test]
    fn body_free_rule_fires_even_on_empty_data() {
        let mut vocab = Vocabulary::new();
        let program = parse_program("Q(c) :- .\nW(?x) :- Q(?x) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &Dataset::new()).unwrap();
        let got = expanded_set(&mat);
        let q = vocab.predicate("Q", 1).unwrap();
        let w = vocab.predicate("W", 1).unwrap();
        let c = vocab.constant("c");
        assert!(got.contains(&Fact::new(q, vec![c])));
        assert!(got.contains(&Fact::new(w, vec![c])));
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn unsafe_program_rejected() {
        let mut vocab = Vocabulary::new();
        let q = vocab.predicate("Q", 1).unwrap();
        let p = vocab.predicate("P", 1).unwrap();
        let x = vocab.variable("x");
        let y = vocab.variable("y");
        let program = Program::new(vec![Rule {
            head: Atom::new(q, vec![Term::Var(y)]),
            body: vec![Atom::new(p, vec![Term::Var(x)])],
        }]);
        assert!(matches!(
            materialise(&program, &Dataset::new()),
            Err(EngineError::UnsafeProgram(v)) if v == y
        ));
    }

    #[test]
    fn recompression_merges_unit_facts_within_a_round() {
        // two rules each derive one unit S-fact in round 1
        let mut vocab = Vocabulary::new();
        let data = parse_triples("<u1> <P> <v1> .\n<u2> <Q> <v2> .\n", &mut vocab).unwrap();
        let program = parse_program(
            "S(?x,?y) :- P(?x,?y) .\nS(?x,?y) :- Q(?x,?y) .\n",
            &mut vocab,
        )
        .unwrap();
        let mat = materialise(&program, &data).unwrap();
        let s = vocab.predicate("S", 2).unwrap();
        let s_facts: Vec<_> = mat.meta.facts(s, View::All).collect();
        assert_eq!(s_facts.len(), 1, "unit facts of one round merge");
        assert_eq!(s_facts[0].len, 2);
        assert_eq!(expanded_set(&mat).len(), 4);
    }

    #[test]
    fn recompression_keeps_delta_and_older_rows_apart() {
        // Q-facts arrive in rounds 1 and 2; merging them would break the
        // seminaive delta and lose the round-2 derivation of W
        let mut vocab = Vocabulary::new();
        let data = parse_triples("<u> <P> <v> .\n", &mut vocab).unwrap();
        let program = parse_program(
            "Q(?x,?y) :- P(?x,?y) .\nQ(?y,?x) :- Q(?x,?y) .\nW(?x,?y) :- Q(?x,?y) .\n",
            &mut vocab,
        )
        .unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 2).unwrap();
        let u = vocab.constant("u");
        let v = vocab.constant("v");
        let got = expanded_set(&mat);
        assert!(got.contains(&Fact::new(w, vec![u, v])));
        assert!(got.contains(&Fact::new(w, vec![v, u])));
        // P(u,v), Q both ways, W both ways
        assert_eq!(got.len(), 5);
    }

    #[test]
    fn repeated_head_variable_reuses_the_column() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples("<u1> <P> <v1> .\n<u2> <P> <v2> .\n", &mut vocab).unwrap();
        let program = parse_program("W(?x,?x) :- P(?x,?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 2).unwrap();
        for fact in mat.meta.facts(w, View::All) {
            assert_eq!(fact.args[0], fact.args[1]);
        }
        let u1 = vocab.constant("u1");
        let u2 = vocab.constant("u2");
        let got = expanded_set(&mat);
        assert!(got.contains(&Fact::new(w, vec![u1, u1])));
        assert!(got.contains(&Fact::new(w, vec![u2, u2])));
    }

    #[test]
    fn head_constant_becomes_repeated_leaf() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples("<u1> <P> <v1> .\n<u2> <P> <v2> .\n", &mut vocab).unwrap();
        let program = parse_program("W(?x,tag) :- P(?x,?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 2).unwrap();
        let fact = mat.meta.facts(w, View::All).next().unwrap();
        match mat.mu.def(fact.args[1]) {
            NodeDef::Leaf(runs) => {
                assert_eq!(runs.len(), 1);
                assert_eq!(runs[0].count, fact.len);
            }
            _ => panic!("expected a repeated-constant leaf"),
        }
    }

    #[test]
    fn ground_atom_mid_body_acts_as_existence_filter() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples("<u1> <P> <v1> .\n<c> <Q> <c> .\n", &mut vocab).unwrap();
        let hit = parse_program("W(?x) :- P(?x,?y), Q(c,c) .\n", &mut vocab).unwrap();
        let mat = materialise(&hit, &data).unwrap();
        let w = vocab.predicate("W", 1).unwrap();
        let u1 = vocab.constant("u1");
        assert!(expanded_set(&mat).contains(&Fact::new(w, vec![u1])));

        let miss = parse_program("W(?x) :- P(?x,?y), Q(c,u1) .\n", &mut vocab).unwrap();
        let mat = materialise(&miss, &data).unwrap();
        assert!(!expanded_set(&mat).iter().any(|f| f.predicate == w));
    }

    #[test]
    fn ground_atom_first_does_not_leak_into_later_atoms() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples("<u1> <P> <v1> .\n<c> <Q> <c> .\n", &mut vocab).unwrap();
        let program = parse_program("W(?x) :- Q(c,c), P(?x,?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 1).unwrap();
        let u1 = vocab.constant("u1");
        assert!(expanded_set(&mat).contains(&Fact::new(w, vec![u1])));

        // unmatched ground first atom suppresses the rule entirely
        let program = parse_program("W(?x) :- Q(c,v1), P(?x,?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        assert!(!expanded_set(&mat).iter().any(|f| f.predicate == w));
    }

    #[test]
    fn disjoint_variables_give_the_product() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples(
            "<u1> <rdf:type> <P> .\n<u2> <rdf:type> <P> .\n<v1> <rdf:type> <Q> .\n",
            &mut vocab,
        )
        .unwrap();
        let program = parse_program("W(?x,?y) :- P(?x), Q(?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 2).unwrap();
        let got = expanded_set(&mat);
        assert_eq!(got.iter().filter(|f| f.predicate == w).count(), 2);
    }

    #[test]
    fn projection_head_length_matches_substitution() {
        let mut vocab = Vocabulary::new();
        let data = parse_triples(
            "<u1> <P> <v1> .\n<u2> <P> <v1> .\n<u3> <P> <v2> .\n",
            &mut vocab,
        )
        .unwrap();
        let program = parse_program("W(?y) :- P(?x,?y) .\n", &mut vocab).unwrap();
        let mat = materialise(&program, &data).unwrap();
        let w = vocab.predicate("W", 1).unwrap();
        let v1 = vocab.constant("v1");
        let v2 = vocab.constant("v2");
        let got = expanded_set(&mat);
        assert!(got.contains(&Fact::new(w, vec![v1])));
        assert!(got.contains(&Fact::new(w, vec![v2])));
        // the duplicate projection of v1 was eliminated
        assert_eq!(got.iter().filter(|f| f.predicate == w).count(), 2);
    }
}
