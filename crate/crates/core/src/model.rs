//! Facts, atoms, rules, programs.

use std::collections::HashSet;

use crate::dict::{Constant, Predicate, Variable, Vocabulary};

/// A ground fact: predicate applied to constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub predicate: Predicate,
    pub args: Vec<Constant>,
}

impl Fact {
    pub fn new(predicate: Predicate, args: Vec<Constant>) -> Fact {
        Fact { predicate, args }
    }
}

/// A term in a rule atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Variable),
    Const(Constant),
}

/// An atom: predicate applied to terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub predicate: Predicate,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: Predicate, terms: Vec<Term>) -> Atom {
        Atom { predicate, terms }
    }

    /// Variables of the atom in position order, each listed once.
    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = Vec::new();
        for t in &self.terms {
            if let Term::Var(v) = t {
                if !seen.contains(v) {
                    seen.push(*v);
                }
            }
        }
        seen
    }

    pub fn is_ground(&self) -> bool {
        self.terms.iter().all(|t| matches!(t, Term::Const(_)))
    }

    /// True when every position holds a distinct variable.
    pub fn has_distinct_variables(&self) -> bool {
        let mut seen = HashSet::new();
        self.terms.iter().all(|t| match t {
            Term::Var(v) => seen.insert(*v),
            Term::Const(_) => false,
        })
    }
}

/// A datalog rule `head :- body`. The body may be empty, in which case the
/// head must be ground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Rule {
    /// Checks that every head variable occurs in some body atom. Returns the
    /// first offending variable otherwise.
    pub fn check_safety(&self) -> Result<(), Variable> {
        let mut body_vars = HashSet::new();
        for atom in &self.body {
            for t in &atom.terms {
                if let Term::Var(v) = t {
                    body_vars.insert(*v);
                }
            }
        }
        for t in &self.head.terms {
            if let Term::Var(v) = t {
                if !body_vars.contains(v) {
                    return Err(*v);
                }
            }
        }
        Ok(())
    }

    /// Body variables ordered by first occurrence, the engine's canonical
    /// ordering for join-variable vectors.
    pub fn body_variable_order(&self) -> Vec<Variable> {
        let mut order = Vec::new();
        for atom in &self.body {
            for t in &atom.terms {
                if let Term::Var(v) = t {
                    if !order.contains(v) {
                        order.push(*v);
                    }
                }
            }
        }
        order
    }
}

/// A finite set of rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Program {
        Program { rules }
    }

    pub fn check_safety(&self) -> Result<(), Variable> {
        for rule in &self.rules {
            rule.check_safety()?;
        }
        Ok(())
    }
}

/// A deduplicated set of facts with deterministic iteration order
/// (first-insertion order).
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    facts: Vec<Fact>,
    seen: HashSet<Fact>,
}

impl Dataset {
    pub fn new() -> Dataset {
        Dataset::default()
    }

    /// Inserts a fact, ignoring duplicates. Returns true if it was new.
    pub fn insert(&mut self, fact: Fact) -> bool {
        if self.seen.contains(&fact) {
            return false;
        }
        self.seen.insert(fact.clone());
        self.facts.push(fact);
        true
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.seen.contains(fact)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fact> {
        self.facts.iter()
    }
}

impl FromIterator<Fact> for Dataset {
    fn from_iter<I: IntoIterator<Item = Fact>>(iter: I) -> Dataset {
        let mut d = Dataset::new();
        for f in iter {
            d.insert(f);
        }
        d
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Fact;
    type IntoIter = std::slice::Iter<'a, Fact>;
    fn into_iter(self) -> Self::IntoIter {
        self.facts.iter()
    }
}

/// Renders a fact as `P(t1,...,tn)` with dictionary-decoded terms.
pub fn display_fact(fact: &Fact, vocab: &Vocabulary) -> String {
    let mut s = String::new();
    s.push_str(vocab.decode_predicate(fact.predicate));
    s.push('(');
    for (i, a) in fact.args.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(vocab.decode_constant(*a));
    }
    s.push(')');
    s
}
