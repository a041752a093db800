//! Dictionary encoding of terms.
//!
//! Every lexical term (IRI text, literal, bare token) is interned once and
//! addressed by a dense identifier assigned in first-registration order.
//! The total ordering on constants used throughout the engine is numeric
//! order on these identifiers.

use std::collections::HashMap;

/// A dictionary-encoded constant. Ordered by identifier, which is the fixed
/// total order the rest of the engine relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constant(pub u32);

/// A predicate symbol. Predicates live in their own identifier space so an
/// IRI used both as a class and as an individual never collides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate(pub u32);

/// A rule variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(pub u32);

impl Variable {
    /// Variables used internally when an atom's positions need fresh names
    /// (renaming apart repeated variables, duplicate elimination). These are
    /// allocated from the top of the id space and never escape the call that
    /// created them.
    pub fn synthetic(position: usize) -> Variable {
        Variable(u32::MAX - position as u32)
    }
}

/// Interning table: term text to dense id and back.
#[derive(Debug, Default, Clone)]
pub struct Dictionary {
    ids: HashMap<String, u32>,
    terms: Vec<String>,
}

impl Dictionary {
    pub fn new() -> Dictionary {
        Dictionary::default()
    }

    /// Returns the id for `term`, registering it if unseen. Ids are handed
    /// out densely in first-registration order.
    pub fn intern(&mut self, term: &str) -> u32 {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as u32;
        self.ids.insert(term.to_owned(), id);
        self.terms.push(term.to_owned());
        id
    }

    pub fn lookup(&self, term: &str) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub fn decode(&self, id: u32) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// The three symbol spaces of a knowledge base. Constants and predicates are
/// kept apart deliberately; variables only occur in rules.
#[derive(Debug, Default, Clone)]
pub struct Vocabulary {
    constants: Dictionary,
    predicates: Dictionary,
    variables: Dictionary,
    arities: Vec<usize>,
}

impl Vocabulary {
    pub fn new() -> Vocabulary {
        Vocabulary::default()
    }

    pub fn constant(&mut self, term: &str) -> Constant {
        Constant(self.constants.intern(term))
    }

    pub fn lookup_constant(&self, term: &str) -> Option<Constant> {
        self.constants.lookup(term).map(Constant)
    }

    pub fn decode_constant(&self, c: Constant) -> &str {
        self.constants
            .decode(c.0)
            .expect("constant not in dictionary")
    }

    /// Registers `term` as a predicate of the given arity. The first
    /// registration fixes the arity; later uses must agree.
    pub fn predicate(&mut self, term: &str, arity: usize) -> Result<Predicate, ArityConflict> {
        let id = self.predicates.intern(term);
        if id as usize == self.arities.len() {
            self.arities.push(arity);
        } else if self.arities[id as usize] != arity {
            return Err(ArityConflict {
                predicate: term.to_owned(),
                expected: self.arities[id as usize],
                found: arity,
            });
        }
        Ok(Predicate(id))
    }

    pub fn decode_predicate(&self, p: Predicate) -> &str {
        self.predicates
            .decode(p.0)
            .expect("predicate not in dictionary")
    }

    pub fn predicate_arity(&self, p: Predicate) -> usize {
        self.arities[p.0 as usize]
    }

    pub fn variable(&mut self, name: &str) -> Variable {
        Variable(self.variables.intern(name))
    }

    pub fn decode_variable(&self, v: Variable) -> Option<&str> {
        self.variables.decode(v.0)
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }
}

/// A predicate was used with two different arities.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("predicate `{predicate}` used with arity {found}, previously {expected}")]
pub struct ArityConflict {
    pub predicate: String,
    pub expected: usize,
    pub found: usize,
}
