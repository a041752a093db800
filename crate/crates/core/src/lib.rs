//! Datalog materialisation over RDF data with a compressed fact
//! representation.
//!
//! Derived facts are stored as *meta-facts* over *meta-constants*: nodes
//! denoting sorted constant sequences, either run-length-encoded leaves or
//! merges of other nodes. Joins and duplicate elimination run as merge
//! operations over these sorted sequences, and their results reference
//! existing nodes wherever possible instead of materialising every fact.
//!
//! The crate also ships a plain-fact reference engine ([`reference`]) used
//! to verify the compressed engine, and representation-size metrics
//! ([`metrics`]) quantifying the sharing.

pub mod compress;
pub mod dedup;
pub mod dict;
pub mod engine;
pub mod export;
pub mod join;
pub mod meta;
pub mod metrics;
pub mod model;
pub mod parse;
pub mod reference;
pub mod stream;
pub mod synth;

pub use dict::{Constant, Dictionary, Predicate, Variable, Vocabulary};
pub use engine::{materialise, EngineError, EngineStats, Materialisation};
pub use meta::{MetaFact, MetaFactSet, MetaId, MuMapping, View};
pub use model::{Atom, Dataset, Fact, Program, Rule, Term};
pub use parse::{parse_program, parse_triples, ParseError};
pub use reference::{mat_reference, verify, VerifyReport};
pub use stream::MetaSub;
