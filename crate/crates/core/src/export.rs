//! Deterministic rendering of fact sets for export.

use crate::dict::Vocabulary;
use crate::model::{display_fact, Fact};
use crate::parse::RDF_TYPE_IRI;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExportError {
    #[error("cannot export {predicate}/{arity} as triples: only unary and binary facts invert to triples")]
    NotTripleShaped { predicate: String, arity: usize },
}

/// Renders facts as `P(t1,...,tn)` lines, sorted lexicographically. Equal
/// inputs produce byte-identical output.
pub fn render_facts(facts: &[Fact], vocab: &Vocabulary) -> String {
    let mut lines: Vec<String> = facts.iter().map(|f| display_fact(f, vocab)).collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn render_term(term: &str) -> String {
    if term.starts_with('"') {
        term.to_owned()
    } else {
        format!("<{term}>")
    }
}

/// Renders facts back as triples, inverting vertical partitioning: a unary
/// fact `P(s)` becomes `<s> <rdf:type> <P> .`, a binary fact `P(s,o)`
/// becomes `<s> <P> <o> .`. Lines are sorted.
pub fn render_triples(facts: &[Fact], vocab: &Vocabulary) -> Result<String, ExportError> {
    let mut lines: Vec<String> = Vec::with_capacity(facts.len());
    for fact in facts {
        let pred = vocab.decode_predicate(fact.predicate);
        let line = match fact.args.len() {
            1 => format!(
                "{} <{RDF_TYPE_IRI}> {} .",
                render_term(vocab.decode_constant(fact.args[0])),
                render_term(pred)
            ),
            2 => format!(
                "{} {} {} .",
                render_term(vocab.decode_constant(fact.args[0])),
                render_term(pred),
                render_term(vocab.decode_constant(fact.args[1]))
            ),
            arity => {
                return Err(ExportError::NotTripleShaped {
                    predicate: pred.to_owned(),
                    arity,
                })
            }
        };
        lines.push(line);
    }
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    Ok(out)
}
