//! Parsers for the two input formats: triple data and rule text.
//!
//! Triples come as an N-Triples subset (`<s> <p> <o> .`) or as three
//! whitespace-separated bare tokens per line. Each `rdf:type` triple is
//! vertically partitioned into a unary fact `o(s)`; everything else becomes
//! a binary fact `p(s,o)`.
//!
//! Rules are one per line: `H :- B1, ..., Bn .` with `?`-prefixed variables.

use crate::dict::{ArityConflict, Vocabulary};
use crate::model::{Atom, Dataset, Fact, Program, Rule, Term};

pub const RDF_TYPE_IRI: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unsafe rule: head variable ?{variable} does not occur in the body")]
    UnsafeRule { line: usize, variable: String },
    #[error("line {line}: {source}")]
    Arity {
        line: usize,
        #[source]
        source: ArityConflict,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenKind {
    Iri,
    Literal,
    Bare,
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    kind: TokenKind,
    column: usize,
}

/// Splits a line into tokens. `<...>` is one IRI token (text is the inner
/// part), `"..."` plus any glued `@lang`/`^^type` suffix is one opaque
/// literal token, `#` outside brackets/quotes starts a comment.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let column = i + 1;
        if c == '<' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '>' {
                j += 1;
            }
            if j == chars.len() {
                return Err(ParseError::Malformed {
                    line: line_no,
                    message: "unterminated `<`".to_owned(),
                });
            }
            tokens.push(Token {
                text: chars[start..j].iter().collect(),
                kind: TokenKind::Iri,
                column,
            });
            i = j + 1;
        } else if c == '"' {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() {
                if chars[j] == '\\' {
                    j += 2;
                    continue;
                }
                if chars[j] == '"' {
                    break;
                }
                j += 1;
            }
            if j >= chars.len() {
                return Err(ParseError::Malformed {
                    line: line_no,
                    message: "unterminated string literal".to_owned(),
                });
            }
            j += 1;
            // glue any datatype/langtag suffix onto the opaque token
            while j < chars.len() && !chars[j].is_whitespace() {
                j += 1;
            }
            tokens.push(Token {
                text: chars[start..j].iter().collect(),
                kind: TokenKind::Literal,
                column,
            });
            i = j;
        } else {
            let start = i;
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && chars[j] != '#' {
                j += 1;
            }
            tokens.push(Token {
                text: chars[start..j].iter().collect(),
                kind: TokenKind::Bare,
                column,
            });
            i = j;
        }
    }
    Ok(tokens)
}

fn is_type_predicate(token: &Token, tsv_mode: bool) -> bool {
    match token.kind {
        TokenKind::Iri => token.text == RDF_TYPE_IRI || token.text == "rdf:type",
        TokenKind::Bare => {
            token.text == RDF_TYPE_IRI
                || token.text == "rdf:type"
                || (tsv_mode && token.text == "a")
        }
        TokenKind::Literal => false,
    }
}

/// Parses triple data, applying vertical partitioning and dictionary
/// encoding. Duplicate triples are accepted and collapse into one fact.
pub fn parse_triples(source: &str, vocab: &mut Vocabulary) -> Result<Dataset, ParseError> {
    let mut dataset = Dataset::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let (s, p, o, tsv_mode) = match tokens.len() {
            3 => (&tokens[0], &tokens[1], &tokens[2], true),
            4 => {
                if tokens[3].kind != TokenKind::Bare || tokens[3].text != "." {
                    return Err(ParseError::Malformed {
                        line: line_no,
                        message: "expected `.` after triple".to_owned(),
                    });
                }
                (&tokens[0], &tokens[1], &tokens[2], false)
            }
            n => {
                return Err(ParseError::Malformed {
                    line: line_no,
                    message: format!("expected 3 terms (TSV) or `<s> <p> <o> .`, found {n} tokens"),
                })
            }
        };
        let fact = if is_type_predicate(p, tsv_mode) {
            let subject = vocab.constant(&s.text);
            let class = vocab
                .predicate(&o.text, 1)
                .map_err(|source| ParseError::Arity {
                    line: line_no,
                    source,
                })?;
            Fact::new(class, vec![subject])
        } else {
            let subject = vocab.constant(&s.text);
            let predicate = vocab
                .predicate(&p.text, 2)
                .map_err(|source| ParseError::Arity {
                    line: line_no,
                    source,
                })?;
            let object = vocab.constant(&o.text);
            Fact::new(predicate, vec![subject, object])
        };
        dataset.insert(fact);
    }
    Ok(dataset)
}

struct RuleTokens {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
}

impl RuleTokens {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let column = self
            .tokens
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or_else(|| {
                self.tokens
                    .last()
                    .map(|t| t.column + t.text.len())
                    .unwrap_or(1)
            });
        ParseError::Syntax {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, text: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Bare && t.text == text => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{text}`, found `{}`", t.text))),
            None => Err(self.error(format!("expected `{text}`, found end of line"))),
        }
    }
}

/// Splits rule text into punctuation-aware tokens: `(`, `)`, `,`, `.`, `:-`
/// and term tokens.
fn tokenize_rule(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let column = i + 1;
        match c {
            '(' | ')' | ',' | '.' => {
                out.push(Token {
                    text: c.to_string(),
                    kind: TokenKind::Bare,
                    column,
                });
                i += 1;
            }
            ':' if chars.get(i + 1) == Some(&'-') => {
                out.push(Token {
                    text: ":-".to_owned(),
                    kind: TokenKind::Bare,
                    column,
                });
                i += 2;
            }
            '<' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '>' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column,
                        message: "unterminated `<`".to_owned(),
                    });
                }
                out.push(Token {
                    text: chars[start..j].iter().collect(),
                    kind: TokenKind::Iri,
                    column,
                });
                i = j + 1;
            }
            '"' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() {
                    if chars[j] == '\\' {
                        j += 2;
                        continue;
                    }
                    if chars[j] == '"' {
                        break;
                    }
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column,
                        message: "unterminated string literal".to_owned(),
                    });
                }
                j += 1;
                out.push(Token {
                    text: chars[start..j].iter().collect(),
                    kind: TokenKind::Literal,
                    column,
                });
                i = j;
            }
            _ => {
                let start = i;
                let mut j = i;
                while j < chars.len()
                    && !chars[j].is_whitespace()
                    && !matches!(chars[j], '(' | ')' | ',' | '.' | '#')
                {
                    j += 1;
                }
                out.push(Token {
                    text: chars[start..j].iter().collect(),
                    kind: TokenKind::Bare,
                    column,
                });
                i = j;
            }
        }
    }
    Ok(out)
}

fn parse_atom(toks: &mut RuleTokens, vocab: &mut Vocabulary) -> Result<Atom, ParseError> {
    let pred_tok = match toks.next() {
        Some(t) if t.text != "(" && t.text != ")" && t.text != "," && t.text != "." => t.clone(),
        _ => return Err(toks.error("expected predicate name")),
    };
    toks.expect("(")?;
    let mut terms = Vec::new();
    loop {
        match toks.peek() {
            Some(t) if t.kind == TokenKind::Bare && t.text == ")" => {
                return Err(toks.error(
                    "nullary atoms are not supported; every atom needs at least one argument",
                ));
            }
            Some(_) => {}
            None => return Err(toks.error("expected term, found end of line")),
        }
        let term_tok = toks.next().unwrap().clone();
        if term_tok.kind == TokenKind::Bare && term_tok.text.starts_with('?') {
            let name = &term_tok.text[1..];
            if name.is_empty() {
                return Err(ParseError::Syntax {
                    line: toks.line,
                    column: term_tok.column,
                    message: "variable name missing after `?`".to_owned(),
                });
            }
            terms.push(Term::Var(vocab.variable(name)));
        } else {
            terms.push(Term::Const(vocab.constant(&term_tok.text)));
        }
        match toks.next() {
            Some(t) if t.text == "," => continue,
            Some(t) if t.text == ")" => break,
            Some(t) => {
                let text = t.text.clone();
                return Err(toks.error(format!("expected `,` or `)`, found `{text}`")));
            }
            None => return Err(toks.error("expected `,` or `)`, found end of line")),
        }
    }
    let line = toks.line;
    let predicate = vocab
        .predicate(&pred_tok.text, terms.len())
        .map_err(|source| ParseError::Arity { line, source })?;
    Ok(Atom::new(predicate, terms))
}

/// Parses a rule file: one rule per line, `#` comments, blank lines ignored.
/// Safety is checked per rule.
pub fn parse_program(source: &str, vocab: &mut Vocabulary) -> Result<Program, ParseError> {
    let mut rules = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize_rule(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let mut toks = RuleTokens {
            tokens,
            pos: 0,
            line: line_no,
        };
        let head = parse_atom(&mut toks, vocab)?;
        toks.expect(":-")?;
        let mut body = Vec::new();
        loop {
            match toks.peek() {
                Some(t) if t.kind == TokenKind::Bare && t.text == "." => {
                    toks.next();
                    break;
                }
                Some(_) => {}
                None => return Err(toks.error("expected atom or `.`, found end of line")),
            }
            body.push(parse_atom(&mut toks, vocab)?);
            match toks.peek() {
                Some(t) if t.text == "," => {
                    toks.next();
                }
                Some(t) if t.text == "." => {}
                Some(t) => {
                    let text = t.text.clone();
                    return Err(toks.error(format!("expected `,` or `.`, found `{text}`")));
                }
                None => return Err(toks.error("expected `,` or `.`, found end of line")),
            }
        }
        if toks.peek().is_some() {
            return Err(toks.error("unexpected trailing tokens after `.`"));
        }
        let rule = Rule { head, body };
        if let Err(v) = rule.check_safety() {
            return Err(ParseError::UnsafeRule {
                line: line_no,
                variable: vocab.decode_variable(v).unwrap_or("?").to_owned(),
            });
        }
        rules.push(rule);
    }
    Ok(Program::new(rules))
}
