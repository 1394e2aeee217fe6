//! Streaming [N-Triples](https://www.w3.org/TR/n-triples/) reader.
//!
//! Each statement is classified by the kind of its object: a literal object
//! makes an attribute triple, an IRI or blank-node object a relationship.
//! Literal datatypes and language tags are dropped since only the predicate
//! name of an attribute is ever used downstream.

use std::fmt;
use std::io::{self, BufRead};

use thiserror::Error;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Number of malformed-line reports kept in lenient mode. Further bad lines
/// are only counted so memory stays bounded on noisy dumps.
pub const MAX_KEPT_REPORTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Iri,
    Literal,
    Blank,
}

/// One RDF term. `value` holds the IRI without angle brackets, the unescaped
/// lexical form of a literal, or a blank-node label without the `_:` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub kind: TermKind,
    pub value: String,
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term {
            kind: TermKind::Iri,
            value: value.into(),
        }
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term {
            kind: TermKind::Literal,
            value: value.into(),
        }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term {
            kind: TermKind::Blank,
            value: label.into(),
        }
    }

    /// IRIs and blank nodes are both graph nodes.
    pub fn is_node(&self) -> bool {
        self.kind != TermKind::Literal
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TermKind::Iri => {
                f.write_str("<")?;
                for c in self.value.chars() {
                    match c {
                        '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                            write!(f, "\\u{:04X}", c as u32)?
                        }
                        c if (c as u32) <= 0x20 => write!(f, "\\u{:04X}", c as u32)?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str(">")
            }
            TermKind::Blank => write!(f, "_:{}", self.value),
            TermKind::Literal => {
                f.write_str("\"")?;
                for c in self.value.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleRole {
    Attribute,
    Relationship,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }

    pub fn role(&self) -> TripleRole {
        if self.object.kind == TermKind::Literal {
            TripleRole::Attribute
        } else {
            TripleRole::Relationship
        }
    }
}

/// Renders the triple as one N-Triples statement (without trailing newline).
impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line_no}: {reason}")]
pub struct MalformedLine {
    pub line_no: usize,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Malformed(#[from] MalformedLine),
    #[error("read error: {0}")]
    Io(#[from] io::Error),
}

/// Local name of a predicate IRI: whatever follows the last `/` or `#`.
pub fn predicate_local_name(iri: &str) -> &str {
    match iri.rfind(['/', '#']) {
        Some(pos) => &iri[pos + 1..],
        None => iri,
    }
}

/// Lazily parses N-Triples from `reader`.
///
/// In lenient mode (`strict == false`) malformed lines are skipped and
/// recorded; see [`Triples::malformed_count`]. In strict mode the first
/// malformed line is yielded as an error and iteration stops.
pub fn parse_ntriples<R: BufRead>(reader: R, strict: bool) -> Triples<R> {
    Triples {
        reader,
        strict,
        line: String::new(),
        line_no: 0,
        done: false,
        malformed: Vec::new(),
        malformed_count: 0,
    }
}

pub struct Triples<R> {
    reader: R,
    strict: bool,
    line: String,
    line_no: usize,
    done: bool,
    malformed: Vec<MalformedLine>,
    malformed_count: usize,
}

impl<R> Triples<R> {
    /// Reports of skipped lines (lenient mode), capped at [`MAX_KEPT_REPORTS`].
    pub fn malformed(&self) -> &[MalformedLine] {
        &self.malformed
    }

    pub fn malformed_count(&self) -> usize {
        self.malformed_count
    }

    pub fn lines_read(&self) -> usize {
        self.line_no
    }
}

impl<R: BufRead> Iterator for Triples<R> {
    type Item = Result<Triple, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.line.clear();
            match self.reader.read_line(&mut self.line) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    self.line_no += 1;
                    match parse_line(&self.line) {
                        Ok(Some(t)) => return Some(Ok(t)),
                        Ok(None) => {}
                        Err(reason) => {
                            let err = MalformedLine {
                                line_no: self.line_no,
                                reason,
                            };
                            if self.strict {
                                self.done = true;
                                return Some(Err(err.into()));
                            }
                            self.malformed_count += 1;
                            if self.malformed.len() < MAX_KEPT_REPORTS {
                                self.malformed.push(err);
                            }
                        }
                    }
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            }
        }
        None
    }
}

/// Parses one line. `Ok(None)` for blank and comment lines.
pub fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let mut cur = Cursor {
        chars: line.trim_end_matches(['\n', '\r']).chars().collect(),
        pos: 0,
    };
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') => return Ok(None),
        _ => {}
    }
    let subject = match cur.peek() {
        Some('<') => Term::iri(cur.iri()?),
        Some('_') => Term::blank(cur.blank()?),
        _ => return Err("subject must be an IRI or blank node".into()),
    };
    cur.require_ws("after subject")?;
    let predicate = match cur.peek() {
        Some('<') => Term::iri(cur.iri()?),
        _ => return Err("predicate must be an IRI".into()),
    };
    cur.require_ws("after predicate")?;
    let object = match cur.peek() {
        Some('<') => Term::iri(cur.iri()?),
        Some('_') => Term::blank(cur.blank()?),
        Some('"') => Term::literal(cur.literal()?),
        Some('.') | None => return Err("missing object".into()),
        Some(c) => return Err(format!("unexpected character {c:?} at object position")),
    };
    cur.skip_ws();
    if cur.next() != Some('.') {
        return Err("expected '.' at end of statement".into());
    }
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') => Ok(Some(Triple::new(subject, predicate, object))),
        Some(c) => Err(format!("trailing content starting with {c:?}")),
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn require_ws(&mut self, ctx: &str) -> Result<(), String> {
        // A literal or IRI may be directly followed by the next term.
        let had = self.skip_ws();
        if had || matches!(self.peek(), Some('<' | '"')) {
            Ok(())
        } else if self.peek().is_none() {
            Err(format!("unexpected end of line {ctx}"))
        } else {
            Err(format!("expected whitespace {ctx}"))
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        debug_assert_eq!(self.peek(), Some('<'));
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.next() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => match self.next() {
                    Some('u') => out.push(self.hex_char(4)?),
                    Some('U') => out.push(self.hex_char(8)?),
                    _ => return Err("invalid escape in IRI".into()),
                },
                Some(c) if c <= ' ' => {
                    return Err("whitespace or control character inside IRI".into())
                }
                Some(c @ ('<' | '"' | '{' | '}' | '|' | '^' | '`')) => {
                    return Err(format!("character {c:?} not allowed in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err("empty IRI".into());
        }
        // escapes must not smuggle in what is forbidden raw
        if out.chars().any(|c| c <= ' ') {
            return Err("escaped whitespace or control character inside IRI".into());
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<String, String> {
        if self.next() != Some('_') || self.next() != Some(':') {
            return Err("blank node must start with '_:'".into());
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{B7}') {
                self.pos += 1;
            } else {
                break;
            }
        }
        // a label never ends with '.'; that dot terminates the statement
        while self.pos > start && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err("empty blank node label".into());
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn literal(&mut self) -> Result<String, String> {
        debug_assert_eq!(self.peek(), Some('"'));
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.next() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.next() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{C}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        Some(c) => return Err(format!("invalid escape '\\{c}' in literal")),
                        None => return Err("unterminated escape in literal".into()),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
        match self.peek() {
            Some('^') => {
                self.pos += 1;
                if self.next() != Some('^') || self.peek() != Some('<') {
                    return Err("malformed datatype annotation".into());
                }
                self.iri()?;
            }
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                if self.pos == start || !self.chars[start].is_ascii_alphabetic() {
                    return Err("malformed language tag".into());
                }
            }
            _ => {}
        }
        Ok(out)
    }

    fn hex_char(&mut self, digits: usize) -> Result<char, String> {
        let mut code = 0u32;
        for _ in 0..digits {
            let d = self
                .next()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| "invalid hex escape".to_string())?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| format!("escape U+{code:X} is not a scalar value"))
    }
}
