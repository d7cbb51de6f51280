//! The `x3c` text format.
//!
//! ```text
//! c optional comments
//! p x3c <n> <m>
//! u <lit> 0          initial conjunct (any number)
//! <lit> <lit> [<lit>] 0
//! ```
//!
//! `m` counts clause lines only. Literals are signed 1-based variable indices.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::clause::Clause;
use crate::formula::{Formula, Instance};
use crate::literal::Literal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cDocument {
    pub num_vars: u32,
    pub units: Vec<Literal>,
    pub clauses: Vec<Clause>,
    pub comments: Vec<String>,
}

impl X3cDocument {
    pub fn from_instance(instance: &Instance) -> X3cDocument {
        X3cDocument {
            num_vars: instance.num_vars(),
            units: instance.units.clone(),
            clauses: instance.formula.clauses().map(|(_, c)| c.clone()).collect(),
            comments: Vec::new(),
        }
    }

    pub fn to_instance(&self) -> Instance {
        let formula = Formula::from_clauses(self.num_vars, self.clauses.iter().cloned())
            .expect("parser checked variable ranges");
        Instance::new(formula, self.units.clone())
    }

    /// Equality ignoring comments.
    pub fn same_content(&self, other: &X3cDocument) -> bool {
        self.num_vars == other.num_vars && self.units == other.units && self.clauses == other.clauses
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header")]
    MissingHeader,
    #[error("bad header")]
    BadHeader,
    #[error("second header")]
    DuplicateHeader,
    #[error("bad token {0:?}")]
    BadToken(String),
    #[error("missing terminator")]
    MissingTerminator,
    #[error("literal 0 before the terminator")]
    ZeroLiteral,
    #[error("clause arity {0} outside 2..=3")]
    Arity(usize),
    #[error("unit line needs exactly one literal")]
    UnitArity,
    #[error("index out of range: {0}")]
    IndexOutOfRange(i64),
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn literals(line: usize, tokens: &[&str], num_vars: u32) -> Result<Vec<Literal>, ParseError> {
    let err = |kind| ParseError { line, kind };
    let mut values = Vec::with_capacity(tokens.len());
    for t in tokens {
        values.push(
            t.parse::<i64>()
                .map_err(|_| err(ParseErrorKind::BadToken((*t).to_string())))?,
        );
    }
    match values.split_last() {
        Some((0, body)) => {
            if body.contains(&0) {
                return Err(err(ParseErrorKind::ZeroLiteral));
            }
            body.iter()
                .map(|&v| {
                    if v.unsigned_abs() > u64::from(num_vars) {
                        Err(err(ParseErrorKind::IndexOutOfRange(v)))
                    } else {
                        Ok(Literal::from_dimacs(v).expect("nonzero and in range"))
                    }
                })
                .collect()
        }
        _ => Err(err(ParseErrorKind::MissingTerminator)),
    }
}

pub fn parse_x3c(text: &str) -> Result<X3cDocument, ParseError> {
    let mut header: Option<(usize, u32, usize)> = None;
    let mut doc = X3cDocument {
        num_vars: 0,
        units: Vec::new(),
        clauses: Vec::new(),
        comments: Vec::new(),
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |kind| ParseError { line, kind };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "c" || trimmed.starts_with("c ") || trimmed.starts_with("c\t") {
            doc.comments.push(trimmed[1..].trim().to_string());
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "p" {
            if header.is_some() {
                return Err(err(ParseErrorKind::DuplicateHeader));
            }
            let parsed = match tokens.as_slice() {
                ["p", "x3c", n, m] => n.parse::<u32>().ok().zip(m.parse::<usize>().ok()),
                _ => None,
            };
            let (n, m) = parsed
                .filter(|&(n, _)| n <= u32::MAX >> 1)
                .ok_or(err(ParseErrorKind::BadHeader))?;
            doc.num_vars = n;
            header = Some((line, n, m));
            continue;
        }
        let Some((_, n, _)) = header else {
            return Err(err(ParseErrorKind::MissingHeader));
        };
        if tokens[0] == "u" {
            let lits = literals(line, &tokens[1..], n)?;
            match lits.as_slice() {
                [u] => doc.units.push(*u),
                _ => return Err(err(ParseErrorKind::UnitArity)),
            }
            continue;
        }
        let lits = literals(line, &tokens, n)?;
        let clause = Clause::new(lits).map_err(|e| match e {
            crate::clause::ClauseError::Arity(a) => err(ParseErrorKind::Arity(a)),
        })?;
        doc.clauses.push(clause);
    }

    let (line, _, declared) = header.ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    if declared != doc.clauses.len() {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::ClauseCountMismatch {
                declared,
                found: doc.clauses.len(),
            },
        });
    }
    Ok(doc)
}

impl fmt::Display for X3cDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comments {
            if c.is_empty() {
                writeln!(f, "c")?;
            } else {
                writeln!(f, "c {c}")?;
            }
        }
        writeln!(f, "p x3c {} {}", self.num_vars, self.clauses.len())?;
        for u in &self.units {
            writeln!(f, "u {u} 0")?;
        }
        for c in &self.clauses {
            let mut line = String::new();
            for l in c.literals() {
                write!(line, "{l} ")?;
            }
            writeln!(f, "{line}0")?;
        }
        Ok(())
    }
}

/// Serializes an instance with no comments.
pub fn to_x3c(instance: &Instance) -> String {
    X3cDocument::from_instance(instance).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_illustrative_example() {
        let doc = parse_x3c("p x3c 3 3\n1 -3 0\n1 -2 3 0\n2 -3 0\n").unwrap();
        let inst = doc.to_instance();
        assert_eq!(inst.formula.to_dimacs(), vec![vec![1, -3], vec![1, -2, 3], vec![2, -3]]);
        assert!(inst.units.is_empty());
    }

    #[test]
    fn out_of_range() {
        let e = parse_x3c("p x3c 2 1\n1 2 3 0\n").unwrap_err();
        assert_eq!(e, ParseError { line: 2, kind: ParseErrorKind::IndexOutOfRange(3) });
    }

    #[test]
    fn units_only() {
        let doc = parse_x3c("p x3c 2 0\nu -2 0\n").unwrap();
        assert!(doc.clauses.is_empty());
        assert_eq!(doc.units, vec![Literal::neg(2)]);
    }

    #[test]
    fn errors_carry_lines() {
        let kind = |t: &str| parse_x3c(t).unwrap_err();
        assert_eq!(kind("p cnf 3 1\n").kind, ParseErrorKind::BadHeader);
        assert_eq!(kind("1 2 0\n").kind, ParseErrorKind::MissingHeader);
        assert_eq!(kind("p x3c 3 1\n1 2\n").kind, ParseErrorKind::MissingTerminator);
        assert_eq!(kind("p x3c 3 1\nc hi\n1 0\n"), ParseError { line: 3, kind: ParseErrorKind::Arity(1) });
        assert_eq!(kind("p x3c 4 1\n1 2 3 4 0\n").kind, ParseErrorKind::Arity(4));
        assert_eq!(kind("p x3c 3 1\n1 0 2 0\n").kind, ParseErrorKind::ZeroLiteral);
        assert_eq!(kind("p x3c 3 1\n1 x 0\n").kind, ParseErrorKind::BadToken("x".into()));
        assert_eq!(
            kind("c a\np x3c 3 2\n1 2 0\n"),
            ParseError { line: 2, kind: ParseErrorKind::ClauseCountMismatch { declared: 2, found: 1 } }
        );
    }

    #[test]
    fn round_trip() {
        let text = "c example\np x3c 4 2\nu 3 0\n1 -2 0\n2 2 -4 0\n";
        let doc = parse_x3c(text).unwrap();
        assert_eq!(doc.to_string(), text);
        assert!(parse_x3c(&doc.to_string()).unwrap().same_content(&doc));
    }
}
