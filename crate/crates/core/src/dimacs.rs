//! Reading and writing DIMACS CNF / WCNF (pre-2022 `p wcnf V C TOP` format).

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Clause, Formula, FormulaError, Lit, Weight, WeightedClause};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `p cnf` / `p wcnf` header")]
    MissingHeader,
    #[error("malformed header `{0}`")]
    BadHeader(String),
    #[error("invalid integer `{0}`")]
    BadToken(String),
    #[error("literal {lit} out of range (1..={num_vars})")]
    LitOutOfRange { lit: i64, num_vars: u32 },
    #[error("clause weight must be positive, got {0}")]
    NonPositiveWeight(i64),
    #[error("clause weight {weight} exceeds top {top}")]
    WeightAboveTop { weight: u64, top: u64 },
    #[error("clause is not terminated by 0")]
    MissingTerminator,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Clone, Copy)]
enum Header {
    Cnf { vars: u32, clauses: usize },
    Wcnf { vars: u32, clauses: usize, top: Option<u64> },
}

impl Header {
    fn vars(self) -> u32 {
        match self {
            Header::Cnf { vars, .. } | Header::Wcnf { vars, .. } => vars,
        }
    }

    fn clauses(self) -> usize {
        match self {
            Header::Cnf { clauses, .. } | Header::Wcnf { clauses, .. } => clauses,
        }
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<Header, ParseError> {
    let bad = || ParseError {
        line: lineno,
        kind: ParseErrorKind::BadHeader(line.trim().to_string()),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    let num = |i: usize| -> Result<u64, ParseError> {
        fields.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad)
    };
    match fields.get(1).copied() {
        Some("cnf") if fields.len() == 4 => Ok(Header::Cnf {
            vars: u32::try_from(num(2)?).map_err(|_| bad())?,
            clauses: num(3)? as usize,
        }),
        Some("wcnf") if fields.len() == 4 || fields.len() == 5 => {
            let top = if fields.len() == 5 { Some(num(4)?) } else { None };
            if top == Some(0) {
                return Err(bad());
            }
            Ok(Header::Wcnf {
                vars: u32::try_from(num(2)?).map_err(|_| bad())?,
                clauses: num(3)? as usize,
                top,
            })
        }
        _ => Err(bad()),
    }
}

struct Pending {
    start_line: usize,
    weight: Option<Weight>,
    lits: Vec<Lit>,
}

/// Parses a DIMACS CNF or WCNF instance.
///
/// For `p cnf` every clause is soft with weight 1 and `top` becomes the
/// clause count plus one. For `p wcnf` a clause whose weight equals the
/// declared top is hard. If the declared top does not exceed the soft weight
/// sum it is raised to `sum + 1`.
pub fn parse_dimacs(text: &str) -> Result<Formula, ParseError> {
    let mut header: Option<Header> = None;
    let mut clauses: Vec<WeightedClause> = Vec::new();
    let mut pending: Option<Pending> = None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(ParseError {
                    line: lineno,
                    kind: ParseErrorKind::BadHeader(line.to_string()),
                });
            }
            header = Some(parse_header(line, lineno)?);
            continue;
        }
        let h = header.ok_or(ParseError {
            line: lineno,
            kind: ParseErrorKind::MissingHeader,
        })?;
        let err = |kind| ParseError { line: lineno, kind };

        for tok in line.split_whitespace() {
            let value: i64 = tok
                .parse()
                .map_err(|_| err(ParseErrorKind::BadToken(tok.to_string())))?;
            let p = pending.get_or_insert_with(|| Pending {
                start_line: lineno,
                weight: None,
                lits: Vec::new(),
            });
            if let (Header::Wcnf { top, .. }, None) = (h, p.weight) {
                if value <= 0 {
                    return Err(err(ParseErrorKind::NonPositiveWeight(value)));
                }
                let w = value as u64;
                p.weight = Some(match top {
                    Some(t) if w == t => Weight::Hard,
                    Some(t) if w > t => {
                        return Err(err(ParseErrorKind::WeightAboveTop { weight: w, top: t }))
                    }
                    _ => Weight::Soft(w),
                });
                continue;
            }
            if value == 0 {
                let p = pending.take().expect("pending clause");
                clauses.push(WeightedClause {
                    clause: Clause::new(p.lits),
                    weight: p.weight.unwrap_or(Weight::Soft(1)),
                });
                continue;
            }
            if value.unsigned_abs() > h.vars() as u64 {
                return Err(err(ParseErrorKind::LitOutOfRange {
                    lit: value,
                    num_vars: h.vars(),
                }));
            }
            p.lits.push(Lit::from_dimacs(value).expect("range checked"));
        }
    }

    if let Some(p) = pending {
        return Err(ParseError {
            line: p.start_line,
            kind: ParseErrorKind::MissingTerminator,
        });
    }
    let h = header.ok_or(ParseError {
        line: last_line.max(1),
        kind: ParseErrorKind::MissingHeader,
    })?;
    if clauses.len() != h.clauses() {
        return Err(ParseError {
            line: last_line,
            kind: ParseErrorKind::ClauseCount {
                declared: h.clauses(),
                found: clauses.len(),
            },
        });
    }

    let to_err = |e: FormulaError| ParseError {
        line: last_line,
        kind: e.into(),
    };
    match h {
        Header::Cnf { vars, .. } => Formula::new(vars, clauses).map_err(to_err),
        Header::Wcnf { vars, top, .. } => {
            let sum = clauses
                .iter()
                .filter_map(|c| c.weight.soft())
                .try_fold(0u64, |acc, w| acc.checked_add(w))
                .ok_or_else(|| to_err(FormulaError::WeightOverflow))?;
            match top {
                Some(t) if t > sum => Formula::with_top(vars, clauses, t).map_err(to_err),
                _ => Formula::new(vars, clauses).map_err(to_err),
            }
        }
    }
}

/// Writes `f` as `p wcnf V C TOP`, one clause per line, weight first.
pub fn serialize(f: &Formula) -> String {
    serialize_with_comments(f, &[])
}

/// Like [`serialize`], with `c `-prefixed comment lines before the header.
pub fn serialize_with_comments(f: &Formula, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "c {line}");
        }
    }
    let _ = writeln!(
        out,
        "p wcnf {} {} {}",
        f.num_vars(),
        f.clauses().len(),
        f.top()
    );
    for wc in f.clauses() {
        let w = match wc.weight {
            Weight::Hard => f.top(),
            Weight::Soft(w) => w,
        };
        let _ = write!(out, "{w}");
        for l in wc.clause.lits() {
            let _ = write!(out, " {}", l.to_dimacs());
        }
        out.push_str(" 0\n");
    }
    out
}
