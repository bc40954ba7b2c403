//! Input formats: monotone DIMACS CNF, set-cover text, hypergraph text and
//! at-most-one JSON. See `docs/formats.md` for the grammars.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{FormulaError, MonotoneCnf, Pin, VarId};
use crate::matching::{AmoError, AmoInstance, Hypergraph, HypergraphError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Dimacs,
    SetCover,
    Hypergraph,
    AmoJson,
}

impl InputFormat {
    pub fn name(self) -> &'static str {
        match self {
            InputFormat::Dimacs => "dimacs",
            InputFormat::SetCover => "setcover",
            InputFormat::Hypergraph => "hypergraph",
            InputFormat::AmoJson => "amo-json",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "cnf" | "dimacs" => Some(InputFormat::Dimacs),
            "sc" => Some(InputFormat::SetCover),
            "hg" => Some(InputFormat::Hypergraph),
            "json" => Some(InputFormat::AmoJson),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: negative literal in a monotone formula")]
    NegativeLiteral { line: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Amo(#[from] AmoError),
    #[error("invalid JSON: {0}")]
    Json(String),
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// A parsed instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Cnf(MonotoneCnf),
    Hypergraph(Hypergraph),
    Amo(AmoInstance),
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, col: usize, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, col, format!("expected {what}, found `{tok}`")))
}

/// Parses DIMACS CNF with positive literals only.
pub fn parse_dimacs(text: &str) -> Result<MonotoneCnf, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<VarId>> = Vec::new();
    let mut current: Vec<VarId> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, 1, "duplicate problem line"));
            }
            let toks: Vec<(usize, &str)> = tokens(raw).collect();
            if toks.len() != 4 || toks[0].1 != "p" || toks[1].1 != "cnf" {
                return Err(syntax(line, 1, "expected `p cnf <vars> <clauses>`"));
            }
            let n = number(toks[2].1, line, toks[2].0, "variable count")?;
            let m = number(toks[3].1, line, toks[3].0, "clause count")?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(syntax(line, 1, "clause before the `p cnf` line"));
        };
        for (col, tok) in tokens(raw) {
            let lit: i64 = number(tok, line, col, "an integer literal")?;
            if lit < 0 {
                return Err(ParseError::NegativeLiteral { line });
            }
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if lit as u64 > n as u64 {
                return Err(syntax(line, col, format!("variable {lit} exceeds declared count {n}")));
            }
            current.push(VarId(lit as u32 - 1));
        }
    }
    let Some((n, m)) = header else {
        return Err(syntax(last_line.max(1), 1, "missing `p cnf` line"));
    };
    if !current.is_empty() {
        return Err(syntax(last_line, 1, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(syntax(
            last_line.max(1),
            1,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Ok(MonotoneCnf::new(n, clauses)?)
}

/// A two-number header followed by exactly `rows` item lines; `#` lines are
/// comments. `rows_first` selects which header field counts the lines.
fn parse_listing(text: &str, what: &str, rows_first: bool) -> Result<(usize, usize, Vec<Vec<usize>>), ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with('#'));
    let (hline, header) = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some(h) => break h,
            None => return Err(syntax(1, 1, "missing header line")),
        }
    };
    let toks: Vec<(usize, &str)> = tokens(header).collect();
    if toks.len() != 2 {
        return Err(syntax(hline, 1, "expected a header with two counts"));
    }
    let a: usize = number(toks[0].1, hline, toks[0].0, "a count")?;
    let b: usize = number(toks[1].1, hline, toks[1].0, "a count")?;
    let (rows, universe) = if rows_first { (a, b) } else { (b, a) };
    let mut items = Vec::with_capacity(rows);
    let mut last = hline;
    for (line, l) in lines.by_ref() {
        last = line;
        if items.len() == rows {
            if l.trim().is_empty() {
                continue;
            }
            return Err(syntax(line, 1, format!("more than {rows} {what} lines")));
        }
        let mut ids = Vec::new();
        for (col, tok) in tokens(l) {
            let id: usize = number(tok, line, col, "a positive id")?;
            if id == 0 || id > universe {
                return Err(syntax(line, col, format!("id {id} outside 1..={universe}")));
            }
            ids.push(id - 1);
        }
        items.push(ids);
    }
    if items.len() != rows {
        return Err(syntax(last, 1, format!("expected {rows} {what} lines, found {}", items.len())));
    }
    Ok((rows, universe, items))
}

/// Set-cover text: sets are variables, elements are clauses. Clause `e`
/// lists the sets covering element `e`; an uncovered element yields an empty
/// clause.
pub fn parse_setcover(text: &str) -> Result<MonotoneCnf, ParseError> {
    let (n_sets, n_elems, sets) = parse_listing(text, "set", true)?;
    let mut clauses = vec![Vec::new(); n_elems];
    for (s, elems) in sets.iter().enumerate() {
        for &e in elems {
            clauses[e].push(VarId(s as u32));
        }
    }
    Ok(MonotoneCnf::new(n_sets, clauses)?)
}

/// Hypergraph text: `vertices edges`, then one line of vertex ids per edge.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let (_, n_vertices, edges) = parse_listing(text, "edge", false)?;
    Ok(Hypergraph::new(n_vertices, edges)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmoJson {
    n_vars: usize,
    constraints: Vec<Vec<u32>>,
    #[serde(default)]
    pin_one: Vec<u32>,
    #[serde(default)]
    pin_zero: Vec<u32>,
}

/// At-most-one JSON with 0-based variable ids.
pub fn parse_amo_json(text: &str) -> Result<AmoInstance, ParseError> {
    let raw: AmoJson = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut pins = vec![Pin::Free; raw.n_vars];
    for (list, pin) in [(&raw.pin_one, Pin::One), (&raw.pin_zero, Pin::Zero)] {
        for &v in list {
            let slot = pins.get_mut(v as usize).ok_or(AmoError::VarOutOfRange {
                var: VarId(v),
                n_vars: raw.n_vars,
            })?;
            if *slot != Pin::Free {
                return Err(ParseError::Json(format!("variable {v} pinned twice")));
            }
            *slot = pin;
        }
    }
    let constraints = raw
        .constraints
        .into_iter()
        .map(|c| c.into_iter().map(VarId).collect())
        .collect();
    Ok(AmoInstance::new(raw.n_vars, constraints, pins)?)
}

pub fn parse(text: &str, format: InputFormat) -> Result<Instance, ParseError> {
    Ok(match format {
        InputFormat::Dimacs => Instance::Cnf(parse_dimacs(text)?),
        InputFormat::SetCover => Instance::Cnf(parse_setcover(text)?),
        InputFormat::Hypergraph => Instance::Hypergraph(parse_hypergraph(text)?),
        InputFormat::AmoJson => Instance::Amo(parse_amo_json(text)?),
    })
}

/// DIMACS rendering of the clauses. Pins are not represented.
pub fn to_dimacs(c: &MonotoneCnf) -> String {
    let mut s = format!("p cnf {} {}\n", c.n_vars(), c.clauses().len());
    for clause in c.clauses() {
        for v in clause.vars() {
            let _ = write!(s, "{} ", v.0 + 1);
        }
        s.push_str("0\n");
    }
    s
}

/// Set-cover rendering: one line per variable listing its clauses.
pub fn to_setcover(c: &MonotoneCnf) -> String {
    let mut s = format!("{} {}\n", c.n_vars(), c.clauses().len());
    for v in 0..c.n_vars() as u32 {
        let ids: Vec<String> = c.occurrences(VarId(v)).iter().map(|&ci| (ci + 1).to_string()).collect();
        s.push_str(&ids.join(" "));
        s.push('\n');
    }
    s
}

pub fn to_hypergraph(h: &Hypergraph) -> String {
    let mut s = format!("{} {}\n", h.n_vertices(), h.edges().len());
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
        s.push_str(&ids.join(" "));
        s.push('\n');
    }
    s
}

pub fn to_amo_json(c: &AmoInstance) -> String {
    let pinned = |p: Pin| -> Vec<u32> {
        (0..c.n_vars() as u32)
            .filter(|&v| c.pin(VarId(v)) == p)
            .collect()
    };
    let raw = AmoJson {
        n_vars: c.n_vars(),
        constraints: c
            .constraints()
            .iter()
            .map(|k| k.iter().map(|v| v.0).collect())
            .collect(),
        pin_one: pinned(Pin::One),
        pin_zero: pinned(Pin::Zero),
    };
    serde_json::to_string(&raw).expect("plain data serializes")
}
