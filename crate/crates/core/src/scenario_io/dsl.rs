//! Line-oriented scenario format.
//!
//! ```text
//! scenario k1 4.0 dt 0.001
//! mode <id> duration <s> [alpha <a>]
//!   join <node> <x0>
//!   node <node>
//!   edge <tail> -> <head> +|-
//! ```
//!
//! A mode's node set is exactly its `join` and `node` lines, in order; edges
//! may only reference declared nodes. Anything after `#` is a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::error::Error;
use crate::sgraph::{Sign, SignedDigraph, SignedEdge};
use crate::switched::{Mode, Scenario, DEFAULT_DT};

/// A positioned parse problem. Lines and columns are 1-based; column 0
/// means the whole line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.col > 0 {
            write!(f, "line {}, col {}: {}", self.line, self.col, self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy)]
struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    col: code[..s].chars().count() + 1,
                    text: &code[s..i],
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

struct ModeDraft {
    line: usize,
    id: String,
    duration: f64,
    alpha: f64,
    labels: Vec<String>,
    joins: BTreeMap<String, f64>,
    /// `(tail, head, sign, line)`
    edges: Vec<(usize, usize, Sign, usize)>,
}

struct Parser {
    line: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn err(&mut self, col: usize, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            line: self.line,
            col,
            message: message.into(),
        });
    }

    fn number(&mut self, tok: Option<Token<'_>>, what: &str) -> Option<f64> {
        let Some(tok) = tok else {
            self.err(0, format!("expected {what}"));
            return None;
        };
        match tok.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.err(tok.col, format!("expected {what}, found '{}'", tok.text));
                None
            }
        }
    }

    fn keyword(&mut self, tok: Option<Token<'_>>, kw: &str) -> bool {
        match tok {
            Some(t) if t.text == kw => true,
            Some(t) => {
                self.err(t.col, format!("expected '{kw}', found '{}'", t.text));
                false
            }
            None => {
                self.err(0, format!("expected '{kw}'"));
                false
            }
        }
    }

    fn end(&mut self, rest: &[Token<'_>]) {
        if let Some(t) = rest.first() {
            self.err(t.col, format!("unexpected '{}'", t.text));
        }
    }
}

/// Parses scenario text. All problems found are reported together.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut p = Parser {
        line: 0,
        diags: Vec::new(),
    };
    let mut header: Option<(f64, f64)> = None;
    let mut drafts: Vec<ModeDraft> = Vec::new();
    let mut saw_header = false;

    for (n, raw) in text.lines().enumerate() {
        p.line = n + 1;
        let toks = tokenize(raw);
        let Some(&first) = toks.first() else {
            continue;
        };
        let mut it = toks[1..].iter().copied();
        match first.text {
            "scenario" => {
                if saw_header || !drafts.is_empty() {
                    p.err(first.col, "'scenario' must appear once, before any mode");
                }
                saw_header = true;
                let mut k1 = None;
                let mut dt = DEFAULT_DT;
                while let Some(key) = it.next() {
                    match key.text {
                        "k1" => k1 = p.number(it.next(), "a number after 'k1'"),
                        "dt" => dt = p.number(it.next(), "a number after 'dt'").unwrap_or(dt),
                        other => p.err(key.col, format!("unknown scenario field '{other}'")),
                    }
                }
                match k1 {
                    Some(k) if k > 0.0 && dt > 0.0 => header = Some((k, dt)),
                    Some(_) => p.err(0, "k1 and dt must be positive"),
                    None => p.err(0, "scenario line needs 'k1 <value>'"),
                }
            }
            "mode" => {
                let Some(id) = it.next() else {
                    p.err(0, "expected a mode id");
                    continue;
                };
                let mut duration = None;
                let mut alpha = 1.0;
                while let Some(key) = it.next() {
                    match key.text {
                        "duration" => {
                            if let Some(d) = p.number(it.next(), "a duration") {
                                if d > 0.0 {
                                    duration = Some(d);
                                } else {
                                    p.err(key.col, format!("duration must be positive, got {d}"));
                                    duration = Some(f64::NAN);
                                }
                            } else {
                                duration = Some(f64::NAN);
                            }
                        }
                        "alpha" => {
                            if let Some(a) = p.number(it.next(), "an alpha value") {
                                if a > 0.0 {
                                    alpha = a;
                                } else {
                                    p.err(key.col, format!("alpha must be positive, got {a}"));
                                }
                            }
                        }
                        other => p.err(key.col, format!("unknown mode field '{other}'")),
                    }
                }
                if duration.is_none() {
                    p.err(0, "mode needs 'duration <seconds>'");
                }
                drafts.push(ModeDraft {
                    line: p.line,
                    id: id.text.to_owned(),
                    duration: duration.unwrap_or(f64::NAN),
                    alpha,
                    labels: Vec::new(),
                    joins: BTreeMap::new(),
                    edges: Vec::new(),
                });
            }
            "join" | "node" | "edge" => {
                let Some(draft) = drafts.last_mut() else {
                    p.err(first.col, format!("'{}' outside of a mode", first.text));
                    continue;
                };
                let rest: Vec<Token<'_>> = it.collect();
                match first.text {
                    "join" | "node" => {
                        let Some(name) = rest.first() else {
                            p.err(0, "expected a node name");
                            continue;
                        };
                        let tail_start = if first.text == "join" {
                            let Some(x) = p.number(rest.get(1).copied(), "an initial state") else {
                                continue;
                            };
                            draft.joins.insert(name.text.to_owned(), x);
                            2
                        } else {
                            1
                        };
                        p.end(&rest[tail_start.min(rest.len())..]);
                        if draft.labels.iter().any(|l| l == name.text) {
                            p.err(name.col, format!("node '{}' declared twice in this mode", name.text));
                        } else {
                            draft.labels.push(name.text.to_owned());
                        }
                    }
                    _ => parse_edge(&mut p, draft, &rest),
                }
            }
            other => p.err(first.col, format!("unknown directive '{other}'")),
        }
    }

    p.line = 1;
    if !saw_header {
        p.err(0, "missing 'scenario' line");
    }
    if drafts.is_empty() {
        p.err(0, "scenario has no modes");
    }

    let mut prev: BTreeSet<String> = BTreeSet::new();
    for d in &drafts {
        for l in &d.labels {
            if !prev.contains(l) && !d.joins.contains_key(l) {
                p.diags.push(Diagnostic {
                    line: d.line,
                    col: 0,
                    message: format!("mode '{}': node '{l}' is new and needs a join state", d.id),
                });
            }
            if prev.contains(l) && d.joins.contains_key(l) {
                p.diags.push(Diagnostic {
                    line: d.line,
                    col: 0,
                    message: format!("mode '{}': node '{l}' carries over and cannot join", d.id),
                });
            }
        }
        prev = d.labels.iter().cloned().collect();
    }

    if !p.diags.is_empty() {
        p.diags.sort_by_key(|d| (d.line, d.col));
        return Err(ParseError { diagnostics: p.diags });
    }
    let (k1, dt) = header.expect("header checked above");
    let scenario = Scenario {
        k1,
        dt,
        modes: drafts
            .into_iter()
            .map(|d| Mode {
                id: d.id,
                graph: SignedDigraph::new(
                    d.labels,
                    d.edges.iter().map(|&(t, h, s, _)| SignedEdge::new(t, h, s)).collect(),
                ),
                duration: d.duration,
                alpha: d.alpha,
                joins: d.joins,
            })
            .collect(),
    };
    if let Err(e) = scenario.validate(false) {
        let (mode, err) = match e {
            Error::InMode { mode, source } => (mode, *source),
            Error::MissingJoin { mode, .. } => (mode, e),
            other => (1, other),
        };
        let line = mode_lines(text).get(mode - 1).copied().unwrap_or(1);
        return Err(ParseError {
            diagnostics: vec![Diagnostic {
                line,
                col: 0,
                message: err.to_string(),
            }],
        });
    }
    Ok(scenario)
}

fn mode_lines(text: &str) -> Vec<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| tokenize(l).first().is_some_and(|t| t.text == "mode"))
        .map(|(i, _)| i + 1)
        .collect()
}

fn parse_edge(p: &mut Parser, draft: &mut ModeDraft, rest: &[Token<'_>]) {
    let (Some(t), Some(arrow), Some(h), Some(s)) = (rest.first(), rest.get(1), rest.get(2), rest.get(3)) else {
        p.err(0, "expected 'edge <tail> -> <head> +|-'");
        return;
    };
    if !p.keyword(Some(*arrow), "->") {
        return;
    }
    let sign = match s.text {
        "+" => Sign::Positive,
        "-" => Sign::Negative,
        other => {
            p.err(s.col, format!("expected '+' or '-', found '{other}'"));
            return;
        }
    };
    p.end(&rest[4..]);
    let mut index = |tok: &Token<'_>| {
        let found = draft.labels.iter().position(|l| l == tok.text);
        if found.is_none() {
            p.err(tok.col, format!("unknown node '{}' (declare it with 'join' or 'node')", tok.text));
        }
        found
    };
    let (Some(ti), Some(hi)) = (index(t), index(h)) else {
        return;
    };
    if ti == hi {
        p.err(t.col, format!("self-loop at '{}'", t.text));
        return;
    }
    for &(a, b, sg, line) in &draft.edges {
        if a == ti && b == hi {
            p.err(t.col, format!("duplicate edge {} -> {} (first on line {line})", t.text, h.text));
            return;
        }
        if a == hi && b == ti && sg != sign {
            p.err(
                s.col,
                format!("digon sign violation: {} -> {} has the opposite sign on line {line}", h.text, t.text),
            );
            return;
        }
    }
    draft.edges.push((ti, hi, sign, p.line));
}

/// Parses raw bytes; invalid UTF-8 is reported as a diagnostic.
pub fn parse_scenario_bytes(bytes: &[u8]) -> Result<Scenario, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_scenario(text),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = good.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let col = std::str::from_utf8(&good[line_start..]).map_or(1, |s| s.chars().count() + 1);
            Err(ParseError {
                diagnostics: vec![Diagnostic {
                    line,
                    col,
                    message: "invalid UTF-8".into(),
                }],
            })
        }
    }
}

/// Serializes a scenario so that [`parse_scenario`] reproduces it exactly.
pub fn to_dsl(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario k1 {} dt {}", s.k1, s.dt);
    for m in &s.modes {
        let _ = writeln!(out, "\nmode {} duration {} alpha {}", m.id, m.duration, m.alpha);
        for l in m.graph.labels() {
            match m.joins.get(l) {
                Some(x) => {
                    let _ = writeln!(out, "  join {l} {x}");
                }
                None => {
                    let _ = writeln!(out, "  node {l}");
                }
            }
        }
        for e in m.graph.edges() {
            let _ = writeln!(
                out,
                "  edge {} -> {} {}",
                m.graph.label(e.tail),
                m.graph.label(e.head),
                e.sign.symbol()
            );
        }
    }
    out
}
