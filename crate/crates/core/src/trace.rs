//! Derivation traces: every input, rule application, learned constraint and
//! the final refutation, with explicit ids, in a line-oriented text format.
//!
//! ```text
//! i 1 +1 x1 +1 x2 >= 1
//! s 4 1 3 cancel x2 1 1 : +1 x1 +1 x3 >= 1
//! l 4
//! u 9
//! ```
//!
//! `i` lines introduce input constraints (`FALSE` for an input that
//! normalized to a contradiction), `s` lines give the id, input ids, rule
//! and output of one step, `l` marks a stored learned constraint and `u`
//! names the derived contradiction. Lines starting with `c` are comments.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::io::{self, BufRead, Write};

use crate::constraint::{parse_literal, Constraint, Normalized};
use crate::int::Int;
use crate::opb::ParsedInstance;
use crate::rules::Rule;

pub type TraceId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceLine {
    Input { id: TraceId, constraint: Normalized },
    Step { id: TraceId, inputs: Vec<TraceId>, rule: Rule, output: Normalized },
    Learned { id: TraceId },
    Refutation { id: TraceId },
    /// Free text, written as a `c` line; ignored by the checker.
    Comment { text: String },
}

impl TraceLine {
    pub fn id(&self) -> TraceId {
        match self {
            TraceLine::Input { id, .. }
            | TraceLine::Step { id, .. }
            | TraceLine::Learned { id }
            | TraceLine::Refutation { id } => *id,
            TraceLine::Comment { .. } => 0,
        }
    }
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceLine::Input { id, constraint } => write!(f, "i {id} {constraint}"),
            TraceLine::Step { id, inputs, rule, output } => {
                write!(f, "s {id}")?;
                for i in inputs {
                    write!(f, " {i}")?;
                }
                write!(f, " {rule} : {output}")
            }
            TraceLine::Learned { id } => write!(f, "l {id}"),
            TraceLine::Refutation { id } => write!(f, "u {id}"),
            TraceLine::Comment { text } => write!(f, "c {text}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    pub lines: Vec<TraceLine>,
    next_id: TraceId,
}

impl DerivationTrace {
    pub fn new() -> DerivationTrace {
        DerivationTrace {
            lines: Vec::new(),
            next_id: 1,
        }
    }

    fn fresh(&mut self) -> TraceId {
        let id = self.next_id.max(1);
        self.next_id = id + 1;
        id
    }

    pub fn input(&mut self, constraint: Normalized) -> TraceId {
        let id = self.fresh();
        self.lines.push(TraceLine::Input { id, constraint });
        id
    }

    pub fn step(&mut self, inputs: Vec<TraceId>, rule: Rule, output: Normalized) -> TraceId {
        let id = self.fresh();
        self.lines.push(TraceLine::Step { id, inputs, rule, output });
        id
    }

    pub fn learned(&mut self, id: TraceId) {
        self.lines.push(TraceLine::Learned { id });
    }

    pub fn refutation(&mut self, id: TraceId) {
        self.lines.push(TraceLine::Refutation { id });
    }

    pub fn comment(&mut self, text: impl Into<String>) {
        self.lines.push(TraceLine::Comment { text: text.into() });
    }

    pub fn is_refutation(&self) -> bool {
        self.lines.iter().any(|l| matches!(l, TraceLine::Refutation { .. }))
    }

    pub fn num_steps(&self) -> usize {
        self.lines.iter().filter(|l| matches!(l, TraceLine::Step { .. })).count()
    }

    pub fn write_to(&self, mut out: impl Write) -> io::Result<()> {
        let mut buf = String::new();
        for line in &self.lines {
            buf.clear();
            writeln!(buf, "{line}").expect("write to String");
            out.write_all(buf.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for line in &self.lines {
            writeln!(s, "{line}").expect("write to String");
        }
        s
    }

    pub fn parse(text: &str) -> Result<DerivationTrace, TraceParseError> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl BufRead) -> Result<DerivationTrace, TraceParseError> {
        let mut trace = DerivationTrace::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| TraceParseError { line: n + 1, message: e.to_string() })?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(text) = line.strip_prefix('c') {
                trace.lines.push(TraceLine::Comment { text: text.trim_start().to_string() });
                continue;
            }
            let parsed = parse_line(line).map_err(|message| TraceParseError { line: n + 1, message })?;
            trace.next_id = trace.next_id.max(parsed.id() + 1);
            trace.lines.push(parsed);
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn parse_id(tok: Option<&str>) -> Result<TraceId, String> {
    let tok = tok.ok_or("missing id")?;
    tok.parse().map_err(|_| format!("bad id `{tok}`"))
}

fn parse_int(tok: Option<&str>) -> Result<Int, String> {
    let tok = tok.ok_or("missing integer")?;
    tok.parse().map_err(|_| format!("bad integer `{tok}`"))
}

fn parse_lit(tok: Option<&str>) -> Result<crate::Literal, String> {
    let tok = tok.ok_or("missing literal")?;
    parse_literal(tok).ok_or_else(|| format!("bad literal `{tok}`"))
}

fn parse_rule(name: &str, rest: &mut std::str::SplitWhitespace<'_>) -> Result<Rule, String> {
    let rule = match name {
        "cancel" => {
            let pivot = parse_lit(rest.next())?;
            if !pivot.is_positive() {
                return Err("cancel pivot must be a variable".into());
            }
            Rule::Cancel {
                pivot: pivot.var(),
                mu: parse_int(rest.next())?,
                nu: parse_int(rest.next())?,
            }
        }
        "weaken" => Rule::Weaken { lit: parse_lit(rest.next())? },
        "pweaken" => Rule::PartialWeaken {
            lit: parse_lit(rest.next())?,
            amount: parse_int(rest.next())?,
        },
        "saturate" => Rule::Saturate,
        "divide" => Rule::Divide { divisor: parse_int(rest.next())? },
        "multiply" => Rule::Multiply { factor: parse_int(rest.next())? },
        other => return Err(format!("unknown rule `{other}`")),
    };
    match rest.next() {
        Some(extra) => Err(format!("unexpected `{extra}` after rule")),
        None => Ok(rule),
    }
}

fn parse_line(line: &str) -> Result<TraceLine, String> {
    let (kind, rest) = line.split_once(' ').ok_or("truncated line")?;
    match kind {
        "i" => {
            let (id, c) = rest.split_once(' ').ok_or("truncated input line")?;
            Ok(TraceLine::Input {
                id: parse_id(Some(id))?,
                constraint: c.parse().map_err(|e| format!("{e}"))?,
            })
        }
        "s" => {
            let (head, output) = rest.split_once(" : ").ok_or("missing ` : ` before output")?;
            let mut toks = head.split_whitespace();
            let id = parse_id(toks.next())?;
            let mut inputs = Vec::new();
            let name = loop {
                let tok = toks.next().ok_or("missing rule")?;
                match tok.parse::<TraceId>() {
                    Ok(i) => inputs.push(i),
                    Err(_) => break tok,
                }
            };
            let rule = parse_rule(name, &mut toks)?;
            Ok(TraceLine::Step {
                id,
                inputs,
                rule,
                output: output.parse().map_err(|e| format!("{e}"))?,
            })
        }
        "l" => Ok(TraceLine::Learned { id: parse_id(Some(rest.trim()))? }),
        "u" => Ok(TraceLine::Refutation { id: parse_id(Some(rest.trim()))? }),
        other => Err(format!("unknown line kind `{other}`")),
    }
}

/// First line of a trace that fails to check (0-based index into `lines`).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace entry {index}: {message}")]
pub struct TraceFailure {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceSummary {
    pub inputs: usize,
    pub steps: usize,
    pub learned: usize,
    pub refuted: bool,
}

/// Replays every step of `trace` against `instance`. Inputs must be
/// constraints of the instance, every step must reproduce its output bit for
/// bit from earlier ids, and a refutation must name a derived `FALSE`.
pub fn verify_trace(instance: &ParsedInstance, trace: &DerivationTrace) -> Result<TraceSummary, TraceFailure> {
    let known: HashSet<&Constraint> = instance.constraints.iter().collect();
    let mut outputs: HashMap<TraceId, &Normalized> = HashMap::new();
    let mut last_id = 0;
    let mut summary = TraceSummary::default();
    for (index, line) in trace.lines.iter().enumerate() {
        if let TraceLine::Comment { .. } = line {
            continue;
        }
        let fail = |message: String| TraceFailure { index, message };
        let id = line.id();
        match line {
            TraceLine::Input { constraint, .. } | TraceLine::Step { output: constraint, .. } => {
                if id <= last_id {
                    return Err(fail(format!("id {id} is not above the previous id {last_id}")));
                }
                last_id = id;
                outputs.insert(id, constraint);
            }
            TraceLine::Comment { .. } => {}
            TraceLine::Learned { .. } | TraceLine::Refutation { .. } => {
                if !outputs.contains_key(&id) {
                    return Err(fail(format!("id {id} was never derived")));
                }
            }
        }
        match line {
            TraceLine::Input { constraint, .. } => {
                let ok = match constraint {
                    Normalized::Constraint(c) => known.contains(c),
                    Normalized::False => instance.infeasible,
                    Normalized::True => false,
                };
                if !ok {
                    return Err(fail(format!("input {id} `{constraint}` is not in the instance")));
                }
                summary.inputs += 1;
            }
            TraceLine::Step { inputs, rule, output, .. } => {
                let mut ins = Vec::with_capacity(inputs.len());
                for i in inputs {
                    match outputs.get(i) {
                        Some(Normalized::Constraint(c)) if *i < id => ins.push(c),
                        Some(other) if *i < id => {
                            return Err(fail(format!("input {i} is `{other}`, not a constraint")))
                        }
                        _ => return Err(fail(format!("input {i} is not an earlier id"))),
                    }
                }
                match rule.apply(&ins) {
                    Ok(out) if out == *output => {}
                    Ok(out) => {
                        return Err(fail(format!("{rule} yields `{out}`, trace claims `{output}`")))
                    }
                    Err(e) => return Err(fail(format!("{rule} does not apply: {e}"))),
                }
                summary.steps += 1;
            }
            TraceLine::Learned { .. } => {
                if outputs[&id].constraint().is_none() {
                    return Err(fail(format!("learned id {id} is not a constraint")));
                }
                summary.learned += 1;
            }
            TraceLine::Refutation { .. } => {
                if !outputs[&id].is_false() {
                    return Err(fail(format!("refutation id {id} is `{}`, not FALSE", outputs[&id])));
                }
                summary.refuted = true;
            }
            TraceLine::Comment { .. } => {}
        }
    }
    Ok(summary)
}
