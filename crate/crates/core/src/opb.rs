//! Reading and writing the OPB format of the pseudo-Boolean competitions,
//! restricted to linear decision instances, plus the `s`/`v` solution lines.

use std::fmt::Write as _;
use std::io::{self, Read, Write};

use crate::constraint::{normalize, Constraint, Normalized, Relation};
use crate::int::Int;
use crate::lit::{Literal, Var};

/// A decision instance after normalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedInstance {
    pub name: String,
    /// From the `#variable=` header, or the largest index used if larger.
    pub declared_vars: usize,
    /// From the `#constraint=` header; may be smaller than `constraints.len()`
    /// because equalities split in two.
    pub declared_constraints: usize,
    /// Normalized constraints; tautologies are dropped.
    pub constraints: Vec<Constraint>,
    /// Some input constraint normalized to the FALSE marker.
    pub infeasible: bool,
}

impl ParsedInstance {
    pub fn num_vars(&self) -> usize {
        let used = self
            .constraints
            .iter()
            .flat_map(|c| c.vars())
            .map(|v| v.index() as usize)
            .max()
            .unwrap_or(0);
        used.max(self.declared_vars)
    }

    /// True iff `model` (indexed by variable slot) satisfies every constraint.
    pub fn is_model(&self, model: &[bool]) -> bool {
        !self.infeasible
            && self.constraints.iter().all(|c| {
                c.is_satisfied_by(|l| {
                    model.get(l.var().slot()).copied().unwrap_or(false) == l.is_positive()
                })
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum OpbError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Drop `min:` lines with a warning instead of rejecting the file.
    pub ignore_objective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(Int),
    Lit(Literal),
    Rel(Relation),
    Semi,
    Objective,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn lex_line(text: &str, line: usize, out: &mut Vec<Spanned>) -> Result<(), ParseError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let column = i + 1;
        let c = bytes[i];
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, column });
        match c {
            b' ' | b'\t' => i += 1,
            b';' => {
                push(out, Tok::Semi);
                i += 1;
            }
            b'>' | b'<' => {
                if bytes.get(i + 1) != Some(&b'=') {
                    return Err(err(line, column, "expected `>=` or `<=`"));
                }
                push(out, Tok::Rel(if c == b'>' { Relation::Ge } else { Relation::Le }));
                i += 2;
            }
            b'=' => {
                push(out, Tok::Rel(Relation::Eq));
                i += 1;
            }
            b'+' | b'-' | b'0'..=b'9' => {
                let negative = c == b'-';
                if c == b'+' || c == b'-' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] == b' ' || bytes[i] == b'\t') {
                        i += 1;
                    }
                }
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits == i {
                    return Err(err(line, column, "expected digits after sign"));
                }
                let v: Int = text[digits..i]
                    .parse()
                    .map_err(|_| err(line, column, "bad integer"))?;
                push(out, Tok::Int(if negative { -v } else { v }));
            }
            b'~' | b'x' => {
                let start = i;
                i += 1;
                if c == b'~' {
                    if bytes.get(i) != Some(&b'x') {
                        return Err(err(line, column, "expected variable after `~`"));
                    }
                    i += 1;
                }
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let idx: u32 = text[digits..i]
                    .parse()
                    .ok()
                    .filter(|v| *v >= 1)
                    .ok_or_else(|| err(line, column, format!("bad variable `{}`", &text[start..i])))?;
                push(out, Tok::Lit(Literal::new(Var::new(idx), c == b'x')));
            }
            b'm' if text[i..].starts_with("min:") => {
                push(out, Tok::Objective);
                i += 4;
            }
            _ => {
                return Err(err(line, column, format!("unexpected character `{}`", c as char)));
            }
        }
    }
    Ok(())
}

fn parse_header(line: &str, inst: &mut ParsedInstance) {
    let mut words = line.trim_start_matches('*').split_whitespace();
    while let Some(w) = words.next() {
        let value = |words: &mut std::str::SplitWhitespace| words.next().and_then(|v| v.parse().ok());
        match w {
            "#variable=" => inst.declared_vars = value(&mut words).unwrap_or(0),
            "#constraint=" => inst.declared_constraints = value(&mut words).unwrap_or(0),
            _ => {}
        }
    }
}

/// Parses an OPB decision instance. Warnings (dropped objectives) are
/// returned alongside the instance.
pub fn parse_opb_with(
    text: &str,
    options: ParseOptions,
) -> Result<(ParsedInstance, Vec<String>), ParseError> {
    let mut inst = ParsedInstance::default();
    let mut toks = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with('*') {
            if n == 0 || line.contains("#variable=") {
                parse_header(line, &mut inst);
            }
            continue;
        }
        lex_line(line, n + 1, &mut toks)?;
    }

    let mut warnings = Vec::new();
    let mut it = toks.into_iter().peekable();
    while let Some(first) = it.next() {
        if first.tok == Tok::Objective {
            if !options.ignore_objective {
                return Err(err(
                    first.line,
                    first.column,
                    "objective functions are not supported (decision instances only)",
                ));
            }
            warnings.push(format!("line {}: objective dropped", first.line));
            for t in it.by_ref() {
                if t.tok == Tok::Semi {
                    break;
                }
            }
            continue;
        }
        let mut terms: Vec<(Int, Literal)> = Vec::new();
        let mut cur = Some(first);
        let relation = loop {
            let t = match cur.take().or_else(|| it.next()) {
                Some(t) => t,
                None => return Err(err(text.lines().count().max(1), 1, "unexpected end of input")),
            };
            match t.tok {
                Tok::Int(w) => match it.next() {
                    Some(Spanned { tok: Tok::Lit(l), .. }) => {
                        if let Some(Spanned { tok: Tok::Lit(_), line, column }) = it.peek() {
                            return Err(err(*line, *column, "nonlinear term (product of variables) not supported"));
                        }
                        terms.push((w, l));
                    }
                    Some(o) => return Err(err(o.line, o.column, "expected a variable after the coefficient")),
                    None => return Err(err(t.line, t.column, "unexpected end of input")),
                },
                Tok::Rel(r) => break r,
                Tok::Lit(_) => return Err(err(t.line, t.column, "missing coefficient before variable")),
                Tok::Semi => return Err(err(t.line, t.column, "missing relational operator")),
                Tok::Objective => return Err(err(t.line, t.column, "unexpected `min:`")),
            }
        };
        let rhs = match it.next() {
            Some(Spanned { tok: Tok::Int(v), .. }) => v,
            Some(o) => return Err(err(o.line, o.column, "expected an integer right-hand side")),
            None => return Err(err(text.lines().count().max(1), 1, "unexpected end of input")),
        };
        match it.next() {
            Some(Spanned { tok: Tok::Semi, .. }) => {}
            Some(o) => return Err(err(o.line, o.column, "expected `;`")),
            None => return Err(err(text.lines().count().max(1), 1, "missing `;`")),
        }
        for n in normalize(&terms, relation, &rhs) {
            match n {
                Normalized::True => {}
                Normalized::False => inst.infeasible = true,
                Normalized::Constraint(c) => inst.constraints.push(c),
            }
        }
    }
    inst.declared_vars = inst.num_vars();
    Ok((inst, warnings))
}

pub fn parse_opb(text: &str) -> Result<ParsedInstance, ParseError> {
    parse_opb_with(text, ParseOptions::default()).map(|(i, _)| i)
}

pub fn read_opb(mut reader: impl Read, options: ParseOptions) -> Result<(ParsedInstance, Vec<String>), OpbError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Ok(parse_opb_with(&text, options)?)
}

/// One OPB line for a normalized constraint, using only positive `xK` tokens
/// (`w·~x` is written as `-w·x` with the right-hand side lowered by `w`).
pub fn constraint_to_opb(c: &Constraint) -> String {
    let mut rhs = c.degree().clone();
    let mut line = String::new();
    for (l, w) in c.terms() {
        if l.is_positive() {
            let _ = write!(line, "+{w} {} ", l.var());
        } else {
            rhs -= w;
            let _ = write!(line, "-{w} {} ", l.var());
        }
    }
    let _ = write!(line, ">= {rhs} ;");
    line
}

pub fn write_opb(inst: &ParsedInstance, mut out: impl Write) -> io::Result<()> {
    let count = inst.constraints.len() + usize::from(inst.infeasible);
    writeln!(out, "* #variable= {} #constraint= {}", inst.num_vars(), count)?;
    if !inst.name.is_empty() {
        writeln!(out, "* {}", inst.name)?;
    }
    for c in &inst.constraints {
        writeln!(out, "{}", constraint_to_opb(c))?;
    }
    if inst.infeasible {
        writeln!(out, ">= 1 ;")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Unknown => "UNKNOWN",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SAT" => Ok(Status::Sat),
            "UNSAT" => Ok(Status::Unsat),
            "UNKNOWN" => Ok(Status::Unknown),
            _ => Err(format!("unknown status `{s}`")),
        }
    }
}

/// Competition output: `s ...` and, for SAT, one `v` line with every
/// variable of the model. No trailing newline.
pub fn format_solution(status: Status, model: Option<&[bool]>) -> String {
    match status {
        Status::Sat => {
            let mut s = String::from("s SATISFIABLE\nv");
            for (i, v) in model.unwrap_or(&[]).iter().enumerate() {
                let _ = write!(s, " {}x{}", if *v { "" } else { "-" }, i + 1);
            }
            s
        }
        Status::Unsat => "s UNSATISFIABLE".to_string(),
        Status::Unknown => "s UNKNOWN".to_string(),
    }
}
