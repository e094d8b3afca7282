//! Line-oriented model format.
//!
//! ```text
//! system <name>
//! clock <id>
//! int <id> <lo> <hi> <init>
//! chan <id> [broadcast]
//! process <name>
//! location <name> [initial] [accepting] [invariant: <conj>]
//! edge <src> -> <dst> [guard: <conj>] [sync: <chan>! | <chan>?] [do: <assignments>]
//! query reachable: <conj> || <conj> ...
//! ```
//!
//! `#` starts a comment. A conjunction is `&&`-separated atoms `id # c`
//! with `#` one of `< <= == >= >`, or the literal `true`.

use std::collections::HashSet;

use thiserror::Error;

use super::{
    Channel, Edge, IntAtom, IntUpdate, IntVar, Location, Network, Process, Query, StateAtom, Sync,
};
use crate::dbm::{ClockAtom, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown clock or variable `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("diagonal constraints are not supported")]
    DiagonalConstraint,
    #[error("invariants admit only upper bounds on clocks (x < c, x <= c)")]
    NonUpperInvariant,
    #[error("clock constants must be nonnegative, found {0}")]
    NegativeClockConstant(i64),
    #[error("clocks can only be reset to 0")]
    ClockAssignment,
    #[error("value {value} is outside the range of `{name}`")]
    IntOutOfRange { name: String, value: i64 },
    #[error("process `{0}` needs exactly one initial location")]
    Initial(String),
    #[error("the model declares no process")]
    NoProcess,
    #[error("`{0}` must appear inside a process")]
    OutsideProcess(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

const SYMBOLS: [&str; 17] = [
    "->", "&&", "||", "<=", ">=", "==", ":=", "<", ">", ":", ",", "!", "?", "+", "-", ".", "=",
];

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), column));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().map_err(|_| ParseError {
                line,
                column,
                kind: ParseErrorKind::Syntax(format!("integer `{s}` is too large")),
            })?;
            out.push((Tok::Int(v), column));
            continue;
        }
        for sym in SYMBOLS {
            let n = sym.len();
            if i + n <= chars.len() && chars[i..i + n].iter().copied().eq(sym.chars()) {
                out.push((Tok::Sym(sym), column));
                i += n;
                continue 'outer;
            }
        }
        return Err(ParseError {
            line,
            column,
            kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
        });
    }
    Ok(out)
}

/// Cursor over the tokens of one line.
struct Line<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'a> Line<'a> {
    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |t| t.1)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            kind,
        }
    }

    fn err_at(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{s}`")))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(x)) if x == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let column = self.column();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok((s, column)),
            _ => Err(self.err_at(column, ParseErrorKind::Syntax(format!("expected {what}")))),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_sym("-");
        let column = self.column();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
            _ => Err(self.err_at(column, ParseErrorKind::Syntax("expected an integer".into()))),
        }
    }

    fn relation(&mut self) -> Result<Relation, ParseError> {
        let column = self.column();
        let r = match self.bump() {
            Some(Tok::Sym("<")) => Relation::Lt,
            Some(Tok::Sym("<=")) => Relation::Le,
            Some(Tok::Sym("==")) => Relation::Eq,
            Some(Tok::Sym(">=")) => Relation::Ge,
            Some(Tok::Sym(">")) => Relation::Gt,
            _ => {
                return Err(self.err_at(
                    column,
                    ParseErrorKind::Syntax("expected a comparison".into()),
                ))
            }
        };
        Ok(r)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax("unexpected trailing input"))
        }
    }
}

/// Whether the next token starts a `keyword:` section.
fn at_section(l: &Line<'_>, keywords: &[&str]) -> bool {
    matches!(l.peek(), Some(Tok::Ident(w)) if keywords.contains(&w.as_str()))
        && matches!(l.toks.get(l.pos + 1), Some((Tok::Sym(":"), _)))
}

struct PendingEdge {
    line: usize,
    src: (String, usize),
    dst: (String, usize),
    edge: Edge,
}

struct Builder {
    net: Network,
    names: HashSet<String>,
    current: Option<(Process, Vec<PendingEdge>, usize)>,
}

enum Guard {
    Clock(ClockAtom),
    Int(IntAtom),
}

impl Builder {
    fn declare(&mut self, name: &str, l: &Line<'_>, column: usize) -> Result<(), ParseError> {
        if !self.names.insert(name.to_string()) {
            return Err(l.err_at(column, ParseErrorKind::Duplicate(name.to_string())));
        }
        Ok(())
    }

    fn int_var(&self, name: &str) -> Option<usize> {
        self.net.ints.iter().position(|v| v.name == name)
    }

    fn atom(&self, l: &mut Line<'_>) -> Result<Guard, ParseError> {
        let (name, column) = l.ident("a clock or variable")?;
        if l.eat_sym("-") && matches!(l.peek(), Some(Tok::Ident(_))) {
            return Err(l.err_at(column, ParseErrorKind::DiagonalConstraint));
        }
        let relation = l.relation()?;
        let constant = l.int()?;
        if let Some(clock) = self.net.clock_index(&name) {
            if constant < 0 {
                return Err(l.err_at(column, ParseErrorKind::NegativeClockConstant(constant)));
            }
            Ok(Guard::Clock(ClockAtom::new(clock, relation, constant)))
        } else if let Some(var) = self.int_var(&name) {
            Ok(Guard::Int(IntAtom {
                var,
                relation,
                constant,
            }))
        } else {
            Err(l.err_at(column, ParseErrorKind::UnknownIdentifier(name)))
        }
    }

    fn conj(&self, l: &mut Line<'_>, stop: &[&str]) -> Result<Vec<(Guard, usize)>, ParseError> {
        let mut out = Vec::new();
        if l.eat_word("true") {
            return Ok(out);
        }
        loop {
            let column = l.column();
            out.push((self.atom(l)?, column));
            if !l.eat_sym("&&") {
                break;
            }
        }
        if !l.at_end() && !at_section(l, stop) {
            return Err(l.syntax("expected `&&` or end of conjunction"));
        }
        Ok(out)
    }

    fn location(&mut self, l: &mut Line<'_>) -> Result<(), ParseError> {
        let (name, column) = l.ident("a location name")?;
        let mut loc = Location {
            name,
            accepting: false,
            invariant: Vec::new(),
        };
        let mut initial = false;
        loop {
            if l.eat_word("initial") {
                initial = true;
            } else if l.eat_word("accepting") {
                loc.accepting = true;
            } else if at_section(l, &["invariant"]) {
                l.pos += 2;
                for (g, col) in self.conj(l, &[])? {
                    match g {
                        Guard::Clock(a) if matches!(a.relation, Relation::Lt | Relation::Le) => {
                            loc.invariant.push(a)
                        }
                        _ => return Err(l.err_at(col, ParseErrorKind::NonUpperInvariant)),
                    }
                }
            } else {
                break;
            }
        }
        l.finish()?;
        let (proc_, _, _) = self
            .current
            .as_mut()
            .ok_or_else(|| l.err_at(1, ParseErrorKind::OutsideProcess("location".into())))?;
        if proc_.location_index(&loc.name).is_some() {
            return Err(l.err_at(column, ParseErrorKind::Duplicate(loc.name)));
        }
        if initial {
            if proc_.initial != usize::MAX {
                return Err(l.err_at(column, ParseErrorKind::Initial(proc_.name.clone())));
            }
            proc_.initial = proc_.locations.len();
        }
        proc_.locations.push(loc);
        Ok(())
    }

    fn edge(&mut self, l: &mut Line<'_>) -> Result<(), ParseError> {
        if self.current.is_none() {
            return Err(l.err_at(1, ParseErrorKind::OutsideProcess("edge".into())));
        }
        let src = l.ident("a source location")?;
        l.expect_sym("->")?;
        let dst = l.ident("a target location")?;
        let mut edge = Edge {
            source: 0,
            target: 0,
            clock_guard: Vec::new(),
            int_guard: Vec::new(),
            sync: None,
            resets: Vec::new(),
            updates: Vec::new(),
        };
        let sections = ["guard", "sync", "do"];
        let mut seen = HashSet::new();
        while !l.at_end() {
            if !at_section(l, &sections) {
                return Err(l.syntax("expected `guard:`, `sync:` or `do:`"));
            }
            let (word, column) = l.ident("a section")?;
            l.expect_sym(":")?;
            if !seen.insert(word.clone()) {
                return Err(l.err_at(
                    column,
                    ParseErrorKind::Syntax(format!("section `{word}` repeated")),
                ));
            }
            match word.as_str() {
                "guard" => {
                    for (g, _) in self.conj(l, &sections)? {
                        match g {
                            Guard::Clock(a) => edge.clock_guard.push(a),
                            Guard::Int(a) => edge.int_guard.push(a),
                        }
                    }
                }
                "sync" => {
                    let (name, col) = l.ident("a channel")?;
                    let ch = self
                        .net
                        .channels
                        .iter()
                        .position(|c| c.name == name)
                        .ok_or_else(|| l.err_at(col, ParseErrorKind::UnknownChannel(name)))?;
                    edge.sync = Some(if l.eat_sym("!") {
                        Sync::Send(ch)
                    } else if l.eat_sym("?") {
                        Sync::Receive(ch)
                    } else {
                        return Err(l.syntax("expected `!` or `?`"));
                    });
                }
                _ => self.assignments(l, &mut edge, &sections)?,
            }
        }
        let (_, pending, _) = self.current.as_mut().expect("checked above");
        pending.push(PendingEdge {
            line: l.line,
            src,
            dst,
            edge,
        });
        Ok(())
    }

    fn assignments(
        &self,
        l: &mut Line<'_>,
        edge: &mut Edge,
        stop: &[&str],
    ) -> Result<(), ParseError> {
        loop {
            let (name, column) = l.ident("a clock or variable")?;
            l.expect_sym(":=")?;
            if let Some(clock) = self.net.clock_index(&name) {
                let v = l.int()?;
                if v != 0 {
                    return Err(l.err_at(column, ParseErrorKind::ClockAssignment));
                }
                if !edge.resets.contains(&clock) {
                    edge.resets.push(clock);
                }
            } else if let Some(var) = self.int_var(&name) {
                let decl = &self.net.ints[var];
                if matches!(l.peek(), Some(Tok::Ident(_))) {
                    let (other, col) = l.ident("a variable")?;
                    if other != name {
                        return Err(
                            l.err_at(col, ParseErrorKind::Syntax(format!("expected `{name}`")))
                        );
                    }
                    let sign = if l.eat_sym("+") {
                        1
                    } else if l.eat_sym("-") {
                        -1
                    } else {
                        return Err(l.syntax("expected `+` or `-`"));
                    };
                    let c = l.int()?;
                    edge.updates.push(IntUpdate::Add {
                        var,
                        delta: sign * c,
                    });
                } else {
                    let value = l.int()?;
                    if value < decl.lo || value > decl.hi {
                        return Err(l.err_at(
                            column,
                            ParseErrorKind::IntOutOfRange {
                                name: name.clone(),
                                value,
                            },
                        ));
                    }
                    edge.updates.push(IntUpdate::Set { var, value });
                }
            } else {
                return Err(l.err_at(column, ParseErrorKind::UnknownIdentifier(name)));
            }
            if !l.eat_sym(",") {
                break;
            }
        }
        if !l.at_end() && !at_section(l, stop) {
            return Err(l.syntax("expected `,` or end of assignments"));
        }
        Ok(())
    }

    fn close_process(&mut self) -> Result<(), ParseError> {
        let Some((mut p, pending, line)) = self.current.take() else {
            return Ok(());
        };
        if p.initial == usize::MAX {
            return Err(ParseError {
                line,
                column: 1,
                kind: ParseErrorKind::Initial(p.name.clone()),
            });
        }
        for pe in pending {
            let resolve = |(name, column): &(String, usize)| {
                p.location_index(name).ok_or_else(|| ParseError {
                    line: pe.line,
                    column: *column,
                    kind: ParseErrorKind::UnknownLocation(name.clone()),
                })
            };
            let mut e = pe.edge;
            e.source = resolve(&pe.src)?;
            e.target = resolve(&pe.dst)?;
            p.edges.push(e);
        }
        self.net.processes.push(p);
        Ok(())
    }

    fn query(&self, l: &mut Line<'_>) -> Result<Query, ParseError> {
        if !l.eat_word("reachable") {
            return Err(l.syntax("expected `reachable`"));
        }
        l.expect_sym(":")?;
        let mut disjuncts = Vec::new();
        loop {
            let mut conj = Vec::new();
            loop {
                conj.push(self.state_atom(l)?);
                if !l.eat_sym("&&") {
                    break;
                }
            }
            disjuncts.push(conj);
            if !l.eat_sym("||") {
                break;
            }
        }
        l.finish()?;
        Ok(Query { disjuncts })
    }

    fn state_atom(&self, l: &mut Line<'_>) -> Result<StateAtom, ParseError> {
        let (name, column) = l.ident("a process or variable")?;
        if l.eat_sym(".") {
            let process = self
                .net
                .process_index(&name)
                .ok_or_else(|| l.err_at(column, ParseErrorKind::UnknownProcess(name.clone())))?;
            let (loc, col) = l.ident("a location")?;
            let location = self.net.processes[process]
                .location_index(&loc)
                .ok_or_else(|| l.err_at(col, ParseErrorKind::UnknownLocation(loc)))?;
            return Ok(StateAtom::At { process, location });
        }
        let var = self
            .int_var(&name)
            .ok_or_else(|| l.err_at(column, ParseErrorKind::UnknownIdentifier(name)))?;
        let relation = l.relation()?;
        let constant = l.int()?;
        Ok(StateAtom::Int(IntAtom {
            var,
            relation,
            constant,
        }))
    }
}

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<Network, ParseError> {
    let mut b = Builder {
        net: Network {
            name: String::new(),
            clocks: Vec::new(),
            ints: Vec::new(),
            channels: Vec::new(),
            processes: Vec::new(),
            query: None,
        },
        names: HashSet::new(),
        current: None,
    };
    let mut have_system = false;
    let mut query_line = None;
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokenize(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut l = Line {
            toks: &toks,
            pos: 0,
            line,
            end_column: raw.chars().count() + 1,
        };
        let (kw, kw_col) = l.ident("a declaration keyword")?;
        if !have_system && kw != "system" {
            return Err(l.err_at(
                kw_col,
                ParseErrorKind::Syntax("the model must start with `system <name>`".into()),
            ));
        }
        if query_line.is_some() {
            return Err(l.err_at(
                kw_col,
                ParseErrorKind::Syntax("nothing may follow the query".into()),
            ));
        }
        match kw.as_str() {
            "system" => {
                if have_system {
                    return Err(l.err_at(kw_col, ParseErrorKind::Duplicate("system".into())));
                }
                b.net.name = l.ident("a system name")?.0;
                l.finish()?;
                have_system = true;
            }
            "clock" | "int" | "chan" if b.current.is_some() || !b.net.processes.is_empty() => {
                return Err(l.err_at(
                    kw_col,
                    ParseErrorKind::Syntax(format!("`{kw}` must precede all processes")),
                ));
            }
            "clock" => loop {
                let (name, column) = l.ident("a clock name")?;
                b.declare(&name, &l, column)?;
                b.net.clocks.push(name);
                if !l.eat_sym(",") {
                    l.finish()?;
                    break;
                }
            },
            "int" => {
                let (name, column) = l.ident("a variable name")?;
                b.declare(&name, &l, column)?;
                let lo = l.int()?;
                let hi = l.int()?;
                let init_col = l.column();
                let init = l.int()?;
                l.finish()?;
                if lo > hi {
                    return Err(l.err_at(
                        column,
                        ParseErrorKind::Syntax(format!("empty range {lo}..{hi}")),
                    ));
                }
                if init < lo || init > hi {
                    return Err(l.err_at(
                        init_col,
                        ParseErrorKind::IntOutOfRange { name, value: init },
                    ));
                }
                b.net.ints.push(IntVar { name, lo, hi, init });
            }
            "chan" => {
                let (name, column) = l.ident("a channel name")?;
                b.declare(&name, &l, column)?;
                let broadcast = l.eat_word("broadcast");
                l.finish()?;
                b.net.channels.push(Channel { name, broadcast });
            }
            "process" => {
                b.close_process()?;
                let (name, column) = l.ident("a process name")?;
                if b.net.process_index(&name).is_some() {
                    return Err(l.err_at(column, ParseErrorKind::Duplicate(name)));
                }
                l.finish()?;
                let p = Process {
                    name,
                    locations: Vec::new(),
                    initial: usize::MAX,
                    edges: Vec::new(),
                };
                b.current = Some((p, Vec::new(), line));
            }
            "location" => b.location(&mut l)?,
            "edge" => b.edge(&mut l)?,
            "query" => {
                b.close_process()?;
                b.net.query = Some(b.query(&mut l)?);
                query_line = Some(line);
            }
            other => {
                return Err(l.err_at(
                    kw_col,
                    ParseErrorKind::Syntax(format!("unknown declaration `{other}`")),
                ));
            }
        }
    }
    if !have_system {
        return Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Syntax("empty model".into()),
        });
    }
    b.close_process()?;
    if b.net.processes.is_empty() {
        return Err(ParseError {
            line: last_line,
            column: 1,
            kind: ParseErrorKind::NoProcess,
        });
    }
    Ok(b.net)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
system fig1
clock x
clock y
process A
location q0 initial
location q1
location q2
location q3 accepting
edge q0 -> q1 guard: x <= 5
edge q1 -> q2
edge q2 -> q3 guard: x <= 14 do: y := 0
edge q2 -> q1 guard: y >= 5 do: x := 0
edge q0 -> q3 guard: y >= 1000000
";

    #[test]
    fn parses_fig1() {
        let net = parse_model(FIG1).unwrap();
        assert_eq!(net.processes.len(), 1);
        let p = &net.processes[0];
        assert_eq!(p.locations.len(), 4);
        assert_eq!(p.edges.len(), 5);
        assert_eq!(p.edges[3].resets, vec![1]);
        assert_eq!(
            p.edges[3].clock_guard,
            vec![ClockAtom::new(2, Relation::Ge, 5)]
        );
        assert!(p.locations[3].accepting);
    }

    #[test]
    fn empty_file_is_a_syntax_error() {
        let err = parse_model("").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        let err = parse_model("# only a comment\n\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn rejects_diagonal_guard() {
        let text = "system s\nclock x\nclock y\nprocess P\nlocation a initial\nedge a -> a guard: x - y < 1\n";
        let err = parse_model(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DiagonalConstraint);
        assert_eq!((err.line, err.column), (6, 20));
    }

    #[test]
    fn distinct_semantic_errors() {
        let base = "system s\nclock x\nint v 0 3 0\nchan c\nprocess P\n";
        let cases = [
            (
                "location a initial\nedge a -> a guard: z < 1\n",
                ParseErrorKind::UnknownIdentifier("z".into()),
            ),
            (
                "location a initial invariant: x > 1\n",
                ParseErrorKind::NonUpperInvariant,
            ),
            (
                "location a initial\nedge a -> a do: v := 4\n",
                ParseErrorKind::IntOutOfRange {
                    name: "v".into(),
                    value: 4,
                },
            ),
            (
                "location a initial\nedge a -> b\n",
                ParseErrorKind::UnknownLocation("b".into()),
            ),
            (
                "location a initial\nedge a -> a sync: d!\n",
                ParseErrorKind::UnknownChannel("d".into()),
            ),
            (
                "location a initial\nedge a -> a do: x := 2\n",
                ParseErrorKind::ClockAssignment,
            ),
            ("location a\n", ParseErrorKind::Initial("P".into())),
        ];
        for (tail, kind) in cases {
            let err = parse_model(&format!("{base}{tail}")).unwrap_err();
            assert_eq!(err.kind, kind, "{tail}");
        }
    }

    #[test]
    fn query_and_updates() {
        let text = "\
system s
clock x
int n 0 10 0
chan go broadcast
process P
location a initial invariant: x <= 3
location b
edge a -> b guard: x >= 1 && n < 10 sync: go! do: x := 0, n := n + 1
process Q
location a initial
edge a -> a sync: go?
query reachable: P.b && n == 1 || Q.a && n > 5
";
        let net = parse_model(text).unwrap();
        let e = &net.processes[0].edges[0];
        assert_eq!(e.int_guard.len(), 1);
        assert_eq!(e.updates, vec![IntUpdate::Add { var: 0, delta: 1 }]);
        assert_eq!(e.sync, Some(Sync::Send(0)));
        assert!(net.channels[0].broadcast);
        assert_eq!(net.query.as_ref().unwrap().disjuncts.len(), 2);
    }
}
