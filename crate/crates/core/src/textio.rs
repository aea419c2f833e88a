//! The `.futs` system format and the formula syntax.
//!
//! ```text
//! futs
//! labels A0 = { a, b }
//! monoids M0 = [ bool-or, rat-plus ]
//! states { s0, s1, s2, s3 }
//! trans 0 s0 a -> {{s0: 1/2, s1: 1/2}: tt}
//! ```
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_']*`; any other state id is written
//! between backticks. `#` starts a comment that runs to the end of the line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_bigint::BigUint;

use crate::logic::Formula;
use crate::monoid::{rat_from_parts, Label, MonoidDesc, Weight};
use crate::system::{Component, Futs, Signature};
use crate::weightfn::{StateId, WeightTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A message anchored at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    fn error(pos: Pos, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line: pos.line,
            column: pos.column,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

pub(crate) fn is_bare_id(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) fn write_id(f: &mut impl fmt::Write, id: &str) -> fmt::Result {
    if is_bare_id(id) {
        f.write_str(id)
    } else {
        write!(f, "`{id}`")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Num(BigUint),
    Arrow,
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut k, mut line, mut column) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[k] == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            k += 1;
        }};
    }
    while k < chars.len() {
        let c = chars[k];
        let pos = Pos { line, column };
        if c.is_whitespace() {
            bump!();
        } else if c == '#' {
            while k < chars.len() && chars[k] != '\n' {
                bump!();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while k < chars.len() {
                let d = chars[k];
                let hyphen = d == '-' && chars.get(k + 1).is_some_and(|e| e.is_ascii_alphabetic());
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' || hyphen {
                    s.push(d);
                    bump!();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while k < chars.len() && chars[k].is_ascii_digit() {
                s.push(chars[k]);
                bump!();
            }
            out.push((Tok::Num(s.parse().expect("digits")), pos));
        } else if c == '`' {
            bump!();
            let mut s = String::new();
            while k < chars.len() && chars[k] != '`' {
                s.push(chars[k]);
                bump!();
            }
            if k == chars.len() {
                return Err(Diagnostic::error(pos, "unterminated quoted identifier"));
            }
            bump!();
            if s.is_empty() {
                return Err(Diagnostic::error(pos, "empty quoted identifier"));
            }
            out.push((Tok::Quoted(s), pos));
        } else if c == '-' && chars.get(k + 1) == Some(&'>') {
            bump!();
            bump!();
            out.push((Tok::Arrow, pos));
        } else if "{}[](),:=<>|&/".contains(c) {
            bump!();
            out.push((Tok::Sym(c), pos));
        } else {
            return Err(Diagnostic::error(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn new(text: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::error(self.pos(), message))
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected `{c}`, found {}", self.peek()))
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            t => self.fail(format!("expected `{kw}`, found {t}")),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.next() {
            (Tok::Ident(s), p) | (Tok::Quoted(s), p) => Ok((s, p)),
            (t, p) => Err(Diagnostic::error(p, format!("expected {what}, found {t}"))),
        }
    }

    fn number(&mut self, what: &str) -> PResult<(BigUint, Pos)> {
        match self.next() {
            (Tok::Num(n), p) => Ok((n, p)),
            (t, p) => Err(Diagnostic::error(p, format!("expected {what}, found {t}"))),
        }
    }

    fn index(&mut self, what: &str) -> PResult<(usize, Pos)> {
        let (n, p) = self.number(what)?;
        let k = usize::try_from(n).map_err(|_| Diagnostic::error(p, format!("{what} is too large")))?;
        Ok((k, p))
    }

    /// `{ id, id, ... }` with duplicates rejected.
    fn id_set(&mut self, what: &str) -> PResult<Vec<(String, Pos)>> {
        self.expect('{')?;
        let mut out: Vec<(String, Pos)> = Vec::new();
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            let (id, p) = self.ident(what)?;
            if out.iter().any(|(x, _)| *x == id) {
                return Err(Diagnostic::error(p, format!("duplicate {what} `{id}`")));
            }
            out.push((id, p));
            if self.eat('}') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn monoid(&mut self) -> PResult<MonoidDesc> {
        let (name, p) = self.ident("a monoid")?;
        match name.as_str() {
            "bool-or" => Ok(MonoidDesc::BoolOr),
            "nat-plus" => Ok(MonoidDesc::NatPlus),
            "nat-max" => Ok(MonoidDesc::NatMax),
            "rat-plus" => Ok(MonoidDesc::RatPlus),
            "prod" => {
                self.expect('(')?;
                let mut factors = vec![self.monoid()?];
                while self.eat(',') {
                    factors.push(self.monoid()?);
                }
                self.expect(')')?;
                Ok(MonoidDesc::Product(factors))
            }
            "pow" => {
                self.expect('(')?;
                let at = self.pos();
                let labels = self.id_set("label")?;
                if labels.is_empty() {
                    return Err(Diagnostic::error(at, "a power monoid needs a non-empty label set"));
                }
                self.expect(',')?;
                let inner = self.monoid()?;
                self.expect(')')?;
                Ok(MonoidDesc::Power(
                    labels.into_iter().map(|(l, _)| l).collect(),
                    Box::new(inner),
                ))
            }
            other => Err(Diagnostic::error(p, format!("unknown monoid `{other}`"))),
        }
    }

    fn weight(&mut self, m: &MonoidDesc) -> PResult<Weight> {
        let at = self.pos();
        let w = match m {
            MonoidDesc::BoolOr => match self.next() {
                (Tok::Ident(s), _) if s == "tt" => Weight::Bool(true),
                (Tok::Ident(s), _) if s == "ff" => Weight::Bool(false),
                (t, p) => return Err(Diagnostic::error(p, format!("expected `tt` or `ff`, found {t}"))),
            },
            MonoidDesc::NatPlus | MonoidDesc::NatMax => Weight::Nat(self.number("a natural number")?.0),
            MonoidDesc::RatPlus => {
                let (num, _) = self.number("a rational")?;
                let den = if self.eat('/') {
                    self.number("a denominator")?.0
                } else {
                    BigUint::from(1u32)
                };
                match rat_from_parts(num, den) {
                    Some(q) => Weight::Rat(q),
                    None => return Err(Diagnostic::error(at, "zero denominator")),
                }
            }
            MonoidDesc::Product(factors) => {
                self.expect('(')?;
                let mut ws = Vec::with_capacity(factors.len());
                for (k, f) in factors.iter().enumerate() {
                    if k > 0 {
                        self.expect(',')?;
                    }
                    ws.push(self.weight(f)?);
                }
                if *self.peek() == Tok::Sym(',') {
                    return self.fail(format!("expected a {}-tuple", factors.len()));
                }
                self.expect(')')?;
                Weight::Tuple(ws)
            }
            MonoidDesc::Power(labels, inner) => {
                self.expect('{')?;
                let mut map = BTreeMap::new();
                if !self.eat('}') {
                    loop {
                        let (l, p) = self.ident("a label")?;
                        if !labels.contains(&l) {
                            return Err(Diagnostic::error(p, format!("label `{l}` is not in {m}")));
                        }
                        self.expect(':')?;
                        let w = self.weight(inner)?;
                        if map.contains_key(&l) {
                            return Err(Diagnostic::error(p, format!("duplicate label `{l}`")));
                        }
                        if !w.is_zero() {
                            map.insert(l, w);
                        }
                        if self.eat('}') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Weight::Map(map)
            }
        };
        Ok(w)
    }

    /// A term of depth `monoids.len()`; leaves must be in `states`.
    fn term(&mut self, monoids: &[MonoidDesc], states: &BTreeSet<StateId>) -> PResult<WeightTerm> {
        let Some((m, rest)) = monoids.split_first() else {
            let (id, p) = self.ident("a state")?;
            if !states.contains(&id) {
                return Err(Diagnostic::error(p, format!("unknown state `{id}`")));
            }
            return Ok(WeightTerm::Leaf(id));
        };
        if !matches!(self.peek(), Tok::Sym('{')) {
            return self.fail(format!(
                "depth mismatch: expected a weight function of depth {}, found {}",
                monoids.len(),
                self.peek()
            ));
        }
        self.next();
        let mut entries: Vec<(WeightTerm, Weight)> = Vec::new();
        if !self.eat('}') {
            loop {
                let at = self.pos();
                let key = self.term(rest, states)?;
                if entries.iter().any(|(k, _)| *k == key) {
                    return Err(Diagnostic::error(at, "duplicate key"));
                }
                self.expect(':')?;
                let w = self.weight(m)?;
                entries.push((key, w));
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        WeightTerm::node(monoids.len(), m.clone(), entries).map_err(|e| Diagnostic::error(self.pos(), e.to_string()))
    }
}

fn indexed(name: &str, prefix: char, p: Pos) -> PResult<usize> {
    name.strip_prefix(prefix)
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Diagnostic::error(p, format!("expected `{prefix}<index>`, found `{name}`")))
}

/// Parses and validates a system file.
pub fn parse_system(text: &str) -> Result<Futs, Vec<Diagnostic>> {
    parse_system_inner(text)
        .map_err(|d| vec![d])
        .and_then(|(s, positions)| match s.validate() {
            Ok(()) => Ok(s),
            Err(issues) => Err(issues
                .into_iter()
                .map(|issue| {
                    let key = (issue.component, issue.state.clone(), issue.label.clone());
                    let pos = positions.get(&key).copied().unwrap_or(Pos { line: 1, column: 1 });
                    Diagnostic::error(pos, issue.to_string())
                })
                .collect()),
        })
}

type TransPositions = BTreeMap<(Option<usize>, Option<StateId>, Option<Label>), Pos>;

fn parse_system_inner(text: &str) -> PResult<(Futs, TransPositions)> {
    let mut p = Parser::new(text)?;
    p.keyword("futs")?;
    let mut labels: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
    let mut monoids: BTreeMap<usize, Vec<MonoidDesc>> = BTreeMap::new();
    let mut system: Option<Futs> = None;
    let mut positions = TransPositions::new();
    let mut seen_states = false;
    loop {
        let at = p.pos();
        match p.next() {
            (Tok::Eof, _) => break,
            (Tok::Ident(kw), _) if kw == "labels" => {
                if seen_states {
                    return Err(Diagnostic::error(at, "labels must be declared before states"));
                }
                let (name, np) = p.ident("a label set name")?;
                let i = indexed(&name, 'A', np)?;
                p.expect('=')?;
                let set_at = p.pos();
                let set = p.id_set("label")?;
                if set.is_empty() {
                    return Err(Diagnostic::error(set_at, format!("A{i} is empty")));
                }
                if labels.insert(i, set.into_iter().map(|(l, _)| l).collect()).is_some() {
                    return Err(Diagnostic::error(np, format!("A{i} declared twice")));
                }
            }
            (Tok::Ident(kw), _) if kw == "monoids" => {
                if seen_states {
                    return Err(Diagnostic::error(at, "monoids must be declared before states"));
                }
                let (name, np) = p.ident("a monoid list name")?;
                let i = indexed(&name, 'M', np)?;
                p.expect('=')?;
                let list_at = p.pos();
                p.expect('[')?;
                let mut ms = Vec::new();
                if !p.eat(']') {
                    loop {
                        ms.push(p.monoid()?);
                        if p.eat(']') {
                            break;
                        }
                        p.expect(',')?;
                    }
                }
                if ms.is_empty() {
                    return Err(Diagnostic::error(list_at, format!("M{i} is empty")));
                }
                if monoids.insert(i, ms).is_some() {
                    return Err(Diagnostic::error(np, format!("M{i} declared twice")));
                }
            }
            (Tok::Ident(kw), _) if kw == "states" => {
                if seen_states {
                    return Err(Diagnostic::error(at, "states declared twice"));
                }
                seen_states = true;
                let states = p.id_set("state")?;
                if states.is_empty() {
                    return Err(Diagnostic::error(at, "empty carrier"));
                }
                let n = labels.len().max(monoids.len());
                let mut rows = Vec::with_capacity(n);
                for i in 0..n {
                    match (labels.get(&i), monoids.get(&i)) {
                        (Some(a), Some(m)) => rows.push(Component {
                            labels: a.clone(),
                            monoids: m.clone(),
                        }),
                        (None, _) => return Err(Diagnostic::error(at, format!("missing labels A{i}"))),
                        (_, None) => return Err(Diagnostic::error(at, format!("missing monoids M{i}"))),
                    }
                }
                let sig = Signature::new(rows).map_err(|e| Diagnostic::error(at, e.to_string()))?;
                system = Some(Futs::new(sig, states.into_iter().map(|(x, _)| x)));
            }
            (Tok::Ident(kw), _) if kw == "trans" => {
                let Some(s) = system.as_mut() else {
                    return Err(Diagnostic::error(at, "states must be declared before transitions"));
                };
                let (i, ip) = p.index("a component index")?;
                let Ok(row) = s.signature().component(i).cloned() else {
                    return Err(Diagnostic::error(ip, format!("unknown component {i}")));
                };
                let (x, xp) = p.ident("a state")?;
                if !s.states().contains(&x) {
                    return Err(Diagnostic::error(xp, format!("unknown state `{x}`")));
                }
                let (a, ap) = p.ident("a label")?;
                if !row.labels.contains(&a) {
                    return Err(Diagnostic::error(ap, format!("unknown label `{a}` for component {i}")));
                }
                match p.next() {
                    (Tok::Arrow, _) => {}
                    (t, tp) => return Err(Diagnostic::error(tp, format!("expected `->`, found {t}"))),
                }
                let key = (Some(i), Some(x.clone()), Some(a.clone()));
                if positions.contains_key(&key) {
                    return Err(Diagnostic::error(at, format!("duplicate transition for {i} {x} {a}")));
                }
                let term = p.term(&row.monoids, s.states())?;
                positions.insert(key, at);
                s.insert_unchecked(i, x, a, term);
            }
            (t, tp) => return Err(Diagnostic::error(tp, format!("expected a declaration, found {t}"))),
        }
    }
    match system {
        Some(s) => Ok((s, positions)),
        None => Err(Diagnostic::error(p.pos(), "missing states declaration")),
    }
}

fn write_list<T>(out: &mut String, items: impl IntoIterator<Item = T>, mut each: impl FnMut(&mut String, T)) {
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        each(out, item);
    }
}

/// Canonical text of a system: components, states, labels and keys sorted.
pub fn write_system(s: &Futs) -> String {
    let mut out = String::from("futs\n");
    for (i, c) in s.signature().components().iter().enumerate() {
        out.push_str(&format!("labels A{i} = {{ "));
        write_list(&mut out, &c.labels, |o, l| write_id(o, l).unwrap());
        out.push_str(" }\n");
        out.push_str(&format!("monoids M{i} = [ "));
        write_list(&mut out, &c.monoids, |o, m| write!(o, "{m}").unwrap());
        out.push_str(" ]\n");
    }
    out.push_str("states { ");
    write_list(&mut out, s.states(), |o, x| write_id(o, x).unwrap());
    out.push_str(" }\n");
    for i in 0..s.signature().len() {
        for (x, a, t) in s.transitions(i) {
            out.push_str(&format!("trans {i} "));
            write_id(&mut out, x).unwrap();
            out.push(' ');
            write_id(&mut out, a).unwrap();
            writeln!(out, " -> {t}").unwrap();
        }
    }
    out
}

/// Parses `T`, `phi & phi` and `<i|a|m0, ..., ml> phi` against a signature.
///
/// The component index may be dropped when there is one component, and the
/// label when the component has a single label.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, Vec<Diagnostic>> {
    let mut p = Parser::new(text).map_err(|d| vec![d])?;
    let f = formula(&mut p, sig).map_err(|d| vec![d])?;
    if *p.peek() != Tok::Eof {
        return Err(vec![Diagnostic::error(p.pos(), format!("unexpected {}", p.peek()))]);
    }
    Ok(f)
}

/// Parses one formula per non-empty, non-comment line.
pub fn parse_formula_file(text: &str, sig: &Signature) -> Result<Vec<Formula>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f = parse_formula(line, sig).map_err(|ds| {
            ds.into_iter()
                .map(|d| Diagnostic { line: k + 1, ..d })
                .collect::<Vec<_>>()
        })?;
        out.push(f);
    }
    Ok(out)
}

fn formula(p: &mut Parser, sig: &Signature) -> PResult<Formula> {
    let mut lhs = unary(p, sig)?;
    while p.eat('&') {
        let rhs = unary(p, sig)?;
        lhs = Formula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn unary(p: &mut Parser, sig: &Signature) -> PResult<Formula> {
    match p.peek().clone() {
        Tok::Ident(s) if s == "T" => {
            p.next();
            Ok(Formula::Top)
        }
        Tok::Sym('(') => {
            p.next();
            let f = formula(p, sig)?;
            p.expect(')')?;
            Ok(f)
        }
        Tok::Sym('<') => {
            let open = p.pos();
            p.next();
            let (component, cpos) = if matches!(p.peek(), Tok::Num(_)) && *p.peek2() == Tok::Sym('|') {
                let (i, ip) = p.index("a component index")?;
                p.expect('|')?;
                (i, ip)
            } else if sig.len() == 1 {
                (0, open)
            } else {
                return p.fail("a component index is required when there are several components");
            };
            let Ok(row) = sig.component(component) else {
                return Err(Diagnostic::error(cpos, format!("unknown component {component}")));
            };
            let label_given = matches!(p.peek(), Tok::Ident(_) | Tok::Quoted(_)) && *p.peek2() == Tok::Sym('|');
            let label = if label_given {
                let (a, ap) = p.ident("a label")?;
                p.expect('|')?;
                if !row.labels.contains(&a) {
                    return Err(Diagnostic::error(
                        ap,
                        format!("unknown label `{a}` for component {component}"),
                    ));
                }
                a
            } else if row.labels.len() == 1 {
                row.labels.first().cloned().expect("one label")
            } else {
                return p.fail(format!("a label is required: A{component} has several labels"));
            };
            let arity = row.monoids.len();
            let mut bounds = Vec::with_capacity(arity);
            for (j, m) in row.monoids.iter().enumerate() {
                if j > 0 {
                    if *p.peek() == Tok::Sym('>') {
                        return p.fail(format!("arity mismatch: expected {arity} bounds, found {j}"));
                    }
                    p.expect(',')?;
                }
                bounds.push(p.weight(m)?);
            }
            if *p.peek() == Tok::Sym(',') {
                return p.fail(format!("arity mismatch: expected {arity} bounds, found more"));
            }
            p.expect('>')?;
            let body = unary(p, sig)?;
            Ok(Formula::Diamond {
                component,
                label,
                bounds,
                body: Box::new(body),
            })
        }
        t => p.fail(format!("expected a formula, found {t}")),
    }
}

/// Writes a formula, omitting labels of single-label components.
pub fn write_formula(f: &Formula, sig: &Signature) -> String {
    let mut out = String::new();
    write_formula_into(&mut out, f, Some(sig), false);
    out
}

pub(crate) fn write_formula_into(out: &mut String, f: &Formula, sig: Option<&Signature>, nested: bool) {
    match f {
        Formula::Top => out.push('T'),
        Formula::And(l, r) => {
            if nested {
                out.push('(');
            }
            write_formula_into(out, l, sig, false);
            out.push_str(" & ");
            write_formula_into(out, r, sig, matches!(**r, Formula::And(..)));
            if nested {
                out.push(')');
            }
        }
        Formula::Diamond {
            component,
            label,
            bounds,
            body,
        } => {
            let single = sig
                .and_then(|s| s.component(*component).ok())
                .is_some_and(|c| c.labels.len() == 1);
            write!(out, "<{component}|").unwrap();
            if !single {
                write_id(out, label).unwrap();
                out.push('|');
            }
            for (k, w) in bounds.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{w}").unwrap();
            }
            out.push_str("> ");
            write_formula_into(out, body, sig, true);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ring, w3};

    const RING: &str = "\
futs
labels A0 = { a, b }
monoids M0 = [ bool-or, rat-plus ]
states { s0, s1, s2, s3 }
trans 0 s0 a -> {{s0: 1/2, s1: 1/2}: tt}
trans 0 s1 a -> {{s1: 1/2, s2: 1/2}: tt}
trans 0 s1 b -> {{s0: 1/6, s2: 1/2, s3: 1/3}: tt}
trans 0 s2 a -> {{s2: 1/2, s3: 1/2}: tt}
trans 0 s3 a -> {{s0: 1/2, s3: 1/2}: tt}
";

    #[test]
    fn parses_ring() {
        let s = parse_system(RING).unwrap();
        assert_eq!(s, ring());
        assert_eq!(write_system(&s), RING);
    }

    #[test]
    fn unknown_label_is_located() {
        let text = RING.replace("trans 0 s2 a", "trans 0 s2 c");
        let errs = parse_system(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].line, errs[0].column), (8, 12));
        assert!(errs[0].message.contains("unknown label `c`"));
    }

    #[test]
    fn empty_carrier() {
        let errs = parse_system("futs\nlabels A0 = { a }\nmonoids M0 = [ nat-plus ]\nstates { }\n").unwrap_err();
        assert_eq!(errs[0].message, "empty carrier");
        assert_eq!((errs[0].line, errs[0].column), (4, 1));
    }

    #[test]
    fn unknown_state_and_depth() {
        let text = RING.replace("{{s0: 1/6", "{{s9: 1/6");
        let errs = parse_system(&text).unwrap_err();
        assert!(errs[0].message.contains("unknown state `s9`"));
        let text = RING.replace("{{s2: 1/2, s3: 1/2}: tt}", "{s2: tt}");
        let errs = parse_system(&text).unwrap_err();
        assert!(errs[0].message.contains("depth mismatch"), "{}", errs[0].message);
    }

    #[test]
    fn quoted_ids_and_primes() {
        let s = w3();
        let text = write_system(&s);
        assert!(text.contains("x'"));
        assert_eq!(parse_system(&text).unwrap(), s);
        let text = "futs\nlabels A0 = { a }\nmonoids M0 = [ nat-plus ]\nstates { `#1:{x: 3}`, x }\ntrans 0 x a -> {`#1:{x: 3}`: 3}\n";
        let s = parse_system(text).unwrap();
        assert!(s.states().contains("#1:{x: 3}"));
        assert_eq!(write_system(&s), text);
    }

    #[test]
    fn weight_literals() {
        let text = "futs\nlabels A0 = { a }\nmonoids M0 = [ prod(pow({a, b}, bool-or), rat-plus) ]\nstates { x }\ntrans 0 x a -> {x: ({a: tt, b: ff}, 2/4)}\n";
        let s = parse_system(text).unwrap();
        let t = s.transition(0, "x", "a");
        let w = t.entries().unwrap().values().next().unwrap();
        assert_eq!(w.to_string(), "({a: tt}, 1/2)");
        let bad = text.replace("2/4", "2/0");
        assert!(parse_system(&bad).unwrap_err()[0].message.contains("zero denominator"));
    }

    #[test]
    fn formulas() {
        let s = ring();
        let f = parse_formula("<0|b|tt, 1/2> T", s.signature()).unwrap();
        assert_eq!(
            f,
            Formula::diamond(0, "b", vec![Weight::Bool(true), Weight::rat(1, 2)], Formula::Top)
        );
        assert_eq!(write_formula(&f, s.signature()), "<0|b|tt,1/2> T");
        let errs = parse_formula("<0|b|tt> T", s.signature()).unwrap_err();
        assert!(errs[0].message.contains("arity"));
        assert_eq!(
            parse_formula("T & T", s.signature()).unwrap(),
            Formula::and(Formula::Top, Formula::Top)
        );
        let f = parse_formula("<b|tt,1/2> T", s.signature()).unwrap();
        assert_eq!(f.to_string(), "<0|b|tt,1/2> T");
    }

    #[test]
    fn formula_precedence() {
        let s = ring();
        let f = parse_formula("<a|tt,0> T & T & <b|ff,0> (T & T)", s.signature()).unwrap();
        let text = write_formula(&f, s.signature());
        assert_eq!(text, "<0|a|tt,0> T & T & <0|b|ff,0> (T & T)");
        assert_eq!(parse_formula(&text, s.signature()).unwrap(), f);
    }

    #[test]
    fn formula_diagnostics_have_positions() {
        let s = ring();
        let errs = parse_formula("<0|c|tt,0> T", s.signature()).unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (1, 4));
        let errs = parse_formula("<0|a|tt,0> T T", s.signature()).unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (1, 14));
    }
}
