//! Reader and printer for the KoAT-style program format.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::ir::{Guard, Location, Program, ProgramError, Transition, Update};
use crate::arith::{Polynomial, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable(String),
    IncomingInitial,
    NoTransitions,
    NonIntegerUpdate,
    Arity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable {v}"),
            ParseErrorKind::IncomingInitial => f.write_str("initial location has an incoming transition"),
            ParseErrorKind::NoTransitions => f.write_str("no transitions"),
            ParseErrorKind::NonIntegerUpdate => f.write_str("non-integer coefficient in update"),
            ParseErrorKind::Arity { expected, found } => {
                write!(f, "expected {expected} arguments, found {found}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Comma,
    Arrow,
    GuardSep,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    And,
    Or,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "'{s}'"),
            Tok::Int(n) => return write!(f, "'{n}'"),
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::Comma => "','",
            Tok::Arrow => "'->'",
            Tok::GuardSep => "':|:'",
            Tok::Plus => "'+'",
            Tok::Minus => "'-'",
            Tok::Star => "'*'",
            Tok::Slash => "'/'",
            Tok::Caret => "'^'",
            Tok::Gt => "'>'",
            Tok::Ge => "'>='",
            Tok::Lt => "'<'",
            Tok::Le => "'<='",
            Tok::Eq => "'='",
            Tok::And => "'&&'",
            Tok::Or => "'||'",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, len) = if rest.starts_with(":|:") {
                (Tok::GuardSep, 3)
            } else if rest.starts_with("->") {
                (Tok::Arrow, 2)
            } else if rest.starts_with(">=") {
                (Tok::Ge, 2)
            } else if rest.starts_with("<=") {
                (Tok::Le, 2)
            } else if rest.starts_with("==") {
                (Tok::Eq, 2)
            } else if rest.starts_with("&&") || rest.starts_with("/\\") {
                (Tok::And, 2)
            } else if rest.starts_with("||") || rest.starts_with("\\/") {
                (Tok::Or, 2)
            } else if c.is_ascii_digit() {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                (Tok::Int(digits.parse().expect("digits")), j - i)
            } else if is_ident_start(c) {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            } else {
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '>' => Tok::Gt,
                    '<' => Tok::Lt,
                    '=' => Tok::Eq,
                    _ => {
                        return Err(ParseError {
                            line,
                            col,
                            kind: ParseErrorKind::Syntax(format!("unexpected character '{c}'")),
                        })
                    }
                };
                (t, 1)
            };
            out.push(Spanned { tok, line, col });
            i += len;
        }
    }
    let (line, col) = match text.lines().enumerate().last() {
        Some((i, l)) => (i + 1, l.chars().count() + 1),
        None => (1, 1),
    };
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Variable scope: source name to program variable. `None` accepts any name.
type Scope = Option<BTreeMap<String, Var>>;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, kind })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.err(ParseErrorKind::Syntax(format!("expected {wanted}, found {}", self.peek())))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.unexpected(&t.to_string())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.unexpected(kw),
        }
    }

    fn expr(&mut self, scope: &Scope) -> Result<Polynomial, ParseError> {
        let mut acc = self.term(scope)?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc + self.term(scope)?;
            } else if self.eat(&Tok::Minus) {
                acc = acc - self.term(scope)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, scope: &Scope) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary(scope)?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc * self.unary(scope)?;
            } else if *self.peek() == Tok::Slash {
                self.bump();
                let here = self.here();
                let d = self.unary(scope)?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    _ => {
                        return Err(ParseError {
                            line: here.0,
                            col: here.1,
                            kind: ParseErrorKind::Syntax("division by a non-constant or zero".into()),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, scope: &Scope) -> Result<Polynomial, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(-self.unary(scope)?);
        }
        if self.eat(&Tok::Plus) {
            return self.unary(scope);
        }
        let base = self.primary(scope)?;
        if self.eat(&Tok::Caret) {
            match self.peek().clone() {
                Tok::Int(n) => {
                    let e = n.to_u32().filter(|&e| e <= 64);
                    match e {
                        Some(e) => {
                            self.bump();
                            Ok(base.pow(e))
                        }
                        None => self.err(ParseErrorKind::Syntax(format!("exponent {n} too large"))),
                    }
                }
                _ => self.unexpected("natural exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self, scope: &Scope) -> Result<Polynomial, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Polynomial::constant(Rational::from_integer(n)))
            }
            Tok::Ident(name) => {
                let v = match scope {
                    None => Var::new(&name),
                    Some(m) => match m.get(&name) {
                        Some(v) => v.clone(),
                        None => return self.err(ParseErrorKind::UnknownVariable(name)),
                    },
                };
                self.bump();
                Ok(Polynomial::var(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(scope)?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            _ => self.unexpected("expression"),
        }
    }

    fn guard(&mut self, scope: &Scope) -> Result<Guard, ParseError> {
        let mut parts = vec![self.conj(scope)?];
        while self.eat(&Tok::Or) {
            parts.push(self.conj(scope)?);
        }
        Ok(Guard::or(parts))
    }

    fn conj(&mut self, scope: &Scope) -> Result<Guard, ParseError> {
        let mut parts = vec![self.guard_primary(scope)?];
        while self.eat(&Tok::And) {
            parts.push(self.guard_primary(scope)?);
        }
        Ok(Guard::and(parts))
    }

    fn guard_primary(&mut self, scope: &Scope) -> Result<Guard, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s.eq_ignore_ascii_case("true") => {
                self.bump();
                return Ok(Guard::True);
            }
            Tok::Ident(s) if s.eq_ignore_ascii_case("false") => {
                self.bump();
                return Ok(Guard::False);
            }
            _ => {}
        }
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(g) = self.guard(scope) {
                if self.eat(&Tok::RParen) {
                    return Ok(g);
                }
            }
            self.pos = save;
        }
        self.comparison(scope)
    }

    fn comparison(&mut self, scope: &Scope) -> Result<Guard, ParseError> {
        let lhs = self.expr(scope)?;
        let op = match self.peek() {
            Tok::Gt | Tok::Ge | Tok::Lt | Tok::Le | Tok::Eq => self.bump(),
            _ => return self.unexpected("comparison operator"),
        };
        let rhs = self.expr(scope)?;
        Ok(match op {
            Tok::Gt => Guard::atom(integral(&lhs - &rhs)),
            Tok::Lt => Guard::atom(integral(&rhs - &lhs)),
            Tok::Ge => Guard::atom(integral(&lhs - &rhs) + Polynomial::one()),
            Tok::Le => Guard::atom(integral(&rhs - &lhs) + Polynomial::one()),
            _ => Guard::and([
                Guard::atom(integral(&lhs - &rhs) + Polynomial::one()),
                Guard::atom(integral(&rhs - &lhs) + Polynomial::one()),
            ]),
        })
    }

    /// Skips a balanced parenthesised group whose `(` was already consumed.
    fn skip_group(&mut self) -> Result<(), ParseError> {
        let mut depth = 1;
        while depth > 0 {
            match self.bump() {
                Tok::LParen => depth += 1,
                Tok::RParen => depth -= 1,
                Tok::Eof => return self.unexpected("')'"),
                _ => {}
            }
        }
        Ok(())
    }
}

/// Scales by a positive constant so that all coefficients are integers.
fn integral(p: Polynomial) -> Polynomial {
    let l = p.denominator_lcm();
    p.scale(&Rational::from_integer(l))
}

struct RawRule {
    source: String,
    target: String,
    target_pos: (usize, usize),
    guard: Guard,
    update: Update,
}

/// Parses a polynomial over arbitrary variable names.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr(&None)?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(e)
}

/// Parses a guard over arbitrary variable names.
pub fn parse_guard(text: &str) -> Result<Guard, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let g = p.guard(&None)?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(g)
}

/// Parses a program.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut start: Option<String> = None;
    let mut vars: Option<Vec<Var>> = None;
    let mut rules: Option<Vec<RawRule>> = None;
    let mut rules_end = (1, 1);
    while *p.peek() != Tok::Eof {
        p.expect(&Tok::LParen)?;
        let section = p.ident()?;
        match section.as_str() {
            "STARTTERM" => {
                p.expect(&Tok::LParen)?;
                p.keyword("FUNCTIONSYMBOLS")?;
                start = Some(p.ident()?);
                p.expect(&Tok::RParen)?;
                p.expect(&Tok::RParen)?;
            }
            "VAR" => {
                let mut vs = Vec::new();
                while let Tok::Ident(s) = p.peek().clone() {
                    if vs.iter().any(|v: &Var| v.name() == s) {
                        return p.err(ParseErrorKind::Syntax(format!("duplicate variable {s}")));
                    }
                    vs.push(Var::new(&s));
                    p.bump();
                }
                p.expect(&Tok::RParen)?;
                vars = Some(vs);
            }
            "RULES" => {
                let vs = match &vars {
                    Some(vs) => vs.clone(),
                    None => return p.err(ParseErrorKind::Syntax("RULES before VAR".into())),
                };
                let mut rs = Vec::new();
                while *p.peek() != Tok::RParen {
                    rs.push(parse_rule(&mut p, &vs)?);
                }
                rules_end = p.here();
                p.bump();
                rules = Some(rs);
            }
            _ => p.skip_group()?,
        }
    }
    let rules = rules.unwrap_or_default();
    let vars = vars.unwrap_or_default();
    if rules.is_empty() {
        return Err(ParseError { line: rules_end.0, col: rules_end.1, kind: ParseErrorKind::NoTransitions });
    }
    let initial = Location::new(&start.unwrap_or_else(|| rules[0].source.clone()));
    let mut locations = vec![initial.clone()];
    for r in &rules {
        for name in [&r.source, &r.target] {
            let l = Location::new(name);
            if !locations.contains(&l) {
                locations.push(l);
            }
        }
    }
    if let Some(r) = rules.iter().find(|r| r.target == initial.name()) {
        return Err(ParseError { line: r.target_pos.0, col: r.target_pos.1, kind: ParseErrorKind::IncomingInitial });
    }
    let transitions = rules
        .into_iter()
        .enumerate()
        .map(|(id, r)| Transition {
            id,
            source: Location::new(&r.source),
            target: Location::new(&r.target),
            guard: r.guard,
            update: r.update,
        })
        .collect();
    Program::new(vars, locations, initial, transitions).map_err(|e| {
        let kind = match e {
            ProgramError::IncomingInitial => ParseErrorKind::IncomingInitial,
            ProgramError::NoTransitions => ParseErrorKind::NoTransitions,
            ProgramError::UnknownVariable(_, v) => ParseErrorKind::UnknownVariable(v),
            ProgramError::NonIntegerUpdate(_) => ParseErrorKind::NonIntegerUpdate,
            ProgramError::UnknownLocation(_) => ParseErrorKind::Syntax(e.to_string()),
        };
        ParseError { line: rules_end.0, col: rules_end.1, kind }
    })
}

fn parse_rule(p: &mut Parser, vars: &[Var]) -> Result<RawRule, ParseError> {
    let source = p.ident()?;
    p.expect(&Tok::LParen)?;
    let mut binders = Vec::new();
    if *p.peek() != Tok::RParen {
        loop {
            let pos = p.here();
            let b = p.ident()?;
            if binders.iter().any(|(x, _)| *x == b) {
                return Err(ParseError {
                    line: pos.0,
                    col: pos.1,
                    kind: ParseErrorKind::Syntax(format!("duplicate argument {b}")),
                });
            }
            binders.push((b, pos));
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    if binders.len() != vars.len() {
        return p.err(ParseErrorKind::Arity { expected: vars.len(), found: binders.len() });
    }
    p.expect(&Tok::RParen)?;
    let scope: Scope = Some(binders.iter().map(|(b, _)| b.clone()).zip(vars.iter().cloned()).collect());
    p.expect(&Tok::Arrow)?;
    let target_pos = p.here();
    let target = p.ident()?;
    p.expect(&Tok::LParen)?;
    let mut update = Update::new();
    let mut i = 0;
    if *p.peek() != Tok::RParen {
        loop {
            let pos = p.here();
            let e = p.expr(&scope)?;
            if let Some(v) = vars.get(i) {
                if !e.is_integral() {
                    return Err(ParseError { line: pos.0, col: pos.1, kind: ParseErrorKind::NonIntegerUpdate });
                }
                update.insert(v.clone(), e);
            }
            i += 1;
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    if i != vars.len() {
        return p.err(ParseErrorKind::Arity { expected: vars.len(), found: i });
    }
    p.expect(&Tok::RParen)?;
    let guard = if p.eat(&Tok::GuardSep) { p.guard(&scope)? } else { Guard::True };
    Ok(RawRule { source, target, target_pos, guard, update })
}

/// Prints a program in the input format; `parse_program` reads it back unchanged.
pub fn pretty_print(prog: &Program) -> String {
    let mut out = String::new();
    let names: Vec<&str> = prog.vars().iter().map(Var::name).collect();
    let args = names.join(",");
    writeln!(out, "(GOAL COMPLEXITY)").unwrap();
    writeln!(out, "(STARTTERM (FUNCTIONSYMBOLS {}))", prog.initial()).unwrap();
    writeln!(out, "(VAR {})", names.join(" ")).unwrap();
    writeln!(out, "(RULES").unwrap();
    for t in prog.transitions() {
        let rhs: Vec<String> = prog.vars().iter().map(|v| t.update[v].to_string()).collect();
        write!(out, "  {}({}) -> {}({})", t.source, args, t.target, rhs.join(", ")).unwrap();
        if !t.guard.is_true() {
            write!(out, " :|: {}", t.guard).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, ")").unwrap();
    out
}
