//! Programs, transitions, guards and loops.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::arith::{IntState, Polynomial, Rational, Var};

/// Simultaneous polynomial assignment. Variables without an entry keep their value.
pub type Update = BTreeMap<Var, Polynomial>;

/// A control location.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location(Arc<str>);

impl Location {
    pub fn new(name: &str) -> Location {
        Location(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Boolean combination of atoms `p > 0`.
///
/// Build guards through [`Guard::atom`], [`Guard::and`] and [`Guard::or`] so
/// that constant atoms fold and nested connectives flatten.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    True,
    False,
    Atom(Polynomial),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    /// The atom `p > 0`.
    pub fn atom(p: Polynomial) -> Guard {
        match p.as_constant() {
            Some(c) if c.is_positive() => Guard::True,
            Some(_) => Guard::False,
            None => Guard::Atom(p),
        }
    }

    pub fn and<I: IntoIterator<Item = Guard>>(parts: I) -> Guard {
        let mut out = Vec::new();
        for g in parts {
            match g {
                Guard::True => {}
                Guard::False => return Guard::False,
                Guard::And(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Guard::True,
            1 => out.pop().unwrap(),
            _ => Guard::And(out),
        }
    }

    pub fn or<I: IntoIterator<Item = Guard>>(parts: I) -> Guard {
        let mut out = Vec::new();
        for g in parts {
            match g {
                Guard::False => {}
                Guard::True => return Guard::True,
                Guard::Or(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Guard::False,
            1 => out.pop().unwrap(),
            _ => Guard::Or(out),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Guard::True)
    }

    /// Evaluates under a rational-valued variable assignment.
    pub fn eval_with<F: FnMut(&Polynomial) -> Rational>(&self, value: &mut F) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Atom(p) => value(p).is_positive(),
            Guard::And(gs) => gs.iter().all(|g| g.eval_with(value)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval_with(value)),
        }
    }

    pub fn eval(&self, s: &IntState) -> bool {
        self.eval_with(&mut |p| p.eval(s))
    }

    /// Applies a substitution to every atom.
    pub fn compose(&self, sub: &Update) -> Guard {
        match self {
            Guard::True | Guard::False => self.clone(),
            Guard::Atom(p) => Guard::atom(p.compose(sub)),
            Guard::And(gs) => Guard::and(gs.iter().map(|g| g.compose(sub))),
            Guard::Or(gs) => Guard::or(gs.iter().map(|g| g.compose(sub))),
        }
    }

    /// All atoms in syntactic order.
    pub fn atoms(&self) -> Vec<&Polynomial> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Polynomial>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Atom(p) => out.push(p),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.collect_atoms(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.atoms().into_iter().flat_map(|p| p.vars()).collect()
    }

    /// Disjunctive normal form as a list of conjunctions of atoms.
    ///
    /// `True` gives one empty clause, `False` gives no clauses.
    pub fn dnf(&self) -> Vec<Vec<Polynomial>> {
        match self {
            Guard::True => vec![Vec::new()],
            Guard::False => Vec::new(),
            Guard::Atom(p) => vec![vec![p.clone()]],
            Guard::Or(gs) => gs.iter().flat_map(Guard::dnf).collect(),
            Guard::And(gs) => gs.iter().fold(vec![Vec::new()], |acc, g| {
                let d = g.dnf();
                let mut out = Vec::with_capacity(acc.len() * d.len());
                for a in &acc {
                    for c in &d {
                        let mut clause = a.clone();
                        clause.extend(c.iter().cloned());
                        out.push(clause);
                    }
                }
                out
            }),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Guard::True => f.write_str("1 > 0"),
            Guard::False => f.write_str("0 > 0"),
            Guard::Atom(p) => write!(f, "{p} > 0"),
            Guard::And(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    g.fmt_prec(f, true)?;
                }
                Ok(())
            }
            Guard::Or(gs) => {
                if nested {
                    f.write_str("(")?;
                }
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    g.fmt_prec(f, false)?;
                }
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

impl fmt::Debug for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Identity update on the given variables.
pub fn identity_update<'a, I: IntoIterator<Item = &'a Var>>(vars: I) -> Update {
    vars.into_iter().map(|v| (v.clone(), Polynomial::var(v.clone()))).collect()
}

/// Sequential composition: run `first`, then `second`.
pub fn then(first: &Update, second: &Update) -> Update {
    let keys: BTreeSet<&Var> = first.keys().chain(second.keys()).collect();
    keys.into_iter()
        .map(|v| {
            let p = match second.get(v) {
                Some(p) => p.compose(first),
                None => first[v].clone(),
            };
            (v.clone(), p)
        })
        .collect()
}

/// `k`-fold iteration of an update; `k = 0` is the identity on its domain.
pub fn update_pow(u: &Update, k: u32) -> Update {
    let mut acc = identity_update(u.keys());
    for _ in 0..k {
        acc = then(&acc, u);
    }
    acc
}

/// Applies an update to a state; the update must map integers to integers.
pub fn apply_update(u: &Update, s: &IntState) -> IntState {
    let mut out = s.clone();
    for (v, p) in u {
        let r = p.eval(s);
        debug_assert!(r.is_integer());
        out.insert(v.clone(), r.to_integer());
    }
    out
}

pub fn is_identity_on(u: &Update, v: &Var) -> bool {
    u.get(v).is_none_or(|p| *p == Polynomial::var(v.clone()))
}

/// A guarded transition between two locations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub id: usize,
    pub source: Location,
    pub target: Location,
    pub guard: Guard,
    /// Total on the program variables.
    pub update: Update,
}

impl Transition {
    pub fn name(&self) -> String {
        format!("t{}", self.id)
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("initial location has an incoming transition")]
    IncomingInitial,
    #[error("no transitions")]
    NoTransitions,
    #[error("transition t{0} uses a location outside the program")]
    UnknownLocation(usize),
    #[error("transition t{0} mentions unknown variable {1}")]
    UnknownVariable(usize, String),
    #[error("transition t{0} has a non-integer update")]
    NonIntegerUpdate(usize),
}

/// An integer program `(V, L, l0, T)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    vars: Vec<Var>,
    locations: Vec<Location>,
    initial: Location,
    transitions: Vec<Transition>,
}

impl Program {
    /// Validates and builds a program. Transition ids are reassigned to their
    /// positions and updates are made total.
    pub fn new(
        vars: Vec<Var>,
        locations: Vec<Location>,
        initial: Location,
        mut transitions: Vec<Transition>,
    ) -> Result<Program, ProgramError> {
        if transitions.is_empty() {
            return Err(ProgramError::NoTransitions);
        }
        let known: BTreeSet<&Var> = vars.iter().collect();
        for (i, t) in transitions.iter_mut().enumerate() {
            t.id = i;
            if !locations.contains(&t.source) || !locations.contains(&t.target) {
                return Err(ProgramError::UnknownLocation(i));
            }
            if t.target == initial {
                return Err(ProgramError::IncomingInitial);
            }
            let mentioned = t.guard.vars().into_iter().chain(t.update.iter().flat_map(|(v, p)| {
                std::iter::once(v.clone()).chain(p.vars())
            }));
            for v in mentioned {
                if !known.contains(&v) {
                    return Err(ProgramError::UnknownVariable(i, v.to_string()));
                }
            }
            if t.update.values().any(|p| !p.is_integral()) {
                return Err(ProgramError::NonIntegerUpdate(i));
            }
            for v in &vars {
                t.update.entry(v.clone()).or_insert_with(|| Polynomial::var(v.clone()));
            }
        }
        if !locations.contains(&initial) {
            return Err(ProgramError::UnknownLocation(0));
        }
        Ok(Program { vars, locations, initial, transitions })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn initial(&self) -> &Location {
        &self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: usize) -> &Transition {
        &self.transitions[id]
    }

    /// Transitions leaving the initial location.
    pub fn initial_transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.source == self.initial)
    }

    pub fn outgoing<'a>(&'a self, l: &'a Location) -> impl Iterator<Item = &'a Transition> {
        self.transitions.iter().filter(move |t| &t.source == l)
    }

    pub fn incoming<'a>(&'a self, l: &'a Location) -> impl Iterator<Item = &'a Transition> {
        self.transitions.iter().filter(move |t| &t.target == l)
    }
}

/// A loop `(guard, update)` over its own variable set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Loop {
    pub guard: Guard,
    /// Total on the loop variables.
    pub update: Update,
}

impl Loop {
    /// Builds a loop whose variables are those of the update plus the guard.
    pub fn new(guard: Guard, mut update: Update) -> Loop {
        for v in guard.vars() {
            update.entry(v.clone()).or_insert_with(|| Polynomial::var(v));
        }
        let mentioned: BTreeSet<Var> = update.values().flat_map(|p| p.vars()).collect();
        for v in mentioned {
            update.entry(v.clone()).or_insert_with(|| Polynomial::var(v));
        }
        Loop { guard, update }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.update.keys()
    }

    pub fn dim(&self) -> usize {
        self.update.len()
    }
}

impl fmt::Display for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "while ({}) do (", self.guard)?;
        for (i, (v, p)) in self.update.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} <- {p}")?;
        }
        f.write_str(")")
    }
}

/// Variable renaming from loop variables to program variables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Renaming {
    pub map: BTreeMap<Var, Var>,
}

impl Renaming {
    pub fn identity<'a, I: IntoIterator<Item = &'a Var>>(vars: I) -> Renaming {
        Renaming { map: vars.into_iter().map(|v| (v.clone(), v.clone())).collect() }
    }

    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let sub: Update = self.map.iter().map(|(a, b)| (a.clone(), Polynomial::var(b.clone()))).collect();
        p.compose(&sub)
    }

    pub fn image(&self) -> BTreeSet<Var> {
        self.map.values().cloned().collect()
    }
}

/// The loop corresponding to a self-loop transition.
///
/// The loop's variables are the closure of the variables with a non-identity
/// update under "read by the update", together with the guard variables.
/// Variables keep their program names. Returns `None` for non-self-loops.
pub fn loop_of_transition(t: &Transition) -> Option<(Loop, Renaming)> {
    if !t.is_self_loop() {
        return None;
    }
    let mut vs: BTreeSet<Var> =
        t.update.keys().filter(|v| !is_identity_on(&t.update, v)).cloned().collect();
    vs.extend(t.guard.vars());
    let mut work: Vec<Var> = vs.iter().cloned().collect();
    while let Some(v) = work.pop() {
        if let Some(p) = t.update.get(&v) {
            for w in p.vars() {
                if vs.insert(w.clone()) {
                    work.push(w);
                }
            }
        }
    }
    let update: Update = vs
        .iter()
        .map(|v| (v.clone(), t.update.get(v).cloned().unwrap_or_else(|| Polynomial::var(v.clone()))))
        .collect();
    let renaming = Renaming::identity(&vs);
    Some((Loop { guard: t.guard.clone(), update }, renaming))
}

/// Renders an update as `(p1, p2, ...)` in variable order.
pub fn fmt_update(vars: &[Var], u: &Update) -> String {
    let parts: Vec<String> = vars
        .iter()
        .map(|v| u.get(v).map_or_else(|| v.to_string(), |p| p.to_string()))
        .collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_state;

    fn p(s: &str) -> Polynomial {
        crate::program::parse_polynomial(s).unwrap()
    }

    #[test]
    fn guard_folding() {
        assert_eq!(Guard::atom(Polynomial::int(1)), Guard::True);
        assert_eq!(Guard::atom(Polynomial::int(0)), Guard::False);
        let a = Guard::atom(p("x"));
        assert_eq!(Guard::and([Guard::True, a.clone()]), a);
        assert_eq!(Guard::or([Guard::False, a.clone()]), a);
        assert_eq!(Guard::and([a.clone(), Guard::False]), Guard::False);
        let nested = Guard::and([Guard::and([a.clone(), a.clone()]), a.clone()]);
        assert_eq!(nested, Guard::And(vec![a.clone(), a.clone(), a]));
    }

    #[test]
    fn dnf_distributes() {
        let g = Guard::and([
            Guard::or([Guard::atom(p("x")), Guard::atom(p("y"))]),
            Guard::atom(p("z")),
        ]);
        assert_eq!(g.dnf(), vec![vec![p("x"), p("z")], vec![p("y"), p("z")]]);
        assert_eq!(g.to_string(), "(x > 0 || y > 0) && z > 0");
    }

    #[test]
    fn composition_order() {
        let first: Update = [(Var::new("x"), p("x+1"))].into_iter().collect();
        let second: Update = [(Var::new("x"), p("2*x"))].into_iter().collect();
        assert_eq!(then(&first, &second)[&Var::new("x")], p("2*x+2"));
        assert_eq!(update_pow(&second, 3)[&Var::new("x")], p("8*x"));
        let s = apply_update(&then(&first, &second), &int_state(&[("x", 3)]));
        assert_eq!(s[&Var::new("x")], 8.into());
    }

    #[test]
    fn loop_of_identity_self_loop() {
        let t = Transition {
            id: 0,
            source: Location::new("l"),
            target: Location::new("l"),
            guard: Guard::True,
            update: identity_update(&[Var::new("x")]),
        };
        let (l, r) = loop_of_transition(&t).unwrap();
        assert_eq!(l.dim(), 0);
        assert!(l.guard.is_true());
        assert!(r.map.is_empty());
    }

    #[test]
    fn loop_closure_includes_read_variables() {
        let mut update = identity_update(&[Var::new("x1"), Var::new("x2"), Var::new("x3")]);
        update.insert(Var::new("x1"), p("x2"));
        let t = Transition {
            id: 0,
            source: Location::new("l"),
            target: Location::new("l"),
            guard: Guard::atom(p("x1")),
            update,
        };
        let (l, _) = loop_of_transition(&t).unwrap();
        let vs: Vec<&str> = l.vars().map(Var::name).collect();
        assert_eq!(vs, ["x1", "x2"]);
        assert_eq!(l.update[&Var::new("x2")], p("x2"));
    }
}
