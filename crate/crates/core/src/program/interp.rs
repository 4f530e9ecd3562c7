//! Reference interpreter for programs.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ir::{Guard, Location, Program, Transition};
use crate::arith::{IntState, Polynomial, Var};

/// A location together with a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub location: Location,
    pub state: IntState,
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    /// No transition was enabled.
    Stuck,
    /// The step budget was exhausted.
    StepLimit,
    /// A value exceeded the magnitude limit.
    Overflow,
}

/// A run: the start configuration and each step's transition id and result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Config,
    pub steps: Vec<(usize, Config)>,
    pub halt: Halt,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of times transition `t` fired.
    pub fn count(&self, t: usize) -> usize {
        self.steps.iter().filter(|(id, _)| *id == t).count()
    }

    pub fn last(&self) -> &Config {
        self.steps.last().map_or(&self.start, |(_, c)| c)
    }
}

/// One evaluation step via `t`, or `None` if the guard fails or the location differs.
pub fn eval_step(c: &Config, t: &Transition) -> Option<Config> {
    if c.location != t.source || !t.guard.eval(&c.state) {
        return None;
    }
    let mut state = c.state.clone();
    for (v, p) in &t.update {
        state.insert(v.clone(), p.eval(&c.state).to_integer());
    }
    Some(Config { location: t.target.clone(), state })
}

/// Resolves nondeterminism among enabled transitions.
pub trait Scheduler {
    /// Picks one id from a non-empty, ascending list of enabled transitions.
    fn choose(&mut self, enabled: &[usize]) -> usize;
}

/// Always takes the enabled transition with the lowest id.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstEnabled;

impl Scheduler for FirstEnabled {
    fn choose(&mut self, enabled: &[usize]) -> usize {
        enabled[0]
    }
}

/// Uniform random choice from a seeded generator.
#[derive(Clone, Debug)]
pub struct SeededScheduler(ChaCha8Rng);

impl SeededScheduler {
    pub fn new(seed: u64) -> SeededScheduler {
        SeededScheduler(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Scheduler for SeededScheduler {
    fn choose(&mut self, enabled: &[usize]) -> usize {
        enabled[self.0.gen_range(0..enabled.len())]
    }
}

/// Integer polynomial over variable indices.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(BigInt, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    /// Compiles `p` scaled by a positive constant that makes it integral.
    fn new(p: &Polynomial, index: &dyn Fn(&Var) -> usize) -> CompiledPoly {
        let scale = crate::arith::Rational::from_integer(p.denominator_lcm());
        let terms = p
            .terms()
            .map(|(m, c)| {
                let c = (c * &scale).to_integer();
                (c, m.powers().iter().map(|(v, e)| (index(v), *e)).collect())
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, s: &[BigInt]) -> BigInt {
        let mut sum = BigInt::zero();
        for (c, pows) in &self.terms {
            let mut prod = c.clone();
            for &(i, e) in pows {
                prod *= num_traits::pow(s[i].clone(), e as usize);
            }
            sum += prod;
        }
        sum
    }
}

#[derive(Clone, Debug)]
enum CompiledGuard {
    Const(bool),
    Atom(CompiledPoly),
    And(Vec<CompiledGuard>),
    Or(Vec<CompiledGuard>),
}

impl CompiledGuard {
    fn new(g: &Guard, index: &dyn Fn(&Var) -> usize) -> CompiledGuard {
        match g {
            Guard::True => CompiledGuard::Const(true),
            Guard::False => CompiledGuard::Const(false),
            Guard::Atom(p) => CompiledGuard::Atom(CompiledPoly::new(p, index)),
            Guard::And(gs) => CompiledGuard::And(gs.iter().map(|g| CompiledGuard::new(g, index)).collect()),
            Guard::Or(gs) => CompiledGuard::Or(gs.iter().map(|g| CompiledGuard::new(g, index)).collect()),
        }
    }

    fn holds(&self, s: &[BigInt]) -> bool {
        match self {
            CompiledGuard::Const(b) => *b,
            CompiledGuard::Atom(p) => p.eval(s).is_positive(),
            CompiledGuard::And(gs) => gs.iter().all(|g| g.holds(s)),
            CompiledGuard::Or(gs) => gs.iter().any(|g| g.holds(s)),
        }
    }
}

#[derive(Clone, Debug)]
struct CompiledTransition {
    source: usize,
    target: usize,
    guard: CompiledGuard,
    update: Vec<CompiledPoly>,
}

/// A program compiled for fast repeated execution.
#[derive(Clone, Debug)]
pub struct Executor<'a> {
    program: &'a Program,
    transitions: Vec<CompiledTransition>,
    /// Runs stop once a value needs more bits than this.
    pub max_bits: u64,
}

impl<'a> Executor<'a> {
    pub fn new(program: &'a Program) -> Executor<'a> {
        let vars = program.vars();
        let index = |v: &Var| vars.iter().position(|w| w == v).expect("program variable");
        let loc = |l: &Location| program.locations().iter().position(|m| m == l).expect("program location");
        let transitions = program
            .transitions()
            .iter()
            .map(|t| CompiledTransition {
                source: loc(&t.source),
                target: loc(&t.target),
                guard: CompiledGuard::new(&t.guard, &index),
                update: vars.iter().map(|v| CompiledPoly::new(&t.update[v], &index)).collect(),
            })
            .collect();
        Executor { program, transitions, max_bits: 1 << 16 }
    }

    /// Runs from `(l0, s0)` for at most `max_steps` steps.
    pub fn run(&self, s0: &IntState, max_steps: usize, sched: &mut dyn Scheduler) -> Trace {
        let p = self.program;
        let to_state = |s: &[BigInt]| -> IntState { p.vars().iter().cloned().zip(s.iter().cloned()).collect() };
        let mut s: Vec<BigInt> = p.vars().iter().map(|v| s0.get(v).cloned().unwrap_or_default()).collect();
        let start = Config { location: p.initial().clone(), state: to_state(&s) };
        let mut loc = p.locations().iter().position(|l| l == p.initial()).expect("initial location");
        let mut steps = Vec::new();
        let mut enabled = Vec::new();
        let halt = loop {
            if steps.len() >= max_steps {
                break Halt::StepLimit;
            }
            enabled.clear();
            enabled.extend(
                self.transitions.iter().enumerate().filter(|(_, t)| t.source == loc && t.guard.holds(&s)).map(|(i, _)| i),
            );
            if enabled.is_empty() {
                break Halt::Stuck;
            }
            let id = sched.choose(&enabled);
            let t = &self.transitions[id];
            s = t.update.iter().map(|q| q.eval(&s)).collect();
            loc = t.target;
            steps.push((id, Config { location: p.locations()[loc].clone(), state: to_state(&s) }));
            if s.iter().any(|x| x.bits() > self.max_bits) {
                break Halt::Overflow;
            }
        };
        Trace { start, steps, halt }
    }
}

/// Runs `p` from `(l0, s0)` for at most `max_steps` steps.
pub fn run(p: &Program, s0: &IntState, max_steps: usize, sched: &mut dyn Scheduler) -> Trace {
    Executor::new(p).run(s0, max_steps, sched)
}
