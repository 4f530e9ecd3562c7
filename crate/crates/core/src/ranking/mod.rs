//! Linear ranking functions synthesized through Farkas' lemma.

mod lp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

pub use lp::{lp_solve, LinearSystem, LpOutcome};

use crate::arith::{BoundExpr, Polynomial, Rational, Var};
use crate::program::{Guard, Loop, Program, Update};

/// `f_l(x) = sum_v coeffs[v] * v + constant + offsets[l]` at location slot `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRankingFunction {
    pub coeffs: BTreeMap<Var, Rational>,
    pub constant: Rational,
    /// Non-negative per-location shifts; empty means all zero.
    pub offsets: Vec<Rational>,
}

impl LinearRankingFunction {
    pub fn to_polynomial(&self) -> Polynomial {
        self.coeffs
            .iter()
            .fold(Polynomial::constant(self.constant.clone()), |acc, (v, c)| acc + Polynomial::var(v.clone()).scale(c))
    }

    pub fn scale(&self, k: &Rational) -> LinearRankingFunction {
        LinearRankingFunction {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
            offsets: self.offsets.iter().map(|d| d * k).collect(),
        }
    }

    pub fn offset(&self, slot: usize) -> Rational {
        self.offsets.get(slot).cloned().unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for LinearRankingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankingError {
    #[error("no variable has linear updates on every transition in scope")]
    NonLinear,
}

/// A transition as seen by the synthesizer.
#[derive(Clone, Copy, Debug)]
pub struct RankedTransition<'a> {
    pub guard: &'a Guard,
    pub update: &'a Update,
    /// Must decrease `f` by at least one (otherwise must not increase it).
    pub strict: bool,
    /// Location slots of source and target.
    pub source: usize,
    pub target: usize,
}

/// A conjunction of linear constraints `g . x <= h` over an indexed variable list.
struct Polyhedron {
    g: Vec<Vec<Rational>>,
    h: Vec<Rational>,
}

/// Integer tightening `p > 0  ~>  -p <= -1`, after scaling to integer coefficients.
/// Non-linear atoms are dropped, which weakens the guard.
fn polyhedron(clause: &[Polynomial], vars: &[Var]) -> Polyhedron {
    let mut g = Vec::new();
    let mut h = Vec::new();
    for atom in clause {
        let scaled = atom.scale(&Rational::from_integer(atom.denominator_lcm()));
        let Some((lin, c0)) = scaled.as_affine() else { continue };
        if lin.keys().any(|v| !vars.contains(v)) {
            continue;
        }
        g.push(vars.iter().map(|v| -lin.get(v).cloned().unwrap_or_else(Rational::zero)).collect());
        h.push(c0 - Rational::one());
    }
    Polyhedron { g, h }
}

/// Variables whose update is affine on every transition and whose own
/// updates only read variables known to the analysis.
fn support(ts: &[RankedTransition<'_>], vars: &[Var]) -> Vec<Var> {
    vars.iter()
        .filter(|v| {
            ts.iter().all(|t| match t.update.get(v) {
                None => true,
                Some(p) => p.as_affine().is_some_and(|(lin, _)| lin.keys().all(|w| vars.contains(w))),
            })
        })
        .cloned()
        .collect()
}

/// Index layout of the unknowns of a Farkas system.
#[derive(Clone, Debug)]
pub struct FarkasLayout {
    /// Support variables; their coefficients come first.
    pub support: Vec<Var>,
    pub constant: usize,
    /// First absolute-value helper column.
    pub abs_start: usize,
    /// First location offset column.
    pub offset_start: usize,
    pub locations: usize,
    pub dim: usize,
}

/// Encodes the existence of a linear ranking function:
/// per clause of a strict transition, `guard => f(x) - f(x') >= 1` and
/// `guard => f(x) >= 0`; per clause of a weak transition, `guard => f(x') <= f(x)`.
/// Each location may shift `f` by a non-negative constant.
/// The objective minimizes `sum |c_v| + |c_0| + sum d_l`.
pub fn farkas_encode(ts: &[RankedTransition<'_>], vars: &[Var]) -> Result<(LinearSystem, FarkasLayout), RankingError> {
    let support = support(ts, vars);
    if support.is_empty() {
        return Err(RankingError::NonLinear);
    }
    let k = support.len();
    let constant = k;
    let abs_start = k + 1;
    let offset_start = abs_start + k + 1;
    let locations = ts.iter().map(|t| t.source.max(t.target) + 1).max().unwrap_or(1);
    struct Block {
        poly: Polyhedron,
        t: usize,
        kind: u8, // 0 decrease, 1 non-increase, 2 bounded
        offset: usize,
    }
    let mut blocks = Vec::new();
    let mut next = offset_start + locations;
    for (ti, t) in ts.iter().enumerate() {
        for clause in t.guard.dnf() {
            let kinds: &[u8] = if t.strict { &[0, 2] } else { &[1] };
            for &kind in kinds {
                let poly = polyhedron(&clause, vars);
                let len = poly.h.len();
                blocks.push(Block { poly, t: ti, kind, offset: next });
                next += len;
            }
        }
    }
    let dim = next;
    let zero = || vec![Rational::zero(); dim];
    let mut sys = LinearSystem::new(dim);
    for l in 0..locations {
        let mut row = zero();
        row[offset_start + l] = -Rational::one();
        sys.le(row, Rational::zero());
    }
    // |c| helpers
    for i in 0..=k {
        for s in [1i64, -1] {
            let mut row = zero();
            row[i] = Rational::from_integer(s.into());
            row[abs_start + i] = -Rational::one();
            sys.le(row, Rational::zero());
        }
    }
    let coeff_of = |p: &Polynomial, x: &Var| -> Rational {
        p.as_affine().and_then(|(lin, _)| lin.get(x).cloned()).unwrap_or_else(Rational::zero)
    };
    for b in &blocks {
        let t = &ts[b.t];
        let m = b.poly.h.len();
        for j in 0..m {
            let mut row = zero();
            row[b.offset + j] = -Rational::one();
            sys.le(row, Rational::zero());
        }
        // lambda^T G = w(c), one equation per variable
        for (xi, x) in vars.iter().enumerate() {
            let mut row = zero();
            for j in 0..m {
                row[b.offset + j] = b.poly.g[j][xi].clone();
            }
            for (vi, v) in support.iter().enumerate() {
                let self_coeff = if v == x { Rational::one() } else { Rational::zero() };
                let w = match b.kind {
                    2 => -self_coeff,
                    _ => {
                        let image = t.update.get(v).cloned().unwrap_or_else(|| Polynomial::var(v.clone()));
                        coeff_of(&image, x) - self_coeff
                    }
                };
                row[vi] -= w;
            }
            sys.equal(row, Rational::zero());
        }
        // lambda^T h (+ c^T u) <= -1 / 0, or lambda^T h - c0 <= 0
        let mut row = zero();
        for j in 0..m {
            row[b.offset + j] = b.poly.h[j].clone();
        }
        match b.kind {
            2 => {
                row[constant] = -Rational::one();
                row[offset_start + t.source] -= Rational::one();
                sys.le(row, Rational::zero());
            }
            kind => {
                for (vi, v) in support.iter().enumerate() {
                    let image = t.update.get(v).cloned().unwrap_or_else(|| Polynomial::var(v.clone()));
                    row[vi] += image.constant_term();
                }
                row[offset_start + t.target] += Rational::one();
                row[offset_start + t.source] -= Rational::one();
                let rhs = if kind == 0 { -Rational::one() } else { Rational::zero() };
                sys.le(row, rhs);
            }
        }
    }
    let mut obj = zero();
    for c in obj.iter_mut().skip(abs_start).take(k + 1 + locations) {
        *c = Rational::one();
    }
    sys.objective = Some(obj);
    Ok((sys, FarkasLayout { support, constant, abs_start, offset_start, locations, dim }))
}

fn minimum_over(clause: &[Polynomial], vars: &[Var], target: &Polynomial) -> LpOutcome {
    let poly = polyhedron(clause, vars);
    let mut sys = LinearSystem::new(vars.len());
    for (g, h) in poly.g.into_iter().zip(poly.h) {
        sys.le(g, h);
    }
    let (lin, _) = target.as_affine().expect("linear target");
    sys.objective = Some(vars.iter().map(|v| lin.get(v).cloned().unwrap_or_else(Rational::zero)).collect());
    lp_solve(&sys)
}

/// Re-checks a ranking function directly: over each clause polyhedron,
/// `f - f(x')` is at least one (strict) or non-negative (weak), and `f`
/// is non-negative on strict transitions.
pub fn certify(f: &LinearRankingFunction, ts: &[RankedTransition<'_>], vars: &[Var]) -> bool {
    let fp = f.to_polynomial();
    for t in ts {
        let Some(after) = f
            .coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| {
                let image = t.update.get(v).cloned().unwrap_or_else(|| Polynomial::var(v.clone()));
                image.as_affine().map(|_| image.scale(c))
            })
            .try_fold(Polynomial::constant(f.constant.clone()), |acc, p| p.map(|p| acc + p))
        else {
            return false;
        };
        let shift = f.offset(t.source) - f.offset(t.target);
        let diff = &fp - &after + Polynomial::constant(shift);
        let bounded = &fp + &Polynomial::constant(f.offset(t.source));
        if diff.vars().iter().any(|v| !vars.contains(v)) {
            return false;
        }
        let need = if t.strict { Rational::one() } else { Rational::zero() };
        for clause in t.guard.dnf() {
            let ok = |target: &Polynomial, bound: &Rational| match minimum_over(&clause, vars, target) {
                LpOutcome::Infeasible => true,
                LpOutcome::Optimal { value, .. } => value + target.constant_term() >= *bound,
                LpOutcome::Unbounded { .. } => false,
            };
            if !ok(&diff, &need) || (t.strict && !ok(&bounded, &Rational::zero())) {
                return false;
            }
        }
    }
    true
}

/// Synthesizes and certifies a linear ranking function, if one exists.
pub fn synthesize(ts: &[RankedTransition<'_>], vars: &[Var]) -> Option<LinearRankingFunction> {
    let (sys, layout) = farkas_encode(ts, vars).ok()?;
    let point = match lp_solve(&sys) {
        LpOutcome::Optimal { point, .. } => point,
        _ => return None,
    };
    let coeffs: BTreeMap<Var, Rational> = layout
        .support
        .iter()
        .enumerate()
        .filter(|(i, _)| !point[*i].is_zero())
        .map(|(i, v)| (v.clone(), point[i].clone()))
        .collect();
    let offsets = point[layout.offset_start..layout.offset_start + layout.locations].to_vec();
    let f = LinearRankingFunction { coeffs, constant: point[layout.constant].clone(), offsets };
    certify(&f, ts, vars).then_some(f)
}

/// The local runtime bound `ceil|f| + 1`, with the constant taken absolutely
/// and the largest location offset added.
pub fn local_runtime_from_lrf(f: &LinearRankingFunction) -> BoundExpr {
    let lin = f
        .coeffs
        .iter()
        .fold(Polynomial::zero(), |acc, (v, c)| acc + Polynomial::var(v.clone()).scale(c));
    let d = f.offsets.iter().max().cloned().unwrap_or_else(Rational::zero);
    let c0 = crate::arith::ceil_abs(&f.constant.abs()) + crate::arith::ceil_abs(&d);
    BoundExpr::sum([BoundExpr::ceil_abs_of(&lin), BoundExpr::Const(c0), BoundExpr::one()]).simplify()
}

/// Ranking function for transitions `scope` of a program, where `strict` must decrease.
///
/// Offsets are indexed by the order in which locations first occur in `scope`.
pub fn rank_program(p: &Program, scope: &[usize], strict: &BTreeSet<usize>) -> Option<LinearRankingFunction> {
    let mut slots: Vec<&str> = Vec::new();
    let mut slot = |name: &'_ str| -> usize {
        slots.iter().position(|s| *s == name).unwrap_or_else(|| {
            slots.push(p.locations().iter().find(|l| l.name() == name).unwrap().name());
            slots.len() - 1
        })
    };
    let ts: Vec<RankedTransition<'_>> = scope
        .iter()
        .map(|&i| {
            let t = p.transition(i);
            let (source, target) = (slot(t.source.name()), slot(t.target.name()));
            RankedTransition { guard: &t.guard, update: &t.update, strict: strict.contains(&i), source, target }
        })
        .collect();
    synthesize(&ts, p.vars())
}

/// Runtime bound for a single loop from a linear ranking function.
pub fn loop_runtime_bound(l: &Loop) -> Option<BoundExpr> {
    let vars: Vec<Var> = l.vars().cloned().collect();
    let t = RankedTransition { guard: &l.guard, update: &l.update, strict: true, source: 0, target: 0 };
    synthesize(&[t], &vars).map(|f| local_runtime_from_lrf(&f))
}
