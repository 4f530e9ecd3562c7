//! Runtime and size bounds for single loops.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed};

use crate::arith::{BoundExpr, BoundValue, NatState, PolyExp, Polynomial, Rational, Var};
use crate::program::{then, Guard, Loop, Update};
use crate::ranking::loop_runtime_bound;
use crate::transform::{
    chain, closed_form_solvable, closed_form_twn, detect_prs, partition_blocks, to_twn, Automorphism, ClosedForm,
    TransformError, DEGREE_CAP, PERIOD_CEILING,
};

/// Size bound per loop variable.
pub type LoopSizeBound = BTreeMap<Var, BoundExpr>;

/// How a loop's runtime bound was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopPath {
    TwnDirect,
    PrsChained,
    RankingFallback,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoopVerdict {
    BoundedTerminating { runtime: BoundExpr, size: LoopSizeBound },
    Unknown,
}

/// Everything `analyze_loop` learned about a loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopAnalysis {
    pub runtime: Option<BoundExpr>,
    pub size: Option<LoopSizeBound>,
    pub period: Option<u64>,
    pub path: Option<LoopPath>,
    /// Runtime bound of the chained loop in the original variables.
    pub chained_runtime: Option<BoundExpr>,
    pub notes: Vec<String>,
}

impl LoopAnalysis {
    pub fn verdict(&self) -> LoopVerdict {
        match (&self.runtime, &self.size) {
            (Some(r), Some(s)) if r.is_finite() && s.values().all(BoundExpr::is_finite) => {
                LoopVerdict::BoundedTerminating { runtime: r.clone(), size: s.clone() }
            }
            _ => LoopVerdict::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopConfig {
    pub max_period: u64,
    pub degree_cap: u32,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig { max_period: PERIOD_CEILING, degree_cap: DEGREE_CAP }
    }
}

/// Size bound from a closed form and a runtime bound:
/// `ceil|cl_x|[n / r] + sum_{i < n0} ceil|eta^i(x)|`.
pub fn size_bound_loop(l: &Loop, cf: &ClosedForm, r: &BoundExpr) -> LoopSizeBound {
    let mut prefix: Vec<Update> = Vec::new();
    let mut power: Update = l.update.keys().map(|v| (v.clone(), Polynomial::var(v.clone()))).collect();
    for _ in 0..cf.start {
        prefix.push(power.clone());
        power = then(&power, &l.update);
    }
    l.update
        .keys()
        .map(|x| {
            let main = cf.get(x).ceil_abs().to_bound(r).expect("ceil_abs yields a natural form");
            let parts = std::iter::once(main).chain(prefix.iter().map(|u| BoundExpr::ceil_abs_of(&u[x])));
            (x.clone(), BoundExpr::sum(parts).simplify())
        })
        .collect()
}

enum AtomBound {
    Bound(BoundExpr),
    /// The closed form alternates in sign; chaining by two may help.
    Alternating,
    Outside,
}

/// Iterations after which `atom > 0` fails for good, if the atom's closed
/// form is polynomial in `n` with a negative constant leading coefficient.
fn atom_bound(atom: &Polynomial, cf: &ClosedForm) -> AtomBound {
    let cl = PolyExp::compose_poly(atom, &cf.forms);
    let minus_one = -Rational::one();
    if cl.bases().contains(&minus_one) {
        return AtomBound::Alternating;
    }
    let Some(coeffs) = cl.n_coefficients() else { return AtomBound::Outside };
    let Some((&k, lead)) = coeffs.iter().next_back() else { return AtomBound::Outside };
    let Some(c) = lead.as_constant() else { return AtomBound::Outside };
    if k == 0 || !c.is_negative() {
        return AtomBound::Outside;
    }
    let d = crate::arith::ceil_abs(&c.recip());
    let lower = |j: u32| coeffs.get(&j).map_or_else(BoundExpr::zero, BoundExpr::ceil_abs_of);
    let b = if k == 1 {
        BoundExpr::prod([BoundExpr::Const(d), lower(0)])
    } else {
        let sum = BoundExpr::sum(std::iter::once(BoundExpr::one()).chain((0..k).map(lower)));
        BoundExpr::prod([BoundExpr::Const(d), sum])
    };
    AtomBound::Bound(b.simplify())
}

/// Sum of the values of `b` with all variables set to 1, 3 and 10.
/// Used to pick among several sound bounds.
pub(crate) fn probe_score(b: &BoundExpr) -> BigUint {
    let vars = b.vars();
    [1u64, 3, 10]
        .iter()
        .map(|&k| {
            let s: NatState = vars.iter().map(|v| (v.clone(), BigUint::from(k))).collect();
            match b.eval(&s) {
                BoundValue::Finite(x) => x,
                BoundValue::Omega => BigUint::from(u64::MAX),
            }
        })
        .sum()
}

/// Picks the candidate with the smallest probe score.
pub(crate) fn smallest<I: IntoIterator<Item = BoundExpr>>(cands: I) -> Option<BoundExpr> {
    cands.into_iter().map(|c| (probe_score(&c), c)).min_by(|a, b| a.0.cmp(&b.0)).map(|(_, c)| c)
}

fn runtime_from_closed_form(guard: &Guard, cf: &ClosedForm) -> Result<BoundExpr, bool> {
    let mut alternating = false;
    let mut parts = Vec::new();
    for clause in guard.dnf() {
        let mut cands = Vec::new();
        for atom in &clause {
            match atom_bound(atom, cf) {
                AtomBound::Bound(b) => cands.push(b),
                AtomBound::Alternating => alternating = true,
                AtomBound::Outside => {}
            }
        }
        match smallest(cands) {
            Some(b) => parts.push(b),
            None => return Err(alternating),
        }
    }
    if cf.start > 0 {
        parts.push(BoundExpr::constant(cf.start as u64));
    }
    Ok(BoundExpr::sum(parts).simplify())
}

/// Runtime bound of a twn loop when every guard clause has an atom whose
/// closed form eventually decreases polynomially.
///
/// Conjunctions take the smallest single-atom bound, disjunctions the sum.
pub fn runtime_bound_twn(l: &Loop, cfg: &LoopConfig) -> Option<BoundExpr> {
    let cf = closed_form_twn(&l.update, cfg.degree_cap).ok()?;
    match runtime_from_closed_form(&l.guard, &cf) {
        Ok(b) => Some(b),
        Err(true) => {
            let l2 = chain(l, 2);
            let cf2 = closed_form_twn(&l2.update, cfg.degree_cap).ok()?;
            let r2 = runtime_from_closed_form(&l2.guard, &cf2).ok()?;
            Some(BoundExpr::sum([BoundExpr::prod([BoundExpr::constant(2), r2]), BoundExpr::one()]).simplify())
        }
        Err(false) => None,
    }
}

/// `r[v / ceil|forward(v)|]`.
fn transform_bound(r: &BoundExpr, theta: &Automorphism) -> BoundExpr {
    if theta.is_identity() {
        return r.clone();
    }
    let sub: BTreeMap<Var, BoundExpr> =
        theta.forward.iter().map(|(v, p)| (v.clone(), BoundExpr::ceil_abs_of(p))).collect();
    r.subst(&sub).simplify()
}

/// `p * r + p - 1`.
fn lift_period(p: u64, r: &BoundExpr) -> BoundExpr {
    if p == 1 {
        return r.clone();
    }
    BoundExpr::sum([BoundExpr::prod([BoundExpr::constant(p), r.clone()]), BoundExpr::constant(p - 1)]).simplify()
}

/// A periodic-rational loop chained to its period and brought into twn form.
#[derive(Clone, Debug)]
pub struct ChainedLoop {
    pub period: u64,
    pub chained: Loop,
    pub theta: Automorphism,
    pub twn: Loop,
    /// Closed form of the twn loop.
    pub cf_twn: ClosedForm,
    /// Closed form of the chained loop in the original variables.
    pub cf: ClosedForm,
}

pub fn prepare_prs(l: &Loop, cfg: &LoopConfig) -> Result<ChainedLoop, String> {
    let period = detect_prs(l, cfg.max_period).ok_or_else(|| match partition_blocks(&l.update) {
        None => "update is not solvable".to_string(),
        Some(_) => format!("not periodic rational within period cap {}", cfg.max_period),
    })?;
    let chained = chain(l, period as u32);
    let part = partition_blocks(&chained.update).ok_or("chained update is not solvable")?;
    let (theta, eta_t) = to_twn(&chained.update, &part).map_err(|e| e.to_string())?;
    let cf_twn = closed_form_twn(&eta_t, cfg.degree_cap).map_err(|e: TransformError| e.to_string())?;
    let cf = if theta.is_identity() { cf_twn.clone() } else { closed_form_solvable(&theta, &cf_twn) };
    let twn = Loop { guard: chained.guard.compose(&theta.inverse), update: eta_t };
    Ok(ChainedLoop { period, chained, theta, twn, cf_twn, cf })
}

/// Runtime bound of a prs loop: `p * ceil|theta(r)| + p - 1` for a bound `r`
/// of the chained, transformed loop. Also returns `ceil|theta(r)|`.
pub fn runtime_bound_prs_with(c: &ChainedLoop) -> Option<(BoundExpr, BoundExpr)> {
    let r_t = match runtime_from_closed_form(&c.twn.guard, &c.cf_twn) {
        Ok(r) => r,
        Err(true) => runtime_bound_twn(&c.twn, &LoopConfig::default())?,
        Err(false) => return None,
    };
    let r_p = transform_bound(&r_t, &c.theta);
    Some((lift_period(c.period, &r_p), r_p))
}

pub fn runtime_bound_prs(l: &Loop, cfg: &LoopConfig) -> Option<BoundExpr> {
    let c = prepare_prs(l, cfg).ok()?;
    runtime_bound_prs_with(&c).map(|(r, _)| r)
}

/// Size bound of a prs loop from its chained loop:
/// `sum_{i < p} ceil|eta^i(x)|[v / sb_p(v)]`.
pub fn size_bound_prs_with(l: &Loop, c: &ChainedLoop, r_p: &BoundExpr) -> LoopSizeBound {
    let sb_p = size_bound_loop(&c.chained, &c.cf, r_p);
    let mut power: Update = l.update.keys().map(|v| (v.clone(), Polynomial::var(v.clone()))).collect();
    let mut parts: BTreeMap<Var, Vec<BoundExpr>> = BTreeMap::new();
    for _ in 0..c.period {
        for (x, p) in &power {
            parts.entry(x.clone()).or_default().push(BoundExpr::ceil_abs_of(p).subst(&sb_p));
        }
        power = then(&power, &l.update);
    }
    parts.into_iter().map(|(x, ps)| (x, BoundExpr::sum(ps).simplify())).collect()
}

pub fn size_bound_prs(l: &Loop, cfg: &LoopConfig) -> Option<LoopSizeBound> {
    let c = prepare_prs(l, cfg).ok()?;
    let (_, r_p) = runtime_bound_prs_with(&c)?;
    Some(size_bound_prs_with(l, &c, &r_p))
}

/// True if no closed form depends on the iteration count after taking
/// absolute values, so size bounds need no runtime bound.
fn iteration_free(cf: &ClosedForm) -> bool {
    cf.forms.values().all(|f| f.ceil_abs().terms().all(|(_, a, b)| a == 0 && *b <= Rational::one()))
}

/// Full loop analysis: closed forms when the loop is periodic rational,
/// with a linear ranking function as fallback for the runtime bound.
pub fn analyze_loop(l: &Loop, cfg: &LoopConfig) -> LoopAnalysis {
    let mut out = LoopAnalysis {
        runtime: None,
        size: None,
        period: None,
        path: None,
        chained_runtime: None,
        notes: Vec::new(),
    };
    if l.guard == Guard::False {
        out.runtime = Some(BoundExpr::zero());
        out.size = Some(l.update.keys().map(|v| (v.clone(), BoundExpr::Var(v.clone()))).collect());
        out.notes.push("guard is unsatisfiable".into());
        return out;
    }
    let fallback = |out: &mut LoopAnalysis| {
        if let Some(r) = loop_runtime_bound(l) {
            out.runtime = Some(r);
            out.path = Some(LoopPath::RankingFallback);
        } else {
            out.notes.push("no linear ranking function".into());
        }
    };
    let c = match prepare_prs(l, cfg) {
        Ok(c) => c,
        Err(e) => {
            out.notes.push(e);
            fallback(&mut out);
            return out;
        }
    };
    out.period = Some(c.period);
    let r_p = match runtime_bound_prs_with(&c) {
        Some((r, r_p)) => {
            out.runtime = Some(r);
            out.path = Some(if c.period == 1 && c.theta.is_identity() { LoopPath::TwnDirect } else { LoopPath::PrsChained });
            r_p
        }
        None => {
            out.notes.push("guard closed forms leave the decreasing fragment".into());
            fallback(&mut out);
            match &out.runtime {
                Some(r) => r.clone(),
                None if iteration_free(&c.cf) => BoundExpr::zero(),
                None => return out,
            }
        }
    };
    out.size = Some(size_bound_prs_with(l, &c, &r_p));
    if out.runtime.is_some() {
        out.chained_runtime = Some(r_p);
    }
    out
}

/// True if no size bound contains an exponential.
pub fn is_polynomial(sb: &LoopSizeBound) -> bool {
    sb.values().all(|b| !b.has_exponential())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{parse_guard, parse_polynomial};

    fn mk(guard: &str, pairs: &[(&str, &str)]) -> Loop {
        Loop::new(
            parse_guard(guard).unwrap(),
            pairs.iter().map(|(v, p)| (Var::new(v), parse_polynomial(p).unwrap())).collect(),
        )
    }

    fn loop1() -> Loop {
        mk("x3 > 0", &[("x1", "3*x1+2*x2"), ("x2", "-5*x1-3*x2"), ("x3", "x3-1"), ("x4", "x4+x3^2")])
    }

    #[test]
    fn size_bound_of_the_sum_of_squares() {
        let l = mk("x3 > 0", &[("x3", "x3-1"), ("x4", "x4+x3^2")]);
        let cf = closed_form_twn(&l.update, DEGREE_CAP).unwrap();
        let sb = size_bound_loop(&l, &cf, &BoundExpr::var("x3"));
        assert_eq!(sb[&Var::new("x4")].to_string(), "3*x3^3+2*x3^2+x3+x4");
        assert_eq!(sb[&Var::new("x3")].to_string(), "2*x3");
    }

    #[test]
    fn identity_variable_bounds_itself() {
        let l = mk("x3 > 0", &[("x3", "x3-1"), ("x5", "x5")]);
        let cf = closed_form_twn(&l.update, DEGREE_CAP).unwrap();
        assert_eq!(size_bound_loop(&l, &cf, &BoundExpr::var("x3"))[&Var::new("x5")].to_string(), "x5");
    }

    #[test]
    fn chained_loop_runtime() {
        let l2 = chain(&loop1(), 2);
        assert_eq!(runtime_bound_twn(&l2, &LoopConfig::default()).unwrap().to_string(), "x3");
        let cf = closed_form_twn(&l2.update, DEGREE_CAP).unwrap();
        let sb = size_bound_loop(&l2, &cf, &BoundExpr::var("x3"));
        assert_eq!(sb[&Var::new("x1")].to_string(), "x1");
    }

    #[test]
    fn twn_fragment_examples() {
        let cfg = LoopConfig::default();
        assert!(runtime_bound_twn(&mk("1 > 0", &[("x", "x-1")]), &cfg).is_none());
        assert_eq!(runtime_bound_twn(&mk("x1 > 0", &[("x1", "x1-3")]), &cfg).unwrap().to_string(), "x1");
        assert!(runtime_bound_twn(&mk("x1 > 0", &[("x1", "x1+1")]), &cfg).is_none());
    }

    #[test]
    fn running_loop_analysis() {
        let a = analyze_loop(&loop1(), &LoopConfig::default());
        assert_eq!(a.period, Some(2));
        assert_eq!(a.path, Some(LoopPath::PrsChained));
        assert_eq!(a.runtime.as_ref().unwrap().to_string(), "2*x3+1");
        assert_eq!(a.chained_runtime.as_ref().unwrap().to_string(), "x3");
        let sb = a.size.unwrap();
        assert_eq!(sb[&Var::new("x1")].to_string(), "4*x1+2*x2");
        assert_eq!(sb[&Var::new("x2")].to_string(), "5*x1+4*x2");
    }

    #[test]
    fn unknown_loops() {
        let cfg = LoopConfig::default();
        assert_eq!(analyze_loop(&mk("x1 > 0", &[("x1", "x1+1")]), &cfg).verdict(), LoopVerdict::Unknown);
        let sq = analyze_loop(&mk("x1 > 0", &[("x1", "x1^2")]), &cfg);
        assert_eq!(sq.verdict(), LoopVerdict::Unknown);
        assert_eq!(sq.notes[0], "update is not solvable");
    }

    #[test]
    fn doubling_is_exponential() {
        let a = analyze_loop(&mk("x3 > 0", &[("x1", "2*x1"), ("x3", "x3-1")]), &LoopConfig::default());
        let sb = a.size.unwrap();
        assert!(!is_polynomial(&sb));
        assert_eq!(sb[&Var::new("x1")].to_string(), "x1*2^x3");
    }
}
