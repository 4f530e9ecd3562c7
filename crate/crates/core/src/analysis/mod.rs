//! Whole-program size and runtime bounds.
//!
//! Local bounds for self-loops, simple cycles and ranked subprograms are
//! lifted to global bounds by instantiating them with the bounds of their
//! entry transitions. Size and runtime passes alternate until no entry
//! improves.

mod cycles;
mod rvg;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::arith::{asymptotic_class, AsymptoticClass, BoundExpr, Var};
use crate::loop_bounds::{analyze_loop, smallest, LoopConfig, LoopPath};
use crate::program::{loop_of_transition, then, identity_update, Program, Transition, Update};
use crate::ranking::{local_runtime_from_lrf, rank_program};

pub use cycles::{chain_transitions, find_simple_cycles_capped, SimpleCycle};

/// Programs with more simple cycles than this only use their self-loops.
pub const CYCLE_CAP: usize = 10_000;

/// Size bounds per transition and variable; missing entries are omega.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeBoundMap {
    map: BTreeMap<(usize, Var), BoundExpr>,
}

impl SizeBoundMap {
    pub fn new() -> SizeBoundMap {
        SizeBoundMap::default()
    }

    pub fn get(&self, t: usize, x: &Var) -> BoundExpr {
        self.map.get(&(t, x.clone())).cloned().unwrap_or(BoundExpr::Omega)
    }

    pub fn set(&mut self, t: usize, x: Var, b: BoundExpr) {
        self.map.insert((t, x), b);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Var), &BoundExpr)> {
        self.map.iter()
    }

    /// `v -> SB(r, v)` for the given variables.
    pub fn at<'a, I: IntoIterator<Item = &'a Var>>(&self, r: usize, vars: I) -> BTreeMap<Var, BoundExpr> {
        vars.into_iter().map(|v| (v.clone(), self.get(r, v))).collect()
    }
}

/// Runtime bounds per transition; missing entries are omega.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuntimeBoundMap {
    map: BTreeMap<usize, BoundExpr>,
}

impl RuntimeBoundMap {
    pub fn new() -> RuntimeBoundMap {
        RuntimeBoundMap::default()
    }

    pub fn get(&self, t: usize) -> BoundExpr {
        self.map.get(&t).cloned().unwrap_or(BoundExpr::Omega)
    }

    pub fn set(&mut self, t: usize, b: BoundExpr) {
        self.map.insert(t, b);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &BoundExpr)> {
        self.map.iter()
    }
}

/// Variable to bound, valid for runs of a subprogram started by an entry.
pub type LocalSizeBound = BTreeMap<Var, BoundExpr>;

/// Instantiated bounds with more nodes than this are given up as omega.
pub const MAX_BOUND_SIZE: usize = 2_000;

fn capped(b: BoundExpr) -> BoundExpr {
    if b.size() > MAX_BOUND_SIZE {
        BoundExpr::Omega
    } else {
        b
    }
}

/// `b[v / SB(r, v)]`, or omega if the result gets too large.
pub fn instantiate(b: &BoundExpr, r: usize, sb: &SizeBoundMap) -> BoundExpr {
    let vars = b.vars();
    if vars.is_empty() {
        return b.clone();
    }
    let e = b.subst(&sb.at(r, &vars));
    if e.size() > 4 * MAX_BOUND_SIZE {
        return BoundExpr::Omega;
    }
    capped(e.simplify())
}

/// Transitions outside `scope` that end in a source location of `scope`.
pub fn entry_transitions(p: &Program, scope: &BTreeSet<usize>) -> BTreeSet<usize> {
    let sources: BTreeSet<&str> = scope.iter().map(|&t| p.transition(t).source.name()).collect();
    p.transitions()
        .iter()
        .filter(|t| !scope.contains(&t.id) && sources.contains(t.target.name()))
        .map(|t| t.id)
        .collect()
}

/// `SB(t0, x) = ceil|eta(x)|` and `RB(t0) = 1` for initial transitions.
pub fn initial_bounds(p: &Program) -> (SizeBoundMap, RuntimeBoundMap) {
    let mut sb = SizeBoundMap::new();
    let mut rb = RuntimeBoundMap::new();
    for t in p.initial_transitions() {
        rb.set(t.id, BoundExpr::one());
        for x in p.vars() {
            sb.set(t.id, x.clone(), BoundExpr::ceil_abs_of(&t.update[x]));
        }
    }
    (sb, rb)
}

/// Sum over the entries of `scope` of the local bound instantiated with the
/// entry's size bounds. Omega if an entry is unbounded.
fn lift_local(p: &Program, scope: &BTreeSet<usize>, local: &BoundExpr, sb: &SizeBoundMap) -> BoundExpr {
    if local.vars().is_empty() {
        return local.clone();
    }
    BoundExpr::sum(entry_transitions(p, scope).into_iter().map(|r| instantiate(local, r, sb))).simplify()
}

/// `SB'(t', x) = sum_{r in E(T')} SB_t'(x)[v / SB(r, v)]`; entries that
/// would become omega keep their old value.
pub fn lift_size_bound(
    p: &Program,
    t_prime: usize,
    scope: &BTreeSet<usize>,
    local: &LocalSizeBound,
    sb: &SizeBoundMap,
) -> SizeBoundMap {
    let mut out = sb.clone();
    for (x, b) in local {
        let lifted = lift_local(p, scope, b, sb);
        if lifted.is_finite() {
            out.set(t_prime, x.clone(), lifted);
        }
    }
    out
}

/// `RB(t) = sum_{r in E(T')} RB(r) * local[v / SB(r, v)]` for all `t` in `strict`.
pub fn lift_runtime_bound(
    p: &Program,
    strict: &BTreeSet<usize>,
    scope: &BTreeSet<usize>,
    local: &BoundExpr,
    sb: &SizeBoundMap,
    rb: &RuntimeBoundMap,
) -> RuntimeBoundMap {
    let lifted = BoundExpr::sum(
        entry_transitions(p, scope).into_iter().map(|r| BoundExpr::prod([rb.get(r), instantiate(local, r, sb)])),
    )
    .simplify();
    let mut out = rb.clone();
    if lifted.is_finite() {
        for &t in strict {
            out.set(t, lifted.clone());
        }
    }
    out
}

/// Loop bounds for a chained sequence of transitions, over all program variables.
#[derive(Clone, Debug)]
struct ChainInfo {
    runtime: Option<BoundExpr>,
    size: Option<LocalSizeBound>,
    path: Option<LoopPath>,
}

fn analyze_chain(p: &Program, ts: &[usize], cfg: &LoopConfig) -> ChainInfo {
    let refs: Vec<&Transition> = ts.iter().map(|&t| p.transition(t)).collect();
    let (guard, update) = chain_transitions(&refs, p.vars());
    let at = refs[0].source.clone();
    let t = Transition { id: refs[0].id, source: at.clone(), target: at, guard, update };
    let Some((l, ren)) = loop_of_transition(&t) else {
        return ChainInfo { runtime: None, size: None, path: None };
    };
    let a = analyze_loop(&l, cfg);
    let rename: BTreeMap<Var, BoundExpr> = ren.map.iter().map(|(a, b)| (a.clone(), BoundExpr::Var(b.clone()))).collect();
    let size = a.size.map(|s| {
        let renamed: BTreeMap<Var, BoundExpr> =
            s.iter().map(|(v, b)| (ren.map.get(v).cloned().unwrap_or_else(|| v.clone()), b.subst(&rename))).collect();
        p.vars()
            .iter()
            .map(|x| (x.clone(), renamed.get(x).cloned().unwrap_or_else(|| BoundExpr::Var(x.clone()))))
            .collect()
    });
    ChainInfo { runtime: a.runtime.map(|r| r.subst(&rename)), size, path: a.path }
}

/// The loop size bound of a self-loop, as a local size bound w.r.t. `{t}`.
pub fn local_size_bound_from_loop(p: &Program, t: usize, cfg: &LoopConfig) -> Option<LocalSizeBound> {
    if !p.transition(t).is_self_loop() {
        return None;
    }
    analyze_chain(p, &[t], cfg).size
}

/// A simple cycle with the loops of all its rotations.
struct CycleInfo {
    cycle: SimpleCycle,
    /// Rotation `k` starts with the cycle's `k`-th transition.
    rotations: Vec<ChainInfo>,
    /// Source location of each position.
    sources: Vec<String>,
    entries: BTreeSet<usize>,
}

impl CycleInfo {
    fn new(p: &Program, cycle: SimpleCycle, cfg: &LoopConfig) -> CycleInfo {
        let rotations = (0..cycle.len()).map(|k| analyze_chain(p, &cycle.rotation(k), cfg)).collect();
        let sources = cycle.transitions.iter().map(|&t| p.transition(t).source.name().to_string()).collect();
        let scope: BTreeSet<usize> = cycle.transitions.iter().copied().collect();
        let entries = entry_transitions(p, &scope);
        CycleInfo { cycle, rotations, sources, entries }
    }

    fn position_of_location(&self, loc: &str) -> Option<usize> {
        self.sources.iter().position(|s| s == loc)
    }

    /// Size bound after the `j`-th transition for runs entering at position `i`:
    /// the loop starting after `j`, applied to the state after the partial pass `i..=j`.
    fn size_after(&self, p: &Program, i: usize, j: usize) -> Option<LocalSizeBound> {
        let n = self.cycle.len();
        let start = (j + 1) % n;
        let size = self.rotations[start].size.as_ref()?;
        let mut prefix: Update = identity_update(p.vars());
        if i != start {
            let mut k = i;
            loop {
                prefix = then(&prefix, &p.transition(self.cycle.transitions[k]).update);
                if k == j {
                    break;
                }
                k = (k + 1) % n;
            }
        }
        let sub: BTreeMap<Var, BoundExpr> =
            prefix.iter().map(|(v, q)| (v.clone(), BoundExpr::ceil_abs_of(q))).collect();
        Some(size.iter().map(|(x, b)| (x.clone(), b.subst(&sub).simplify())).collect())
    }
}

/// Local size bound for the `target`-th transition of a simple cycle w.r.t.
/// the cycle: the sum over all entry locations of the per-location bounds.
pub fn local_size_bound_cycle(
    p: &Program,
    cycle: &SimpleCycle,
    target: usize,
    cfg: &LoopConfig,
) -> Option<LocalSizeBound> {
    let info = CycleInfo::new(p, cycle.clone(), cfg);
    let positions: BTreeSet<usize> = info
        .entries
        .iter()
        .filter_map(|&r| info.position_of_location(p.transition(r).target.name()))
        .collect();
    let mut out: BTreeMap<Var, Vec<BoundExpr>> = BTreeMap::new();
    for i in positions {
        for (x, b) in info.size_after(p, i, target)? {
            out.entry(x).or_default().push(b);
        }
    }
    Some(out.into_iter().map(|(x, bs)| (x, BoundExpr::sum(bs).simplify())).collect())
}

/// All simple cycles, or only the self-loops if there are more than `CYCLE_CAP`.
pub fn find_simple_cycles(p: &Program) -> Vec<SimpleCycle> {
    find_simple_cycles_capped(p, CYCLE_CAP).unwrap_or_else(|| {
        log::warn!("more than {CYCLE_CAP} simple cycles; using self-loops only");
        p.transitions().iter().filter(|t| t.is_self_loop()).map(|t| SimpleCycle { transitions: vec![t.id] }).collect()
    })
}

/// Where a runtime bound came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    Initial,
    /// Not on any cycle, so taken at most once.
    Acyclic,
    Loop(LoopPath),
    Cycle,
    Ranking,
    /// Bounded by the arrivals at its source location.
    Visits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub loops: LoopConfig,
    pub max_rounds: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { loops: LoopConfig::default(), max_rounds: 64 }
    }
}

#[derive(Clone, Debug)]
pub struct ProgramAnalysis {
    pub sb: SizeBoundMap,
    pub rb: RuntimeBoundMap,
    pub sources: BTreeMap<usize, BoundSource>,
    pub rounds: usize,
    pub notes: Vec<String>,
}

impl ProgramAnalysis {
    /// Sum of all runtime bounds.
    pub fn total_runtime(&self) -> BoundExpr {
        BoundExpr::sum(self.rb.iter().map(|(_, b)| b.clone())).simplify()
    }

    pub fn class(&self) -> AsymptoticClass {
        asymptotic_class(&self.total_runtime())
    }
}

/// Local ranking bounds keyed by scope and strict transition.
type RankingCache = BTreeMap<(Vec<usize>, usize), Option<BoundExpr>>;

/// Largest number of times a single bound may be replaced.
const MAX_REWRITES: u8 = 2;

/// True if `new` is pointwise at most `old` and different from it.
fn improves(new: &BoundExpr, old: &BoundExpr) -> bool {
    let (Some(a), Some(b)) = (new.to_polynomial(), old.to_polynomial()) else { return false };
    let d = b - a;
    !d.is_zero() && d.terms().all(|(_, c)| !c.is_negative())
}

struct Analyzer<'a> {
    p: &'a Program,
    cfg: AnalysisConfig,
    /// Transitions whose endpoints share a component, by component.
    component_of: BTreeMap<usize, usize>,
    components: Vec<BTreeSet<usize>>,
    order: Vec<usize>,
    incoming: Vec<Vec<usize>>,
    loops: BTreeMap<usize, ChainInfo>,
    cycles: Vec<CycleInfo>,
    sb: SizeBoundMap,
    rb: RuntimeBoundMap,
    sb_rewrites: BTreeMap<(usize, Var), u8>,
    rb_rewrites: BTreeMap<usize, u8>,
    sources: BTreeMap<usize, BoundSource>,
    notes: Vec<String>,
    /// Local ranking bounds by scope and strict transition.
    ranked: RefCell<RankingCache>,
}

impl<'a> Analyzer<'a> {
    fn new(p: &'a Program, cfg: AnalysisConfig) -> Analyzer<'a> {
        let idx = cycles::location_index(p);
        let comps = cycles::location_components(p);
        let mut comp_of_loc = vec![0; p.locations().len()];
        for (c, locs) in comps.iter().enumerate() {
            for &l in locs {
                comp_of_loc[l] = c;
            }
        }
        let mut component_of = BTreeMap::new();
        let mut components = vec![BTreeSet::new(); comps.len()];
        let mut order: Vec<usize> = (0..p.transitions().len()).collect();
        order.sort_by_key(|&t| (comp_of_loc[idx[p.transition(t).source.name()]], t));
        for t in p.transitions() {
            let (s, g) = (comp_of_loc[idx[t.source.name()]], comp_of_loc[idx[t.target.name()]]);
            if s == g {
                component_of.insert(t.id, s);
                components[s].insert(t.id);
            }
        }
        let incoming = p
            .transitions()
            .iter()
            .map(|t| p.incoming(&t.source).map(|r| r.id).collect())
            .collect();
        let all_cycles = find_simple_cycles(p);
        let loops = all_cycles
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| (c.transitions[0], analyze_chain(p, &c.transitions, &cfg.loops)))
            .collect();
        let cycles = all_cycles.into_iter().filter(|c| c.len() > 1).map(|c| CycleInfo::new(p, c, &cfg.loops)).collect();
        let (sb, rb) = initial_bounds(p);
        let mut a = Analyzer {
            p,
            cfg,
            component_of,
            components,
            order,
            incoming,
            loops,
            cycles,
            sb,
            rb,
            sb_rewrites: BTreeMap::new(),
            rb_rewrites: BTreeMap::new(),
            sources: BTreeMap::new(),
            notes: Vec::new(),
            ranked: RefCell::new(BTreeMap::new()),
        };
        for t in p.transitions() {
            if p.initial_transitions().any(|u| u.id == t.id) {
                a.sources.insert(t.id, BoundSource::Initial);
            } else if !a.component_of.contains_key(&t.id) {
                a.rb.set(t.id, BoundExpr::one());
                a.sources.insert(t.id, BoundSource::Acyclic);
            }
        }
        a
    }

    fn is_initial(&self, t: usize) -> bool {
        self.p.transition(t).source == *self.p.initial()
    }

    fn update_sb(&mut self, t: usize, x: &Var, new: BoundExpr) -> bool {
        if !new.is_finite() {
            return false;
        }
        let old = self.sb.get(t, x);
        let count = self.sb_rewrites.entry((t, x.clone())).or_insert(0);
        if (!old.is_finite() || (*count < MAX_REWRITES && improves(&new, &old))) && new != old {
            *count += 1;
            self.sb.set(t, x.clone(), new);
            return true;
        }
        false
    }

    fn update_rb(&mut self, t: usize, new: BoundExpr, source: BoundSource) -> bool {
        if !new.is_finite() {
            return false;
        }
        let old = self.rb.get(t);
        let count = self.rb_rewrites.entry(t).or_insert(0);
        if (!old.is_finite() || (*count < MAX_REWRITES && improves(&new, &old))) && new != old {
            *count += 1;
            self.rb.set(t, new);
            self.sources.insert(t, source);
            return true;
        }
        false
    }

    /// Sum over `rs` of the local bound instantiated at each `r`.
    fn sum_over(&self, rs: impl IntoIterator<Item = usize>, local: &BoundExpr) -> BoundExpr {
        if local.vars().is_empty() {
            return local.clone();
        }
        BoundExpr::sum(rs.into_iter().map(|r| instantiate(local, r, &self.sb))).simplify()
    }

    fn size_candidates(&self, t: usize, x: &Var) -> Vec<BoundExpr> {
        let tr = self.p.transition(t);
        let mut out = Vec::new();
        let plain = BoundExpr::ceil_abs_of(&tr.update[x]);
        out.push(self.sum_over(self.incoming[t].iter().copied(), &plain));
        if let Some(size) = self.loops.get(&t).and_then(|l| l.size.as_ref()) {
            out.push(self.sum_over(self.incoming[t].iter().copied().filter(|&r| r != t), &size[x]));
        }
        for c in &self.cycles {
            let Some(j) = c.cycle.index_of(t) else { continue };
            let parts: Option<Vec<BoundExpr>> = c
                .entries
                .iter()
                .map(|&r| {
                    let i = c.position_of_location(self.p.transition(r).target.name())?;
                    let local = c.size_after(self.p, i, j)?;
                    Some(instantiate(&local[x], r, &self.sb))
                })
                .collect();
            if let Some(parts) = parts {
                out.push(BoundExpr::sum(parts).simplify());
            }
        }
        out.retain(BoundExpr::is_finite);
        out
    }

    fn size_pass(&mut self) -> bool {
        let mut changed = false;
        for &t in &self.order.clone() {
            if self.is_initial(t) {
                continue;
            }
            for x in self.p.vars() {
                if let Some(b) = smallest(self.size_candidates(t, x)) {
                    changed |= self.update_sb(t, x, b);
                }
            }
        }
        changed
    }

    /// Bounds for cyclic result-variable dependencies. Only used once the
    /// other rules stall, since its bounds are coarse.
    fn additive_pass(&mut self) -> bool {
        let mut changed = false;
        for (nodes, b) in rvg::additive_bounds(self.p, &self.incoming, &self.sb, &self.rb) {
            for (t, x) in nodes {
                changed |= self.update_sb(t, &x, b.clone());
            }
        }
        changed
    }

    fn lifted_runtime(&self, entries: impl IntoIterator<Item = usize>, local: impl Fn(usize) -> Option<BoundExpr>) -> Option<BoundExpr> {
        let mut parts = Vec::new();
        for r in entries {
            parts.push(BoundExpr::prod([self.rb.get(r), instantiate(&local(r)?, r, &self.sb)]));
        }
        Some(BoundExpr::sum(parts).simplify()).filter(BoundExpr::is_finite)
    }

    fn ranking_candidate(&self, t: usize) -> Option<BoundExpr> {
        let comp = &self.components[self.component_of[&t]];
        let known: BTreeSet<usize> = comp.iter().copied().filter(|&u| self.rb.get(u).is_finite()).collect();
        let mut scopes = vec![comp.difference(&known).copied().collect::<BTreeSet<usize>>()];
        if !known.is_empty() {
            scopes.push(comp.clone());
        }
        for scope in scopes {
            let list: Vec<usize> = scope.iter().copied().collect();
            let key = (list, t);
            let cached = self.ranked.borrow().get(&key).cloned();
            let local = cached.unwrap_or_else(|| {
                let local = rank_program(self.p, &key.0, &[t].into()).map(|f| local_runtime_from_lrf(&f));
                self.ranked.borrow_mut().insert(key, local.clone());
                local
            });
            let Some(local) = local else { continue };
            if let Some(b) = self.lifted_runtime(entry_transitions(self.p, &scope), |_| Some(local.clone())) {
                return Some(b);
            }
        }
        None
    }

    fn runtime_candidates(&self, t: usize) -> Vec<(BoundExpr, BoundSource)> {
        let tr = self.p.transition(t);
        let mut out = Vec::new();
        if !tr.is_self_loop() {
            let arrivals = self.incoming[t].iter().filter(|&&r| !self.p.transition(r).is_self_loop());
            let b = BoundExpr::sum(arrivals.map(|&r| self.rb.get(r))).simplify();
            out.push((b, BoundSource::Visits));
        }
        if let Some(l) = self.loops.get(&t) {
            if let Some(r_l) = &l.runtime {
                let entries = self.incoming[t].iter().copied().filter(|&r| r != t);
                if let Some(b) = self.lifted_runtime(entries, |_| Some(r_l.clone())) {
                    out.push((b, BoundSource::Loop(l.path.unwrap_or(LoopPath::RankingFallback))));
                }
            }
        }
        for c in &self.cycles {
            if !c.cycle.contains(t) {
                continue;
            }
            let local = |r: usize| {
                let i = c.position_of_location(self.p.transition(r).target.name())?;
                let r_l = c.rotations[i].runtime.clone()?;
                Some(BoundExpr::sum([r_l, BoundExpr::one()]))
            };
            if let Some(b) = self.lifted_runtime(c.entries.iter().copied(), local) {
                out.push((b, BoundSource::Cycle));
            }
        }
        let complete = out.iter().any(|(_, s)| matches!(s, BoundSource::Loop(_) | BoundSource::Cycle));
        if !complete && !self.rb.get(t).is_finite() {
            if let Some(b) = self.ranking_candidate(t) {
                out.push((b, BoundSource::Ranking));
            }
        }
        out.retain(|(b, _)| b.is_finite());
        out
    }

    fn runtime_pass(&mut self) -> bool {
        let mut changed = false;
        for &t in &self.order.clone() {
            if !self.component_of.contains_key(&t) {
                continue;
            }
            let cands = self.runtime_candidates(t);
            let best = smallest(cands.iter().map(|(b, _)| b.clone()));
            if let Some(b) = best {
                let source = cands.iter().find(|(c, _)| *c == b).map(|(_, s)| *s).unwrap();
                changed |= self.update_rb(t, b, source);
            }
        }
        changed
    }

    fn run(mut self, observe: &mut dyn FnMut(usize, &SizeBoundMap, &RuntimeBoundMap)) -> ProgramAnalysis {
        let mut rounds = 0;
        while rounds < self.cfg.max_rounds {
            rounds += 1;
            let s = self.size_pass();
            let r = self.runtime_pass();
            let done = !s && !r && !self.additive_pass();
            observe(rounds, &self.sb, &self.rb);
            if done {
                break;
            }
        }
        if rounds == self.cfg.max_rounds {
            self.notes.push(format!("stopped after {rounds} rounds"));
        }
        for t in self.p.transitions() {
            if !self.rb.get(t.id).is_finite() {
                self.rb.set(t.id, BoundExpr::Omega);
                self.notes.push(format!("no runtime bound for {}", t.name()));
            }
        }
        ProgramAnalysis { sb: self.sb, rb: self.rb, sources: self.sources, rounds, notes: self.notes }
    }
}

/// Size and runtime bounds for every transition of a program.
pub fn analyze_program(p: &Program, cfg: &AnalysisConfig) -> ProgramAnalysis {
    Analyzer::new(p, *cfg).run(&mut |_, _, _| {})
}

/// Like [`analyze_program`], calling `observe` with the bounds after every
/// round.
pub fn analyze_program_observed(
    p: &Program,
    cfg: &AnalysisConfig,
    observe: &mut dyn FnMut(usize, &SizeBoundMap, &RuntimeBoundMap),
) -> ProgramAnalysis {
    Analyzer::new(p, *cfg).run(observe)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{parse_polynomial, parse_program};

    fn fixture(name: &str) -> Program {
        let text = std::fs::read_to_string(format!("{}/fixtures/{name}.koat", env!("CARGO_MANIFEST_DIR"))).unwrap();
        parse_program(&text).unwrap()
    }

    fn b(text: &str) -> BoundExpr {
        BoundExpr::from_nonneg_poly(&parse_polynomial(text).unwrap()).unwrap()
    }

    fn set(ids: &[usize]) -> BTreeSet<usize> {
        ids.iter().copied().collect()
    }

    /// Entry bounds for `t0` and `t3` of the running program.
    fn example_entry_bounds(p: &Program, t3: usize) -> SizeBoundMap {
        let (mut sb, _) = initial_bounds(p);
        for (x, e) in [("x1", "2*x5"), ("x2", "3*x5"), ("x3", "x5"), ("x4", "x3"), ("x5", "x5")] {
            sb.set(t3, Var::new(x), b(e));
        }
        sb
    }

    #[test]
    fn entries_of_subprograms() {
        let p = fixture("nested");
        assert_eq!(entry_transitions(&p, &set(&[1])), set(&[0, 3]));
        assert_eq!(entry_transitions(&p, &set(&[4])), set(&[2]));
        let q = fixture("loop1");
        assert_eq!(entry_transitions(&q, &set(&[1])), set(&[0]));
    }

    #[test]
    fn initial_bounds_use_the_update() {
        let (sb, rb) = initial_bounds(&fixture("nested"));
        for i in 1..=5 {
            let x = Var::new(&format!("x{i}"));
            assert_eq!(sb.get(0, &x), BoundExpr::Var(x.clone()));
        }
        assert_eq!(rb.get(0), BoundExpr::one());
        assert_eq!(rb.get(1), BoundExpr::Omega);
        let q = parse_program("(VAR x1)\n(RULES\n l0(x1) -> l1(-2*x1)\n l1(x1) -> l1(x1-1) :|: x1 > 0\n)").unwrap();
        assert_eq!(initial_bounds(&q).0.get(0, &Var::new("x1")).to_string(), "2*x1");
    }

    #[test]
    fn lifting_the_loop_size_bound() {
        let p = fixture("nested");
        let sb = example_entry_bounds(&p, 3);
        let local = local_size_bound_from_loop(&p, 1, &LoopConfig::default()).unwrap();
        assert_eq!(local[&Var::new("x1")].to_string(), "4*x1+2*x2");
        let mut reference_local = local.clone();
        reference_local.insert(Var::new("x4"), b("x4 + 3*x3^3 + 2*x3^2 + x3"));
        let lifted = lift_size_bound(&p, 1, &set(&[1]), &reference_local, &sb);
        assert!(lifted.get(1, &Var::new("x4")).equivalent(&b("2*x3 + 2*x3^2 + 3*x3^3 + x4 + x5 + 2*x5^2 + 3*x5^3")));
        assert!(lifted.get(1, &Var::new("x1")).equivalent(&b("4*x1 + 2*x2 + 14*x5")));
    }

    #[test]
    fn single_entry_with_identity_bounds_keeps_the_local_bound() {
        let q = fixture("loop1");
        let (sb, _) = initial_bounds(&q);
        let local = local_size_bound_from_loop(&q, 1, &LoopConfig::default()).unwrap();
        let lifted = lift_size_bound(&q, 1, &set(&[1]), &local, &sb);
        for (x, e) in &local {
            assert_eq!(lifted.get(1, x), *e);
        }
    }

    #[test]
    fn local_loop_bounds() {
        let p = fixture("nested");
        let t4 = local_size_bound_from_loop(&p, 4, &LoopConfig::default()).unwrap();
        assert_eq!(t4[&Var::new("x1")].to_string(), "2*x1");
        assert_eq!(t4[&Var::new("x5")].to_string(), "x5");
        let q = parse_program("(VAR x y)\n(RULES\n l0(x,y) -> l1(x,y)\n l1(x,y) -> l1(x,y)\n)").unwrap();
        let id = local_size_bound_from_loop(&q, 1, &LoopConfig::default()).unwrap();
        assert_eq!(id[&Var::new("x")].to_string(), "x");
        assert_eq!(id[&Var::new("y")].to_string(), "y");
        assert!(local_size_bound_from_loop(&p, 2, &LoopConfig::default()).is_none());
    }

    #[test]
    fn lifting_runtime_bounds() {
        let p = fixture("nested");
        let mut sb = example_entry_bounds(&p, 3);
        let (_, mut rb) = initial_bounds(&p);
        rb.set(3, b("x5"));
        let out = lift_runtime_bound(&p, &set(&[1]), &set(&[1]), &b("x3"), &sb, &rb);
        assert!(out.get(1).equivalent(&b("x3 + x5^2")));
        rb.set(2, b("x5"));
        sb.set(2, Var::new("x1"), b("4*x1 + 2*x2 + 14*x5"));
        let out = lift_runtime_bound(&p, &set(&[4]), &set(&[4]), &b("x1"), &sb, &rb);
        assert!(out.get(4).equivalent(&b("x5*(4*x1 + 2*x2 + 14*x5)")));
        let q = fixture("loop1");
        let (sb, rb) = initial_bounds(&q);
        assert_eq!(lift_runtime_bound(&q, &set(&[1]), &set(&[1]), &BoundExpr::one(), &sb, &rb).get(1), BoundExpr::one());
    }

    #[test]
    fn split_cycle_matches_the_loop() {
        let p = fixture("nested_split");
        let cycles = find_simple_cycles(&p);
        let c = cycles.iter().find(|c| c.transitions == vec![1, 2]).unwrap();
        let local = local_size_bound_cycle(&p, c, 1, &LoopConfig::default()).unwrap();
        let whole = local_size_bound_from_loop(&fixture("nested"), 1, &LoopConfig::default()).unwrap();
        assert_eq!(local, whole);
        let lifted = lift_size_bound(&p, 2, &set(&[1, 2]), &local, &example_entry_bounds(&p, 4));
        assert!(lifted.get(2, &Var::new("x1")).equivalent(&b("4*x1 + 2*x2 + 14*x5")));
    }

    #[test]
    fn identity_two_cycle_counts_entry_locations() {
        let p = parse_program(
            "(VAR x)\n(RULES\n l0(x) -> a(x)\n l0(x) -> b(x)\n a(x) -> b(x) :|: x > 0\n b(x) -> a(x) :|: x > 0\n)",
        )
        .unwrap();
        let c = find_simple_cycles(&p).into_iter().find(|c| c.len() == 2).unwrap();
        let local = local_size_bound_cycle(&p, &c, 1, &LoopConfig::default()).unwrap();
        assert_eq!(local[&Var::new("x")].to_string(), "2*x");
    }

    #[test]
    fn running_program_is_quadratic() {
        let a = analyze_program(&fixture("nested"), &AnalysisConfig::default());
        assert_eq!(a.class(), AsymptoticClass::Quadratic);
        assert_eq!(asymptotic_class(&a.sb.get(1, &Var::new("x1"))), AsymptoticClass::Linear);
        assert_eq!(asymptotic_class(&a.sb.get(1, &Var::new("x4"))), AsymptoticClass::HigherPolynomial);
        assert!(a.notes.is_empty());
    }

    #[test]
    fn modified_program_stays_polynomial() {
        let a = analyze_program(&fixture("nested_x4"), &AnalysisConfig::default());
        assert!(a.rb.iter().all(|(_, b)| b.is_finite() && !b.has_exponential()));
        assert!(a.class() < AsymptoticClass::Exponential);
    }

    #[test]
    fn straight_line_program() {
        let p = parse_program("(VAR x y)\n(RULES\n l0(x,y) -> a(x+1,y)\n a(x,y) -> b(x*y,y) :|: x > 0\n b(x,y) -> c(x,2*y)\n)")
            .unwrap();
        let a = analyze_program(&p, &AnalysisConfig::default());
        assert!(a.rb.iter().all(|(_, b)| *b == BoundExpr::one()));
        assert_eq!(a.rb.iter().count(), 3);
        assert!(a.sb.iter().all(|(_, b)| b.is_finite()));
        assert_eq!(a.sb.get(2, &Var::new("x")).to_string(), "x*y+y");
        assert_eq!(a.class(), AsymptoticClass::Constant);
    }

    #[test]
    fn nonterminating_loop_stays_omega() {
        let p = parse_program("(VAR x)\n(RULES\n l0(x) -> l1(x)\n l1(x) -> l1(x+1) :|: x > 0\n)").unwrap();
        let a = analyze_program(&p, &AnalysisConfig::default());
        assert_eq!(a.rb.get(1), BoundExpr::Omega);
        assert_eq!(a.class(), AsymptoticClass::Infinite);
        assert_eq!(a.notes, vec!["no runtime bound for t1".to_string()]);
    }
}
