//! Size bounds for cyclic dependencies between result variables.
//!
//! A result variable `(t, x)` stands for the value of `x` after `t`. It
//! depends on `(r, v)` if `r` can precede `t` and `v` occurs in `t`'s update
//! of `x`. In a strongly connected set of result variables where every
//! update either copies one member up to sign plus a term over outside
//! values, or resets from outside values, each value is an outside value
//! plus the increments along its chain of copies. Each firing of a
//! transition contributes at most once to such a chain.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{instantiate, RuntimeBoundMap, SizeBoundMap};
use crate::arith::{BoundExpr, Monomial, Polynomial, Var};
use crate::program::Program;

type Node = (usize, Var);

/// Bounds for the non-trivial components the additive rule applies to.
pub(super) fn additive_bounds(
    p: &Program,
    incoming: &[Vec<usize>],
    sb: &SizeBoundMap,
    rb: &RuntimeBoundMap,
) -> Vec<(Vec<Node>, BoundExpr)> {
    let mut g: DiGraph<Node, ()> = DiGraph::new();
    let mut ids: BTreeMap<Node, NodeIndex> = BTreeMap::new();
    for t in p.transitions() {
        for x in p.vars() {
            ids.insert((t.id, x.clone()), g.add_node((t.id, x.clone())));
        }
    }
    let mut self_edge = BTreeSet::new();
    for t in p.transitions() {
        for x in p.vars() {
            for v in t.update[x].vars() {
                for &r in &incoming[t.id] {
                    g.add_edge(ids[&(r, v.clone())], ids[&(t.id, x.clone())], ());
                    if r == t.id && v == *x {
                        self_edge.insert((t.id, x.clone()));
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for comp in tarjan_scc(&g) {
        let nodes: Vec<Node> = comp.iter().map(|&n| g[n].clone()).collect();
        if nodes.len() == 1 && !self_edge.contains(&nodes[0]) {
            continue;
        }
        let members: BTreeSet<Node> = nodes.iter().cloned().collect();
        if let Some(b) = component_bound(p, incoming, &members, sb, rb) {
            out.push((nodes, b));
        }
    }
    out
}

fn component_bound(
    p: &Program,
    incoming: &[Vec<usize>],
    members: &BTreeSet<Node>,
    sb: &SizeBoundMap,
    rb: &RuntimeBoundMap,
) -> Option<BoundExpr> {
    let mut parts = Vec::new();
    for (t, x) in members {
        let e = &p.transition(*t).update[x];
        let inside: Vec<Var> = e
            .vars()
            .into_iter()
            .filter(|v| incoming[*t].iter().any(|&r| members.contains(&(r, v.clone()))))
            .collect();
        let from_entries = |q: &Polynomial| -> BoundExpr {
            let local = BoundExpr::ceil_abs_of(q);
            if local.vars().is_empty() {
                return local;
            }
            BoundExpr::sum(incoming[*t].iter().map(|&r| instantiate(&local, r, sb)))
        };
        match inside.as_slice() {
            [] => parts.push(from_entries(e)),
            [y] => {
                let c = e.coefficient(&Monomial::var(y.clone()));
                let q = e - &Polynomial::var(y.clone()).scale(&c);
                if !c.abs().is_one() || q.mentions(y) {
                    return None;
                }
                for &r in &incoming[*t] {
                    if !members.contains(&(r, y.clone())) {
                        parts.push(sb.get(r, y));
                    }
                }
                if !q.is_zero() {
                    parts.push(BoundExpr::prod([rb.get(*t), from_entries(&q)]));
                }
            }
            _ => return None,
        }
    }
    Some(BoundExpr::sum(parts).simplify()).filter(BoundExpr::is_finite)
}
