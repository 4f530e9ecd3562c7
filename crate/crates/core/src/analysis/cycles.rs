//! Simple cycles of the control-flow graph and chaining along them.

use std::collections::BTreeMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::program::{identity_update, then, Guard, Program, Transition, Update};

/// Transitions `t1..tn` where `ti` goes from `li` to `l(i+1)` and `tn` back
/// to `l1`, with pairwise different locations. The first transition starts
/// at the cycle's smallest location index.
#[derive(Clone, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct SimpleCycle {
    pub transitions: Vec<usize>,
}

impl SimpleCycle {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.transitions.contains(&t)
    }

    /// Position of `t` in the cycle.
    pub fn index_of(&self, t: usize) -> Option<usize> {
        self.transitions.iter().position(|&u| u == t)
    }

    /// The cycle's transitions starting at position `k`.
    pub fn rotation(&self, k: usize) -> Vec<usize> {
        let n = self.len();
        (0..n).map(|i| self.transitions[(k + i) % n]).collect()
    }
}

pub(crate) fn location_index(p: &Program) -> BTreeMap<&str, usize> {
    p.locations().iter().enumerate().map(|(i, l)| (l.name(), i)).collect()
}

/// All simple cycles, or `None` if there are more than `cap`.
pub fn find_simple_cycles_capped(p: &Program, cap: usize) -> Option<Vec<SimpleCycle>> {
    let idx = location_index(p);
    let n = p.locations().len();
    let mut out_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for t in p.transitions() {
        out_edges[idx[t.source.name()]].push((t.id, idx[t.target.name()]));
    }
    let mut cycles = Vec::new();
    for s in 0..n {
        let mut on_path = vec![false; n];
        let mut path = Vec::new();
        if !dfs(s, s, &out_edges, &mut on_path, &mut path, &mut cycles, cap) {
            return None;
        }
    }
    Some(cycles)
}

fn dfs(
    start: usize,
    at: usize,
    out_edges: &[Vec<(usize, usize)>],
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    cycles: &mut Vec<SimpleCycle>,
    cap: usize,
) -> bool {
    on_path[at] = true;
    for &(t, to) in &out_edges[at] {
        if to == start {
            path.push(t);
            cycles.push(SimpleCycle { transitions: path.clone() });
            path.pop();
            if cycles.len() > cap {
                return false;
            }
        } else if to > start && !on_path[to] {
            path.push(t);
            let ok = dfs(start, to, out_edges, on_path, path, cycles, cap);
            path.pop();
            if !ok {
                return false;
            }
        }
    }
    on_path[at] = false;
    true
}

/// Chains transitions given in run order: the conjunction of their guards,
/// each shifted by the preceding updates, and the composed update.
pub fn chain_transitions(ts: &[&Transition], vars: &[crate::arith::Var]) -> (Guard, Update) {
    let mut pre = identity_update(vars);
    let mut guards = Vec::new();
    for t in ts {
        guards.push(t.guard.compose(&pre));
        pre = then(&pre, &t.update);
    }
    (Guard::and(guards), pre)
}

/// Strongly connected components of the location graph in topological
/// order, as lists of location indices.
pub(crate) fn location_components(p: &Program) -> Vec<Vec<usize>> {
    let idx = location_index(p);
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<_> = (0..p.locations().len()).map(|i| g.add_node(i)).collect();
    for t in p.transitions() {
        g.add_edge(nodes[idx[t.source.name()]], nodes[idx[t.target.name()]], ());
    }
    let mut comps: Vec<Vec<usize>> =
        tarjan_scc(&g).into_iter().map(|c| c.into_iter().map(|n| g[n]).collect()).collect();
    comps.reverse();
    for c in &mut comps {
        c.sort_unstable();
    }
    comps
}
