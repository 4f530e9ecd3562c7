//! Solvable partitions and triangular variable orders.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::arith::{Polynomial, Rational, Var};
use crate::linalg::RatMatrix;
use crate::program::Update;

/// One block `S` with `update|S = A * x_S + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub vars: Vec<Var>,
    pub matrix: RatMatrix,
    /// Per variable of the block, a polynomial over lower blocks only.
    pub offset: Vec<Polynomial>,
}

/// Blocks in topological order: a block only reads itself and earlier blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvablePartition {
    pub blocks: Vec<Block>,
}

impl SolvablePartition {
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.blocks.iter().flat_map(|b| b.vars.iter())
    }
}

/// Strongly connected components of the "reads" relation, lowest first.
///
/// Among components that are ready at the same time, the one holding the
/// smallest variable comes first.
pub(crate) fn dependency_components(update: &Update) -> Vec<Vec<Var>> {
    let vars: Vec<&Var> = update.keys().collect();
    let index: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut g = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..vars.len()).map(|i| g.add_node(i)).collect();
    for (v, p) in update {
        for w in p.vars() {
            if let Some(&j) = index.get(&w) {
                g.add_edge(nodes[index[v]], nodes[j], ());
            }
        }
    }
    let sccs = tarjan_scc(&g);
    let mut comp_of = vec![0; vars.len()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for (c, scc) in sccs.iter().enumerate() {
        let mut members: Vec<usize> = scc.iter().map(|n| g[*n]).collect();
        members.sort_unstable();
        for &m in &members {
            comp_of[m] = c;
        }
        comps.push(members);
    }
    // deps[c]: components that c reads, other than itself
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    for e in g.raw_edges() {
        let (a, b) = (comp_of[g[e.source()]], comp_of[g[e.target()]]);
        if a != b {
            deps[a].insert(b);
        }
    }
    let mut done = vec![false; comps.len()];
    let mut order = Vec::with_capacity(comps.len());
    while order.len() < comps.len() {
        let next = (0..comps.len())
            .filter(|&c| !done[c] && deps[c].iter().all(|&d| done[d]))
            .min_by_key(|&c| comps[c][0])
            .expect("condensation is acyclic");
        done[next] = true;
        order.push(comps[next].iter().map(|&i| vars[i].clone()).collect());
    }
    order
}

/// Splits `p` into its linear part over `block` and the remainder.
/// Returns `None` if a monomial mixes block variables with anything else.
fn split_linear(p: &Polynomial, block: &[Var]) -> Option<(Vec<Rational>, Polynomial)> {
    let mut coeffs = vec![Rational::from_integer(0.into()); block.len()];
    let mut rest = Polynomial::zero();
    for (m, c) in p.terms() {
        let touches = m.vars().any(|v| block.contains(v));
        if !touches {
            rest = rest + Polynomial::term(m.clone(), c.clone());
            continue;
        }
        if m.degree() != 1 {
            return None;
        }
        let v = &m.powers()[0].0;
        let i = block.iter().position(|w| w == v)?;
        coeffs[i] = c.clone();
    }
    Some((coeffs, rest))
}

/// The solvable partition of an update, or `None` if some block is non-linear
/// in its own variables.
pub fn partition_blocks(update: &Update) -> Option<SolvablePartition> {
    let mut blocks = Vec::new();
    for vars in dependency_components(update) {
        let mut rows = Vec::with_capacity(vars.len());
        let mut offset = Vec::with_capacity(vars.len());
        for v in &vars {
            let (row, rest) = split_linear(&update[v], &vars)?;
            rows.push(row);
            offset.push(rest);
        }
        blocks.push(Block { vars, matrix: RatMatrix::from_rows(rows), offset });
    }
    Some(SolvablePartition { blocks })
}

/// A variable order in which the update is triangular and weakly non-linear,
/// lowest variable first.
pub fn twn_order(update: &Update) -> Option<Vec<Var>> {
    let part = partition_blocks(update)?;
    part.blocks.iter().all(|b| b.vars.len() == 1).then(|| part.vars().cloned().collect())
}

/// True if the update is triangular and weakly non-linear in some variable order.
pub fn is_twn(update: &Update) -> bool {
    twn_order(update).is_some()
}
