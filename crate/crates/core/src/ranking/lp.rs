//! Exact two-phase simplex over the rationals.

use num_traits::{Signed, Zero};

use crate::arith::Rational;

/// The system `a * x <= b` over free rational variables, with an optional
/// objective to minimize.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub objective: Option<Vec<Rational>>,
    pub dim: usize,
}

impl LinearSystem {
    pub fn new(dim: usize) -> LinearSystem {
        LinearSystem { dim, ..Default::default() }
    }

    /// Adds `row * x <= rhs`.
    pub fn le(&mut self, row: Vec<Rational>, rhs: Rational) {
        assert_eq!(row.len(), self.dim);
        self.a.push(row);
        self.b.push(rhs);
    }

    /// Adds `row * x = rhs` as two inequalities.
    pub fn equal(&mut self, row: Vec<Rational>, rhs: Rational) {
        let neg: Vec<Rational> = row.iter().map(|x| -x).collect();
        self.le(row, rhs.clone());
        self.le(neg, -rhs);
    }

    /// True if `x` satisfies every constraint.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.a.iter().zip(&self.b).all(|(row, b)| dot(row, x) <= *b)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    /// A minimizer and the objective value (zero without an objective).
    Optimal { point: Vec<Rational>, value: Rational },
    /// Feasible, but the objective has no lower bound.
    Unbounded { point: Vec<Rational> },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Infeasible => None,
            LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point } => Some(point),
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// Tableau for `min c x` subject to `A x = b`, `x >= 0`, `b >= 0`.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let support: Vec<usize> = (0..self.cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &support {
                let d = &f * &self.rows[r][j];
                self.rows[i][j] -= d;
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: smallest improving column, ties on the ratio test broken
    /// by the smallest basic variable.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> Step {
        loop {
            let entering = (0..self.cols).filter(|&j| allowed(j) && !self.basis.contains(&j)).find(|&j| {
                let mut z = cost[j].clone();
                for (i, &bv) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        z -= &cost[bv] * &self.rows[i][j];
                    }
                }
                z.is_negative()
            });
            let Some(c) = entering else { return Step::Optimal };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Step::Unbounded,
            }
        }
    }

    fn value(&self, j: usize) -> Rational {
        self.basis.iter().position(|&b| b == j).map_or_else(Rational::zero, |i| self.rhs[i].clone())
    }
}

/// Solves a system exactly. Deterministic and cycle-free.
pub fn lp_solve(sys: &LinearSystem) -> LpOutcome {
    let n = sys.dim;
    let m = sys.a.len();
    let one = Rational::from_integer(1.into());
    // columns: x+ (n), x- (n), slack (m), one artificial per row with b < 0
    let negative: Vec<usize> = (0..m).filter(|&i| sys.b[i].is_negative()).collect();
    let (xp, xm, sl, ar) = (0, n, 2 * n, 2 * n + m);
    let cols = ar + negative.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (row, b)) in sys.a.iter().zip(&sys.b).enumerate() {
        let mut r = vec![Rational::zero(); cols];
        match negative.iter().position(|&k| k == i) {
            None => {
                for j in 0..n {
                    r[xp + j] = row[j].clone();
                    r[xm + j] = -&row[j];
                }
                r[sl + i] = one.clone();
                rhs.push(b.clone());
                basis.push(sl + i);
            }
            Some(k) => {
                for j in 0..n {
                    r[xp + j] = -&row[j];
                    r[xm + j] = row[j].clone();
                }
                r[sl + i] = -&one;
                r[ar + k] = one.clone();
                rhs.push(-b);
                basis.push(ar + k);
            }
        }
        rows.push(r);
    }
    let mut t = Tableau { rows, rhs, basis, cols };
    let mut phase1 = vec![Rational::zero(); cols];
    for c in phase1.iter_mut().skip(ar) {
        *c = one.clone();
    }
    t.optimize(&phase1, &|_| true);
    let infeas: Rational = (ar..cols).map(|j| t.value(j)).fold(Rational::zero(), |a, b| a + b);
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= ar {
            match (0..ar).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    let extract = |t: &Tableau| -> Vec<Rational> { (0..n).map(|j| t.value(xp + j) - t.value(xm + j)).collect() };
    let Some(obj) = &sys.objective else {
        return LpOutcome::Optimal { point: extract(&t), value: Rational::zero() };
    };
    let mut cost = vec![Rational::zero(); cols];
    for j in 0..n {
        cost[xp + j] = obj[j].clone();
        cost[xm + j] = -&obj[j];
    }
    match t.optimize(&cost, &|j| j < ar) {
        Step::Optimal => {
            let point = extract(&t);
            let value = dot(obj, &point);
            LpOutcome::Optimal { point, value }
        }
        Step::Unbounded => LpOutcome::Unbounded { point: extract(&t) },
    }
}
