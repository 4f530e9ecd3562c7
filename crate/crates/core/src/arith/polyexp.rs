//! Poly-exponential expressions `sum_j alpha_j * n^a_j * b_j^n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::bound::{BoundError, BoundExpr};
use super::{ceil_abs, IntState, Polynomial, Rational, Var};

/// A poly-exponential expression in the iteration counter `n`.
///
/// Terms are keyed by `(b, a)`, so equal pairs are merged and iteration
/// order is the canonical `(b, a)` order. The expression describes a
/// sequence that is only claimed to be meaningful for `n >= start`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PolyExp {
    terms: BTreeMap<(Rational, u32), Polynomial>,
    start: u32,
}

fn binomial_row(k: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..k {
        let next = &row[i as usize] * BigInt::from(k - i) / BigInt::from(i + 1);
        row.push(next);
    }
    row
}

impl PolyExp {
    pub fn zero() -> PolyExp {
        PolyExp::default()
    }

    pub fn from_poly(p: Polynomial) -> PolyExp {
        PolyExp::term(p, 0, Rational::one())
    }

    /// The single term `alpha * n^a * b^n`.
    pub fn term(alpha: Polynomial, a: u32, b: Rational) -> PolyExp {
        let mut pe = PolyExp::zero();
        pe.add_term(alpha, a, b);
        pe
    }

    /// The counter `n` itself.
    pub fn n() -> PolyExp {
        PolyExp::term(Polynomial::one(), 1, Rational::one())
    }

    fn add_term(&mut self, alpha: Polynomial, a: u32, b: Rational) {
        if alpha.is_zero() {
            return;
        }
        if b.is_zero() {
            // 0^n vanishes except at n = 0; kept as a term so that n = 0 stays exact.
            if a > 0 {
                return;
            }
        }
        let key = (b, a);
        let merged = match self.terms.remove(&key) {
            Some(old) => old + alpha,
            None => alpha,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn with_start(mut self, n0: u32) -> PolyExp {
        self.start = n0;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(alpha, a, b)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Polynomial, u32, &Rational)> {
        self.terms.iter().map(|((b, a), p)| (p, *a, b))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn bases(&self) -> Vec<Rational> {
        let mut bs: Vec<Rational> = self.terms.keys().map(|(b, _)| b.clone()).collect();
        bs.dedup();
        bs
    }

    /// True if every base is one, i.e. the expression is a polynomial in `n`.
    pub fn is_polynomial_in_n(&self) -> bool {
        self.terms.keys().all(|(b, _)| b.is_one())
    }

    /// Coefficients of `n^k` when the expression is polynomial in `n`.
    pub fn n_coefficients(&self) -> Option<BTreeMap<u32, Polynomial>> {
        if !self.is_polynomial_in_n() {
            return None;
        }
        Some(self.terms.iter().map(|((_, a), p)| (*a, p.clone())).collect())
    }

    /// Largest total degree among the coefficient polynomials.
    pub fn coefficient_degree(&self) -> u32 {
        self.terms.values().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn max_n_degree(&self) -> u32 {
        self.terms.keys().map(|(_, a)| *a).max().unwrap_or(0)
    }

    pub fn eval_with<F: FnMut(&Var) -> Rational>(&self, mut value: F, n: u64) -> Rational {
        let nr = Rational::from_integer(BigInt::from(n));
        let mut sum = Rational::zero();
        let mut cache: BTreeMap<Var, Rational> = BTreeMap::new();
        for ((b, a), alpha) in &self.terms {
            let coeff = alpha.eval_with(|v| cache.entry(v.clone()).or_insert_with(|| value(v)).clone());
            let pn = num_traits::pow::pow(nr.clone(), *a as usize);
            let bn = pow_rational(b, n);
            sum += coeff * pn * bn;
        }
        sum
    }

    /// Value at state `s` and iteration `n`.
    pub fn eval(&self, s: &IntState, n: u64) -> Rational {
        self.eval_with(|v| Rational::from_integer(s.get(v).cloned().unwrap_or_default()), n)
    }

    /// Instantiates `n` by a concrete number, giving a polynomial over the program variables.
    pub fn at(&self, n: u64) -> Polynomial {
        let nr = Rational::from_integer(BigInt::from(n));
        let mut out = Polynomial::zero();
        for ((b, a), alpha) in &self.terms {
            let f = num_traits::pow::pow(nr.clone(), *a as usize) * pow_rational(b, n);
            out = out + alpha.scale(&f);
        }
        out
    }

    /// The shifted expression `e(n + s)`. Bases must be non-zero when `s < 0`.
    pub fn shift(&self, s: i64) -> PolyExp {
        let sr = Rational::from_integer(BigInt::from(s));
        let mut out = PolyExp::zero();
        for ((b, a), alpha) in &self.terms {
            let bs = if s >= 0 {
                pow_rational(b, s as u64)
            } else {
                assert!(!b.is_zero(), "negative shift of a zero base");
                pow_rational(b, (-s) as u64).recip()
            };
            let row = binomial_row(*a);
            for (k, c) in row.iter().enumerate() {
                // (n + s)^a = sum_k C(a,k) n^k s^(a-k)
                let f = Rational::from_integer(c.clone())
                    * num_traits::pow::pow(sr.clone(), *a as usize - k)
                    * &bs;
                out.add_term(alpha.scale(&f), k as u32, b.clone());
            }
        }
        out.start = self.start;
        out
    }

    pub fn scale(&self, c: &Rational) -> PolyExp {
        let mut out = PolyExp::zero();
        for ((b, a), alpha) in &self.terms {
            out.add_term(alpha.scale(c), *a, b.clone());
        }
        out.start = self.start;
        out
    }

    pub fn mul_poly(&self, p: &Polynomial) -> PolyExp {
        let mut out = PolyExp::zero();
        for ((b, a), alpha) in &self.terms {
            out.add_term(alpha * p, *a, b.clone());
        }
        out.start = self.start;
        out
    }

    pub fn pow(&self, e: u32) -> PolyExp {
        let mut acc = PolyExp::from_poly(Polynomial::one()).with_start(self.start);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Applies a substitution to every coefficient polynomial.
    pub fn substitute_vars(&self, sub: &BTreeMap<Var, Polynomial>) -> PolyExp {
        let mut out = PolyExp::zero();
        for ((b, a), alpha) in &self.terms {
            out.add_term(alpha.compose(sub), *a, b.clone());
        }
        out.start = self.start;
        out
    }

    /// Evaluates `p` with variables replaced by poly-exponential expressions.
    /// Variables absent from `sub` are kept as coefficients.
    pub fn compose_poly(p: &Polynomial, sub: &BTreeMap<Var, PolyExp>) -> PolyExp {
        let mut powers: BTreeMap<(Var, u32), PolyExp> = BTreeMap::new();
        let mut out = PolyExp::zero();
        let mut start = 0;
        for v in p.vars() {
            if let Some(e) = sub.get(&v) {
                start = start.max(e.start);
            }
        }
        for (m, c) in p.terms() {
            let mut kept = Vec::new();
            let mut prod = PolyExp::from_poly(Polynomial::constant(c.clone()));
            for (v, e) in m.powers() {
                match sub.get(v) {
                    Some(pe) => {
                        let pw = powers.entry((v.clone(), *e)).or_insert_with(|| pe.pow(*e));
                        prod = &prod * &*pw;
                    }
                    None => kept.push((v.clone(), *e)),
                }
            }
            if !kept.is_empty() {
                prod = prod.mul_poly(&Polynomial::term(super::Monomial::from_powers(kept), Rational::one()));
            }
            out = &out + &prod;
        }
        out.start = start;
        out
    }

    /// Replaces coefficients by `ceil(|c|)` and bases by `ceil(|b|)`.
    ///
    /// A zero base is mapped to one so that the result stays weakly
    /// increasing in `n`, which substitution of `n` by a bound relies on.
    pub fn ceil_abs(&self) -> PolyExp {
        let mut out = PolyExp::zero();
        for ((b, a), alpha) in &self.terms {
            let nb = ceil_abs(b);
            let nb = if nb.is_zero() { One::one() } else { nb };
            let coeffs = Polynomial::from_terms(
                alpha
                    .terms()
                    .map(|(m, c)| (m.clone(), Rational::from_integer(BigInt::from(ceil_abs(c))))),
            );
            out.add_term(coeffs, *a, Rational::from_integer(BigInt::from(nb)));
        }
        out.start = self.start;
        out
    }

    fn is_natural_form(&self) -> bool {
        self.terms.iter().all(|((b, _), alpha)| {
            b.is_integer() && !b.is_negative() && alpha.terms().all(|(_, c)| c.is_integer() && !c.is_negative())
        })
    }

    /// Renders the expression as a bound with `n` replaced by `r`.
    ///
    /// The expression must already be in ceiling-absolute form.
    pub fn to_bound(&self, r: &BoundExpr) -> Result<BoundExpr, BoundError> {
        if !self.is_natural_form() {
            return Err(BoundError::NegativeCoefficient(self.to_string()));
        }
        let mut parts = Vec::new();
        for ((b, a), alpha) in &self.terms {
            let mut factors = vec![BoundExpr::from_nonneg_poly(alpha)?];
            for _ in 0..*a {
                factors.push(r.clone());
            }
            let base = b.to_integer();
            if base > BigInt::one() {
                factors.push(BoundExpr::pow(base.magnitude().clone(), r.clone()));
            } else if base.is_zero() {
                factors.push(BoundExpr::pow(Zero::zero(), r.clone()));
            }
            parts.push(BoundExpr::prod(factors));
        }
        Ok(BoundExpr::sum(parts).simplify())
    }
}

/// `b^n` for a rational base.
pub(crate) fn pow_rational(b: &Rational, n: u64) -> Rational {
    if b.is_one() || n == 0 {
        return Rational::one();
    }
    if b.is_zero() {
        return Rational::zero();
    }
    let numer = num_traits::pow::pow(b.numer().clone(), n as usize);
    let denom = num_traits::pow::pow(b.denom().clone(), n as usize);
    Rational::new_raw(numer, denom)
}

impl<'a> Add<&'a PolyExp> for &'a PolyExp {
    type Output = PolyExp;
    fn add(self, rhs: &PolyExp) -> PolyExp {
        let mut out = self.clone();
        for ((b, a), alpha) in &rhs.terms {
            out.add_term(alpha.clone(), *a, b.clone());
        }
        out.start = self.start.max(rhs.start);
        out
    }
}

impl<'a> Sub<&'a PolyExp> for &'a PolyExp {
    type Output = PolyExp;
    fn sub(self, rhs: &PolyExp) -> PolyExp {
        self + &(-rhs)
    }
}

impl Neg for &PolyExp {
    type Output = PolyExp;
    fn neg(self) -> PolyExp {
        self.scale(&-Rational::one())
    }
}

impl<'a> Mul<&'a PolyExp> for &'a PolyExp {
    type Output = PolyExp;
    fn mul(self, rhs: &PolyExp) -> PolyExp {
        let mut out = PolyExp::zero();
        for ((b1, a1), p1) in &self.terms {
            for ((b2, a2), p2) in &rhs.terms {
                out.add_term(p1 * p2, a1 + a2, b1 * b2);
            }
        }
        out.start = self.start.max(rhs.start);
        out
    }
}

impl fmt::Display for PolyExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((b, a), alpha)) in self.terms.iter().enumerate() {
            let neg = alpha.num_terms() == 1 && alpha.terms().all(|(_, c)| c.is_negative());
            let alpha = if neg { -alpha } else { alpha.clone() };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors = Vec::new();
            if !(alpha.is_one_poly() && (*a > 0 || !b.is_one())) {
                factors.push(if alpha.num_terms() > 1 { format!("({alpha})") } else { alpha.to_string() });
            }
            match a {
                0 => {}
                1 => factors.push("n".to_string()),
                _ => factors.push(format!("n^{a}")),
            }
            if !b.is_one() {
                if b.is_integer() && !b.is_negative() {
                    factors.push(format!("{b}^n"));
                } else {
                    factors.push(format!("({b})^n"));
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolyExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [n >= {}]", self.start)
    }
}

impl Polynomial {
    pub(crate) fn is_one_poly(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
}

/// Solves a square system exactly; returns `None` if singular.
fn solve_dense(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip();
        let pivot = m[col].clone();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for (x, p) in m[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * p;
                }
                let d = &f * &rhs[col];
                rhs[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

/// Closed form of `sum_{i=1}^{n} i^a * b^i` as a poly-exponential expression in `n`.
///
/// For `b = 1` this is the Faulhaber polynomial of degree `a + 1`; otherwise
/// it has the shape `b^n * q(n) + c` with `deg q = a`. Both are found by
/// exact interpolation on `n = 0..=a+1`.
pub fn sum_power_geom(a: u32, b: &Rational) -> PolyExp {
    if b.is_zero() {
        return PolyExp::zero();
    }
    let pts = a as usize + 2;
    let mut sums = Vec::with_capacity(pts);
    let mut acc = Rational::zero();
    for m in 0..pts as u64 {
        if m > 0 {
            acc += num_traits::pow::pow(Rational::from_integer(BigInt::from(m)), a as usize) * pow_rational(b, m);
        }
        sums.push(acc.clone());
    }
    let rows: Vec<Vec<Rational>> = (0..pts as u64)
        .map(|m| {
            let mr = Rational::from_integer(BigInt::from(m));
            let bm = pow_rational(b, m);
            let mut row: Vec<Rational> = (0..=a).map(|k| num_traits::pow::pow(mr.clone(), k as usize)).collect();
            if b.is_one() {
                row.push(num_traits::pow::pow(mr.clone(), a as usize + 1));
            } else {
                for x in row.iter_mut() {
                    *x *= &bm;
                }
                row.push(Rational::one());
            }
            row
        })
        .collect();
    let sol = solve_dense(rows, sums).expect("summation ansatz is nonsingular");
    let mut out = PolyExp::zero();
    if b.is_one() {
        for (k, c) in sol.into_iter().enumerate() {
            out.add_term(Polynomial::constant(c), k as u32, Rational::one());
        }
    } else {
        for (k, c) in sol[..=a as usize].iter().enumerate() {
            out.add_term(Polynomial::constant(c.clone()), k as u32, b.clone());
        }
        out.add_term(Polynomial::constant(sol[a as usize + 1].clone()), 0, Rational::one());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_state, rat, ratio};

    fn brute(a: u32, b: &Rational, n: u64) -> Rational {
        (1..=n)
            .map(|i| num_traits::pow::pow(rat(i as i64), a as usize) * pow_rational(b, i))
            .fold(Rational::zero(), |x, y| x + y)
    }

    #[test]
    fn gauss_sum() {
        let e = sum_power_geom(1, &rat(1));
        let expected = &PolyExp::n().scale(&ratio(1, 2)) + &PolyExp::n().pow(2).scale(&ratio(1, 2));
        assert_eq!(e, expected);
    }

    #[test]
    fn squares_sum() {
        let e = sum_power_geom(2, &rat(1));
        let n = PolyExp::n();
        let expected = &(&n.scale(&ratio(1, 6)) + &n.pow(2).scale(&ratio(1, 2))) + &n.pow(3).scale(&ratio(1, 3));
        assert_eq!(e, expected);
    }

    #[test]
    fn geometric_sum_matches_brute_force() {
        let e = sum_power_geom(1, &rat(2));
        let s = IntState::new();
        for n in 0..=20u64 {
            assert_eq!(e.eval(&s, n), brute(1, &rat(2), n));
            // (n - 1) * 2^(n + 1) + 2
            let closed = (rat(n as i64) - rat(1)) * pow_rational(&rat(2), n + 1) + rat(2);
            assert_eq!(e.eval(&s, n), closed);
        }
    }

    #[test]
    fn all_small_cases_match() {
        let s = IntState::new();
        for a in 0..=4 {
            for b in [-3, -2, -1, 1, 2, 3] {
                let br = rat(b);
                let e = sum_power_geom(a, &br);
                for n in 0..=20 {
                    assert_eq!(e.eval(&s, n), brute(a, &br, n), "a={a} b={b} n={n}");
                }
            }
        }
        let half = ratio(-1, 2);
        let e = sum_power_geom(3, &half);
        for n in 0..=12 {
            assert_eq!(e.eval(&s, n), brute(3, &half, n));
        }
    }

    #[test]
    fn eval_examples() {
        let pe = &PolyExp::from_poly(Polynomial::named("x3")) - &PolyExp::n();
        assert_eq!(pe.eval(&int_state(&[("x3", 5)]), 3), rat(2));
        assert_eq!(PolyExp::zero().eval(&int_state(&[]), 7), rat(0));
    }

    #[test]
    fn shift_is_exact() {
        let x = Polynomial::named("x");
        let pe = &PolyExp::term(x.clone(), 2, rat(-3)) + &PolyExp::term(Polynomial::int(5), 1, ratio(1, 2));
        let s = int_state(&[("x", 4)]);
        for n in 0..10 {
            assert_eq!(pe.shift(3).eval(&s, n), pe.eval(&s, n + 3));
            assert_eq!(pe.shift(-2).eval(&s, n + 2), pe.eval(&s, n));
        }
    }

    #[test]
    fn ceil_abs_merges_and_maps_bases() {
        let x1 = Polynomial::named("x1");
        let pe = PolyExp::term(x1.clone(), 0, rat(-1));
        assert_eq!(pe.ceil_abs(), PolyExp::from_poly(x1));
        assert!(PolyExp::zero().ceil_abs().is_zero());
    }

    #[test]
    fn to_bound_rejects_negative() {
        let pe = PolyExp::from_poly(Polynomial::int(-1));
        assert!(pe.to_bound(&BoundExpr::constant(1)).is_err());
        let two_n = PolyExp::term(Polynomial::one(), 0, rat(2));
        let b = two_n.to_bound(&BoundExpr::var("x3")).unwrap();
        assert_eq!(b.to_string(), "2^x3");
    }
}
