//! Exact rational linear algebra: characteristic polynomials, integer
//! eigenvalues, Jordan normal forms and period detection.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix has eigenvalues that are not integers")]
    NonIntegerSpectrum,
    #[error("matrix is singular")]
    Singular,
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> RatMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).fold(Rational::zero(), |x, y| x + y))
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let x = &m[(r, j)] * &inv;
                m[(r, j)] = x;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let d = &f * &m[(r, j)];
                        m[(i, j)] -= d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<RatMatrix, LinalgError> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Ok(RatMatrix::identity(0));
        }
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        let mut inv = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rational>]) -> RatMatrix {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = RatMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let p = a * &rhs[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `A^k`, with `A^0 = I`.
pub fn matrix_pow(a: &RatMatrix, k: u64) -> RatMatrix {
    assert!(a.is_square());
    let mut acc = RatMatrix::identity(a.rows);
    let mut base = a.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> UniPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    /// The polynomial `prod (x - r)` over the given roots.
    pub fn from_roots(roots: &[BigInt]) -> UniPoly {
        let mut p = UniPoly::from_ints(&[1]);
        for r in roots {
            let lin = UniPoly::new(vec![Rational::from_integer(-r.clone()), Rational::one()]);
            p = p.mul(&lin);
        }
        p
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UniPoly::new(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Divides by `(x - r)`, returning the quotient if the remainder is zero.
    fn deflate(&self, r: &Rational) -> Option<UniPoly> {
        let n = self.coeffs.len();
        if n < 2 {
            return None;
        }
        let mut q = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry * r;
            if i == 0 {
                return if v.is_zero() { Some(UniPoly::new(q)) } else { None };
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        None
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The monic characteristic polynomial `det(xI - A)` (Faddeev-LeVerrier).
pub fn char_poly(a: &RatMatrix) -> UniPoly {
    assert!(a.is_square(), "characteristic polynomial of a non-square matrix");
    let n = a.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = RatMatrix::zeros(n, n);
    let id = RatMatrix::identity(n);
    for k in 1..=n {
        m = &(a * &m) + &id.scale(&coeffs[n - k + 1]);
        let am = a * &m;
        coeffs[n - k] = -am.trace() / Rational::from_integer(BigInt::from(k));
    }
    UniPoly::new(coeffs)
}

/// Trial-division factorization; a cofactor without small divisors is treated as prime.
fn factorize(mut n: BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while !n.is_one() && p <= 1_000_000 {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

const MAX_DIVISOR_CANDIDATES: usize = 200_000;

/// Positive divisors of `n` not exceeding `limit`, ascending.
fn divisors_up_to(n: &BigUint, limit: &BigUint) -> Vec<BigUint> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factorize(n.clone()) {
        let mut next = Vec::new();
        for d in &divs {
            let mut x = d.clone();
            for _ in 0..=e {
                if &x > limit {
                    break;
                }
                next.push(x.clone());
                x *= &p;
            }
        }
        divs = next;
        if divs.len() > MAX_DIVISOR_CANDIDATES {
            break;
        }
    }
    divs.sort();
    divs
}

/// Integer roots of a monic integer polynomial, with multiplicity, ascending.
///
/// By the rational root theorem these are all rational roots. Candidates
/// are the divisors of the constant term within the Cauchy bound.
pub fn integer_roots(f: &UniPoly) -> Vec<BigInt> {
    let mut roots = Vec::new();
    let mut f = f.clone();
    assert!(f.is_monic(), "integer_roots needs a monic polynomial");
    assert!(f.coeffs.iter().all(|c| c.is_integer()), "integer_roots needs integer coefficients");
    while f.degree() > 0 && f.coeffs[0].is_zero() {
        roots.push(BigInt::zero());
        f = UniPoly::new(f.coeffs[1..].to_vec());
    }
    while f.degree() > 2 {
        let c0 = f.coeffs[0].to_integer();
        let bound: BigUint = f.coeffs.iter().map(|c| c.to_integer().magnitude().clone()).max().unwrap() + 1u32;
        let mut found = None;
        'search: for d in divisors_up_to(c0.magnitude(), &bound) {
            for cand in [BigInt::from(d.clone()), -BigInt::from(d)] {
                if let Some(q) = f.deflate(&Rational::from_integer(cand.clone())) {
                    found = Some((cand, q));
                    break 'search;
                }
            }
        }
        match found {
            Some((r, q)) => {
                roots.push(r);
                f = q;
            }
            None => break,
        }
    }
    match f.degree() {
        1 => roots.push(-f.coeffs[0].to_integer()),
        2 => {
            let b = f.coeffs[1].to_integer();
            let c = f.coeffs[0].to_integer();
            let disc: BigInt = &b * &b - BigInt::from(4) * &c;
            if !disc.is_negative() {
                let s = disc.sqrt();
                if &s * &s == disc && ((-&b + &s) % 2u32).is_zero() {
                    roots.push((-&b - &s) / 2);
                    roots.push((-&b + &s) / 2);
                }
            }
        }
        _ => {}
    }
    roots.sort();
    roots
}

/// Integer eigenvalues with multiplicity, if they exhaust the spectrum.
pub fn integer_spectrum(a: &RatMatrix) -> Option<Vec<BigInt>> {
    let f = char_poly(a);
    if !f.coeffs.iter().all(|c| c.is_integer()) {
        return None;
    }
    let roots = integer_roots(&f);
    (roots.len() == a.rows()).then_some(roots)
}

/// Jordan decomposition with `P * A * Pinv = J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanDecomp {
    pub j: RatMatrix,
    pub p: RatMatrix,
    pub pinv: RatMatrix,
    /// `(eigenvalue, block size)` in the order the blocks appear in `j`.
    pub blocks: Vec<(BigInt, usize)>,
}

fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero);
    }
    let m = RatMatrix::from_columns(basis);
    let mut cols = basis.to_vec();
    cols.push(v.to_vec());
    RatMatrix::from_columns(&cols).rank() == m.rank()
}

/// Jordan normal form over the rationals; every eigenvalue must be an integer.
///
/// Blocks are ordered by eigenvalue ascending, then by size descending.
/// Each block contributes the chain `(A - lI)^(k-1) u, ..., (A - lI) u, u`
/// as columns of `Pinv`.
pub fn jordan_form(a: &RatMatrix) -> Result<JordanDecomp, LinalgError> {
    let n = a.rows();
    let spectrum = integer_spectrum(a).ok_or(LinalgError::NonIntegerSpectrum)?;
    let mut eigen: Vec<(BigInt, usize)> = Vec::new();
    for r in spectrum {
        match eigen.last_mut() {
            Some((l, m)) if *l == r => *m += 1,
            _ => eigen.push((r, 1)),
        }
    }
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for (lambda, mult) in &eigen {
        let nl = a - &RatMatrix::identity(n).scale(&Rational::from_integer(lambda.clone()));
        // Kernels of increasing powers until the generalized eigenspace is reached.
        let mut kernels: Vec<Vec<Vec<Rational>>> = vec![Vec::new()];
        let mut power = RatMatrix::identity(n);
        loop {
            power = &power * &nl;
            let k = power.kernel();
            let done = k.len() >= *mult;
            kernels.push(k);
            if done {
                break;
            }
        }
        let top = kernels.len() - 1;
        let mut chains: Vec<Vec<Vec<Rational>>> = Vec::new();
        for level in (1..=top).rev() {
            // Spanning set of K_{level-1} plus images of longer chains at this level.
            let mut span: Vec<Vec<Rational>> = kernels[level - 1].clone();
            for ch in &chains {
                span.push(ch[level - 1].clone());
            }
            for v in kernels[level].clone() {
                if !in_span(&span, &v) {
                    span.push(v.clone());
                    let mut chain = vec![v];
                    for _ in 1..level {
                        let next = nl.apply(chain.last().unwrap());
                        chain.push(next);
                    }
                    chain.reverse();
                    chains.push(chain);
                }
            }
        }
        chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
        for ch in chains {
            blocks.push((lambda.clone(), ch.len()));
            columns.extend(ch);
        }
    }
    let pinv = RatMatrix::from_columns(&columns);
    let pinv = if n == 0 { RatMatrix::zeros(0, 0) } else { pinv };
    let p = pinv.inverse()?;
    let j = &(&p * a) * &pinv;
    Ok(JordanDecomp { j, p, pinv, blocks })
}

/// Least common multiple of `1..=k`.
pub fn lcm_upto(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc.lcm(&BigUint::from(i)))
}

/// Default period cap for a `d`-dimensional block: `min(lcm(1..d^3), ceiling)`.
pub fn default_period_cap(d: usize, ceiling: u64) -> u64 {
    let l = lcm_upto((d as u64).pow(3).max(1));
    l.to_u64().map_or(ceiling, |l| l.min(ceiling))
}

/// Least `p <= cap` such that every eigenvalue of `A^p` is an integer.
pub fn period_of(a: &RatMatrix, cap: u64) -> Option<u64> {
    assert!(a.is_square());
    let mut power = RatMatrix::identity(a.rows());
    for p in 1..=cap {
        power = &power * a;
        if integer_spectrum(&power).is_some() {
            return Some(p);
        }
    }
    None
}
