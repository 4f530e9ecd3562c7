//! Multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{IntState, Rational, Var};

/// A power product `x1^e1 * ... * xk^ek`, sorted by variable, exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers<I: IntoIterator<Item = (Var, u32)>>(powers: I) -> Monomial {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *acc.entry(v).or_insert(0) += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().map(|(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes `v` from the monomial, returning the remaining part and the exponent of `v`.
    pub fn split_var(&self, v: &Var) -> (Monomial, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, k)| {
                if w == v {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Monomial(rest), e)
    }

    /// Display order: higher total degree first, then by variable with larger exponents first.
    pub fn display_cmp(&self, other: &Monomial) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(other.0.iter()) {
                let c = a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            other.0.len().cmp(&self.0.len())
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A polynomial in `Q[V]`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Polynomial {
        Polynomial::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(v: Var) -> Polynomial {
        Polynomial::term(Monomial::var(v), Rational::one())
    }

    pub fn named(name: &str) -> Polynomial {
        Polynomial::var(Var::new(name))
    }

    pub fn term(m: Monomial, c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().cloned()).collect()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(n, k)| (n.mul(m), k.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces every coefficient by its absolute value (the `|p|` operator).
    pub fn abs_coeffs(&self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.abs())).collect() }
    }

    /// Smallest positive integer whose product with `self` has integer coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Evaluates with a function supplying variable values.
    pub fn eval_with<F: FnMut(&Var) -> Rational>(&self, mut value: F) -> Rational {
        let mut cache: BTreeMap<&Var, Rational> = BTreeMap::new();
        for m in self.terms.keys() {
            for (v, _) in m.powers() {
                cache.entry(v).or_insert_with(|| value(v));
            }
        }
        if cache.values().all(|x| x.is_integer()) {
            // Integer values: sum over the common denominator and reduce once.
            let ints: BTreeMap<&Var, BigInt> = cache.iter().map(|(v, x)| (*v, x.to_integer())).collect();
            let den = self.denominator_lcm();
            let mut num = BigInt::zero();
            for (m, c) in &self.terms {
                let mut prod = c.numer() * (&den / c.denom());
                for (v, e) in m.powers() {
                    prod *= num_traits::pow::pow(ints[v].clone(), *e as usize);
                }
                num += prod;
            }
            return Rational::new(num, den);
        }
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (v, e) in m.powers() {
                let base = cache.entry(v).or_insert_with(|| value(v));
                prod *= num_traits::pow::pow(base.clone(), *e as usize);
            }
            sum += prod;
        }
        sum
    }

    /// Evaluates under an integer state; missing variables evaluate to zero.
    pub fn eval(&self, s: &IntState) -> Rational {
        self.eval_with(|v| Rational::from_integer(s.get(v).cloned().unwrap_or_default()))
    }

    pub fn eval_rational(&self, s: &BTreeMap<Var, Rational>) -> Rational {
        self.eval_with(|v| s.get(v).cloned().unwrap_or_else(Rational::zero))
    }

    /// Simultaneous substitution; variables absent from `sub` are kept.
    pub fn compose(&self, sub: &BTreeMap<Var, Polynomial>) -> Polynomial {
        let mut powers: BTreeMap<(Var, u32), Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(c.clone());
            let mut kept = Vec::new();
            for (v, e) in m.powers() {
                match sub.get(v) {
                    Some(q) => {
                        let pw = powers.entry((v.clone(), *e)).or_insert_with(|| q.pow(*e));
                        prod = &prod * &*pw;
                    }
                    None => kept.push((v.clone(), *e)),
                }
            }
            if !kept.is_empty() {
                prod = prod.mul_monomial(&Monomial::from_powers(kept));
            }
            out = out + prod;
        }
        out
    }

    pub fn substitute(&self, v: &Var, q: &Polynomial) -> Polynomial {
        let mut sub = BTreeMap::new();
        sub.insert(v.clone(), q.clone());
        self.compose(&sub)
    }

    /// Decomposes an affine polynomial into its linear coefficients and constant.
    pub fn as_affine(&self) -> Option<(BTreeMap<Var, Rational>, Rational)> {
        let mut lin = BTreeMap::new();
        let mut c0 = Rational::zero();
        for (m, c) in &self.terms {
            match m.degree() {
                0 => c0 = c.clone(),
                1 => {
                    lin.insert(m.powers()[0].0.clone(), c.clone());
                }
                _ => return None,
            }
        }
        Some((lin, c0))
    }

    /// Collects coefficients of powers of `v`: `self = sum_k coeff_k * v^k`.
    pub fn coefficients_in(&self, v: &Var) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Terms sorted for display.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| a.0.display_cmp(b.0));
        ts
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Var> for Polynomial {
    fn from(v: Var) -> Polynomial {
        Polynomial::var(v)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        if self.terms.len() < rhs.terms.len() {
            return rhs + self;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_state, rat};

    fn x(i: usize) -> Polynomial {
        Polynomial::named(&format!("x{i}"))
    }

    #[test]
    fn eval_examples() {
        let p = &x(3) - &Polynomial::int(1);
        assert_eq!(p.eval(&int_state(&[("x3", 2)])), rat(1));
        let q = &x(4) + &x(3).pow(2);
        assert_eq!(q.eval(&int_state(&[("x3", 2), ("x4", 1)])), rat(5));
        let r = &x(1).scale(&rat(3)) + &x(2).scale(&rat(2));
        assert_eq!(r.eval(&int_state(&[("x1", -6), ("x2", -8)])), rat(-34));
    }

    #[test]
    fn compose_examples() {
        let q = &x(4) + &x(3).pow(2);
        let mut eta = BTreeMap::new();
        eta.insert(Var::new("x3"), &x(3) - &Polynomial::int(1));
        eta.insert(Var::new("x4"), q.clone());
        let expected = &(&x(4) + &x(3).pow(2)) + &(&x(3) - &Polynomial::int(1)).pow(2);
        assert_eq!(q.compose(&eta), expected);
        let p = &x(3) - &Polynomial::int(1);
        assert_eq!(p.compose(&eta), &x(3) - &Polynomial::int(2));
    }

    #[test]
    fn abs_coeffs_examples() {
        let p = &x(1).scale(&rat(-5)) - &x(2).scale(&rat(3));
        assert_eq!(p.abs_coeffs(), &x(1).scale(&rat(5)) + &x(2).scale(&rat(3)));
        assert!(Polynomial::zero().abs_coeffs().is_zero());
    }

    #[test]
    fn rendering_is_canonical() {
        let p = &(&x(4) + &x(3).pow(3).scale(&rat(3))) - &Polynomial::int(1);
        assert_eq!(p.to_string(), "3*x3^3+x4-1");
        let q = &x(1).scale(&Rational::new(1.into(), 6.into())) - &x(2);
        assert_eq!(q.to_string(), "1/6*x1-x2");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = &x(1) - &x(1);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn affine_decomposition() {
        let p = &(&x(1).scale(&rat(2)) - &x(2)) + &Polynomial::int(7);
        let (lin, c) = p.as_affine().unwrap();
        assert_eq!(lin[&Var::new("x1")], rat(2));
        assert_eq!(c, rat(7));
        assert!(x(1).pow(2).as_affine().is_none());
    }
}
