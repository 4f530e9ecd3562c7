//! The monotone bound language: naturals, omega, variables, `+`, `*` and `k^b`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{NatState, Polynomial, Var};

/// Exponents above this value make evaluation saturate to omega.
const MAX_EVAL_EXPONENT: u64 = 1 << 20;

/// Expansion into sum-of-monomials form is abandoned past this many monomials.
const MAX_NORMAL_TERMS: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("bound expression needs non-negative coefficients and bases, got {0}")]
    NegativeCoefficient(String),
}

/// A bound expression. Every expression is weakly monotone in all variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundExpr {
    Const(BigUint),
    Omega,
    Var(Var),
    Sum(Vec<BoundExpr>),
    Prod(Vec<BoundExpr>),
    /// `k^b`
    Pow(BigUint, Box<BoundExpr>),
}

/// Result of evaluating a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Finite(BigUint),
    Omega,
}

impl BoundValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, BoundValue::Finite(_))
    }

    /// True if `x` does not exceed this value.
    pub fn admits(&self, x: &BigUint) -> bool {
        match self {
            BoundValue::Omega => true,
            BoundValue::Finite(v) => x <= v,
        }
    }
}

impl PartialOrd for BoundValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BoundValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BoundValue::Omega, BoundValue::Omega) => Ordering::Equal,
            (BoundValue::Omega, _) => Ordering::Greater,
            (_, BoundValue::Omega) => Ordering::Less,
            (BoundValue::Finite(a), BoundValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Finite(v) => write!(f, "{v}"),
            BoundValue::Omega => f.write_str("omega"),
        }
    }
}

impl BoundExpr {
    pub fn constant(c: u64) -> BoundExpr {
        BoundExpr::Const(BigUint::from(c))
    }

    pub fn zero() -> BoundExpr {
        BoundExpr::constant(0)
    }

    pub fn one() -> BoundExpr {
        BoundExpr::constant(1)
    }

    pub fn var(name: &str) -> BoundExpr {
        BoundExpr::Var(Var::new(name))
    }

    pub fn omega() -> BoundExpr {
        BoundExpr::Omega
    }

    /// Flattened sum with constants folded.
    pub fn sum<I: IntoIterator<Item = BoundExpr>>(parts: I) -> BoundExpr {
        let mut konst = BigUint::zero();
        let mut out = Vec::new();
        for p in parts {
            match p {
                BoundExpr::Omega => return BoundExpr::Omega,
                BoundExpr::Const(c) => konst += c,
                BoundExpr::Sum(ps) => {
                    for q in ps {
                        match q {
                            BoundExpr::Const(c) => konst += c,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if !konst.is_zero() || out.is_empty() {
            out.push(BoundExpr::Const(konst));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            BoundExpr::Sum(out)
        }
    }

    /// Flattened product with constants folded.
    pub fn prod<I: IntoIterator<Item = BoundExpr>>(parts: I) -> BoundExpr {
        let mut konst = BigUint::one();
        let mut out = Vec::new();
        let mut omega = false;
        for p in parts {
            match p {
                BoundExpr::Omega => omega = true,
                BoundExpr::Const(c) => konst *= c,
                BoundExpr::Prod(ps) => {
                    for q in ps {
                        match q {
                            BoundExpr::Const(c) => konst *= c,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if omega {
            return BoundExpr::Omega;
        }
        if konst.is_zero() {
            return BoundExpr::zero();
        }
        if !konst.is_one() || out.is_empty() {
            out.insert(0, BoundExpr::Const(konst));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            BoundExpr::Prod(out)
        }
    }

    pub fn pow(k: BigUint, b: BoundExpr) -> BoundExpr {
        if b == BoundExpr::Omega {
            return BoundExpr::Omega;
        }
        if k.is_one() {
            return BoundExpr::one();
        }
        BoundExpr::Pow(k, Box::new(b))
    }

    /// Converts a polynomial with non-negative coefficients, rounding coefficients up.
    pub fn from_nonneg_poly(p: &Polynomial) -> Result<BoundExpr, BoundError> {
        let mut parts = Vec::new();
        for (m, c) in p.sorted_terms() {
            if c.is_negative() {
                return Err(BoundError::NegativeCoefficient(p.to_string()));
            }
            let k = c.ceil().to_integer().magnitude().clone();
            let mut factors = vec![BoundExpr::Const(k)];
            for (v, e) in m.powers() {
                for _ in 0..*e {
                    factors.push(BoundExpr::Var(v.clone()));
                }
            }
            parts.push(BoundExpr::prod(factors));
        }
        Ok(BoundExpr::sum(parts))
    }

    /// The bound `ceil(|p|)` for an arbitrary polynomial.
    pub fn ceil_abs_of(p: &Polynomial) -> BoundExpr {
        BoundExpr::from_nonneg_poly(&p.abs_coeffs()).expect("absolute coefficients are non-negative")
    }

    pub fn is_finite(&self) -> bool {
        match self {
            BoundExpr::Omega => false,
            BoundExpr::Const(_) | BoundExpr::Var(_) => true,
            BoundExpr::Sum(ps) | BoundExpr::Prod(ps) => ps.iter().all(BoundExpr::is_finite),
            BoundExpr::Pow(_, b) => b.is_finite(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            BoundExpr::Var(v) => {
                out.insert(v.clone());
            }
            BoundExpr::Sum(ps) | BoundExpr::Prod(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
            BoundExpr::Pow(_, b) => b.collect_vars(out),
            _ => {}
        }
    }

    /// True if the expression contains `k^b` with `k >= 2` and a non-constant exponent.
    pub fn has_exponential(&self) -> bool {
        match self {
            BoundExpr::Sum(ps) | BoundExpr::Prod(ps) => ps.iter().any(BoundExpr::has_exponential),
            BoundExpr::Pow(k, b) => (*k > BigUint::one() && !b.vars().is_empty()) || b.has_exponential(),
            _ => false,
        }
    }

    /// Omega-absorbing evaluation.
    pub fn eval(&self, s: &NatState) -> BoundValue {
        match self {
            BoundExpr::Const(c) => BoundValue::Finite(c.clone()),
            BoundExpr::Omega => BoundValue::Omega,
            BoundExpr::Var(v) => BoundValue::Finite(s.get(v).cloned().unwrap_or_default()),
            BoundExpr::Sum(ps) => {
                let mut acc = BigUint::zero();
                for p in ps {
                    match p.eval(s) {
                        BoundValue::Omega => return BoundValue::Omega,
                        BoundValue::Finite(v) => acc += v,
                    }
                }
                BoundValue::Finite(acc)
            }
            BoundExpr::Prod(ps) => {
                let mut acc = BigUint::one();
                let mut omega = false;
                for p in ps {
                    match p.eval(s) {
                        BoundValue::Omega => omega = true,
                        BoundValue::Finite(v) => acc *= v,
                    }
                }
                if omega {
                    BoundValue::Omega
                } else {
                    BoundValue::Finite(acc)
                }
            }
            BoundExpr::Pow(k, b) => match b.eval(s) {
                BoundValue::Omega => BoundValue::Omega,
                BoundValue::Finite(e) => {
                    if k.is_zero() || k.is_one() {
                        let one = e.is_zero() || k.is_one();
                        return BoundValue::Finite(if one { BigUint::one() } else { BigUint::zero() });
                    }
                    match e.to_u64() {
                        Some(e) if e <= MAX_EVAL_EXPONENT => BoundValue::Finite(k.pow(e as u32)),
                        _ => BoundValue::Omega,
                    }
                }
            },
        }
    }

    /// Number of nodes of the expression tree.
    pub fn size(&self) -> usize {
        match self {
            BoundExpr::Const(_) | BoundExpr::Omega | BoundExpr::Var(_) => 1,
            BoundExpr::Sum(ps) | BoundExpr::Prod(ps) => 1 + ps.iter().map(BoundExpr::size).sum::<usize>(),
            BoundExpr::Pow(_, b) => 1 + b.size(),
        }
    }

    /// Simultaneous substitution of variables; variables absent from `sub` are kept.
    pub fn subst(&self, sub: &BTreeMap<Var, BoundExpr>) -> BoundExpr {
        match self {
            BoundExpr::Var(v) => sub.get(v).cloned().unwrap_or_else(|| self.clone()),
            BoundExpr::Const(_) | BoundExpr::Omega => self.clone(),
            BoundExpr::Sum(ps) => BoundExpr::sum(ps.iter().map(|p| p.subst(sub))),
            BoundExpr::Prod(ps) => BoundExpr::prod(ps.iter().map(|p| p.subst(sub))),
            BoundExpr::Pow(k, b) => BoundExpr::pow(k.clone(), b.subst(sub)),
        }
    }

    /// Canonical form: expanded sum of monomials when small enough, otherwise
    /// a flattened tree with folded constants.
    pub fn simplify(&self) -> BoundExpr {
        match normalize(self) {
            Some(n) => n.to_expr(),
            None => self.flatten(),
        }
    }

    fn flatten(&self) -> BoundExpr {
        match self {
            BoundExpr::Sum(ps) => BoundExpr::sum(ps.iter().map(BoundExpr::flatten)),
            BoundExpr::Prod(ps) => BoundExpr::prod(ps.iter().map(BoundExpr::flatten)),
            BoundExpr::Pow(k, b) => BoundExpr::pow(k.clone(), b.flatten()),
            other => other.clone(),
        }
    }

    /// True if both sides have the same canonical form.
    pub fn equivalent(&self, other: &BoundExpr) -> bool {
        match (normalize(self), normalize(other)) {
            (Some(a), Some(b)) => a == b,
            _ => self.flatten() == other.flatten(),
        }
    }

    /// The polynomial denoted by an exponential-free, omega-free bound.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        match self {
            BoundExpr::Const(c) => Some(Polynomial::constant(super::Rational::from_integer(BigInt::from(c.clone())))),
            BoundExpr::Var(v) => Some(Polynomial::var(v.clone())),
            BoundExpr::Omega => None,
            BoundExpr::Sum(ps) => ps.iter().try_fold(Polynomial::zero(), |acc, p| Some(acc + p.to_polynomial()?)),
            BoundExpr::Prod(ps) => ps.iter().try_fold(Polynomial::one(), |acc, p| Some(&acc * &p.to_polynomial()?)),
            BoundExpr::Pow(k, b) => {
                let e = b.to_polynomial()?.as_constant()?;
                let e = e.to_integer().to_u32()?;
                Some(Polynomial::constant(super::Rational::from_integer(BigInt::from(k.pow(e)))))
            }
        }
    }

    /// Degree after replacing every variable by one symbol, or `None` for exponential growth.
    fn growth(&self) -> Option<u32> {
        match self {
            BoundExpr::Const(_) | BoundExpr::Omega => Some(0),
            BoundExpr::Var(_) => Some(1),
            BoundExpr::Sum(ps) => ps.iter().try_fold(0, |acc, p| Some(acc.max(p.growth()?))),
            BoundExpr::Prod(ps) => ps.iter().try_fold(0, |acc, p| Some(acc + p.growth()?)),
            BoundExpr::Pow(k, b) => {
                if *k <= BigUint::one() || b.vars().is_empty() {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            BoundExpr::Const(c) => write!(f, "{c}"),
            BoundExpr::Omega => f.write_str("omega"),
            BoundExpr::Var(v) => write!(f, "{v}"),
            BoundExpr::Sum(ps) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    p.fmt_prec(f, 0)?;
                }
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            BoundExpr::Prod(ps) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                // Group equal adjacent factors into powers.
                let mut i = 0;
                let mut first = true;
                while i < ps.len() {
                    let mut j = i + 1;
                    while j < ps.len() && ps[j] == ps[i] {
                        j += 1;
                    }
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    if j - i > 1 {
                        ps[i].fmt_prec(f, 2)?;
                        write!(f, "^{}", j - i)?;
                    } else {
                        ps[i].fmt_prec(f, 1)?;
                    }
                    i = j;
                }
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            BoundExpr::Pow(k, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                write!(f, "{k}^")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for BoundExpr {
    type Output = BoundExpr;
    fn add(self, rhs: BoundExpr) -> BoundExpr {
        BoundExpr::sum([self, rhs])
    }
}

impl Mul for BoundExpr {
    type Output = BoundExpr;
    fn mul(self, rhs: BoundExpr) -> BoundExpr {
        BoundExpr::prod([self, rhs])
    }
}

impl From<Var> for BoundExpr {
    fn from(v: Var) -> BoundExpr {
        BoundExpr::Var(v)
    }
}

/// Growth classes used for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AsymptoticClass {
    Constant,
    Linear,
    Quadratic,
    HigherPolynomial,
    Exponential,
    Infinite,
}

impl AsymptoticClass {
    pub fn all() -> [AsymptoticClass; 6] {
        use AsymptoticClass::*;
        [Constant, Linear, Quadratic, HigherPolynomial, Exponential, Infinite]
    }

    pub fn is_finite(self) -> bool {
        self != AsymptoticClass::Infinite
    }
}

impl fmt::Display for AsymptoticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AsymptoticClass::Constant => "O(1)",
            AsymptoticClass::Linear => "O(n)",
            AsymptoticClass::Quadratic => "O(n^2)",
            AsymptoticClass::HigherPolynomial => "O(n^>2)",
            AsymptoticClass::Exponential => "EXP",
            AsymptoticClass::Infinite => "omega",
        })
    }
}

/// Classifies a bound by its growth when every variable is replaced by `n`.
pub fn asymptotic_class(b: &BoundExpr) -> AsymptoticClass {
    if !b.is_finite() {
        return AsymptoticClass::Infinite;
    }
    let growth = match normalize(b) {
        Some(Normal::Poly(p)) => p.growth(),
        _ => b.growth(),
    };
    match growth {
        None => AsymptoticClass::Exponential,
        Some(0) => AsymptoticClass::Constant,
        Some(1) => AsymptoticClass::Linear,
        Some(2) => AsymptoticClass::Quadratic,
        Some(_) => AsymptoticClass::HigherPolynomial,
    }
}

// Canonical sum-of-monomials form. Atoms are variables and exponentials
// `k^e` with `k >= 2` and a non-constant exponent `e`.

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Atom {
    Var(Var),
    Exp(BigUint, NPoly),
}

type NMono = Vec<(Atom, u32)>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
struct NPoly(BTreeMap<NMono, BigUint>);

#[derive(Clone, PartialEq, Eq, Debug)]
enum Normal {
    Omega,
    Poly(NPoly),
}

fn mono_degree(m: &NMono) -> u32 {
    m.iter().map(|(_, e)| e).sum()
}

fn mono_mul(a: &NMono, b: &NMono) -> Option<NMono> {
    let mut vars: BTreeMap<Var, u32> = BTreeMap::new();
    let mut exps: BTreeMap<BigUint, NPoly> = BTreeMap::new();
    for (atom, e) in a.iter().chain(b.iter()) {
        match atom {
            Atom::Var(v) => *vars.entry(v.clone()).or_insert(0) += e,
            Atom::Exp(k, p) => {
                let scaled = p.scale(&BigUint::from(*e));
                let entry = exps.entry(k.clone()).or_default();
                *entry = entry.add(&scaled);
                if entry.0.len() > MAX_NORMAL_TERMS {
                    return None;
                }
            }
        }
    }
    let mut out: NMono = vars.into_iter().map(|(v, e)| (Atom::Var(v), e)).collect();
    out.extend(exps.into_iter().map(|(k, p)| (Atom::Exp(k, p), 1)));
    out.sort();
    Some(out)
}

impl NPoly {
    fn constant(c: BigUint) -> NPoly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Vec::new(), c);
        }
        NPoly(m)
    }

    fn atom(a: Atom) -> NPoly {
        let mut m = BTreeMap::new();
        m.insert(vec![(a, 1)], BigUint::one());
        NPoly(m)
    }

    fn as_constant(&self) -> Option<BigUint> {
        match self.0.len() {
            0 => Some(BigUint::zero()),
            1 => self.0.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add(&self, other: &NPoly) -> NPoly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            *out.entry(m.clone()).or_default() += c;
        }
        NPoly(out)
    }

    fn scale(&self, k: &BigUint) -> NPoly {
        if k.is_zero() {
            return NPoly::default();
        }
        NPoly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    fn mul(&self, other: &NPoly) -> Option<NPoly> {
        if self.0.len() * other.0.len() > MAX_NORMAL_TERMS * 4 {
            return None;
        }
        let mut out: BTreeMap<NMono, BigUint> = BTreeMap::new();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                *out.entry(mono_mul(m1, m2)?).or_default() += c1 * c2;
            }
        }
        if out.len() > MAX_NORMAL_TERMS {
            return None;
        }
        Some(NPoly(out))
    }

    fn growth(&self) -> Option<u32> {
        let mut g = 0;
        for m in self.0.keys() {
            let mut d = 0;
            for (a, e) in m {
                match a {
                    Atom::Var(_) => d += e,
                    Atom::Exp(..) => return None,
                }
            }
            g = g.max(d);
        }
        Some(g)
    }

    fn to_expr(&self) -> BoundExpr {
        let mut monos: Vec<(&NMono, &BigUint)> = self.0.iter().collect();
        monos.sort_by(|a, b| {
            let ea = a.0.iter().any(|(x, _)| matches!(x, Atom::Exp(..)));
            let eb = b.0.iter().any(|(x, _)| matches!(x, Atom::Exp(..)));
            eb.cmp(&ea).then_with(|| mono_degree(b.0).cmp(&mono_degree(a.0))).then_with(|| a.0.cmp(b.0))
        });
        let parts: Vec<BoundExpr> = monos
            .into_iter()
            .map(|(m, c)| {
                let mut factors = vec![BoundExpr::Const(c.clone())];
                for (atom, e) in m {
                    let f = match atom {
                        Atom::Var(v) => BoundExpr::Var(v.clone()),
                        Atom::Exp(k, p) => BoundExpr::Pow(k.clone(), Box::new(p.to_expr())),
                    };
                    for _ in 0..*e {
                        factors.push(f.clone());
                    }
                }
                BoundExpr::prod(factors)
            })
            .collect();
        BoundExpr::sum(parts)
    }
}

impl Normal {
    fn to_expr(&self) -> BoundExpr {
        match self {
            Normal::Omega => BoundExpr::Omega,
            Normal::Poly(p) => p.to_expr(),
        }
    }
}

fn normalize(e: &BoundExpr) -> Option<Normal> {
    Some(match e {
        BoundExpr::Omega => Normal::Omega,
        BoundExpr::Const(c) => Normal::Poly(NPoly::constant(c.clone())),
        BoundExpr::Var(v) => Normal::Poly(NPoly::atom(Atom::Var(v.clone()))),
        BoundExpr::Sum(ps) => {
            let mut acc = NPoly::default();
            for p in ps {
                match normalize(p)? {
                    Normal::Omega => return Some(Normal::Omega),
                    Normal::Poly(q) => acc = acc.add(&q),
                }
                if acc.0.len() > MAX_NORMAL_TERMS {
                    return None;
                }
            }
            Normal::Poly(acc)
        }
        BoundExpr::Prod(ps) => {
            let mut acc = NPoly::constant(BigUint::one());
            let mut omega = false;
            for p in ps {
                match normalize(p)? {
                    Normal::Omega => omega = true,
                    Normal::Poly(q) => acc = acc.mul(&q)?,
                }
            }
            if omega {
                Normal::Omega
            } else {
                Normal::Poly(acc)
            }
        }
        BoundExpr::Pow(k, b) => match normalize(b)? {
            Normal::Omega => Normal::Omega,
            Normal::Poly(q) => {
                if k.is_one() {
                    return Some(Normal::Poly(NPoly::constant(BigUint::one())));
                }
                let mut rest = q.clone();
                let c = rest.0.remove(&Vec::new()).unwrap_or_default();
                if k.is_zero() {
                    return Some(match q.as_constant() {
                        Some(c) => Normal::Poly(NPoly::constant(if c.is_zero() { BigUint::one() } else { BigUint::zero() })),
                        None => Normal::Poly(NPoly::atom(Atom::Exp(k.clone(), q))),
                    });
                }
                let c = c.to_u32().filter(|&c| u64::from(c) <= MAX_EVAL_EXPONENT)?;
                let factor = NPoly::constant(k.pow(c));
                if rest.0.is_empty() {
                    Normal::Poly(factor)
                } else {
                    Normal::Poly(factor.mul(&NPoly::atom(Atom::Exp(k.clone(), rest)))?)
                }
            }
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat_state;

    fn v(n: &str) -> BoundExpr {
        BoundExpr::var(n)
    }

    fn c(k: u64) -> BoundExpr {
        BoundExpr::constant(k)
    }

    #[test]
    fn eval_examples() {
        let b = c(2) * v("x3") + c(1);
        assert_eq!(b.eval(&nat_state(&[("x3", 5)])), BoundValue::Finite(11u32.into()));
        assert_eq!(BoundExpr::omega().eval(&nat_state(&[])), BoundValue::Omega);
        let rb = v("x5") * BoundExpr::sum([c(4) * v("x1"), c(2) * v("x2"), c(14) * v("x5")]);
        let s = nat_state(&[("x1", 1), ("x2", 1), ("x5", 2)]);
        assert_eq!(rb.eval(&s), BoundValue::Finite(68u32.into()));
    }

    #[test]
    fn subst_examples() {
        let mut sub = BTreeMap::new();
        sub.insert(Var::new("x3"), v("x5"));
        assert_eq!(v("x3").subst(&sub), v("x5"));
        let b = v("x3") + v("x3") * v("x3");
        assert!(b.subst(&sub).equivalent(&(v("x5") + v("x5") * v("x5"))));
    }

    #[test]
    fn simplify_collects_like_terms() {
        let b = v("x3") + c(2) * v("x3") + c(1) + v("x4") * c(0);
        assert_eq!(b.simplify().to_string(), "3*x3+1");
        let p = v("x5") * (c(4) * v("x1") + c(2) * v("x2") + c(14) * v("x5"));
        assert_eq!(p.simplify().to_string(), "4*x1*x5+2*x2*x5+14*x5^2");
    }

    #[test]
    fn omega_absorbs() {
        assert_eq!(BoundExpr::omega() * c(0), BoundExpr::Omega);
        assert_eq!(v("x") + BoundExpr::omega(), BoundExpr::Omega);
        assert_eq!(BoundExpr::pow(2u32.into(), BoundExpr::omega()), BoundExpr::Omega);
    }

    #[test]
    fn exponentials_normalize() {
        let e = BoundExpr::pow(2u32.into(), v("x") + c(1));
        assert_eq!(e.simplify().to_string(), "2*2^x");
        let s = nat_state(&[("x", 3)]);
        assert_eq!(e.eval(&s), e.simplify().eval(&s));
        let sq = BoundExpr::pow(2u32.into(), v("x")) * BoundExpr::pow(2u32.into(), v("x"));
        assert_eq!(sq.simplify().to_string(), "2^(2*x)");
    }

    #[test]
    fn classes() {
        assert_eq!(asymptotic_class(&(c(2) * v("x3") + c(1))), AsymptoticClass::Linear);
        assert_eq!(asymptotic_class(&(v("x3") + v("x5") * v("x5"))), AsymptoticClass::Quadratic);
        let e = BoundExpr::pow(2u32.into(), v("x3")) + v("x1");
        assert_eq!(asymptotic_class(&e), AsymptoticClass::Exponential);
        assert_eq!(asymptotic_class(&c(7)), AsymptoticClass::Constant);
        assert_eq!(asymptotic_class(&BoundExpr::omega()), AsymptoticClass::Infinite);
        assert_eq!(asymptotic_class(&(v("x") * v("x") * v("x"))), AsymptoticClass::HigherPolynomial);
    }

    #[test]
    fn rendering() {
        assert_eq!((v("x3") * v("x3") * c(2)).simplify().to_string(), "2*x3^2");
        assert_eq!(BoundExpr::pow(3u32.into(), v("a") + v("b")).to_string(), "3^(a+b)");
        assert_eq!(BoundExpr::zero().simplify().to_string(), "0");
    }

    #[test]
    fn polynomial_roundtrip() {
        let b = c(4) * v("x1") + c(2) * v("x2");
        let p = b.to_polynomial().unwrap();
        assert!(BoundExpr::from_nonneg_poly(&p).unwrap().equivalent(&b));
    }
}
