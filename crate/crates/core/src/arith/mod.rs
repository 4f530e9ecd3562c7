//! Exact arithmetic: rationals, polynomials, poly-exponential expressions and bounds.

mod bound;
mod poly;
mod polyexp;
mod var;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};

pub use bound::{asymptotic_class, AsymptoticClass, BoundExpr, BoundError, BoundValue};
pub use poly::{Monomial, Polynomial};
pub use polyexp::{sum_power_geom, PolyExp};
pub use var::Var;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = num_rational::BigRational;

/// Integer program state.
pub type IntState = BTreeMap<Var, BigInt>;

/// State of absolute values, used to evaluate bounds.
pub type NatState = BTreeMap<Var, BigUint>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_state(pairs: &[(&str, i64)]) -> IntState {
    pairs.iter().map(|(v, x)| (Var::new(v), BigInt::from(*x))).collect()
}

pub fn nat_state(pairs: &[(&str, u64)]) -> NatState {
    pairs.iter().map(|(v, x)| (Var::new(v), BigUint::from(*x))).collect()
}

/// Pointwise absolute value `|s|`.
pub fn abs_state(s: &IntState) -> NatState {
    s.iter().map(|(v, x)| (v.clone(), x.magnitude().clone())).collect()
}

/// Smallest integer not below `q`.
pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// `ceil(|q|)` as a natural number.
pub fn ceil_abs(q: &Rational) -> BigUint {
    ceil(&num_traits::Signed::abs(q)).magnitude().clone()
}

/// The `|p|` operator on polynomials.
pub fn ceil_abs_poly(p: &Polynomial) -> Polynomial {
    p.abs_coeffs()
}

/// The ceiling-absolute-value operator on poly-exponential expressions.
pub fn ceil_abs_polyexp(pe: &PolyExp) -> PolyExp {
    pe.ceil_abs()
}
