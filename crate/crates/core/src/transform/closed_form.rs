//! Poly-exponential closed forms of twn and solvable updates.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::partition::{partition_blocks, twn_order};
use super::twn::{to_twn, Automorphism};
use super::TransformError;
use crate::arith::{sum_power_geom, IntState, PolyExp, Polynomial, Rational, Var};
use crate::program::{apply_update, then, identity_update, Update};

/// Default cap on degrees of intermediate closed-form polynomials.
pub const DEGREE_CAP: u32 = 12;

/// A closed form per variable, valid for all `n >= start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub forms: BTreeMap<Var, PolyExp>,
    pub start: u32,
}

impl ClosedForm {
    pub fn get(&self, v: &Var) -> &PolyExp {
        &self.forms[v]
    }

    pub fn eval(&self, s: &IntState, n: u64) -> BTreeMap<Var, Rational> {
        self.forms.iter().map(|(v, pe)| (v.clone(), pe.eval(s, n))).collect()
    }
}

/// `n`-fold application of an update.
pub fn unroll_oracle(update: &Update, s: &IntState, n: u64) -> IntState {
    let mut s = s.clone();
    for _ in 0..n {
        s = apply_update(update, &s);
    }
    s
}

fn check_cap(pe: &PolyExp, cap: u32) -> Result<(), TransformError> {
    if pe.coefficient_degree() > cap || pe.max_n_degree() > cap {
        Err(TransformError::DegreeBlowup(cap))
    } else {
        Ok(())
    }
}

fn geometric(alpha: Polynomial, base: Rational) -> PolyExp {
    PolyExp::term(alpha, 0, base)
}

/// Closed form of a twn update, built variable by variable from the bottom.
///
/// For `x <- c*x + p` with `c != 0` the form is
/// `c^n x + sum_{i=1}^n c^(n-i) p(i-1)`; for `c = 0` it is `p(n-1)`, which
/// only holds from `n = 1` on. Whenever a lower form starts at `k > 0`, the
/// first `k` summands are replaced by exact unrolled values.
pub fn closed_form_twn(update: &Update, cap: u32) -> Result<ClosedForm, TransformError> {
    let order = twn_order(update).ok_or(TransformError::NotTwn)?;
    let mut forms: BTreeMap<Var, PolyExp> = BTreeMap::new();
    // exact powers of the update, grown on demand for start corrections
    let mut powers: Vec<Update> = vec![identity_update(update.keys())];
    for x in order {
        let parts = update[&x].coefficients_in(&x);
        let c = match parts.get(&1) {
            None => Rational::zero(),
            Some(q) => q.as_constant().ok_or(TransformError::NotTwn)?,
        };
        if parts.keys().any(|&e| e > 1) {
            return Err(TransformError::NotTwn);
        }
        let p = parts.get(&0).cloned().unwrap_or_default();
        let pn = PolyExp::compose_poly(&p, &forms);
        check_cap(&pn, cap)?;
        let n0 = pn.start();
        let cl = if !c.is_zero() {
            let mut acc = geometric(Polynomial::var(x.clone()), c.clone());
            let c_inv = c.recip();
            for (alpha, a, b) in pn.terms() {
                let scaled = alpha.scale(&c_inv);
                if b.is_zero() {
                    // sum_{k<n} c^(n-1-k) alpha 0^k = (alpha/c) (c^n - 0^n)
                    acc = &acc + &geometric(scaled.clone(), c.clone());
                    acc = &acc - &geometric(scaled, Rational::zero());
                    continue;
                }
                // sum_{k=0}^{n-1} k^a (b/c)^k, as S(n-1) plus the k = 0 term
                let mut s = sum_power_geom(a, &(b / &c)).shift(-1);
                if a == 0 {
                    s = &s + &PolyExp::from_poly(Polynomial::one());
                }
                acc = &acc + &(&s.mul_poly(&scaled) * &geometric(Polynomial::one(), c.clone()));
            }
            if n0 > 0 {
                let mut corr = Polynomial::zero();
                let mut c_pow = c_inv.clone();
                for k in 0..n0 as usize {
                    while powers.len() <= k {
                        let next = then(powers.last().unwrap(), update);
                        powers.push(next);
                    }
                    let exact = p.compose(&powers[k]);
                    corr = corr + (exact - pn.at(k as u64)).scale(&c_pow);
                    c_pow *= &c_inv;
                }
                acc = &acc + &geometric(corr, c.clone());
            }
            acc.with_start(n0)
        } else {
            let mut had_zero = false;
            let mut nonzero = PolyExp::zero();
            for (alpha, a, b) in pn.terms() {
                if b.is_zero() {
                    had_zero = true;
                } else {
                    nonzero = &nonzero + &PolyExp::term(alpha.clone(), a, b.clone());
                }
            }
            let start = (n0 + 1).max(if had_zero { 2 } else { 1 });
            nonzero.shift(-1).with_start(start)
        };
        check_cap(&cl, cap)?;
        forms.insert(x, cl);
    }
    let start = forms.values().map(PolyExp::start).max().unwrap_or(0);
    Ok(ClosedForm { forms, start })
}

/// Transfers a closed form of the conjugated update back:
/// `inverse(x)[v / cl_t(v)][v / forward(v)]`.
pub fn closed_form_solvable(theta: &Automorphism, cf_t: &ClosedForm) -> ClosedForm {
    let forms = theta
        .inverse
        .iter()
        .map(|(v, p)| {
            let pe = PolyExp::compose_poly(p, &cf_t.forms).substitute_vars(&theta.forward);
            (v.clone(), pe.with_start(cf_t.start))
        })
        .collect();
    ClosedForm { forms, start: cf_t.start }
}

/// Closed form of a solvable update whose blocks have integer spectra.
pub fn closed_form(update: &Update, cap: u32) -> Result<(ClosedForm, Automorphism), TransformError> {
    let part = partition_blocks(update).ok_or(TransformError::NotSolvable)?;
    let (theta, eta_t) = to_twn(update, &part)?;
    let cf_t = closed_form_twn(&eta_t, cap)?;
    let cf = if theta.is_identity() { cf_t } else { closed_form_solvable(&theta, &cf_t) };
    Ok((cf, theta))
}
