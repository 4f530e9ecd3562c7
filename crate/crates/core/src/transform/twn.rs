//! Rational change of basis that turns a solvable update into a twn update.

use std::collections::BTreeMap;

use super::partition::SolvablePartition;
use super::TransformError;
use crate::arith::{Polynomial, Var};
use crate::linalg::{jordan_form, LinalgError, RatMatrix};
use crate::program::{identity_update, Update};

/// A linear automorphism `forward` with inverse `inverse`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub forward: Update,
    pub inverse: Update,
}

impl Automorphism {
    pub fn identity<'a, I: IntoIterator<Item = &'a Var> + Clone>(vars: I) -> Automorphism {
        Automorphism { forward: identity_update(vars.clone()), inverse: identity_update(vars) }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().all(|(v, p)| *p == Polynomial::var(v.clone()))
    }

    /// `forward(x)[v / inverse(v)]` for every variable, which must be `x`.
    pub fn round_trips(&self) -> bool {
        let a = self.forward.iter().all(|(v, p)| p.compose(&self.inverse) == Polynomial::var(v.clone()));
        let b = self.inverse.iter().all(|(v, p)| p.compose(&self.forward) == Polynomial::var(v.clone()));
        a && b
    }

    /// Conjugates an update: `forward(x)[v / eta(v)][v / inverse(v)]`.
    pub fn conjugate(&self, eta: &Update) -> Update {
        self.forward.iter().map(|(v, f)| (v.clone(), f.compose(eta).compose(&self.inverse))).collect()
    }
}

fn linear_map(vars: &[Var], m: &RatMatrix) -> BTreeMap<Var, Polynomial> {
    vars.iter()
        .enumerate()
        .map(|(i, v)| {
            let p = vars
                .iter()
                .enumerate()
                .fold(Polynomial::zero(), |acc, (j, w)| acc + Polynomial::var(w.clone()).scale(&m[(i, j)]));
            (v.clone(), p)
        })
        .collect()
}

/// Builds `forward` from the Jordan bases of all blocks and returns it with
/// the conjugated update, which is twn with integer self-coefficients.
pub fn to_twn(update: &Update, part: &SolvablePartition) -> Result<(Automorphism, Update), TransformError> {
    let mut forward = Update::new();
    let mut inverse = Update::new();
    for b in &part.blocks {
        let jd = jordan_form(&b.matrix).map_err(|e| match e {
            LinalgError::NonIntegerSpectrum => TransformError::NonIntegerSpectrum,
            LinalgError::Singular => unreachable!("Jordan bases are invertible"),
        })?;
        forward.extend(linear_map(&b.vars, &jd.p));
        inverse.extend(linear_map(&b.vars, &jd.pinv));
    }
    let theta = Automorphism { forward, inverse };
    let eta_t = theta.conjugate(update);
    Ok((theta, eta_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{is_twn, partition_blocks};
    use crate::program::parse_polynomial;

    fn upd(pairs: &[(&str, &str)]) -> Update {
        pairs.iter().map(|(v, p)| (Var::new(v), parse_polynomial(p).unwrap())).collect()
    }

    #[test]
    fn diagonal_blocks_keep_the_identity() {
        let u = upd(&[("x1", "-x1"), ("x2", "-x2"), ("x3", "x3-2")]);
        let (theta, eta) = to_twn(&u, &partition_blocks(&u).unwrap()).unwrap();
        assert!(theta.is_identity());
        assert_eq!(eta, u);
    }

    #[test]
    fn jordan_block_conjugation() {
        let u = upd(&[("x1", "x2"), ("x2", "-4*x1+4*x2"), ("x3", "x3+x1")]);
        let (theta, eta) = to_twn(&u, &partition_blocks(&u).unwrap()).unwrap();
        assert!(theta.round_trips());
        assert!(is_twn(&eta));
        // eta_t = forward(x)[v/eta(v)][v/inverse(v)], checked independently
        for (v, p) in &eta {
            let direct = theta.forward[v].compose(&u).compose(&theta.inverse);
            assert_eq!(*p, direct);
        }
        let selfs: Vec<String> = eta
            .iter()
            .filter(|(v, _)| v.name() != "x3")
            .map(|(v, p)| p.coefficients_in(v).get(&1).map(|c| c.to_string()).unwrap_or_default())
            .collect();
        assert_eq!(selfs, ["2", "2"]);
    }

    #[test]
    fn rotation_is_rejected() {
        let u = upd(&[("x1", "3*x1+2*x2"), ("x2", "-5*x1-3*x2")]);
        assert_eq!(to_twn(&u, &partition_blocks(&u).unwrap()).unwrap_err(), TransformError::NonIntegerSpectrum);
    }
}
