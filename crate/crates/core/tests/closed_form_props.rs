mod common;

use common::{random_state, Gen, Spectrum};
use itsbound::arith::{IntState, Rational};
use itsbound::program::{apply_update, update_pow, Guard, Loop, Update};
use itsbound::transform::{
    chain, closed_form, detect_prs, is_twn, partition_blocks, to_twn, TransformError, DEGREE_CAP, PERIOD_CEILING,
};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Checks the closed form of the update chained to its period against
/// iterated application for `start <= n <= 25` on 50 states. Returns
/// `false` if the closed form exceeds the degree cap.
fn closed_form_agrees(u: &Update, rng: &mut ChaCha8Rng) -> bool {
    let l = Loop::new(Guard::True, u.clone());
    let p = detect_prs(&l, PERIOD_CEILING).expect("generated loops are periodic rational");
    let chained = update_pow(&l.update, p as u32);
    let cf = match closed_form(&chained, DEGREE_CAP) {
        Ok((cf, _)) => cf,
        Err(TransformError::DegreeBlowup(_)) => return false,
        Err(e) => panic!("{e} for {l}"),
    };
    for _ in 0..50 {
        let s0 = random_state(rng, l.vars(), 10);
        let bound: Vec<_> = cf
            .forms
            .iter()
            .map(|(v, pe)| (v, pe.terms().map(|(alpha, a, b)| (alpha.eval(&s0), a, b.clone())).collect::<Vec<_>>()))
            .collect();
        let mut s: IntState = s0.clone();
        for n in 0..=25u64 {
            if n >= u64::from(cf.start) {
                let nr = Rational::from_integer(n.into());
                for (v, terms) in &bound {
                    let value = terms.iter().fold(Rational::zero(), |acc, (c, a, b)| {
                        acc + c * num_traits::pow(nr.clone(), *a as usize) * num_traits::pow(b.clone(), n as usize)
                    });
                    assert_eq!(value, Rational::from_integer(s[*v].clone()), "{v} at n = {n} for {l}, period {p}");
                }
            }
            s = apply_update(&chained, &s);
        }
    }
    true
}

#[test]
fn closed_forms_match_unrolling() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    let mut capped = 0;
    let mut seed = 0u64;
    while checked < 200 {
        let spectrum = [Spectrum::Integer, Spectrum::Prs, Spectrum::UnitPrs][seed as usize % 3];
        let u = Gen::new(seed).update(spectrum);
        seed += 1;
        if closed_form_agrees(&u, &mut rng) {
            checked += 1;
        } else {
            capped += 1;
        }
    }
    assert!(capped * 10 < checked, "{capped} loops exceeded the degree cap");
}

#[test]
fn chaining_composes_updates_and_guards() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for seed in 0..60u64 {
        let l = Gen::new(seed).counter_loop(Spectrum::Prs);
        for p in 1..=4u32 {
            let c = chain(&l, p);
            assert_eq!(c.update, update_pow(&l.update, p));
            for _ in 0..20 {
                let s0 = random_state(&mut rng, l.vars(), 6);
                let mut s = s0.clone();
                let mut all = true;
                for _ in 0..p {
                    all &= l.guard.eval(&s);
                    s = apply_update(&l.update, &s);
                }
                assert_eq!(c.guard.eval(&s0), all, "{l} chained {p} times");
            }
        }
    }
}

#[test]
fn periods_make_the_chained_update_twn() {
    for seed in 0..200u64 {
        let spectrum = [Spectrum::Integer, Spectrum::Prs, Spectrum::UnitPrs][seed as usize % 3];
        let l = Loop::new(Guard::True, Gen::new(seed).update(spectrum));
        let p = detect_prs(&l, PERIOD_CEILING).unwrap();
        let chained = chain(&l, p as u32);
        let part = partition_blocks(&chained.update).expect("chaining keeps solvability");
        let (theta, eta_t) = to_twn(&chained.update, &part).unwrap_or_else(|e| panic!("{e} for {l}, period {p}"));
        assert!(theta.round_trips(), "{l}");
        assert_eq!(theta.conjugate(&chained.update), eta_t, "{l}");
        assert!(is_twn(&eta_t), "{l}");
    }
}
