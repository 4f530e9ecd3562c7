mod common;

use common::{random_state, upd_owned};
use itsbound::arith::{abs_state, rat, Rational, Var};
use itsbound::program::{apply_update, parse_guard, Loop};
use itsbound::ranking::{certify, lp_solve, synthesize, LinearSystem, LpOutcome, RankedTransition};
use num_bigint::BigUint;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Feasibility of `a x <= b` by Fourier-Motzkin elimination.
fn fm_feasible(a: &[Vec<Rational>], b: &[Rational], dim: usize) -> bool {
    let mut rows: Vec<(Vec<Rational>, Rational)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    for k in 0..dim {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.0[k].is_positive() {
                pos.push(r);
            } else if r.0[k].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for (p, pb) in &pos {
            for (n, nb) in &neg {
                let (cp, cn) = (p[k].clone(), -n[k].clone());
                let row: Vec<Rational> = p.iter().zip(n).map(|(x, y)| x * &cn + y * &cp).collect();
                rest.push((row, pb * &cn + nb * &cp));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_negative())
}

fn system() -> impl Strategy<Value = LinearSystem> {
    (1usize..=4).prop_flat_map(|d| {
        prop::collection::vec((prop::collection::vec(-3i64..=3, d), -4i64..=4), 1..=7).prop_map(move |rows| {
            let mut sys = LinearSystem::new(d);
            for (row, rhs) in rows {
                sys.le(row.into_iter().map(rat).collect(), rat(rhs));
            }
            sys
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn simplex_agrees_with_fourier_motzkin(sys in system()) {
        let out = lp_solve(&sys);
        prop_assert_eq!(out.is_feasible(), fm_feasible(&sys.a, &sys.b, sys.dim));
        if let Some(x) = out.point() {
            prop_assert!(sys.satisfied_by(x));
        }
    }

    #[test]
    fn optimal_points_are_not_beaten_by_feasible_grid_points(sys in system(), c in prop::collection::vec(-2i64..=2, 4)) {
        let mut sys = sys;
        let obj: Vec<Rational> = c[..sys.dim].iter().map(|&x| rat(x)).collect();
        sys.objective = Some(obj.clone());
        if let LpOutcome::Optimal { point, value } = lp_solve(&sys) {
            let at = |x: &[Rational]| x.iter().zip(&obj).fold(Rational::zero(), |acc, (a, b)| acc + a * b);
            prop_assert_eq!(at(&point), value.clone());
            let mut grid = vec![Vec::new()];
            for _ in 0..sys.dim {
                grid = grid.into_iter().flat_map(|p: Vec<Rational>| (-3..=3).map(move |v| {
                    let mut q = p.clone();
                    q.push(rat(v));
                    q
                })).collect();
            }
            for g in grid.iter().filter(|g| sys.satisfied_by(g)) {
                prop_assert!(at(g) >= value, "{:?} beats the optimum", g);
            }
        }
    }
}

/// A random affine loop over `x1..xd` with one or two linear guard atoms.
fn linear_loop(rng: &mut ChaCha8Rng) -> Loop {
    let d = rng.gen_range(1..=3);
    let vars: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let affine = |rng: &mut ChaCha8Rng, diag: Option<usize>| {
        let mut terms: Vec<String> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let c = if Some(i) == diag { rng.gen_range(0..=1) } else { rng.gen_range(-1..=1) };
                format!("{c}*{v}")
            })
            .collect();
        terms.push(rng.gen_range(-2..=2).to_string());
        terms.join(" + ")
    };
    let pairs: Vec<(String, String)> = (0..d).map(|i| (vars[i].clone(), affine(rng, Some(i)))).collect();
    let atoms: Vec<String> = (0..rng.gen_range(1..=2)).map(|_| format!("{} > 0", affine(rng, None))).collect();
    Loop::new(parse_guard(&atoms.join(" && ")).unwrap(), upd_owned(&pairs))
}

#[test]
fn synthesized_functions_rank_sampled_transitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut found = 0;
    for _ in 0..400 {
        let l = linear_loop(&mut rng);
        let vars: Vec<Var> = l.vars().cloned().collect();
        let t = RankedTransition { guard: &l.guard, update: &l.update, strict: true, source: 0, target: 0 };
        let Some(f) = synthesize(&[t], &vars) else { continue };
        found += 1;
        let fp = f.to_polynomial();
        for _ in 0..50 {
            let s = random_state(&mut rng, &vars, 10);
            if !l.guard.eval(&s) {
                continue;
            }
            let (now, next) = (fp.eval(&s), fp.eval(&apply_update(&l.update, &s)));
            assert!(!now.is_negative(), "{f} negative at {s:?} for {l}");
            assert!(now - next >= rat(1), "{f} does not decrease at {s:?} for {l}");
        }
        let rb = itsbound::ranking::local_runtime_from_lrf(&f);
        for _ in 0..10 {
            let s0 = random_state(&mut rng, &vars, 10);
            let mut s = s0.clone();
            let mut steps = 0u64;
            while l.guard.eval(&s) {
                s = apply_update(&l.update, &s);
                steps += 1;
                assert!(steps < 10_000, "{l} runs long from {s0:?} despite {f}");
            }
            assert!(rb.eval(&abs_state(&s0)).admits(&BigUint::from(steps)), "{rb} at {s0:?}: {steps} steps, {l}");
        }
        assert!(certify(&f.scale(&rat(3)), &[t], &vars), "{f} scaled by 3 for {l}");
    }
    assert!(found >= 40, "only {found} loops were ranked");
}
