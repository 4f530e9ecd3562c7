mod common;

use common::{fixture, fixture_names, random_state, Gen, Spectrum};
use itsbound::arith::IntState;
use itsbound::program::{
    apply_update, eval_step, loop_of_transition, parse_program, pretty_print, run, Config, Program, SeededScheduler,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn programs() -> Vec<(String, Program)> {
    let mut out: Vec<(String, Program)> = fixture_names().into_iter().map(|n| (n.clone(), fixture(&n))).collect();
    for seed in 0..30u64 {
        let spectrum = [Spectrum::Integer, Spectrum::Prs, Spectrum::UnitPrs][seed as usize % 3];
        out.push((format!("simple {seed}"), parse_program(&Gen::new(seed).simple_program(spectrum)).unwrap()));
        out.push((format!("nested {seed}"), parse_program(&Gen::new(seed).nested_program()).unwrap()));
    }
    out
}

#[test]
fn traces_replay_step_by_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, p) in programs() {
        for trial in 0..20 {
            let s0 = random_state(&mut rng, p.vars(), 8);
            let trace = run(&p, &s0, 2_000, &mut SeededScheduler::new(trial));
            let mut cur = Config { location: p.initial().clone(), state: s0.clone() };
            for (t, next) in &trace.steps {
                let stepped = eval_step(&cur, p.transition(*t));
                assert_eq!(stepped.as_ref(), Some(next), "{name}: t{t} from {cur:?}");
                cur = next.clone();
            }
        }
    }
}

#[test]
fn pretty_printing_round_trips() {
    for (name, p) in programs() {
        let text = pretty_print(&p);
        let q = parse_program(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(q, p, "{name}");
    }
}

fn restrict<'a, I: IntoIterator<Item = &'a itsbound::arith::Var>>(s: &IntState, vars: I) -> IntState {
    vars.into_iter().map(|v| (v.clone(), s[v].clone())).collect()
}

#[test]
fn loops_of_self_loops_commute_with_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, p) in programs() {
        for t in p.transitions().iter().filter(|t| t.is_self_loop()) {
            let (l, ren) = loop_of_transition(t).unwrap();
            for v in l.update.values().flat_map(|e| e.vars()) {
                assert!(l.update.contains_key(&v), "{name}: {v} read but not a loop variable");
            }
            for v in l.vars() {
                assert_eq!(ren.apply(&l.update[v]), t.update[v], "{name}, {}", t.name());
            }
            for _ in 0..20 {
                let s = random_state(&mut rng, p.vars(), 10);
                let via_loop = apply_update(&l.update, &restrict(&s, l.vars()));
                let via_program = restrict(&apply_update(&t.update, &s), l.vars());
                assert_eq!(via_loop, via_program, "{name}, {}", t.name());
                assert_eq!(l.guard.eval(&restrict(&s, l.vars())), t.guard.eval(&s));
            }
        }
    }
}

#[test]
fn malformed_programs_are_rejected_with_positions() {
    let bad = [
        "(VAR x)\n(RULES\n  l0(x) -> l1(x +)\n)",
        "(VAR x)\n(RULES\n  l0(x) -> l1(y)\n)",
        "(VAR x)\n(RULES\n  l0(x) -> l1(x) :|: x >\n)",
        "(VAR x)\n(RULES\n  l0(x) -> l1(x/2)\n)",
        "(VAR x)\n(RULES\n  l0(x) -> l0(x)\n)",
        "(RULES",
    ];
    for text in bad {
        let e = parse_program(text).unwrap_err();
        assert!(!e.to_string().is_empty(), "{text}");
    }
}
