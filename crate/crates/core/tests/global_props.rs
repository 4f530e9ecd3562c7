mod common;

use common::{fixture, fixture_names, random_state, Gen, Spectrum};
use itsbound::analysis::{analyze_program, analyze_program_observed, AnalysisConfig};
use itsbound::arith::{abs_state, BoundValue, NatState};
use itsbound::program::{parse_program, Program};
use itsbound::report::check;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_sound(name: &str, p: &Program, seed: u64) {
    let a = analyze_program(p, &AnalysisConfig::default());
    let out = check(p, &a, 100, 10_000, seed);
    assert!(out.violations.is_empty(), "{name}: {:?}\n{}", &out.violations[..1], itsbound::program::pretty_print(p));
}

#[test]
fn fixtures_are_sound() {
    for name in fixture_names() {
        assert_sound(&name, &fixture(&name), 11);
    }
}

#[test]
fn generated_simple_programs_are_sound() {
    for seed in 0..60u64 {
        let mut g = Gen::new(seed);
        let spectrum = [Spectrum::Integer, Spectrum::Prs, Spectrum::UnitPrs][seed as usize % 3];
        let text = g.simple_program(spectrum);
        let p = parse_program(&text).unwrap();
        assert_sound(&format!("simple program {seed}"), &p, seed);
    }
}

#[test]
fn generated_nested_programs_are_sound() {
    for seed in 0..30u64 {
        let text = Gen::new(1000 + seed).nested_program();
        let p = parse_program(&text).unwrap();
        assert_sound(&format!("nested program {seed}"), &p, seed);
    }
}

#[test]
fn unit_simple_programs_have_no_exponential_bounds() {
    for seed in 0..40u64 {
        let text = Gen::new(500 + seed).simple_program(Spectrum::UnitPrs);
        let p = parse_program(&text).unwrap();
        let a = analyze_program(&p, &AnalysisConfig::default());
        for (t, b) in a.rb.iter() {
            assert!(!b.has_exponential(), "program {seed}, RB(t{t}) = {b}\n{text}");
        }
        for ((t, x), b) in a.sb.iter() {
            assert!(!b.has_exponential(), "program {seed}, SB(t{t}, {x}) = {b}\n{text}");
        }
    }
}

fn value_le(a: &BoundValue, b: &BoundValue) -> bool {
    match (a, b) {
        (_, BoundValue::Omega) => true,
        (BoundValue::Omega, _) => false,
        (BoundValue::Finite(x), BoundValue::Finite(y)) => x <= y,
    }
}

fn monotone(p: &Program) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<NatState> = (0..20).map(|_| abs_state(&random_state(&mut rng, p.vars(), 8))).collect();
    let mut last: Option<Vec<BoundValue>> = None;
    let mut observe = |round: usize, sb: &itsbound::analysis::SizeBoundMap, rb: &itsbound::analysis::RuntimeBoundMap| {
        let mut now = Vec::new();
        for s in &samples {
            for t in p.transitions() {
                now.push(rb.get(t.id).eval(s));
                for x in p.vars() {
                    now.push(sb.get(t.id, x).eval(s));
                }
            }
        }
        if let Some(prev) = &last {
            for (i, (a, b)) in now.iter().zip(prev).enumerate() {
                assert!(value_le(a, b), "round {round}, entry {i}: {a:?} after {b:?}");
            }
        }
        last = Some(now);
    };
    analyze_program_observed(p, &AnalysisConfig::default(), &mut observe);
}

#[test]
fn bounds_never_grow_across_rounds() {
    for name in fixture_names() {
        monotone(&fixture(&name));
    }
    for seed in 0..15u64 {
        monotone(&parse_program(&Gen::new(seed).nested_program()).unwrap());
        monotone(&parse_program(&Gen::new(seed).simple_program(Spectrum::Integer)).unwrap());
    }
}
