//! Random executions compared against the inferred bounds.

use itsbound::analysis::{analyze_program, AnalysisConfig};
use itsbound::program::parse_program;
use itsbound::report::check;

fn main() {
    for name in ["loop1", "nested", "nested_split", "exp_growth", "unit_prs", "nonterm"] {
        let path = format!("{}/fixtures/{name}.koat", env!("CARGO_MANIFEST_DIR"));
        let p = parse_program(&std::fs::read_to_string(path).unwrap()).unwrap();
        let a = analyze_program(&p, &AnalysisConfig::default());
        let out = check(&p, &a, 50, 10_000, 1);
        println!("{name:>12}: {} runs, {:>6} steps, {} violations", out.trials, out.steps, out.violations.len());
    }
}
