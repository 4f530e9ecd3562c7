//! Whole-program analysis of a fixture, with the source of each runtime bound.

use itsbound::analysis::{analyze_program, AnalysisConfig};
use itsbound::program::parse_program;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "nested".into());
    let path = format!("{}/fixtures/{name}.koat", env!("CARGO_MANIFEST_DIR"));
    let p = parse_program(&std::fs::read_to_string(path).unwrap()).unwrap();
    let a = analyze_program(&p, &AnalysisConfig::default());
    for t in p.transitions() {
        println!("{}: {} -> {}  RB = {}  ({:?})", t.name(), t.source, t.target, a.rb.get(t.id), a.sources.get(&t.id));
        for x in p.vars() {
            println!("    SB({x}) = {}", a.sb.get(t.id, x));
        }
    }
    println!("total {} in {} after {} rounds", a.total_runtime(), a.class(), a.rounds);
    for n in &a.notes {
        println!("note: {n}");
    }
}
