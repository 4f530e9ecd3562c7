//! Periods of rational solvable loops and the loops obtained by chaining.

use itsbound::program::parse_program;
use itsbound::program::loop_of_transition;
use itsbound::transform::{chain, detect_prs, is_twn, PERIOD_CEILING};

fn main() {
    for name in ["loop1", "six_periodic", "unit_prs"] {
        let path = format!("{}/fixtures/{name}.koat", env!("CARGO_MANIFEST_DIR"));
        let p = parse_program(&std::fs::read_to_string(path).unwrap()).unwrap();
        let t = p.transitions().iter().find(|t| t.is_self_loop()).unwrap();
        let (l, _) = loop_of_transition(t).unwrap();
        println!("{name}: {l}");
        match detect_prs(&l, PERIOD_CEILING) {
            Some(k) => {
                let c = chain(&l, k as u32);
                println!("  period {k}");
                println!("  chained: {c}");
                println!("  chained update is twn: {}", is_twn(&c.update));
            }
            None => println!("  not periodic rational"),
        }
    }
}
