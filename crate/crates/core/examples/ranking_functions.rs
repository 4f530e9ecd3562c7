//! Linear ranking functions for parts of a program.

use std::collections::BTreeSet;

use itsbound::program::parse_program;
use itsbound::ranking::{local_runtime_from_lrf, rank_program};

fn main() {
    let path = format!("{}/fixtures/nested.koat", env!("CARGO_MANIFEST_DIR"));
    let p = parse_program(&std::fs::read_to_string(path).unwrap()).unwrap();
    let cases: [(&[usize], usize); 3] = [(&[4], 4), (&[2, 3, 4], 3), (&[1, 2, 3, 4], 1)];
    for (scope, strict) in cases {
        let strict_set: BTreeSet<usize> = [strict].into();
        match rank_program(&p, scope, &strict_set) {
            Some(f) => println!(
                "scope {scope:?}, t{strict} decreasing: f = {f}, offsets {:?}, bound {}",
                f.offsets.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                local_runtime_from_lrf(&f)
            ),
            None => println!("scope {scope:?}, t{strict} decreasing: none"),
        }
    }
}
