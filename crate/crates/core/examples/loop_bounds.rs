//! Runtime and size bounds for single loops.

use itsbound::loop_bounds::{analyze_loop, LoopConfig};
use itsbound::program::{parse_guard, parse_polynomial, Loop, Update};

fn lp(guard: &str, update: &[(&str, &str)]) -> Loop {
    let u: Update =
        update.iter().map(|(v, e)| (itsbound::arith::Var::new(v), parse_polynomial(e).unwrap())).collect();
    Loop::new(parse_guard(guard).unwrap(), u)
}

fn main() {
    let loops = [
        ("rotation with a counter", lp("x3 > 0", &[("x1", "3*x1+2*x2"), ("x2", "-5*x1-3*x2"), ("x3", "x3-1"), ("x4", "x4+x3^2")])),
        ("doubling", lp("x2 > 0", &[("x1", "2*x1"), ("x2", "x2-1")])),
        ("quadratic descent", lp("x1 > x2^2", &[("x1", "x1-1"), ("x2", "x2")])),
        ("no termination", lp("x > 0", &[("x", "x+1")])),
    ];
    for (name, l) in loops {
        let a = analyze_loop(&l, &LoopConfig::default());
        println!("{name}: {l}");
        match &a.runtime {
            Some(r) => println!("  runtime {r} via {:?}, period {:?}", a.path, a.period),
            None => println!("  no runtime bound"),
        }
        if let Some(sb) = &a.size {
            for (v, b) in sb {
                println!("  SB({v}) = {b}");
            }
        }
        for n in &a.notes {
            println!("  note: {n}");
        }
    }
}
