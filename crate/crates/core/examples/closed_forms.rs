//! Closed forms of a solvable update, checked against plain unrolling.

use itsbound::arith::int_state;
use itsbound::program::{parse_polynomial, Update};
use itsbound::transform::{closed_form, unroll_oracle, DEGREE_CAP};

fn main() {
    let update: Update = [("x3", "x3 - 1"), ("x4", "x4 + x3^2"), ("x5", "2*x5 + x3")]
        .iter()
        .map(|(v, e)| (itsbound::arith::Var::new(v), parse_polynomial(e).unwrap()))
        .collect();
    let (cf, theta) = closed_form(&update, DEGREE_CAP).expect("solvable");
    println!("automorphism is identity: {}", theta.is_identity());
    for (v, pe) in &cf.forms {
        println!("{v}(n) = {pe}");
    }
    let s = int_state(&[("x3", 4), ("x4", -2), ("x5", 1)]);
    for n in [0, 1, 5, 10] {
        let direct = unroll_oracle(&update, &s, n);
        let closed = cf.eval(&s, n);
        println!("n = {n:>2}: unrolled {:?}, closed form {:?}", fmt(&direct), fmt_rat(&closed));
    }
}

fn fmt(s: &itsbound::arith::IntState) -> Vec<String> {
    s.iter().map(|(v, x)| format!("{v}={x}")).collect()
}

fn fmt_rat(s: &std::collections::BTreeMap<itsbound::arith::Var, itsbound::arith::Rational>) -> Vec<String> {
    s.iter().map(|(v, x)| format!("{v}={x}")).collect()
}
