//! Fixtures and random generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use itsbound::arith::{IntState, Var};
use num_bigint::BigInt;
use itsbound::program::{parse_guard, parse_polynomial, parse_program, Loop, Program, Update};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(format!("{name}.koat"))).unwrap()
}

pub fn fixture(name: &str) -> Program {
    parse_program(&fixture_text(name)).unwrap()
}

/// Names of all fixtures, sorted.
pub fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "koat").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

pub fn upd(pairs: &[(&str, &str)]) -> Update {
    pairs.iter().map(|(v, p)| (Var::new(v), parse_polynomial(p).unwrap())).collect()
}

pub fn upd_owned(pairs: &[(String, String)]) -> Update {
    pairs.iter().map(|(v, p)| (Var::new(v), parse_polynomial(p).unwrap())).collect()
}

/// Random state over `vars` with values in `[-m, m]`.
pub fn random_state<'a, I: IntoIterator<Item = &'a Var>>(rng: &mut ChaCha8Rng, vars: I, m: i64) -> IntState {
    vars.into_iter().map(|v| (v.clone(), BigInt::from(rng.gen_range(-m..=m)))).collect()
}

/// Eigenvalue structure of generated linear parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spectrum {
    /// Integer eigenvalues in `[-2, 3]`.
    Integer,
    /// Eigenvalues with `lambda^p` rational for a small `p`.
    Prs,
    /// Periodic rational with every `|lambda| <= 1`.
    UnitPrs,
}

const UNIMODULAR: [[[i64; 2]; 2]; 4] = [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[1, 0], [1, 1]], [[2, 1], [1, 1]]];

/// Unit-modulus periodic blocks: periods 2, 2, 3, 3, 2.
const UNIT_PERIODIC: [[[i64; 2]; 2]; 5] =
    [[[0, 1], [-1, 0]], [[3, 2], [-5, -3]], [[0, 1], [-1, 1]], [[0, -1], [1, -1]], [[1, -2], [1, -1]]];

/// Periodic blocks with `|lambda| > 1`: `+-i*sqrt(2)` and `1 +- i`.
const LARGE_PERIODIC: [[[i64; 2]; 2]; 3] = [[[0, 2], [-1, 0]], [[1, 1], [-1, 1]], [[0, -2], [1, 0]]];

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Inverse of a unimodular matrix.
fn unimodular_inverse(q: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    assert!(det == 1 || det == -1);
    [[q[1][1] * det, -q[0][1] * det], [-q[1][0] * det, q[0][0] * det]]
}

pub struct Gen {
    pub rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs.choose(&mut self.rng).unwrap().clone()
    }

    /// Up to two monomials of degree at most `deg` over `vars`, plus a constant.
    pub fn offset(&mut self, vars: &[String], deg: u32) -> String {
        let mut terms = vec![self.rng.gen_range(-2..=2i64).to_string()];
        if !vars.is_empty() {
            for _ in 0..self.rng.gen_range(0..=2) {
                let c = self.pick(&[-2i64, -1, 1, 2]);
                let v = self.pick(vars);
                let term = match self.rng.gen_range(1..=deg.max(1)) {
                    1 => v.to_string(),
                    _ => {
                        let w = self.pick(vars);
                        format!("{v}*{w}")
                    }
                };
                terms.push(format!("{c}*{term}"));
            }
        }
        terms.join(" + ")
    }

    fn block_matrix(&mut self, spectrum: Spectrum) -> [[i64; 2]; 2] {
        let m = match spectrum {
            Spectrum::Integer => {
                let a = self.rng.gen_range(-2..=3);
                let c = self.rng.gen_range(-2..=3);
                [[a, self.rng.gen_range(-1..=1)], [0, c]]
            }
            Spectrum::UnitPrs => {
                if self.rng.gen_bool(0.6) {
                    self.pick(&UNIT_PERIODIC)
                } else {
                    [[self.pick(&[-1, 0, 1]), self.rng.gen_range(-1..=1)], [0, self.pick(&[-1, 0, 1])]]
                }
            }
            Spectrum::Prs => {
                if self.rng.gen_bool(0.5) {
                    self.pick(&LARGE_PERIODIC)
                } else {
                    self.pick(&UNIT_PERIODIC)
                }
            }
        };
        let q = self.pick(&UNIMODULAR);
        mat_mul(mat_mul(q, m), unimodular_inverse(q))
    }

    fn scalar(&mut self, spectrum: Spectrum) -> i64 {
        match spectrum {
            Spectrum::Integer | Spectrum::Prs => self.rng.gen_range(-2..=3),
            Spectrum::UnitPrs => self.pick(&[-1, 0, 1]),
        }
    }

    /// A solvable update over `vars`, lowest block first, whose offsets read
    /// `lower` and earlier blocks with degree at most `deg`. Only the first
    /// quadratic offset is kept so closed forms stay of moderate degree.
    pub fn solvable_update(&mut self, vars: &[String], lower: &[String], spectrum: Spectrum) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut seen: Vec<String> = lower.to_vec();
        let mut quadratic_left = 1;
        let mut i = 0;
        while i < vars.len() {
            let two = i + 1 < vars.len() && self.rng.gen_bool(0.5);
            let deg = if quadratic_left > 0 && self.rng.gen_bool(0.5) { 2 } else { 1 };
            let mut offset = |g: &mut Gen| {
                let o = g.offset(&seen, deg);
                if o.contains('*') && deg == 2 {
                    quadratic_left = 0;
                }
                o
            };
            if two {
                let (a, b) = (&vars[i], &vars[i + 1]);
                let m = self.block_matrix(spectrum);
                let oa = offset(self);
                let ob = offset(self);
                out.push((a.clone(), format!("{}*{a} + {}*{b} + {oa}", m[0][0], m[0][1])));
                out.push((b.clone(), format!("{}*{a} + {}*{b} + {ob}", m[1][0], m[1][1])));
                seen.push(a.clone());
                seen.push(b.clone());
                i += 2;
            } else {
                let a = &vars[i];
                let c = self.scalar(spectrum);
                let o = offset(self);
                out.push((a.clone(), format!("{c}*{a} + {o}")));
                seen.push(a.clone());
                i += 1;
            }
        }
        out
    }

    /// A guarded loop over a counter `c` and `x1..xd` with `d <= 3`. The
    /// counter decreases and the other variables follow a solvable update.
    pub fn counter_loop(&mut self, spectrum: Spectrum) -> Loop {
        let d = self.rng.gen_range(1..=3);
        let vars: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        let k = self.rng.gen_range(1..=2);
        let mut pairs = vec![("c".to_string(), format!("c - {k}"))];
        pairs.extend(self.solvable_update(&vars, &["c".to_string()], spectrum));
        let guard = match self.rng.gen_range(0..3) {
            0 => "c > 0".to_string(),
            1 => format!("c > {}", self.rng.gen_range(-2..=2)),
            _ => "c > 0 && c + x1 > 0".to_string(),
        };
        Loop::new(parse_guard(&guard).unwrap(), upd_owned(&pairs))
    }

    /// A random solvable update over `x1..xd` with `d <= 4`.
    pub fn update(&mut self, spectrum: Spectrum) -> Update {
        let d = self.rng.gen_range(1..=4);
        let vars: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        upd_owned(&self.solvable_update(&vars, &[], spectrum))
    }

    /// Update text for a transition between cycles: identities and a few resets.
    fn connector(&mut self, vars: &[String]) -> Vec<String> {
        vars.iter()
            .map(|v| {
                if self.rng.gen_bool(0.3) {
                    let w = self.pick(vars);
                    match self.rng.gen_range(0..3) {
                        0 => format!("{w} + {}", self.rng.gen_range(0..=3)),
                        1 => format!("2*{w}"),
                        _ => format!("{w} + {v}"),
                    }
                } else {
                    v.clone()
                }
            })
            .collect()
    }

    /// A simple program: a chain of up to three simple cycles, each a
    /// self-loop or a two-transition cycle, joined by unguarded transitions.
    pub fn simple_program(&mut self, spectrum: Spectrum) -> String {
        let vars: Vec<String> = (1..=4).map(|i| format!("x{i}")).collect();
        let args = vars.join(",");
        let mut rules = Vec::new();
        let cycles = self.rng.gen_range(1..=3);
        let mut prev = "l0".to_string();
        for i in 0..cycles {
            let here = format!("c{i}");
            let conn = self.connector(&vars);
            rules.push(format!("{prev}({args}) -> {here}({})", conn.join(",")));
            let mut order = vars.clone();
            order.shuffle(&mut self.rng);
            let counter = order[0].clone();
            let k = self.rng.gen_range(1..=2);
            let rest = self.solvable_update(&order[1..], &order[..1], spectrum);
            let image = |pairs: &[(String, String)], v: &String| {
                pairs.iter().find(|(w, _)| w == v).map(|(_, e)| e.clone()).unwrap_or_else(|| v.clone())
            };
            if self.rng.gen_bool(0.5) {
                let mut all = rest.clone();
                all.push((counter.clone(), format!("{counter} - {k}")));
                let rhs: Vec<String> = vars.iter().map(|v| image(&all, v)).collect();
                rules.push(format!("{here}({args}) -> {here}({}) :|: {counter} > 0", rhs.join(",")));
            } else {
                let mid = format!("m{i}");
                let first: Vec<String> = vars.iter().map(|v| image(&rest, v)).collect();
                let dec = vec![(counter.clone(), format!("{counter} - {k}"))];
                let second: Vec<String> = vars.iter().map(|v| image(&dec, v)).collect();
                rules.push(format!("{here}({args}) -> {mid}({}) :|: {counter} > 0", first.join(",")));
                rules.push(format!("{mid}({args}) -> {here}({})", second.join(",")));
            }
            prev = here;
        }
        rules.push(format!("{prev}({args}) -> end({args})"));
        format!("(VAR {})\n(RULES\n  {}\n)\n", vars.join(" "), rules.join("\n  "))
    }

    /// Two nested loops in the shape of the running program: an inner
    /// self-loop, a second self-loop, and an outer transition that resets
    /// the inner counter from a decreasing outer counter.
    pub fn nested_program(&mut self) -> String {
        let spectrum = if self.rng.gen_bool(0.5) { Spectrum::UnitPrs } else { Spectrum::Integer };
        let inner = self.solvable_update(&["x1".into(), "x2".into()], &["x3".into()], spectrum);
        let k = self.rng.gen_range(1..=2);
        let reset = self.pick(&["x4", "x4 + 1", "2*x4", "x1 + x4"]);
        let drain = self.pick(&["x1 - 1", "x1 - 2"]);
        format!(
            "(VAR x1 x2 x3 x4)\n(RULES\n  l0(x1,x2,x3,x4) -> l1(x1,x2,x3,x4)\n  \
             l1(x1,x2,x3,x4) -> l1({},{},x3 - {k},x4) :|: x3 > 0\n  \
             l1(x1,x2,x3,x4) -> l2(x1,x2,x3,x4)\n  \
             l2(x1,x2,x3,x4) -> l2({drain},x2,x3,x4) :|: x1 > 0\n  \
             l2(x1,x2,x3,x4) -> l1(x1,x2,{reset},x4 - 1) :|: x4 > 0\n)\n",
            inner[0].1, inner[1].1
        )
    }
}
