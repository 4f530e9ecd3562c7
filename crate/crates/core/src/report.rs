//! Reports, the soundness harness and batch summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{analyze_program, AnalysisConfig, BoundSource, ProgramAnalysis};
use crate::arith::{abs_state, AsymptoticClass, BoundValue, IntState};
use crate::program::{parse_program, Executor, Program, SeededScheduler};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionReport {
    pub id: usize,
    pub rb: String,
    pub sb: BTreeMap<String, String>,
    pub source: Option<BoundSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub transitions: Vec<TransitionReport>,
    pub total_rb: String,
    pub class: String,
    pub notes: Vec<String>,
    pub time_ms: u64,
}

pub fn report(p: &Program, a: &ProgramAnalysis, elapsed: Duration) -> AnalysisReport {
    let transitions = p
        .transitions()
        .iter()
        .map(|t| TransitionReport {
            id: t.id,
            rb: a.rb.get(t.id).to_string(),
            sb: p.vars().iter().map(|x| (x.to_string(), a.sb.get(t.id, x).to_string())).collect(),
            source: a.sources.get(&t.id).copied(),
        })
        .collect();
    AnalysisReport {
        transitions,
        total_rb: a.total_runtime().to_string(),
        class: a.class().to_string(),
        notes: a.notes.clone(),
        time_ms: elapsed.as_millis() as u64,
    }
}

/// Human-readable report.
pub fn render_text(p: &Program, r: &AnalysisReport) -> String {
    let mut out = String::new();
    for (t, tr) in p.transitions().iter().zip(&r.transitions) {
        let _ = writeln!(out, "{}: {} -> {}", t.name(), t.source, t.target);
        let _ = writeln!(out, "  RB = {}", tr.rb);
        for (x, b) in &tr.sb {
            let _ = writeln!(out, "  SB({x}) = {b}");
        }
    }
    let finite = r.class != AsymptoticClass::Infinite.to_string();
    let _ = writeln!(out, "total runtime bound: {}", r.total_rb);
    let _ = writeln!(out, "class: {}", r.class);
    let _ = writeln!(out, "< ω: {}", if finite { "yes" } else { "no" });
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "time: {} ms", r.time_ms);
    out
}

/// A run that exceeded a bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub start: BTreeMap<String, String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub trials: usize,
    pub steps: usize,
    pub violations: Vec<Violation>,
}

/// Runs `trials` random executions from states with values in `[-8, 8]`
/// and checks every firing count and every size after a firing against
/// the bounds.
pub fn check(p: &Program, a: &ProgramAnalysis, trials: usize, max_steps: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exec = Executor::new(p);
    let mut out = CheckOutcome { trials, ..Default::default() };
    for trial in 0..trials {
        let s0: IntState = p.vars().iter().map(|v| (v.clone(), BigInt::from(rng.gen_range(-8i64..=8)))).collect();
        let abs0 = abs_state(&s0);
        let mut sched = SeededScheduler::new(rng.gen());
        let trace = exec.run(&s0, max_steps, &mut sched);
        out.steps += trace.len();
        let mut fail = |message: String| {
            out.violations.push(Violation {
                trial,
                start: s0.iter().map(|(v, x)| (v.to_string(), x.to_string())).collect(),
                message,
            });
        };
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        let mut sizes: BTreeMap<(usize, usize), BoundValue> = BTreeMap::new();
        for (t, c) in &trace.steps {
            *counts.entry(*t).or_default() += 1;
            for (i, x) in p.vars().iter().enumerate() {
                let bound = sizes.entry((*t, i)).or_insert_with(|| a.sb.get(*t, x).eval(&abs0));
                let v = c.state[x].magnitude();
                if !bound.admits(v) {
                    fail(format!("|{x}| = {v} after t{t} exceeds SB = {}", a.sb.get(*t, x)));
                }
            }
        }
        for (t, n) in counts {
            let bound = a.rb.get(t);
            if !bound.eval(&abs0).admits(&n.into()) {
                fail(format!("t{t} fired {n} times, RB = {bound}"));
            }
        }
    }
    out
}

/// Outcome of analyzing one file in batch mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BatchResult {
    Class(String),
    Timeout,
    ParseError(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchEntry {
    pub file: PathBuf,
    pub result: BatchResult,
    pub time_ms: u64,
}

/// Counts per class, in the order O(1), O(n), O(n^2), O(n^>2), EXP, plus
/// the number of finite bounds, timeouts and unparsable files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchSummary {
    pub entries: Vec<BatchEntry>,
    pub counts: BTreeMap<String, usize>,
    pub finite: usize,
    pub timeouts: usize,
    pub failures: usize,
    /// Average time over all analyzed files.
    pub avg_ms: f64,
    /// Average time over files with a finite bound.
    pub avg_finite_ms: f64,
}

fn analyze_with_timeout(p: Program, cfg: AnalysisConfig, timeout: Duration) -> Option<AsymptoticClass> {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(analyze_program(&p, &cfg).class());
    });
    rx.recv_timeout(timeout).ok()
}

/// Analyzes every `.koat` file of a directory.
pub fn batch_summary(dir: &Path, cfg: &AnalysisConfig, timeout: Duration) -> std::io::Result<BatchSummary> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "koat"))
        .collect();
    files.sort();
    let mut entries = Vec::new();
    for file in files {
        let text = std::fs::read_to_string(&file)?;
        let start = Instant::now();
        let result = match parse_program(&text) {
            Err(e) => {
                log::warn!("skipping {}: {e}", file.display());
                BatchResult::ParseError(e.to_string())
            }
            Ok(p) => match analyze_with_timeout(p, *cfg, timeout) {
                Some(c) => BatchResult::Class(c.to_string()),
                None => BatchResult::Timeout,
            },
        };
        entries.push(BatchEntry { file, result, time_ms: start.elapsed().as_millis() as u64 });
    }
    let mut counts: BTreeMap<String, usize> = AsymptoticClass::all()
        .iter()
        .filter(|c| c.is_finite())
        .map(|c| (c.to_string(), 0))
        .collect();
    let (mut finite, mut timeouts, mut failures) = (0, 0, 0);
    let (mut total_ms, mut analyzed, mut finite_ms) = (0u64, 0usize, 0u64);
    let infinite = AsymptoticClass::Infinite.to_string();
    for e in &entries {
        match &e.result {
            BatchResult::Class(c) => {
                analyzed += 1;
                total_ms += e.time_ms;
                if *c != infinite {
                    *counts.entry(c.clone()).or_default() += 1;
                    finite += 1;
                    finite_ms += e.time_ms;
                }
            }
            BatchResult::Timeout => timeouts += 1,
            BatchResult::ParseError(_) => failures += 1,
        }
    }
    let avg = |sum: u64, n: usize| if n == 0 { 0.0 } else { sum as f64 / n as f64 };
    Ok(BatchSummary {
        entries,
        counts,
        finite,
        timeouts,
        failures,
        avg_ms: avg(total_ms, analyzed),
        avg_finite_ms: avg(finite_ms, finite),
    })
}

/// The summary as a table with one column per class.
pub fn render_batch(s: &BatchSummary) -> String {
    let order: Vec<String> =
        AsymptoticClass::all().iter().filter(|c| c.is_finite()).map(|c| c.to_string()).collect();
    let mut header = order.clone();
    header.extend(["< ω", "timeout", "failed", "AVG", "AVG+"].map(String::from));
    let mut row: Vec<String> = order.iter().map(|c| s.counts.get(c).copied().unwrap_or(0).to_string()).collect();
    row.extend([
        s.finite.to_string(),
        s.timeouts.to_string(),
        s.failures.to_string(),
        format!("{:.1}", s.avg_ms / 1000.0),
        format!("{:.1}", s.avg_finite_ms / 1000.0),
    ]);
    let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.chars().count().max(r.len())).collect();
    let line = |cells: &[String]| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join(" | ")
    };
    format!("{}\n{}\n", line(&header), line(&row))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> Program {
        let text = std::fs::read_to_string(format!("{}/fixtures/{name}.koat", env!("CARGO_MANIFEST_DIR"))).unwrap();
        parse_program(&text).unwrap()
    }

    #[test]
    fn loop1_report() {
        let p = fixture("loop1");
        let a = analyze_program(&p, &AnalysisConfig::default());
        let r = report(&p, &a, Duration::from_millis(3));
        assert_eq!(r.transitions[1].rb, "2*x3+1");
        assert_eq!(r.transitions[1].sb["x1"], "4*x1+2*x2");
        assert_eq!(r.class, "O(n)");
        let text = render_text(&p, &r);
        assert!(text.contains("class: O(n)") && text.contains("< ω: yes"));
    }

    #[test]
    fn check_finds_no_violations_on_the_running_program() {
        let p = fixture("nested");
        let a = analyze_program(&p, &AnalysisConfig::default());
        let out = check(&p, &a, 20, 10_000, 7);
        assert!(out.violations.is_empty(), "{:?}", out.violations);
        assert!(out.steps > 20);
    }

    #[test]
    fn check_reports_wrong_bounds() {
        let p = fixture("loop1");
        let mut a = analyze_program(&p, &AnalysisConfig::default());
        a.rb.set(1, crate::arith::BoundExpr::one());
        let out = check(&p, &a, 30, 1000, 1);
        assert!(out.violations.iter().any(|v| v.message.starts_with("t1 fired")));
    }

    #[test]
    fn empty_batch() {
        let dir = tempfile::tempdir().unwrap();
        let s = batch_summary(dir.path(), &AnalysisConfig::default(), Duration::from_secs(5)).unwrap();
        assert!(s.entries.is_empty());
        assert_eq!(s.finite, 0);
        assert!(render_batch(&s).contains("< ω"));
    }
}
