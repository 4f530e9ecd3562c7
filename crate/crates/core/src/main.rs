use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use itsbound::analysis::{analyze_program, AnalysisConfig};
use itsbound::loop_bounds::LoopConfig;
use itsbound::program::parse_program;
use itsbound::report::{batch_summary, check, render_batch, render_text, report};

/// Size and runtime bounds for integer programs.
#[derive(Parser)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    analyze: AnalyzeArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one program (the default).
    Analyze(AnalyzeArgs),
    /// Analyze every .koat file of a directory and print counts per class.
    Batch(BatchArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    file: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Check the bounds against N random runs.
    #[arg(long, value_name = "N")]
    check: Option<usize>,
    /// Largest period tried when chaining loops.
    #[arg(long, value_name = "K", default_value_t = itsbound::transform::PERIOD_CEILING)]
    max_period: u64,
    /// Step limit per run in check mode.
    #[arg(long, value_name = "M", default_value_t = 10_000)]
    max_steps: usize,
    /// Seed for check mode.
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    #[arg(long)]
    json: bool,
    /// Seconds per file.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long, value_name = "K", default_value_t = itsbound::transform::PERIOD_CEILING)]
    max_period: u64,
}

fn config(max_period: u64) -> AnalysisConfig {
    AnalysisConfig { loops: LoopConfig { max_period, ..LoopConfig::default() }, ..AnalysisConfig::default() }
}

fn analyze(args: AnalyzeArgs) -> ExitCode {
    let Some(file) = args.file else {
        eprintln!("error: no input file");
        return ExitCode::from(1);
    };
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return ExitCode::from(1);
        }
    };
    let p = match parse_program(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return ExitCode::from(1);
        }
    };
    let start = Instant::now();
    let a = analyze_program(&p, &config(args.max_period));
    let r = report(&p, &a, start.elapsed());
    if args.json {
        println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
    } else {
        print!("{}", render_text(&p, &r));
    }
    if let Some(n) = args.check {
        let out = check(&p, &a, n, args.max_steps, args.seed);
        for v in &out.violations {
            eprintln!("violation in trial {}: {}", v.trial, v.message);
        }
        if !args.json {
            println!("check: {} runs, {} steps, {} violations", out.trials, out.steps, out.violations.len());
        }
        if !out.violations.is_empty() {
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}

fn batch(args: BatchArgs) -> ExitCode {
    match batch_summary(&args.dir, &config(args.max_period), Duration::from_secs(args.timeout)) {
        Ok(s) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&s).expect("summary serializes"));
            } else {
                print!("{}", render_batch(&s));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", args.dir.display());
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = move || match cli.command {
        Some(Command::Analyze(a)) => analyze(a),
        Some(Command::Batch(b)) => batch(b),
        None => analyze(cli.analyze),
    };
    std::panic::catch_unwind(run).unwrap_or(ExitCode::from(2))
}
