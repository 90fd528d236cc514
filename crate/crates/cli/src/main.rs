//! `secgame`: solve, verify, benchmark and query security-game instances.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use secgame::colgen::ColGenConfig;
use secgame::equilibria::{
    solve_minimax_with, solve_sse_with, EquilibriumKind, EquilibriumResult, Extremum, NashContext,
};
use secgame::instance::{parse_instance, Instance};
use secgame::report::ResultFile;
use secgame::verify::verify_instance;
use secgame::{Error, SecurityGame};

#[derive(Parser)]
#[command(name = "secgame", version, about = "Security-game equilibria through a defender best-response oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance for an equilibrium and write a result file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        equilibrium: Kind,
        /// Defender utility required by `ne-target`.
        #[arg(long, required_if_eq("equilibrium", "ne-target"))]
        target_utility: Option<f64>,
        /// Reduced-cost tolerance for column and cut generation.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Result file path, or `-` for standard output.
        #[arg(long, default_value = "-")]
        output: String,
        /// Omit the wall-clock time so output is reproducible.
        #[arg(long)]
        no_timestamp: bool,
        /// Write the per-iteration trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Cross-check the oracle-driven solvers against brute force.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Solve every instance of a directory for every applicable equilibrium.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Query the defender best-response oracle.
    Dbr {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated weights, one per target.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Minimax,
    Sse,
    NeAny,
    NeBest,
    NeWorst,
    NeTarget,
}

impl From<Kind> for EquilibriumKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Minimax => EquilibriumKind::Minimax,
            Kind::Sse => EquilibriumKind::Sse,
            Kind::NeAny => EquilibriumKind::NeAny,
            Kind::NeBest => EquilibriumKind::NeBest,
            Kind::NeWorst => EquilibriumKind::NeWorst,
            Kind::NeTarget => EquilibriumKind::NeTarget,
        }
    }
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_numerical() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    parse_instance(path).map_err(|e| match e {
        Error::Io(io) => io_failure(path, io),
        other => Failure::from(other).with_context(path),
    })
}

impl Failure {
    fn with_context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn solve(
    game: &SecurityGame,
    kind: EquilibriumKind,
    target_utility: Option<f64>,
    config: &ColGenConfig,
) -> secgame::Result<EquilibriumResult> {
    match kind {
        EquilibriumKind::Minimax => solve_minimax_with(game, config),
        EquilibriumKind::Sse => solve_sse_with(game, config),
        EquilibriumKind::NeAny => NashContext::with_config(game, config)?.any(),
        EquilibriumKind::NeBest => NashContext::with_config(game, config)?.extremal(Extremum::Best),
        EquilibriumKind::NeWorst => NashContext::with_config(game, config)?.extremal(Extremum::Worst),
        EquilibriumKind::NeTarget => {
            let u = target_utility.ok_or_else(|| Error::Invalid("ne-target needs --target-utility".into()))?;
            NashContext::with_config(game, config)?.with_utility(u)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    input: &Path,
    kind: EquilibriumKind,
    target_utility: Option<f64>,
    tolerance: Option<f64>,
    output: &str,
    no_timestamp: bool,
    trace: Option<&Path>,
) -> Result<(), Failure> {
    let instance = load(input)?;
    let config = match tolerance {
        Some(t) => ColGenConfig::with_tolerance(t)?,
        None => ColGenConfig::default(),
    };
    let start = Instant::now();
    let result = solve(&instance.game, kind, target_utility, &config)?;
    let elapsed = (!no_timestamp).then(|| start.elapsed());
    let file = ResultFile::from_result(&result, instance.name(), elapsed);
    if let Some(path) = trace {
        fs::write(path, result.trace.to_lines()).map_err(|e| io_failure(path, e))?;
    }
    let text = file.to_json();
    if output == "-" {
        std::io::stdout().write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("<stdout>"), e))?;
    } else {
        fs::write(output, text).map_err(|e| io_failure(Path::new(output), e))?;
    }
    Ok(())
}

fn cmd_verify(input: &Path, samples: usize) -> Result<(), Failure> {
    let instance = match parse_instance(input) {
        Ok(i) => i,
        Err(e) => {
            println!("FAIL load instance - {e}");
            return Err(Failure { code: 1, message: format!("{}: instance failed to load", input.display()) });
        }
    };
    let seed = instance.file.seed.unwrap_or(0);
    let report = verify_instance(&instance.game, samples.max(1), seed);
    for outcome in &report.outcomes {
        println!("{outcome}");
    }
    let failed: Vec<&str> = report.outcomes.iter().filter(|o| !o.passed()).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("failed checks: {}", failed.join("; ")) })
    }
}

struct BenchRow {
    instance: String,
    kind: EquilibriumKind,
    outcome: Result<(f64, usize), String>,
    times: Vec<Duration>,
}

fn bench_instance(path: &Path, repeat: usize) -> Vec<BenchRow> {
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let instance = match parse_instance(path) {
        Ok(i) => i,
        Err(e) => {
            return vec![BenchRow {
                instance: label,
                kind: EquilibriumKind::Sse,
                outcome: Err(e.to_string()),
                times: vec![],
            }]
        }
    };
    let game = &instance.game;
    let kinds = [
        EquilibriumKind::Minimax,
        EquilibriumKind::Sse,
        EquilibriumKind::NeAny,
        EquilibriumKind::NeBest,
        EquilibriumKind::NeWorst,
    ];
    let mut rows = Vec::new();
    for kind in kinds {
        if kind == EquilibriumKind::Minimax && !game.is_zero_sum() {
            continue;
        }
        let mut times = Vec::new();
        let mut outcome: Option<Result<(f64, usize), String>> = None;
        for _ in 0..repeat {
            let start = Instant::now();
            let run = solve(game, kind, None, &ColGenConfig::default())
                .map(|r| (r.defender_utility, r.diagnostics.columns_generated))
                .map_err(|e| e.to_string());
            times.push(start.elapsed());
            outcome = Some(match (outcome, run) {
                (None, run) => run,
                (Some(Ok(first)), Ok(again)) if first == again => Ok(first),
                (Some(Ok(first)), Ok(again)) => Err(format!("repeats disagree: {} then {}", first.0, again.0)),
                (Some(Err(e)), _) | (_, Err(e)) => Err(e),
            });
        }
        rows.push(BenchRow { instance: label.clone(), kind, outcome: outcome.expect("repeat >= 1"), times });
    }
    rows
}

fn cmd_bench(suite: &Path, repeat: usize) -> Result<(), Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(suite)
        .map_err(|e| io_failure(suite, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure { code: 2, message: format!("{}: no instance files", suite.display()) });
    }
    let repeat = repeat.max(1);
    let rows: Vec<BenchRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = paths.iter().map(|p| scope.spawn(move || bench_instance(p, repeat))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    });
    println!("{:<24} {:<9} {:>16} {:>8} {:>12}", "instance", "kind", "value", "columns", "time_ms");
    for row in &rows {
        let ms = row.times.iter().map(Duration::as_secs_f64).sum::<f64>() * 1e3 / row.times.len().max(1) as f64;
        match &row.outcome {
            Ok((value, columns)) => {
                println!("{:<24} {:<9} {:>16.10} {:>8} {:>12.3}", row.instance, row.kind.name(), value, columns, ms)
            }
            Err(e) => println!("{:<24} {:<9} error: {e}", row.instance, row.kind.name()),
        }
    }
    Ok(())
}

fn parse_weights(csv: &str) -> Result<Vec<f64>, Failure> {
    csv.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure { code: 2, message: format!("bad weight '{}'", s.trim()) })
        })
        .collect()
}

fn cmd_dbr(input: &Path, weights: &str) -> Result<(), Failure> {
    let instance = load(input)?;
    let w = parse_weights(weights)?;
    let answer = instance.game.oracle().best_response(&w)?;
    println!("bits {}", answer.strategy.bit_string());
    println!("value {}", answer.value);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve { input, equilibrium, target_utility, tolerance, output, no_timestamp, trace } => cmd_solve(
            input,
            (*equilibrium).into(),
            *target_utility,
            *tolerance,
            output,
            *no_timestamp,
            trace.as_deref(),
        ),
        Command::Verify { input, samples } => cmd_verify(input, *samples),
        Command::Bench { suite, repeat } => cmd_bench(suite, *repeat),
        Command::Dbr { input, weights } => cmd_dbr(input, weights),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
