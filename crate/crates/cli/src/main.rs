//! `trustmaze` command-line tool.
//!
//! Exit codes: 0 success, 1 replay mismatch, 2 invalid scenario or usage,
//! 3 runtime failure. Set `TRUSTMAZE_LOG` (e.g. `info`, `debug`) for logs.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use trustmaze::event::{from_jsonl, to_jsonl};
use trustmaze::metrics::plot_rows;
use trustmaze::{replay_verify, run, Metrics, ReplayReport, RunResult, Scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "trustmaze", version, about = "Trust-driven allocation of function in a maze team")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario and list every problem found.
    Validate {
        #[arg(long)]
        scenario: String,
    },
    /// Run one seed and write trace.jsonl, metrics.json and plot.csv.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Run seed; defaults to the scenario's own.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a range of seeds and write per-seed traces plus aggregates.
    Batch {
        #[command(flatten)]
        run: RunArgs,
        /// Inclusive seed range, e.g. 1..10.
        #[arg(long, value_parser = parse_seeds)]
        seeds: RangeInclusive<u64>,
    },
    /// Re-run a scenario and compare with a recorded trace.
    Replay {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_ticks: Option<u64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file, or the name of a shipped scenario.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    max_ticks: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Sample trust every N ticks.
    #[arg(long)]
    plot_stride: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: u64 = a.trim().parse().map_err(|e| format!("bad start: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad end: {e}"))?;
    if b < a {
        return Err(format!("empty seed range {a}..{b}"));
    }
    Ok(a..=b)
}

/// Failure classes, mapped onto exit codes.
enum Failure {
    Invalid(ScenarioError),
    Mismatch(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TRUSTMAZE_LOG")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { scenario } => validate(&scenario),
        Command::Simulate { run, seed } => simulate(&run, seed),
        Command::Batch { run, seeds } => batch(&run, seeds),
        Command::Replay {
            scenario,
            trace,
            seed,
            max_ticks,
        } => replay(&scenario, &trace, seed, max_ticks),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn load(spec: &str, seed: Option<u64>, max_ticks: Option<u64>, stride: Option<u64>) -> Result<Scenario, Failure> {
    let mut s = Scenario::load(spec).map_err(Failure::Invalid)?;
    if let Some(seed) = seed {
        s = s.with_seed(seed).map_err(Failure::Invalid)?;
    }
    if let Some(n) = max_ticks {
        s = s.with_max_ticks(n);
    }
    if let Some(n) = stride {
        s = s.with_plot_stride(n);
    }
    Ok(s)
}

fn validate(spec: &str) -> Result<(), Failure> {
    let s = Scenario::load(spec).map_err(Failure::Invalid)?;
    println!(
        "ok: {} ({} agents, {}x{} maze, max {} ticks)",
        s.name,
        s.agents.len(),
        s.maze.width(),
        s.maze.height(),
        s.engine.max_ticks
    );
    Ok(())
}

#[derive(Serialize)]
struct MetricsDoc<'a> {
    scenario: &'a str,
    seed: u64,
    #[serde(flatten)]
    metrics: &'a Metrics,
}

fn write_plot(path: &Path, result: &RunResult) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in plot_rows(&result.trajectories) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn summary(s: &Scenario, m: &Metrics) -> String {
    let outcome = match m.ticks_to_all_escape {
        Some(t) => format!("all {} escaped at tick {t}", m.agents),
        None => format!("timeout after {} ticks, {}/{} escaped", m.ticks, m.escaped, m.agents),
    };
    format!(
        "{} seed {}: {outcome}; tokens {}, gates {}, releases {}, switches {}, violations {}",
        s.name, s.seed, m.tokens_collected, m.gates_entered, m.releases, m.allocation_switches, m.violations
    )
}

fn simulate(args: &RunArgs, seed: Option<u64>) -> Result<(), Failure> {
    let s = load(&args.scenario, seed, args.max_ticks, args.plot_stride)?;
    let result = run(&s).context("simulation failed")?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let trace_path = args.out_dir.join("trace.jsonl");
    fs::write(&trace_path, to_jsonl(&result.trace)).with_context(|| format!("writing {}", trace_path.display()))?;
    let doc = MetricsDoc {
        scenario: &s.name,
        seed: s.seed,
        metrics: &result.metrics,
    };
    let metrics_path = args.out_dir.join("metrics.json");
    let text = serde_json::to_string_pretty(&doc).context("serialising metrics")?;
    fs::write(&metrics_path, text + "\n").with_context(|| format!("writing {}", metrics_path.display()))?;
    write_plot(&args.out_dir.join("plot.csv"), &result)?;
    if !args.quiet {
        println!("{}", summary(&s, &result.metrics));
    }
    Ok(())
}

#[derive(Serialize)]
struct AggregateRow {
    seed: u64,
    ok: bool,
    error: String,
    ticks: u64,
    ticks_to_all_escape: Option<u64>,
    escaped: usize,
    tokens_collected: usize,
    gates_entered: usize,
    releases: usize,
    allocation_switches: usize,
    contracts_completed: usize,
    contracts_failed: usize,
    violations: usize,
}

#[derive(Serialize)]
struct BatchSummary {
    scenario: String,
    seeds: Vec<u64>,
    runs_ok: usize,
    runs_failed: usize,
    all_escaped: usize,
    mean_ticks_to_all_escape: Option<f64>,
}

fn batch(args: &RunArgs, seeds: RangeInclusive<u64>) -> Result<(), Failure> {
    let base = load(&args.scenario, None, args.max_ticks, args.plot_stride)?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let seeds: Vec<u64> = seeds.collect();
    // rayon's collect keeps input order, so rows come out sorted by seed
    let runs: Vec<(u64, anyhow::Result<RunResult>)> = seeds
        .par_iter()
        .map(|&seed| {
            let outcome = base
                .with_seed(seed)
                .map_err(anyhow::Error::from)
                .and_then(|s| run(&s).map_err(anyhow::Error::from));
            (seed, outcome)
        })
        .collect();

    let mut rows = Vec::new();
    for (seed, outcome) in runs {
        let row = match outcome {
            Ok(result) => {
                let path = args.out_dir.join(format!("trace_seed_{seed}.jsonl"));
                fs::write(&path, to_jsonl(&result.trace)).with_context(|| format!("writing {}", path.display()))?;
                let m = &result.metrics;
                AggregateRow {
                    seed,
                    ok: true,
                    error: String::new(),
                    ticks: m.ticks,
                    ticks_to_all_escape: m.ticks_to_all_escape,
                    escaped: m.escaped,
                    tokens_collected: m.tokens_collected,
                    gates_entered: m.gates_entered,
                    releases: m.releases,
                    allocation_switches: m.allocation_switches,
                    contracts_completed: m.contracts_completed,
                    contracts_failed: m.contracts_failed,
                    violations: m.violations,
                }
            }
            Err(e) => {
                log::warn!("seed {seed} failed: {e:#}");
                AggregateRow {
                    seed,
                    ok: false,
                    error: format!("{e:#}"),
                    ticks: 0,
                    ticks_to_all_escape: None,
                    escaped: 0,
                    tokens_collected: 0,
                    gates_entered: 0,
                    releases: 0,
                    allocation_switches: 0,
                    contracts_completed: 0,
                    contracts_failed: 0,
                    violations: 0,
                }
            }
        };
        rows.push(row);
    }

    let path = args.out_dir.join("aggregate.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    for r in &rows {
        w.serialize(r).context("writing aggregate row")?;
    }
    w.flush().context("writing aggregate table")?;

    let escapes: Vec<u64> = rows.iter().filter_map(|r| r.ticks_to_all_escape).collect();
    let summary = BatchSummary {
        scenario: base.name.clone(),
        seeds: rows.iter().map(|r| r.seed).collect(),
        runs_ok: rows.iter().filter(|r| r.ok).count(),
        runs_failed: rows.iter().filter(|r| !r.ok).count(),
        all_escaped: escapes.len(),
        mean_ticks_to_all_escape: (!escapes.is_empty())
            .then(|| escapes.iter().sum::<u64>() as f64 / escapes.len() as f64),
    };
    let path = args.out_dir.join("batch_summary.json");
    let text = serde_json::to_string_pretty(&summary).context("serialising summary")?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    if !args.quiet {
        let mean = summary
            .mean_ticks_to_all_escape
            .map_or("n/a".to_string(), |m| format!("{m:.2}"));
        println!(
            "{}: {} runs, {} failed, {} all escaped, mean ticks to all escape {mean}",
            summary.scenario,
            rows.len(),
            summary.runs_failed,
            summary.all_escaped
        );
    }
    Ok(())
}

fn replay(spec: &str, trace: &Path, seed: Option<u64>, max_ticks: Option<u64>) -> Result<(), Failure> {
    let s = load(spec, seed, max_ticks, None)?;
    let text = fs::read_to_string(trace).with_context(|| format!("reading {}", trace.display()))?;
    let recorded = match from_jsonl(&text) {
        Ok(t) => t,
        Err(e) => return Err(anyhow::anyhow!("parsing {}: {e}", trace.display()).into()),
    };
    match replay_verify(&recorded, &s) {
        ReplayReport::Match => {
            println!("match: {} events", recorded.len());
            Ok(())
        }
        ReplayReport::Divergence { seq, .. } => Err(Failure::Mismatch(format!("divergence at seq {seq}"))),
    }
}
