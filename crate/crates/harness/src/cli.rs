use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rstre_core::branching::{component_statistics, max_valid_j};
use rstre_core::experiments::{run_diameter_sweep, run_repeat_sweep, ExperimentConfig, Mode};
use rstre_core::seeds::SeedStream;

use crate::config::{build_config, config_hash, read_config_file, ConfigFields};
use crate::error::{io_error, HarnessError};
use crate::records::{write_records, write_records_to, write_stats, write_stats_to, Format};
use crate::verify::{run_suite, SuiteRegistry, VerifyContext};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "RSTRE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rstre", version, about = "Spanning trees in random environments: sweeps and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample trees and record their diameters.
    SweepDiameter(SweepArgs),
    /// Record first repeat times of size-biased component streams.
    SweepRepeat(SweepArgs),
    /// Tabulate small-component statistics of the heavy graph.
    ComponentStats(SweepArgs),
    /// Run a named verification suite: oracles, lemmas or scaling.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Flat TOML config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, conflicts_with = "n_grid")]
    pub n: Option<usize>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sampler: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: String,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record per-trial wall-clock time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: String,
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    /// Fraction of the full sample sizes, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub budget: f64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command reports back to `main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, HarnessError> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn with_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, HarnessError> + Send,
) -> Result<T, HarnessError> {
    match thread_count(threads)? {
        None => f(),
        Some(0) => Err(HarnessError::Usage("thread count must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| HarnessError::Usage(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

fn sweep_config(args: &SweepArgs, mode: Mode) -> Result<ExperimentConfig, HarnessError> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => ConfigFields::default(),
    };
    let flags = ConfigFields {
        mode: args.mode.clone(),
        n: args.n,
        n_grid: args.n_grid.clone(),
        gamma: args.gamma,
        trials: args.trials,
        seed: args.seed,
        sampler: args.sampler.clone(),
        timing: args.timing.then_some(true),
        ..Default::default()
    };
    build_config(&file.overlay(flags), Some(mode))
}

fn run_sweep(args: &SweepArgs, mode: Mode, stdout: &mut dyn Write) -> Result<Outcome, HarnessError> {
    let format = Format::parse(&args.format)?;
    let cfg = sweep_config(args, mode)?;
    let hash = config_hash(&cfg);
    if mode == Mode::ComponentStats {
        let tables = with_pool(args.threads, || {
            let stream = SeedStream::new(cfg.master_seed);
            cfg.n_grid
                .iter()
                .map(|&n| {
                    let j_max = cfg.j_max.min(max_valid_j(n)).max(1);
                    Ok(component_statistics(n, cfg.trials_per_n, j_max, stream.child("component-stats", n as u64))?)
                })
                .collect::<Result<Vec<_>, HarnessError>>()
        })?;
        match &args.out {
            Some(p) => write_stats(&tables, format, p, &hash)?,
            None => write_stats_to(&tables, format, &mut *stdout).map_err(io_error("<stdout>".as_ref()))?,
        }
        return Ok(Outcome::Success);
    }
    let records = with_pool(args.threads, || {
        Ok(match mode {
            Mode::Diameter => run_diameter_sweep(&cfg)?,
            _ => run_repeat_sweep(&cfg)?,
        })
    })?;
    match &args.out {
        Some(p) => write_records(&records, format, p, &hash)?,
        None => write_records_to(&records, format, &mut *stdout).map_err(io_error("<stdout>".as_ref()))?,
    }
    Ok(Outcome::Success)
}

fn run_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<Outcome, HarnessError> {
    let registry = SuiteRegistry::with_builtin();
    registry.suite(&args.suite)?;
    let ctx = VerifyContext::new(args.seed, args.budget)?;
    let report = with_pool(args.threads, || run_suite(&registry, &args.suite, &ctx))?;
    let text = report.render();
    match &args.out {
        Some(p) => std::fs::write(p, &text).map_err(io_error(p))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(io_error("<stdout>".as_ref()))?,
    }
    Ok(if report.passed() {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome, HarnessError> {
    match &cli.command {
        Command::SweepDiameter(a) => run_sweep(a, Mode::Diameter, stdout),
        Command::SweepRepeat(a) => run_sweep(a, Mode::Repeat, stdout),
        Command::ComponentStats(a) => run_sweep(a, Mode::ComponentStats, stdout),
        Command::Verify(a) => run_verify(a, stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<Outcome, HarnessError>, String) {
        let cli = Cli::try_parse_from(std::iter::once("rstre").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = run(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn negative_gamma_and_grid_parse() {
        let cli = Cli::try_parse_from(["rstre", "sweep-diameter", "--gamma", "-1", "--n-grid", "16,32", "--trials", "2", "--seed", "1"]).unwrap();
        match cli.command {
            Command::SweepDiameter(a) => {
                assert_eq!(a.gamma, Some(-1.0));
                assert_eq!(a.n_grid, Some(vec![16, 32]));
            }
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["rstre", "sweep-diameter", "--n", "4", "--n-grid", "4,8"]).is_err());
    }

    #[test]
    fn sweep_to_stdout() {
        let (r, out) = run_args(&["sweep-repeat", "--gamma", "5", "--n", "200", "--trials", "3", "--seed", "7"]);
        assert_eq!(r.unwrap(), Outcome::Success);
        assert_eq!(out.lines().count(), 4);
        assert!(out.starts_with("n,gamma,trial,seed"));
    }

    #[test]
    fn component_stats_jsonl() {
        let (r, out) = run_args(&["component-stats", "--gamma", "0", "--n", "1000", "--trials", "50", "--seed", "2", "--format", "jsonl"]);
        r.unwrap();
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let (r, _) = run_args(&["sweep-diameter", "--gamma", "5", "--n", "64", "--trials", "1"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["verify", "nonsense"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["sweep-diameter", "--config", "/nonexistent/x.toml"]);
        assert_eq!(r.unwrap_err().exit_code(), 3);
        let (r, _) = run_args(&["sweep-diameter", "--gamma", "5", "--n", "64", "--trials", "1", "--seed", "1", "--format", "xml"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }
}
