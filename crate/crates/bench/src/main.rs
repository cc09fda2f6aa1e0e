use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use papr_bench::config::parse_config;
use papr_bench::output::{format_csv, gnuplot_script, write_csv};
use papr_bench::run::{resolve_workers, run_experiment};
use papr_bench::{reproduce, BenchError, Figure, RunResult};

#[derive(Parser)]
#[command(
    name = "papr-bench",
    version,
    about = "Monte-Carlo CCDF benchmarks for OFDM PAPR reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Symbols per curve; overrides the config.
    #[arg(long, global = true)]
    symbols: Option<usize>,
    /// Output file for `run`, output directory for `sweep` and `reproduce`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads. PAPR_BENCH_THREADS takes precedence when set.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration. Without an output path the CSV goes to stdout.
    Run { config: PathBuf },
    /// Run every child of a config's [sweep] section.
    Sweep { config: PathBuf },
    /// Run a built-in campaign.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &Path, cli: &Cli) -> Result<papr_bench::ExperimentConfig, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    cfg.override_with(cli.seed, cli.symbols);
    Ok(cfg)
}

fn report(result: &RunResult, path: Option<&Path>) {
    let s = &result.summary;
    let at = |p| s.at(p).map_or("n/a".to_string(), |v| format!("{v:.2} dB"));
    eprintln!(
        "{:<24} mean {:.2} dB  @1e-2 {}  @1e-3 {}  ({:.2?}){}",
        result.config.label,
        s.mean_papr_db,
        at(1e-2),
        at(1e-3),
        result.wall_time,
        path.map(|p| format!(" -> {}", p.display()))
            .unwrap_or_default()
    );
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    let workers = resolve_workers(cli.workers);
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(config, &cli)?;
            if !cfg.sweep.is_empty() {
                let mut errors = papr_bench::ConfigErrors::default();
                errors.push(
                    "sweep",
                    "this config has a sweep; use the `sweep` subcommand",
                );
                return Err(errors.into());
            }
            let result = run_experiment(&cfg, workers)?;
            match cli.out.as_ref().or(cfg.output.as_ref()) {
                Some(path) => {
                    write_csv(&result, path)?;
                    report(&result, Some(path));
                }
                None => {
                    print!("{}", format_csv(&result));
                    report(&result, None);
                }
            }
        }
        Command::Sweep { config } => {
            let cfg = load(config, &cli)?;
            if cfg.sweep.is_empty() {
                let mut errors = papr_bench::ConfigErrors::default();
                errors.push("sweep", "missing [sweep] section");
                return Err(errors.into());
            }
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut paths = Vec::new();
            for child in cfg.expand() {
                let result = run_experiment(child, workers)?;
                let path = dir.join(format!("{}.csv", child.label));
                write_csv(&result, &path)?;
                report(&result, Some(&path));
                paths.push(path);
            }
            let script = dir.join(format!("{}.gp", cfg.label));
            std::fs::write(&script, gnuplot_script(&cfg.label, &paths, &dir)).map_err(
                |source| BenchError::Io {
                    path: script,
                    source,
                },
            )?;
        }
        Command::Reproduce { figure } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for (path, result) in reproduce(*figure, cli.seed, cli.symbols, workers, &dir)? {
                report(&result, Some(&path));
            }
        }
    }
    Ok(())
}
