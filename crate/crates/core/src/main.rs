use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rover_sim::config::{load_config, Config};
use rover_sim::report::{emit_accel_plot, generate_reports, ReportSummary, Series};
use rover_sim::sweep::{run_cells, run_sweep, SweepResult, RESULTS_FILE};
use rover_sim::trace::StoredTrace;
use rover_sim::{run_checks, SimError, SuspensionMode};

/// Rover suspension simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the `[run]` scenario with the configured suspension.
    Run,
    /// Simulate every cell of the `[sweep]` grid and write the reports.
    Sweep,
    /// Regenerate reports from a stored results.csv.
    Report,
    /// Strut oracle, drop energy drift and resting loads.
    Check,
}

#[derive(Args)]
struct Overrides {
    /// TOML config; defaults apply without one.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suspension for `run`; restricts `sweep` to one mode.
    #[arg(long, global = true)]
    mode: Option<SuspensionMode>,
    /// Gravity, m/s².
    #[arg(long, global = true, allow_negative_numbers = true)]
    gravity: Option<f64>,
    /// Worker threads for `sweep`.
    #[arg(long, global = true, default_value_t = default_jobs())]
    jobs: usize,
    /// Seed for randomized terrain.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Overrides {
    fn resolve(&self) -> Result<Config, SimError> {
        let mut config = match &self.config {
            Some(path) => load_config(path)?,
            None => Config::default(),
        };
        if let Some(dir) = &self.out {
            config.output.dir = dir.clone();
        }
        if let Some(mode) = self.mode {
            config.suspension = mode;
            config.sweep.modes = vec![mode];
        }
        if let Some(g) = self.gravity {
            config.rover.gravity = g;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if self.jobs == 0 {
            return Err(SimError::Validation {
                key: "jobs".into(),
                reason: "must be at least 1".into(),
            });
        }
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which here means failed cells
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitCode, SimError> {
    let config = cli.overrides.resolve()?;
    let out = config.output.dir.clone();
    match cli.command {
        Command::Run => run(&config, &out),
        Command::Sweep => {
            let result = run_sweep(&config, &out, cli.overrides.jobs)?;
            println!(
                "{} cells written to {}",
                result.cells.len(),
                out.join(RESULTS_FILE).display()
            );
            print_report(&generate_reports(&result, &config.report, &out)?);
            Ok(sweep_status(&result))
        }
        Command::Report => {
            let result = SweepResult::read_csv(&out.join(RESULTS_FILE))?;
            print_report(&generate_reports(&result, &config.report, &out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Check => {
            let mut ok = true;
            for check in run_checks(&config.rover)? {
                println!("{check}");
                ok &= check.passed;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn run(config: &Config, out: &Path) -> Result<ExitCode, SimError> {
    let spec = config.run_spec();
    let result = run_cells(config, std::slice::from_ref(&spec), out, 1)?;
    let cell = &result.cells[0];
    println!(
        "{}: {} ({}) at t = {:.2} s",
        spec.key(),
        cell.outcome.verdict.label(),
        cell.outcome.reason,
        cell.outcome.termination_time
    );
    if let Some(s) = &cell.summary {
        println!(
            "F_max {:.1} N, T_max {:.2} N·m, Acc_max {:.3} g, Acc_min {:.3} g, sigma {:.4} g",
            s.f_max, s.t_max, s.acc_max, s.acc_min, s.acc_sigma_mean
        );
    }
    if let Some(rel) = &cell.trace {
        let stored = StoredTrace::read(&out.join(rel))?;
        if let Some(points) = stored.acceleration_series() {
            let series = [Series::new(spec.mode.label(), points)];
            let path = emit_accel_plot(&spec.key(), &series, out, &format!("accel_{}", spec.key()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(sweep_status(&result))
}

fn sweep_status(result: &SweepResult) -> ExitCode {
    let failed: Vec<_> = result.failed_cells().collect();
    for cell in &failed {
        eprintln!("failed cell {}: {}", cell.spec.key(), cell.outcome.reason);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn print_report(summary: &ReportSummary) {
    for path in &summary.written {
        println!("wrote {}", path.display());
    }
    for skipped in &summary.skipped {
        println!("skipped {skipped}");
    }
}
