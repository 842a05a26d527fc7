//! Command-line front end: SNR sweeps of outage probability and average
//! BER for FSO, RF and hybrid FSO/RF links, plus built-in verification
//! suites.
//!
//! Exit codes: 0 success, 1 validation-suite failure, 2 configuration
//! error, 3 numerical failure in at least one sweep row.

mod config;
mod sweep;
mod validate;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Task;

#[derive(Parser)]
#[command(
    name = "hybridlink",
    version,
    about = "Outage and average-BER analysis of FSO, RF and hybrid FSO/RF links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage-probability sweep; writes one CSV row per SNR point.
    Op(SweepArgs),
    /// Average-BER sweep; writes one CSV row per SNR point.
    Ber(SweepArgs),
    /// Run a named verification suite and report each check.
    Validate {
        /// identities | mixtures | oracles | paper-values | all
        #[arg(long)]
        suite: String,
        /// Also write the report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Force-enable the Monte Carlo columns.
    #[arg(long, overrides_with = "no_mc")]
    mc: bool,
    /// Force-disable the Monte Carlo columns.
    #[arg(long = "no-mc", overrides_with = "mc")]
    no_mc: bool,
    /// Override the configured Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write a companion gnuplot script consuming the CSV.
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;
const EXIT_NUMERICAL_FAILURE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Op(args) => run_sweep(Task::Op, args),
        Command::Ber(args) => run_sweep(Task::Ber, args),
        Command::Validate { suite, report } => run_validate(&suite, report.as_deref()),
    };
    ExitCode::from(code)
}

fn run_sweep(task: Task, args: SweepArgs) -> u8 {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", args.config.display());
            return EXIT_CONFIG_ERROR;
        }
    };
    let cfg = match config::parse(&text).and_then(|cfg| {
        config::validate_for_task(&cfg, task)?;
        Ok(cfg)
    }) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };

    let mc_enabled = if args.mc {
        true
    } else if args.no_mc {
        false
    } else {
        cfg.mc.enabled
    };
    let seed = args.seed.unwrap_or(cfg.mc.seed);

    let rows = match sweep::run(task, &cfg, mc_enabled, seed) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    let csv = sweep::to_csv(&rows);
    if let Err(e) = fs::write(&args.out, &csv) {
        eprintln!("config error: cannot write {}: {e}", args.out.display());
        return EXIT_CONFIG_ERROR;
    }
    if let Some(path) = args.plot_script {
        let script = sweep::plot_script(&args.out.display().to_string(), task);
        if let Err(e) = fs::write(&path, script) {
            eprintln!("config error: cannot write {}: {e}", path.display());
            return EXIT_CONFIG_ERROR;
        }
    }
    if sweep::any_failed(&rows) {
        eprintln!(
            "numerical failure in {} of {} rows (see status column)",
            rows.iter().filter(|r| r.status != "ok").count(),
            rows.len()
        );
        return EXIT_NUMERICAL_FAILURE;
    }
    0
}

fn run_validate(suite: &str, report: Option<&std::path::Path>) -> u8 {
    let checks = match validate::suite(suite) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    let lines = validate::report_lines(&checks);
    print!("{lines}");
    if let Some(path) = report {
        if let Err(e) = fs::write(path, &lines) {
            eprintln!("config error: cannot write {}: {e}", path.display());
            return EXIT_CONFIG_ERROR;
        }
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", checks.len());
        return EXIT_VALIDATION_FAILED;
    }
    eprintln!("all {} checks passed", checks.len());
    0
}
