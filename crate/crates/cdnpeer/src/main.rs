use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cdnpeer::commands::{self, Overrides};
use cdnpeer::{output, CliError};

/// Peering CDN simulator with economy-based replica placement.
#[derive(Parser)]
#[command(name = "cdnpeer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Disable auctions (baseline run).
    #[arg(long)]
    no_auction: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and list every violation.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Run one simulation and write metrics and the event log.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run once per value of a numeric scenario field.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        /// Dot path into the scenario, e.g. `econ.alpha`.
        #[arg(long)]
        param: String,
        /// Comma separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Score the three revenue predictors against realized demand.
    ComparePredictors {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
}

fn overrides(c: &Common) -> Overrides {
    Overrides { seed: c.seed, no_auction: c.no_auction }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let mut out = String::new();
    match cli.command {
        Command::Validate { common } => {
            commands::validate(&common.scenario)?;
            let _ = writeln!(out, "ok: {}", common.scenario.display());
        }
        Command::Run { common, out: dir } => {
            let result = commands::run(&common.scenario, &dir, overrides(&common))?;
            out.push_str(&output::summary(&result.header, &result.metrics));
            let _ = writeln!(out, "wrote           {}", dir.display());
        }
        Command::Sweep { common, out: dir, param, values } => {
            let values = commands::parse_values(&values)?;
            let rows = commands::sweep(&common.scenario, &param, &values, &dir, overrides(&common))?;
            let _ = writeln!(out, "{:>12}  {:>18}  {:>14}  {:>8}", param, "sla_violation_rate", "total_payments", "replicas");
            for (v, m) in rows {
                let _ = writeln!(out, "{v:>12}  {:>18.6}  {:>14}  {:>8}", m.sla_violation_rate, m.total_payments, m.replicas_placed);
            }
            let _ = writeln!(out, "wrote {}", dir.join("sweep.csv").display());
        }
        Command::ComparePredictors { common, out: dir } => {
            let report = commands::compare(&common.scenario, &dir, overrides(&common))?;
            let _ = writeln!(out, "auctions scored  {}", report.rows.len());
            let _ = writeln!(out, "mae empirical    {:.6}", report.mae_empirical);
            let _ = writeln!(out, "mae binomial     {:.6}", report.mae_binomial);
            let _ = writeln!(out, "mae zipf         {:.6}", report.mae_zipf);
            let _ = writeln!(out, "wrote {}", dir.join("predictors.csv").display());
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(report) => {
            // A closed pipe (`| head`) is not an error worth reporting.
            let _ = std::io::stdout().write_all(report.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Invalid(problems) = &e {
                for p in problems {
                    eprintln!("  violation {p}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
