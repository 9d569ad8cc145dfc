use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use saitoh_lab::{report, resolve_jobs, run_config, sweep_scenario, write_reports, CliError, Config};

#[derive(Parser)]
#[command(
    name = "saitoh-lab",
    version,
    about = "Run kernel-inequality scenarios from a TOML config"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario and write report.json, report.csv and timings.csv.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "saitoh-lab-out")]
        out: PathBuf,
        /// Scenarios evaluated in parallel (overridden by SAITOH_LAB_JOBS).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-run one scenario over several truncation degrees and print a CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit the report stored by a previous `run`.
    Report {
        #[arg(long, value_enum)]
        format: Format,
        /// Directory written by `run`.
        #[arg(long, default_value = "saitoh-lab-out")]
        dir: PathBuf,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(body: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { config, out, jobs } => {
            let cfg = Config::load(&config)?;
            let reports = run_config(&cfg, resolve_jobs(jobs)?)?;
            write_reports(&out, &reports)?;
            for r in &reports {
                println!("{:<40} {:<22} {}", r.id, r.status.as_str(), r.detail);
            }
            let passed = reports.iter().filter(|r| r.status == saitoh_lab::Status::Pass).count();
            println!(
                "{passed}/{} scenarios passed; reports in {}",
                reports.len(),
                out.display()
            );
            Ok(saitoh_lab::all_pass(&reports))
        }
        Command::Sweep {
            config,
            scenario,
            degrees,
            out,
        } => {
            let cfg = Config::load(&config)?;
            let sweep = sweep_scenario(&cfg, &scenario, &degrees)?;
            emit(&report::sweep_csv(&sweep.rows), out.as_ref())?;
            match sweep.monotone {
                Some(false) => {
                    eprintln!("kernel values are not nondecreasing in the degree");
                    Ok(false)
                }
                _ => Ok(true),
            }
        }
        Command::Report { format, dir, out } => {
            let path = dir.join("report.json");
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            let rows = report::parse_stored(&text)?;
            let body = match format {
                Format::Json => report::stored_json(&rows),
                Format::Csv => report::stored_csv(&rows),
            };
            emit(&body, out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
