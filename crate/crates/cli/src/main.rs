use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use divrisk_cli::{run, Command, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Risk,
    Dual,
    Norm,
    Dualnorm,
    Avar,
    Portfolio,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

/// Divergence risk measures on empirical loss distributions.
///
/// Samples are read from a CSV file with one value per line and an optional
/// weight column. The portfolio command reads a panel whose header names the
/// assets, with an optional probability column `p`.
#[derive(Debug, Parser)]
#[command(name = "divrisk", version)]
struct Args {
    #[arg(long, value_enum)]
    command: CommandArg,
    /// kl, chi2 or power:<p>.
    #[arg(long, default_value = "kl")]
    divergence: String,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Confidence level for avar.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    output: FormatArg,
    /// Search tolerance override.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DIVRISK_LOG", "warn")).init();
    // Usage errors are validation errors (exit 1); exit 2 is kept for malformed input files.
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = RunConfig {
        command: match args.command {
            CommandArg::Risk => Command::Risk,
            CommandArg::Dual => Command::Dual,
            CommandArg::Norm => Command::Norm,
            CommandArg::Dualnorm => Command::Dualnorm,
            CommandArg::Avar => Command::Avar,
            CommandArg::Portfolio => Command::Portfolio,
        },
        divergence: args.divergence,
        beta: args.beta,
        alpha: args.alpha,
        input: args.input,
        output: match args.output {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Text => OutputFormat::Text,
        },
        tol: args.tol,
    };
    match run(&cfg) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if writeln!(out, "{}", report.render(cfg.output)).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("divrisk: {e}");
            if let Some(trace) = e.trace() {
                for (arg, value) in trace {
                    eprintln!("  probe {arg:.6e} -> {value:.6e}");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
