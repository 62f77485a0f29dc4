//! Command-line driver: generate fields, compute maximal operators, run
//! verification suites and re-render report summaries from a JSON config.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use maxreg::cli::{
    load_config, maybe_print, report_from_dir, resolve_threads, run_config, RunMode,
};
use maxreg::Error;

#[derive(Parser)]
#[command(name = "maxreg", version, about = "Local maximal-operator laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads: a count or `auto` (env fallback: MAXREG_THREADS).
    #[arg(long)]
    threads: Option<String>,
    /// Suppress the summary table on stdout.
    #[arg(long, default_value_t = false)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize the domain and write the generated fields as CSV.
    Gen(CommonArgs),
    /// Gen, plus the maximal field and argmax sets.
    Compute(CommonArgs),
    /// Compute, plus the configured verification checks and reports.
    Verify(CommonArgs),
    /// Re-render the summary table from an existing reports.json.
    Report {
        /// Directory containing reports.json.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = false)]
        quiet: bool,
    },
}

fn out_dir(args: &CommonArgs, cfg_dir: Option<PathBuf>) -> PathBuf {
    args.out
        .clone()
        .or(cfg_dir)
        .unwrap_or_else(|| PathBuf::from("maxreg-out"))
}

fn run(mode: RunMode, args: &CommonArgs) -> Result<i32, Error> {
    let mut cfg = load_config(&args.config)?;
    cfg.threads = resolve_threads(args.threads.as_deref(), cfg.threads)?;
    let dir = out_dir(args, cfg.output_dir.clone());
    let output = run_config(&cfg, &dir, mode)?;
    maybe_print(args.quiet, &output.summary);
    Ok(output.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => run(RunMode::Generate, args),
        Command::Compute(args) => run(RunMode::Compute, args),
        Command::Verify(args) => run(RunMode::Verify, args),
        Command::Report { out, quiet } => report_from_dir(out).map(|summary| {
            maybe_print(*quiet, &summary);
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::HypothesesUnmet(msg)) => {
            eprintln!("hypotheses unmet: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
