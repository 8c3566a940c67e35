use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qforge::pipeline::{self, Input, PipelineConfig, Stage};

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Exact R-matrix pipeline for minuscule quantum group modules.
#[derive(Parser)]
#[command(name = "qforge", version)]
struct Cli {
    /// validate, rmatrix, minpoly, normalize, rprime, conditions, mclaims, serre, extend or all
    stage: Stage,
    /// Bundled case id, or all-nine
    #[arg(long, conflicts_with = "rep")]
    case: Option<String>,
    /// Diagram file, or the name of a bundled diagram
    #[arg(long)]
    rep: Option<String>,
    /// full or sampled:N
    #[arg(long)]
    check: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// auto, or the exponent a/b of the eigenvalue -q^{a/b} to normalize by
    #[arg(long, default_value = "auto")]
    eigen: String,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("qforge: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let input = match (cli.case, cli.rep) {
        (Some(c), None) => Input::Case(c),
        (None, Some(r)) => Input::Rep(r),
        _ => return input_error("exactly one of --case or --rep is required"),
    };
    let mut cfg = PipelineConfig::new(input, cli.stage);
    cfg.seed = cli.seed;
    if let Some(c) = &cli.check {
        match pipeline::parse_check(c, cli.seed) {
            Ok(m) => cfg.check = Some(m),
            Err(e) => return input_error(e),
        }
    }
    match pipeline::parse_eigen(&cli.eigen) {
        Ok(e) => cfg.eigen = e,
        Err(e) => return input_error(e),
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return input_error("--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("qforge: {e}");
            return ExitCode::from(3);
        }
    }
    let report = match pipeline::run(&cfg) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    let text = matches!(cli.format, Format::Text);
    match &cli.out {
        Some(path) => {
            if let Err(e) = pipeline::write_report(&report, path, text) {
                eprintln!("qforge: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{}", if text { report.to_text() } else { report.to_json_string() }),
    }
    ExitCode::from(report.exit_code() as u8)
}
