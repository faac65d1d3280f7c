mod commands;
mod config;
mod error;
mod universe;

use clap::Parser;
use commands::Output;
use config::{Cli, ExperimentConfig};
use error::CliError;
use serde::Serialize;
use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

const REPORT_SCHEMA: u32 = 1;

#[derive(Serialize)]
struct Timing {
    started_unix_ms: u128,
    elapsed_ms: u128,
}

/// Envelope around every JSON report. Everything except `timing` is a function of the
/// configuration and the universe.
#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    schema: u32,
    command: config::Command,
    config: &'a ExperimentConfig,
    fingerprint: String,
    seed: u64,
    timing: Timing,
    result: serde_json::Value,
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(CliError::from)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut opts = cli.opts;
    if let Some(path) = opts.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        opts.merge_file(&text)?;
    }
    let cfg = ExperimentConfig::resolve(&opts)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(format!("jobs: {e}")))?;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let clock = Instant::now();
    match commands::run(cli.command, &cfg)? {
        Output::Raw { text, summary } => {
            emit(&cfg, &text)?;
            eprintln!("{summary}");
            Ok(())
        }
        Output::Report { fingerprint, result, summary, invariant } => {
            let report = Report {
                tool: "curvecx",
                version: env!("CARGO_PKG_VERSION"),
                schema: REPORT_SCHEMA,
                command: cli.command,
                config: &cfg,
                fingerprint,
                seed: cfg.seed,
                timing: Timing { started_unix_ms: started, elapsed_ms: clock.elapsed().as_millis() },
                result,
            };
            let mut text = serde_json::to_string_pretty(&report).expect("report serialises");
            text.push('\n');
            emit(&cfg, &text)?;
            eprintln!("{summary}");
            match invariant {
                Some(m) => Err(CliError::Invariant(m)),
                None => Ok(()),
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = CliError::Config(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
