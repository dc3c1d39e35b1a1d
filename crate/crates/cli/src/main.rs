use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dnls_cli::config::{apply_override, parse_override};
use dnls_cli::run::output_root;
use dnls_cli::{execute_run, execute_sweep, CliError, Command, RunArtifact, RunConfig};
use serde_json::Value;

/// Experiment driver for the derivative NLS laboratory.
///
/// Any config field can be overridden with `--key.path=value`, e.g.
/// `dnls compare --K=16 --data.eps=0.02`.
#[derive(Parser, Debug)]
#[command(name = "dnls", version)]
struct Args {
    /// simulate, exact, compare, nf-solve, invariants, check, blowup or constants
    command: String,
    /// JSON config; defaults are used for missing fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON array of config patches, each run as a separate job
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Worker threads for --sweep (0 = available parallelism)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

const OWN_FLAGS: [&str; 5] = ["--config", "--sweep", "--workers", "--help", "--version"];

/// Splits argv into clap's arguments and `--key.path=value` overrides.
fn split_args(argv: Vec<String>) -> (Vec<String>, Vec<String>) {
    let mut own = Vec::new();
    let mut overrides = Vec::new();
    let mut iter = argv.into_iter();
    own.extend(iter.next());
    while let Some(arg) = iter.next() {
        let key = arg.split('=').next().unwrap_or_default();
        if !arg.starts_with("--") || OWN_FLAGS.contains(&key) || arg == "-h" || arg == "-V" {
            let takes_value = !arg.contains('=') && matches!(key, "--config" | "--sweep" | "--workers");
            own.push(arg);
            if takes_value {
                own.extend(iter.next());
            }
        } else {
            overrides.push(arg);
        }
    }
    (own, overrides)
}

fn build_config(args: &Args, overrides: &[String]) -> Result<Value, CliError> {
    let command = Command::parse(&args.command)
        .ok_or_else(|| CliError::field("command", format!("unknown command {}", args.command)))?;
    let mut doc = serde_json::to_value(RunConfig::defaults(command)).expect("serializable");
    if let Some(path) = &args.config {
        dnls_cli::config::merge(&mut doc, &RunConfig::load(path)?);
    }
    doc["command"] = Value::String(command.name().to_string());
    for arg in overrides {
        let (key, value) = parse_override(arg)?;
        apply_override(&mut doc, &key, value)?;
    }
    Ok(doc)
}

fn report(artifact: &RunArtifact) -> u8 {
    println!(
        "{} {}: {}",
        artifact.config.command.name(),
        artifact.directory.display(),
        if artifact.passed { "PASS" } else { "FAIL" }
    );
    for cert in &artifact.certificates {
        println!(
            "  {:<32} {:>12.4e} (threshold {:.4e}) {}",
            cert.name,
            cert.value,
            cert.threshold,
            if cert.passed { "ok" } else { "FAILED" }
        );
    }
    if artifact.passed {
        0
    } else {
        3
    }
}

fn run(args: Args, overrides: Vec<String>) -> Result<u8, CliError> {
    let doc = build_config(&args, &overrides)?;
    match &args.sweep {
        None => {
            let config = RunConfig::from_value(doc)?;
            Ok(report(&execute_run(&config)?))
        }
        Some(path) => {
            let patches = match RunConfig::load(path)? {
                Value::Array(items) => items,
                _ => return Err(CliError::field("--sweep", "expected a JSON array of config patches")),
            };
            let base = RunConfig::from_value(doc.clone())?;
            let workers = if args.workers == 0 {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            } else {
                args.workers
            };
            let mut code = 0;
            for outcome in execute_sweep(&doc, &patches, &output_root(&base), workers) {
                code = code.max(match outcome {
                    Ok(artifact) => report(&artifact),
                    Err(e) => {
                        eprintln!("error: {e}");
                        e.exit_code() as u8
                    }
                });
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let (own, overrides) = split_args(std::env::args().collect());
    let args = Args::parse_from(own);
    match run(args, overrides) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
