mod args;
mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command};
use commands::Report;
use error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
const SEED_ENV: &str = "SUSLE_SEED";

fn apply_seed_override(cmd: &mut Command) -> CliResult<()> {
    let Ok(raw) = std::env::var(SEED_ENV) else { return Ok(()) };
    let seed: u64 = raw.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}='{raw}' is not a u64")))?;
    match cmd {
        Command::Simulate(a) => a.driver.seed = seed,
        Command::MartingaleMc(a) => a.driver.seed = seed,
        _ => {}
    }
    Ok(())
}

fn envelope(cmd: &Command, verdict: Option<bool>, result: Option<Value>) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": cmd.name(),
        "config": serde_json::to_value(cmd).expect("arguments serialize"),
    });
    if !cmd.output().no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        v["timestamp"] = json!(secs);
    }
    if let Some(ok) = verdict {
        v["verdict"] = json!(if ok { "pass" } else { "fail" });
    }
    if let Some(r) = result {
        v["result"] = r;
    }
    v
}

/// Writes next to the target and renames, so a failed run never leaves a truncated file.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp: PathBuf = path.to_path_buf();
    let name = format!(".{}.partial", path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default());
    tmp.set_file_name(name);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(cmd: &Command, report: Report) -> CliResult<()> {
    let out = cmd.output().output.as_deref();
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json") + "\n";
    match report.csv {
        Some(csv) => {
            let echo = pretty(&envelope(cmd, report.verdict, None));
            match out {
                Some(p) => {
                    let mut side = p.as_os_str().to_owned();
                    side.push(".config.json");
                    write_atomic(p, csv.as_bytes())?;
                    write_atomic(Path::new(&side), echo.as_bytes())?;
                }
                None => {
                    std::io::stdout().write_all(csv.as_bytes())?;
                    eprint!("{echo}");
                }
            }
        }
        None => {
            let text = pretty(&envelope(cmd, report.verdict, Some(report.result)));
            match out {
                Some(p) => write_atomic(p, text.as_bytes())?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}

fn run(mut cli: Cli) -> CliResult<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    apply_seed_override(&mut cli.command)?;
    let report = match &cli.command {
        Command::CheckSingular(a) => commands::check_singular(a)?,
        Command::DriftCheck(a) => commands::drift_check(a)?,
        Command::Simulate(a) => commands::simulate(a)?,
        Command::MartingaleMc(a) => commands::martingale_mc(a)?,
        Command::Expmap(a) => commands::expmap(a)?,
    };
    let code = match report.verdict {
        Some(false) => 2,
        _ => 0,
    };
    emit(&cli.command, report)?;
    Ok(code)
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
