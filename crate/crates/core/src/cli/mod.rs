//! Batch driver: `fibretorsion run <config.json> [--precision BITS] [--out DIR]`.

pub mod config;
pub mod experiments;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;

pub use config::{RunConfig, EXPERIMENTS};
pub use experiments::execute;
pub use output::{csv_table, data_checksums, Report, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_DATA: i32 = 4;

#[derive(Parser)]
#[command(name = "fibretorsion", version, about = "Torsion loci, periods, heights and orbits on elliptic fibrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Working precision in bits; overrides `precision_bits`.
        #[arg(long)]
        precision: Option<u32>,
        /// Output directory; overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
        Error::DataIntegrity(_) => EXIT_DATA,
        _ => EXIT_NUMERIC,
    }
}

fn error_kind(code: i32) -> &'static str {
    match code {
        EXIT_CONFIG => "config",
        EXIT_DATA => "data-integrity",
        _ => "numeric",
    }
}

/// Parses the command line and runs; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
        Ok(Cli { command: Command::Run { config, precision, out } }) => run(&config, precision, out.as_deref()),
    }
}

/// Loads the config, applies the overrides and validates.
pub fn load(path: &Path, precision: Option<u32>, out: Option<&Path>) -> Result<RunConfig, (Error, Value)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (Error::Config(format!("cannot read {}: {}", path.display(), e)), Value::Null))?;
    let echo = serde_json::from_str::<Value>(&text).unwrap_or(Value::Null);
    let mut cfg = RunConfig::from_json(&text).map_err(|e| (e, echo.clone()))?;
    if let Some(p) = precision {
        cfg = cfg.with_precision(p).map_err(|e| (e, echo.clone()))?;
    }
    if let Some(o) = out {
        cfg.output_dir = o.to_path_buf();
    }
    Ok(cfg)
}

/// Runs one config end to end, always attempting to leave a manifest.
pub fn run(path: &Path, precision: Option<u32>, out: Option<&Path>) -> i32 {
    let start = Instant::now();
    let fallback = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUTPUT));
    let (dir, echo, result) = match load(path, precision, out) {
        Err((e, echo)) => {
            let dir = echo
                .get("output_dir")
                .and_then(Value::as_str)
                .filter(|_| out.is_none())
                .map(PathBuf::from)
                .unwrap_or(fallback);
            (dir, echo, Err(e))
        }
        Ok(cfg) => {
            let r = execute(&cfg).and_then(|rep| {
                let files = rep.files()?;
                output::write_files(&cfg.output_dir, &files)?;
                Ok((rep.summary, files.into_iter().map(|f| f.0).collect::<Vec<_>>()))
            });
            (cfg.output_dir.clone(), cfg.echo.clone(), r)
        }
    };
    let (code, error, summary, outputs) = match result {
        Ok((s, o)) => (EXIT_OK, None, s, o),
        Err(e) => {
            let code = exit_code(&e);
            let line = json!({"error": error_kind(code), "exit_code": code, "message": e.to_string()});
            eprintln!("{}", line);
            (code, Some(e.to_string()), Value::Null, vec![])
        }
    };
    let manifest = RunManifest {
        config: echo,
        version: env!("CARGO_PKG_VERSION").to_string(),
        data_checksums: data_checksums(),
        wall_time_ms: start.elapsed().as_millis(),
        status: if code == EXIT_OK { "ok".into() } else { error_kind(code).into() },
        exit_code: code,
        error,
        outputs,
        summary,
    };
    if let Err(e) = output::write_manifest(&dir, &manifest) {
        eprintln!("{}", json!({"error": "config", "exit_code": EXIT_CONFIG, "message": e.to_string()}));
        return if code == EXIT_OK { EXIT_CONFIG } else { code };
    }
    code
}
