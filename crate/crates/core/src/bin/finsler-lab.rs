use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use finsler_core::cli::{self, Format, RunConfig, EXIT_USAGE};
use finsler_core::Error;

/// Thread count for the per-sample sweep.
const THREADS_ENV: &str = "FINSLER_THREADS";

#[derive(Parser)]
#[command(name = "finsler-lab", version, about = "Chern-connection curvature checks for Finsler structures")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks described by a TOML configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Override a named tolerance, e.g. `--tolerance eq3=1e-6`.
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Path of the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("finsler-lab: {e}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn apply_overrides(
    cfg: &mut RunConfig,
    seed: Option<u64>,
    samples: Option<usize>,
    tolerances: &[String],
    format: Option<Format>,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    if let Some(s) = seed {
        cfg.samples.seed = s;
    }
    if let Some(n) = samples {
        cfg.samples.count = n;
    }
    for t in tolerances {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("tolerance override {t:?} is not NAME=VALUE")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("tolerance value {value:?} is not a number")))?;
        cfg.tolerances.set(name.trim(), v)?;
    }
    if let Some(f) = format {
        cfg.output.format = f;
    }
    if out.is_some() {
        cfg.output.path = out;
    }
    cfg.validate()
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => return usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        }
    }
    let Command::Run { config, seed, samples, tolerances, format, out } = args.command;
    let mut cfg = match RunConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Err(e) = apply_overrides(&mut cfg, seed, samples, &tolerances, format, out) {
        return usage(e);
    }
    let report = match cli::run(&cfg) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let json = report.to_json();
    let fmt = cfg.output.format;
    if matches!(fmt, Format::Text | Format::Both) {
        print!("{}", cli::render_text(&report));
    }
    if matches!(fmt, Format::Json | Format::Both) {
        match &cfg.output.path {
            Some(p) => {
                if let Err(e) = cli::write_atomic(p, &json) {
                    return usage(e);
                }
            }
            None => println!("{json}"),
        }
    } else if let Some(p) = &cfg.output.path {
        if let Err(e) = cli::write_atomic(p, &json) {
            return usage(e);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
