//! `sensornet`: sweeps, single-point reports, the verification suite and
//! probe search.

mod commands;
mod config;
mod table;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, Settings, EXIT_USAGE};
use config::{load_config, ConfigError, CONFIG_ENV};

#[derive(Parser, Debug)]
#[command(name = "sensornet", version, about = "Discrete-outcome quantum sensor network calculations")]
struct Cli {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table over every (strategy, N, theta, p) combination.
    Sweep(Flags),
    /// One row for a single parameter point.
    Report(Flags),
    /// Closed forms against brute-force oracles.
    Verify(Flags),
    /// Randomized probe search.
    Optimize(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Comma-separated strategy labels.
    #[arg(long)]
    strategy: Option<String>,
    /// Detector counts; list or start:stop:count.
    #[arg(long)]
    n: Option<String>,
    /// Excitation count of the symmetric probe (pgm_numeric).
    #[arg(long)]
    k: Option<String>,
    /// Phase angles; numbers, `pi/8` forms, or start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Prior of the no-interaction hypothesis (p0 for one_or_none).
    #[arg(long)]
    p: Option<String>,
    /// entangled or separable.
    #[arg(long)]
    probe: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    /// quick, default or deep.
    #[arg(long)]
    preset: Option<String>,
    /// Replaces every suite tolerance.
    #[arg(long)]
    tolerance: Option<String>,
    /// Read theta in degrees.
    #[arg(long)]
    degrees: bool,
    /// which_detector (alias min_overlap) or one_or_none.
    #[arg(long)]
    objective: Option<String>,
}

impl Flags {
    fn merge_into(self, base: &mut BTreeMap<String, String>) {
        let pairs = [
            ("strategy", self.strategy),
            ("n", self.n),
            ("k", self.k),
            ("theta", self.theta),
            ("p", self.p),
            ("probe", self.probe),
            ("format", self.format),
            ("out", self.out),
            ("seed", self.seed),
            ("restarts", self.restarts),
            ("preset", self.preset),
            ("tolerance", self.tolerance),
            ("objective", self.objective),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                base.insert(k.to_string(), v);
            }
        }
        if self.degrees {
            base.insert("degrees".into(), "true".into());
        }
    }
}

fn emit(text: &str, out: Option<&str>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write standard output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut values = match &cli.config {
        Some(path) => load_config(path).map_err(|e| match e {
            ConfigError::Io(m) => Failure::Io(m),
            ConfigError::Parse(m) => Failure::Usage(m),
        })?,
        None => BTreeMap::new(),
    };
    let (flags, which) = match cli.command {
        Command::Sweep(f) => (f, 0),
        Command::Report(f) => (f, 1),
        Command::Verify(f) => (f, 2),
        Command::Optimize(f) => (f, 3),
    };
    flags.merge_into(&mut values);
    let settings = Settings { values };
    let result = match which {
        0 => commands::sweep(&settings, false),
        1 => commands::sweep(&settings, true),
        2 => commands::verify(&settings),
        _ => commands::optimize(&settings),
    };
    match result {
        Ok(text) => emit(&text, settings.out()),
        Err(Failure::Verify(text)) => {
            emit(&text, settings.out())?;
            Err(Failure::Verify(String::new()))
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Verify(_) => eprintln!("verification failed"),
            }
            ExitCode::from(e.code() as u8)
        }
    }
}
