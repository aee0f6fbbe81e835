use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use vacuumlab_cli::{exit, output_root, ConfigError, ScenarioConfig};

/// Experiments on affine gas expansion into vacuum.
#[derive(Parser)]
#[command(name = "vacuumlab", version, about)]
struct Cli {
    /// Output root; overrides the VACUUMLAB_OUTPUT_ROOT environment variable.
    #[arg(long, global = true)]
    output_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run { config: PathBuf },
    /// Run a scenario once per value of one config field.
    Sweep {
        config: PathBuf,
        /// Dotted field path, e.g. `euler1d.gamma`.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
    },
    /// Extend a checkpointed 1-d run to a later time.
    Resume {
        checkpoint: PathBuf,
        #[arg(long)]
        until: f64,
        /// Must equal the checkpoint's step when given.
        #[arg(long)]
        dt: Option<f64>,
        /// Output directory; defaults to `<run dir>-until-<T>`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Accept,
}

fn load(path: &PathBuf) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    Ok(ScenarioConfig::from_toml(&text)?)
}

fn code(pass: bool) -> i32 {
    if pass {
        exit::PASS
    } else {
        exit::FAIL
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let root = cli.output_root.unwrap_or_else(output_root);
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let m = vacuumlab_cli::run(&cfg, &root)?;
            for (k, v) in &m.verdicts {
                println!("{k}: {v}");
            }
            println!("{} -> {}", m.verdict, m.output_dir.display());
            Ok(code(m.passed()))
        }
        Command::Sweep {
            config,
            axis,
            values,
        } => {
            let cfg = load(&config)?;
            let out = vacuumlab_cli::sweep(&cfg, &axis, &values, &root)?;
            for r in &out.runs {
                match &r.result {
                    Ok(m) => println!("{axis} = {}: {}", r.value, m.verdict),
                    Err(e) => println!("{axis} = {}: error: {e}", r.value),
                }
            }
            println!("summary -> {}", out.summary.display());
            Ok(code(out.all_passed()))
        }
        Command::Resume {
            checkpoint,
            until,
            dt,
            output,
        } => {
            let m = vacuumlab_cli::resume(&checkpoint, until, dt, output.as_deref())?;
            println!("{} -> {}", m.verdict, m.output_dir.display());
            Ok(code(m.passed()))
        }
        Command::Accept => {
            let dir = root.join("accept");
            let r = vacuumlab_cli::run_acceptance(&dir, |o| println!("{}", o.line()))
                .context("acceptance suite")?;
            println!("outputs -> {}", r.manifest.output_dir.display());
            Ok(code(r.all_passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG_ERROR as u8 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(vacuumlab_cli::error_exit_code(&e) as u8)
        }
    }
}
