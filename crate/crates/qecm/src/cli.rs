use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};

use crate::acceptance::{run_all, Budget};
use crate::config::{default_seed, ConfigError, ConfigOverrides, ExperimentConfig};
use crate::experiments::{render_curve, render_game, render_moe, run_curve, run_game, run_moe, CurveConfig, MoeConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qecm", version, about = "Security games for quantum encryption of classical messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one game and print its report (JSON by default).
    Game(ConfigOverrides),
    /// Bound curves with a measured witness attack per row, as CSV.
    Curve {
        #[arg(long, default_value_t = 1)]
        min: usize,
        #[arg(long, default_value_t = 10)]
        max: usize,
        /// Monte Carlo trials for F-conjugate witnesses.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 64)]
        oracle_samples: usize,
        /// Defaults to the QECM_SEED environment variable, then 1.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        output: Option<std::path::PathBuf>,
    },
    /// Seesaw search for the monogamy game; prints JSON.
    Moe {
        #[arg(long, default_value_t = 1)]
        lambda: usize,
        #[arg(long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long, default_value_t = 2)]
        dim_c: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        restarts: u64,
        /// Defaults to the QECM_SEED environment variable, then 1.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        output: Option<std::path::PathBuf>,
    },
    /// Run the acceptance checks; exits nonzero if any fails.
    Verify {
        /// Smaller Monte Carlo and random-instance counts.
        #[arg(long)]
        fast: bool,
    },
}

/// Exit code for an error raised by a subcommand.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<qecm_core::Error>() {
        Some(qecm_core::Error::Capacity(_)) => EXIT_CAPACITY,
        Some(_) => EXIT_CONFIG,
        None => EXIT_FAILED,
    }
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn seed_or_default(seed: Option<u64>) -> Result<u64, ConfigError> {
    seed.map_or_else(default_seed, Ok)
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Game(overrides) => {
            let cfg = ExperimentConfig::resolve(&overrides)?;
            let out = run_game(&cfg)?;
            emit(&render_game(&out), cfg.output.as_deref(), stdout)?;
        }
        Command::Curve { min, max, trials, oracle_samples, seed, output } => {
            let cfg = CurveConfig { n_min: min, n_max: max, trials, oracle_samples, seed: seed_or_default(seed)? };
            let lines = run_curve(&cfg)?;
            emit(&render_curve(&cfg, &lines), output.as_deref(), stdout)?;
        }
        Command::Moe { lambda, dim_b, dim_c, iters, tol, restarts, seed, output } => {
            let cfg = MoeConfig { lambda, dim_b, dim_c, iters, tol, restarts, seed: seed_or_default(seed)? };
            let out = run_moe(&cfg)?;
            emit(&render_moe(&out), output.as_deref(), stdout)?;
        }
        Command::Verify { fast } => {
            let outcomes = run_all(&Budget { fast }, |o| {
                let _ = writeln!(stdout, "{}", o.line());
            });
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            writeln!(stdout, "{} of {} checks passed", outcomes.len() - failed, outcomes.len())?;
            return Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED });
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 1 on failed checks or IO errors, 2 on
/// invalid configuration, 3 when a computation exceeds capacity.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_CONFIG
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit_code(&e)
        }
    }
}
