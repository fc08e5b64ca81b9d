//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::capacity::capacity;
use crate::error::{Error, Result};
use crate::estimation::{error_covariance, ChannelStats, LinkBudget, TrainingPlan};
use crate::io::{parse_matrix_file, render_capacity_svg, sweep_summary, write_sweep_csv};
use crate::linalg::check_spd;
use crate::montecarlo::{amgm_oracle, run_estimation_sim, SimConfig, SimRng};
use crate::optimizer::sweep;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  parse error (unreadable file, malformed number)
  3  invalid matrix (not square, asymmetric, not positive semidefinite)
  4  invalid configuration (unknown, missing or out-of-range flags)
  5  numeric failure (factorization or eigensolver failure)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check that the matrix file holds a valid channel covariance
    Validate,
    /// Capacity at one training length (needs --t-tau)
    Capacity,
    /// Capacity at every training length 1..=T
    Sweep,
    /// Best training length and its capacity
    Optimize,
    /// Monte Carlo estimator statistics (needs --t-tau, --seed, --trials)
    Simulate,
    /// Random-spectrum check of equal-power optimality (needs --t-tau, --seed, --trials)
    Oracle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "pilotcap", version, about = "Optimal pilot length for training-based SIMO block-fading links", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Channel covariance file (whitespace rows or JSON {"matrix": [[..]]})
    #[arg(long, global = true)]
    pub matrix: Option<PathBuf>,
    /// Per-symbol power P (linear scale)
    #[arg(long, global = true)]
    pub power: Option<f64>,
    /// Coherence block length T in symbols
    #[arg(long = "block-length", global = true)]
    pub block_length: Option<u64>,
    /// Number of training symbols
    #[arg(long = "t-tau", global = true, allow_negative_numbers = true)]
    pub t_tau: Option<i64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials (simulate) or random spectra (oracle)
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Output file; stdout when omitted
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub output_path: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

/// Validated inputs of one CLI invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub matrix_path: PathBuf,
    pub power: f64,
    pub block_length: u64,
    pub t_tau: Option<u64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

fn missing(flag: &str, command: Command) -> Error {
    Error::InvalidConfig(format!("{command:?} requires --{flag}").to_lowercase())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let command = cli.command;
        let matrix_path = cli.matrix.ok_or_else(|| missing("matrix", command))?;
        let (power, block_length) = match command {
            // validate only looks at the matrix
            Command::Validate => (cli.power.unwrap_or(1.0), cli.block_length.unwrap_or(2)),
            _ => (
                cli.power.ok_or_else(|| missing("power", command))?,
                cli.block_length.ok_or_else(|| missing("block-length", command))?,
            ),
        };
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidConfig(format!("--power must be positive, got {power}")));
        }
        if block_length < 2 {
            return Err(Error::InvalidConfig(format!(
                "--block-length must be at least 2, got {block_length}"
            )));
        }
        let t_tau = match cli.t_tau {
            Some(t) if t < 0 || t as u64 > block_length => {
                return Err(Error::InvalidPlan {
                    t_tau: t,
                    block_length,
                    reason: "t_tau must lie in [0, T]",
                })
            }
            Some(t) => Some(t as u64),
            None => None,
        };
        let needs_t_tau = matches!(command, Command::Capacity | Command::Simulate | Command::Oracle);
        if needs_t_tau && t_tau.is_none() {
            return Err(missing("t-tau", command));
        }
        if matches!(command, Command::Simulate | Command::Oracle) {
            if cli.seed.is_none() {
                return Err(missing("seed", command));
            }
            match cli.trials {
                None => return Err(missing("trials", command)),
                Some(0) => return Err(Error::InvalidConfig("--trials must be at least 1".into())),
                _ => {}
            }
        }
        if cli.format == OutputFormat::Svg && command != Command::Sweep {
            return Err(Error::InvalidConfig("--format svg is only available for sweep".into()));
        }
        Ok(RunConfig {
            command,
            matrix_path,
            power,
            block_length,
            t_tau,
            seed: cli.seed,
            trials: cli.trials,
            output_path: cli.output_path,
            format: cli.format,
        })
    }
}

fn write_output(path: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    let io_err = |p: &Path, e: std::io::Error| Error::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| io_err(p, e)),
        None => stdout
            .write_all(body)
            .map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn print(stdout: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(stdout, "{}", line.as_ref()).map_err(|e| Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    })
}

fn json_bytes(value: &impl serde::Serialize) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("serializable");
    s.push(b'\n');
    s
}

/// Executes one command, writing human-readable output to `stdout` and
/// artifacts to `--out` when given.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let c = parse_matrix_file(&config.matrix_path)?;
    let out_path = config.output_path.as_deref();

    if config.command == Command::Validate {
        let report = check_spd(&c, c.default_pd_tolerance());
        return match config.format {
            OutputFormat::Json => write_output(
                out_path,
                stdout,
                &json_bytes(&json!({ "dim": c.dim(), "report": report })),
            ),
            _ => print(
                stdout,
                format!(
                    "ok dim={} min_eigenvalue={:e} positive_definite={}",
                    c.dim(),
                    report.min_eigenvalue,
                    report.is_pd
                ),
            ),
        };
    }

    let stats = ChannelStats::new(c)?;
    let budget = LinkBudget::new(config.power, config.block_length)?;

    match config.command {
        Command::Validate => unreachable!(),
        Command::Capacity => {
            let plan = TrainingPlan::new(config.t_tau.expect("validated"));
            let value = capacity(&stats, &budget, &plan)?;
            match config.format {
                OutputFormat::Json => write_output(
                    out_path,
                    stdout,
                    &json_bytes(&json!({
                        "t_tau": plan.t_tau,
                        // JSON has no infinity
                        "bits_per_block": value.bits_per_block.is_finite().then_some(value.bits_per_block),
                        "bits_per_symbol": value.bits_per_symbol.is_finite().then_some(value.bits_per_symbol),
                    })),
                ),
                _ => print(
                    stdout,
                    format!(
                        "t_tau={} capacity: {:.6} bits per block ({:.9} bits per symbol)",
                        plan.t_tau, value.bits_per_block, value.bits_per_symbol
                    ),
                ),
            }
        }
        Command::Sweep => {
            let curve = sweep(&stats, &budget)?;
            match config.format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&curve, &mut buf).expect("in-memory write");
                    write_output(out_path, stdout, &buf)?;
                }
                OutputFormat::Json => write_output(out_path, stdout, &json_bytes(&curve))?,
                OutputFormat::Svg => {
                    let title = format!(
                        "{}-antenna SIMO capacity, P = {}, T = {}",
                        stats.antennas(),
                        budget.power(),
                        budget.block_length()
                    );
                    write_output(out_path, stdout, render_capacity_svg(&curve, &title).as_bytes())?;
                    if let Some(p) = out_path {
                        let mut buf = Vec::new();
                        write_sweep_csv(&curve, &mut buf).expect("in-memory write");
                        write_output(Some(&p.with_extension("csv")), stdout, &buf)?;
                    }
                }
            }
            if out_path.is_some() {
                print(stdout, sweep_summary(&curve))?;
            }
            Ok(())
        }
        Command::Optimize => {
            let curve = sweep(&stats, &budget)?;
            match config.format {
                OutputFormat::Json => write_output(
                    out_path,
                    stdout,
                    &json_bytes(&json!({
                        "argmax": curve.argmax_t_tau,
                        "max_bits_per_block": curve.max_bits,
                        "bits_per_symbol": curve.max_bits / curve.block_length as f64,
                    })),
                ),
                _ => print(stdout, sweep_summary(&curve)),
            }
        }
        Command::Simulate => {
            let sim = SimConfig {
                seed: config.seed.expect("validated"),
                num_trials: config.trials.expect("validated"),
                stats,
                budget,
                plan: TrainingPlan::new(config.t_tau.expect("validated")),
            };
            let report = run_estimation_sim(&sim)?;
            write_output(out_path, stdout, &json_bytes(&report))
        }
        Command::Oracle => {
            let plan = TrainingPlan::new(config.t_tau.expect("validated"));
            let t_d = plan.data_symbols(&budget) as usize;
            let c_tilde = error_covariance(&stats, &budget, &plan)?;
            let mut rng = SimRng::new(config.seed.expect("validated"));
            let outcome = amgm_oracle(
                &stats,
                &c_tilde,
                budget.power(),
                t_d,
                config.trials.expect("validated"),
                &mut rng,
            )?;
            match config.format {
                OutputFormat::Json => write_output(out_path, stdout, &json_bytes(&outcome)),
                _ => print(
                    stdout,
                    format!(
                        "spectra={} max_random_mi={} equal_power_mi={} equal_power_dominates={}",
                        outcome.spectra_evaluated,
                        outcome.max_random_mi,
                        outcome.equal_power_mi,
                        outcome.equal_power_dominates(1e-9)
                    ),
                ),
            }
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 4;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| run(&config, stdout));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
