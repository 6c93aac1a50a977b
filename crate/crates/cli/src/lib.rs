//! Command-line front end for `warpspec`.
//!
//! Every command reads flags merged over an optional `key = value` config
//! file and writes a JSON report with top-level keys `config`, `results`,
//! `diagnostics` and `verdicts`. Exit codes: 0 success, 1 verification
//! failure, 2 invalid input, 3 numerical non-convergence.
//!
//! `WARPSPEC_THREADS` sets the number of worker threads for sweeps.

pub mod commands;
pub mod config;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use warpspec::Error;

use crate::config::{read_config_file, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

pub const THREADS_ENV: &str = "WARPSPEC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "warpspec", version, about = "Spectral constants of warped product metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Manifold dimension n >= 3.
    #[arg(long)]
    pub n: Option<String>,
    /// 1/c, in [0, 4).
    #[arg(long)]
    pub kappa: Option<String>,
    /// Spectral target; the rescaled target κΛ when kappa = 0.
    #[arg(long)]
    pub lambda: Option<String>,
    /// model | round | file:<warp.csv>
    #[arg(long)]
    pub metric: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    /// Node counts and truncations, e.g. "256,512,1024:T/50,T/100,T/200".
    #[arg(long)]
    pub schedule: Option<String>,
    /// key = value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Threshold override name=value (repeatable).
    #[arg(long)]
    pub tol: Vec<String>,
    /// Inverse-iteration limit.
    #[arg(long = "max-iter")]
    pub max_iter: Option<String>,
    /// Sample count for profiles and tables.
    #[arg(long)]
    pub points: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form model constants and their defining relations.
    Constants(Common),
    /// Extrapolated radial spectral constant of a metric.
    LambdaC(Common),
    /// Run one verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// closed-form | f-ode | xi-ode | mu | model-relations | eigenfunction | drift
        #[arg(long)]
        suite: Option<String>,
    },
    /// Spectral constant under growing enlargements of the model.
    RigiditySweep {
        #[command(flatten)]
        common: Common,
        /// angular-scale | stretch
        #[arg(long)]
        perturbation: Option<String>,
        /// Comma-separated amplitudes.
        #[arg(long)]
        amplitudes: Option<String>,
        /// Also write the sweep table to this CSV file.
        #[arg(long)]
        csv: Option<String>,
    },
    /// The potential μ induced by the metric.
    MuProfile(Common),
    /// Write the metric as a warp CSV table.
    EmitModel(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::LambdaC(_) => "lambda-c",
            Command::Verify { .. } => "verify",
            Command::RigiditySweep { .. } => "rigidity-sweep",
            Command::MuProfile(_) => "mu-profile",
            Command::EmitModel(_) => "emit-model",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Constants(c) | Command::LambdaC(c) | Command::MuProfile(c) | Command::EmitModel(c) => c,
            Command::Verify { common, .. } | Command::RigiditySweep { common, .. } => common,
        }
    }

    fn flag_settings(&self) -> BTreeMap<String, String> {
        let c = self.common();
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v.clone());
            }
        };
        put("n", &c.n);
        put("kappa", &c.kappa);
        put("lambda", &c.lambda);
        put("metric", &c.metric);
        put("out", &c.out);
        put("format", &c.format);
        put("schedule", &c.schedule);
        put("max_iter", &c.max_iter);
        put("points", &c.points);
        match self {
            Command::Verify { suite, .. } => put("suite", suite),
            Command::RigiditySweep { perturbation, amplitudes, csv, .. } => {
                put("perturbation", perturbation);
                put("amplitudes", amplitudes);
                put("csv", csv);
            }
            _ => {}
        }
        m
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence(_) => EXIT_NON_CONVERGENCE,
        _ => EXIT_INVALID,
    }
}

/// Result of one invocation: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn resolve(cli: &Cli) -> warpspec::Result<RunConfig> {
    let mut settings = match &cli.command.common().config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    settings.extend(cli.command.flag_settings());
    RunConfig::from_settings(cli.command.name(), &settings, &cli.command.common().tol)
}

fn threads() -> warpspec::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn execute(cli: &Cli) -> warpspec::Result<(bool, String)> {
    let cfg = resolve(cli)?;
    let pool = match threads()? {
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| commands::execute(&cfg))?;
    if let Some((path, content)) = &outcome.side_file {
        std::fs::write(path, content)?;
    }
    let stdout = match &cfg.out {
        Some(path) => {
            std::fs::write(path, &outcome.text)?;
            String::new()
        }
        None => outcome.text,
    };
    Ok((outcome.pass, stdout))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((pass, stdout)) => Invocation {
            code: if pass { EXIT_OK } else { EXIT_VERIFICATION },
            stdout,
            stderr: if pass { String::new() } else { "verification failed\n".into() },
        },
        Err(e) => Invocation {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
