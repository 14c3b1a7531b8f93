mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{FileConfig, ModelArgs, RunConfig};
use error::{AppError, CliResult};

#[derive(Parser)]
#[command(
    name = "merton",
    version,
    about = "Structural credit portfolio engine: analytic curves, Monte Carlo, risk measures, calibration"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form risk report and plot-ready analytic curves
    Analytic {
        #[command(flatten)]
        args: ModelArgs,
        /// Structural parameter values for a curve sweep (repeatable);
        /// default is the B implied by sigma, corr and maturity
        #[arg(long = "b")]
        b: Vec<f64>,
    },
    /// Monte Carlo run: outcomes, loss histogram, binned curves, risk report
    Simulate {
        #[command(flatten)]
        args: ModelArgs,
    },
    /// Fit the structural parameter B to observed default/recovery data
    Calibrate {
        #[command(flatten)]
        args: ModelArgs,
        /// CSV of observations: `year,default_rate,recovery_rate` (year
        /// optional) or a binned-curve file from `simulate`
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        b_lo: f64,
        #[arg(long, default_value_t = 10.0)]
        b_hi: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Structural recovery/loss curves for one or more B values
    Curves {
        #[command(flatten)]
        args: ModelArgs,
        /// Structural parameter values (repeatable)
        #[arg(long = "b")]
        b: Vec<f64>,
    },
    /// Recompute risk measures from an existing outcomes CSV
    Report {
        #[command(flatten)]
        args: ModelArgs,
        /// Outcomes CSV produced by `simulate`
        #[arg(long)]
        input: PathBuf,
    },
}

fn load_config(args: &ModelArgs) -> CliResult<RunConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| AppError::Io {
                path: path.clone(),
                source,
                completed: Vec::new(),
            })?;
            toml::from_str::<FileConfig>(&text).map_err(|e| {
                AppError::Config(format!("cannot parse {}: {e}", path.display()))
            })?
        }
        None => FileConfig::default(),
    };
    Ok(RunConfig::resolve(args, &file))
}

fn prepare(cfg: &RunConfig) -> CliResult<()> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(AppError::Config("--threads must be at least 1".into()));
        }
        // ignore the error if a pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| AppError::Io {
        path: cfg.out_dir.clone(),
        source,
        completed: Vec::new(),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Analytic { args, b } => {
            let cfg = load_config(&args)?;
            prepare(&cfg)?;
            commands::cmd_analytic(&cfg, &b)
        }
        Cmd::Simulate { args } => {
            let cfg = load_config(&args)?;
            prepare(&cfg)?;
            commands::cmd_simulate(&cfg)
        }
        Cmd::Calibrate { args, input, b_lo, b_hi, tol } => {
            let cfg = load_config(&args)?;
            prepare(&cfg)?;
            commands::cmd_calibrate(&cfg, &input, b_lo, b_hi, tol)
        }
        Cmd::Curves { args, b } => {
            let cfg = load_config(&args)?;
            prepare(&cfg)?;
            commands::cmd_curves(&cfg, &b)
        }
        Cmd::Report { args, input } => {
            let cfg = load_config(&args)?;
            prepare(&cfg)?;
            commands::cmd_report(&cfg, &input)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
