//! Run configuration: defaults, optional TOML config file, flag overrides.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use merton_core::analytics::{compound_b, MarketReturnLaw, StructuralParam};
use merton_core::{
    ContractSpec, DiffusionParams, GarchParams, JumpParams, ProcessSpec, Result,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    Diffusion,
    JumpDiffusion,
    Garch,
}

impl ProcessKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::Diffusion => "diffusion",
            ProcessKind::JumpDiffusion => "jump-diffusion",
            ProcessKind::Garch => "garch",
        }
    }
}

/// Model and run flags shared by every subcommand. All optional so that a
/// config file can supply values; flags override the file, which overrides
/// the built-in defaults.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// TOML config file with the same keys as the flags below
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Asset process: diffusion, jump-diffusion or garch
    #[arg(long, value_enum)]
    pub process: Option<ProcessKind>,

    /// Initial asset value V0
    #[arg(long)]
    pub v0: Option<f64>,

    /// Face value of the zero-coupon debt
    #[arg(long)]
    pub face: Option<f64>,

    /// Time to maturity in years
    #[arg(long)]
    pub maturity: Option<f64>,

    /// Number of time steps per path
    #[arg(long)]
    pub steps: Option<u32>,

    /// Annual drift
    #[arg(long)]
    pub mu: Option<f64>,

    /// Annual volatility
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Market correlation c in [0, 1)
    #[arg(long)]
    pub corr: Option<f64>,

    /// Jump intensity per year (jump-diffusion)
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Mean of the lognormal jump size (jump-diffusion)
    #[arg(long)]
    pub jump_mu: Option<f64>,

    /// Std deviation of the lognormal jump size (jump-diffusion)
    #[arg(long)]
    pub jump_sigma: Option<f64>,

    /// GARCH(1,1) constant term; default (1 - a1 - b1) * sigma^2 * dt
    #[arg(long)]
    pub garch_a0: Option<f64>,

    /// GARCH(1,1) ARCH coefficient
    #[arg(long)]
    pub garch_a1: Option<f64>,

    /// GARCH(1,1) persistence coefficient
    #[arg(long)]
    pub garch_b1: Option<f64>,

    /// Number of firms per portfolio (K)
    #[arg(long)]
    pub portfolio_size: Option<u32>,

    /// Number of market realizations (M)
    #[arg(long)]
    pub realizations: Option<u32>,

    /// Master seed for the random streams
    #[arg(long)]
    pub seed: Option<u64>,

    /// Tail mass for VaR/ETL (0.01 = 99% confidence)
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Output directory
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Worker threads (default: machine parallelism); never affects results
    #[arg(long)]
    pub threads: Option<usize>,
}

/// The same keys as the flags, for the optional TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub process: Option<ProcessKind>,
    pub v0: Option<f64>,
    pub face: Option<f64>,
    pub maturity: Option<f64>,
    pub steps: Option<u32>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub corr: Option<f64>,
    pub lambda: Option<f64>,
    pub jump_mu: Option<f64>,
    pub jump_sigma: Option<f64>,
    pub garch_a0: Option<f64>,
    pub garch_a1: Option<f64>,
    pub garch_b1: Option<f64>,
    pub portfolio_size: Option<u32>,
    pub realizations: Option<u32>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub process: ProcessKind,
    pub v0: f64,
    pub face: f64,
    pub maturity: f64,
    pub steps: u32,
    pub mu: f64,
    pub sigma: f64,
    pub corr: f64,
    pub lambda: f64,
    pub jump_mu: f64,
    pub jump_sigma: f64,
    pub garch_a0: Option<f64>,
    pub garch_a1: f64,
    pub garch_b1: f64,
    pub portfolio_size: u32,
    pub realizations: u32,
    pub seed: u64,
    pub alpha: f64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(flags: &ModelArgs, file: &FileConfig) -> Self {
        macro_rules! pick {
            ($field:ident, $default:expr) => {
                flags.$field.clone().or_else(|| file.$field.clone()).unwrap_or($default)
            };
        }
        Self {
            process: pick!(process, ProcessKind::Diffusion),
            v0: pick!(v0, 100.0),
            face: pick!(face, 75.0),
            maturity: pick!(maturity, 1.0),
            steps: pick!(steps, 250),
            mu: pick!(mu, 0.05),
            sigma: pick!(sigma, 0.15),
            corr: pick!(corr, 0.5),
            lambda: pick!(lambda, 0.005),
            jump_mu: pick!(jump_mu, 0.4),
            jump_sigma: pick!(jump_sigma, 0.3),
            garch_a0: flags.garch_a0.or(file.garch_a0),
            garch_a1: pick!(garch_a1, 0.05),
            garch_b1: pick!(garch_b1, 0.90),
            portfolio_size: pick!(portfolio_size, 500),
            realizations: pick!(realizations, 100_000),
            seed: pick!(seed, 42),
            alpha: pick!(alpha, 0.01),
            out_dir: pick!(out_dir, PathBuf::from(".")),
            threads: flags.threads.or(file.threads),
        }
    }

    pub fn dt(&self) -> f64 {
        self.maturity / self.steps as f64
    }

    pub fn contract(&self) -> Result<ContractSpec> {
        ContractSpec::new(self.v0, self.face, self.maturity, self.steps)
    }

    pub fn diffusion(&self) -> Result<DiffusionParams> {
        DiffusionParams::new(self.mu, self.sigma, self.corr)
    }

    pub fn garch(&self) -> Result<GarchParams> {
        let dt = self.dt();
        match self.garch_a0 {
            Some(a0) => {
                GarchParams::new(a0, self.garch_a1, self.garch_b1, self.sigma * dt.sqrt())
            }
            None => GarchParams::from_annual_vol(self.sigma, self.garch_a1, self.garch_b1, dt),
        }
    }

    pub fn process_spec(&self) -> Result<ProcessSpec> {
        Ok(match self.process {
            ProcessKind::Diffusion => ProcessSpec::Diffusion(self.diffusion()?),
            ProcessKind::JumpDiffusion => ProcessSpec::JumpDiffusion {
                diffusion: self.diffusion()?,
                jumps: JumpParams::new(self.lambda, self.jump_mu, self.jump_sigma)?,
            },
            ProcessKind::Garch => ProcessSpec::Garch {
                drift: self.mu,
                correlation: self.corr,
                garch: self.garch()?,
            },
        })
    }

    pub fn law(&self) -> Result<MarketReturnLaw> {
        MarketReturnLaw::new(self.mu, self.sigma, self.corr, self.maturity)
    }

    pub fn implied_b(&self) -> Result<StructuralParam> {
        compound_b(self.corr, self.sigma, self.maturity)
    }

    /// Provenance line embedded in every output file. Deliberately excludes
    /// the thread count, which never affects results.
    pub fn echo(&self, cmd: &str) -> String {
        let a0 = self
            .garch_a0
            .map(|v| v.to_string())
            .unwrap_or_else(|| "auto".to_string());
        format!(
            "# config: cmd={cmd} process={} v0={} face={} maturity={} steps={} mu={} sigma={} \
             corr={} lambda={} jump_mu={} jump_sigma={} garch_a0={a0} garch_a1={} garch_b1={} \
             portfolio_size={} realizations={} seed={} alpha={}",
            self.process.name(),
            self.v0,
            self.face,
            self.maturity,
            self.steps,
            self.mu,
            self.sigma,
            self.corr,
            self.lambda,
            self.jump_mu,
            self.jump_sigma,
            self.garch_a1,
            self.garch_b1,
            self.portfolio_size,
            self.realizations,
            self.seed,
            self.alpha,
        )
    }
}
