//! Discrete-time terminal-value engines for the three asset processes.
//!
//! All engines share one substream layout per market realization:
//! substream 0 holds the market normals, substream 1 the market jumps,
//! and firm k owns substreams 2 + 2k (normals) and 3 + 2k (jumps). The
//! jump-free engines never touch the jump substreams, so a jump-diffusion
//! run with zero intensity is bit-identical to the plain diffusion.

use crate::error::Result;
use crate::model::{ContractSpec, DiffusionParams, GarchParams, JumpParams};
use crate::numerics::RngStream;

pub const MARKET_NORMALS: u32 = 0;
pub const MARKET_JUMPS: u32 = 1;

pub fn firm_normals_substream(k: u32) -> u32 {
    2 + 2 * k
}

pub fn firm_jumps_substream(k: u32) -> u32 {
    3 + 2 * k
}

/// One realization of the shared market factor.
#[derive(Debug, Clone)]
pub struct MarketFactorPath {
    pub normals: Vec<f64>,
    pub jump_increments: Option<Vec<f64>>,
}

/// Terminal values of all firms in one market realization, plus the
/// cross-sectional market return.
#[derive(Debug, Clone)]
pub struct TerminalValues {
    pub values: Vec<f64>,
    pub market_return: f64,
}

/// Process choice with its full parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessSpec {
    Diffusion(DiffusionParams),
    JumpDiffusion {
        diffusion: DiffusionParams,
        jumps: JumpParams,
    },
    Garch {
        drift: f64,
        correlation: f64,
        garch: GarchParams,
    },
}

impl ProcessSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessSpec::Diffusion(_) => "diffusion",
            ProcessSpec::JumpDiffusion { .. } => "jump-diffusion",
            ProcessSpec::Garch { .. } => "garch",
        }
    }
}

pub fn simulate(
    process: &ProcessSpec,
    contract: &ContractSpec,
    portfolio_size: u32,
    stream: &RngStream,
) -> Result<TerminalValues> {
    match process {
        ProcessSpec::Diffusion(p) => Ok(simulate_diffusion(contract, p, portfolio_size, stream)),
        ProcessSpec::JumpDiffusion { diffusion, jumps } => {
            simulate_jump_diffusion(contract, diffusion, jumps, portfolio_size, stream)
        }
        ProcessSpec::Garch {
            drift,
            correlation,
            garch,
        } => Ok(simulate_garch(contract, *drift, garch, *correlation, portfolio_size, stream)),
    }
}

pub fn simulate_diffusion(
    contract: &ContractSpec,
    params: &DiffusionParams,
    portfolio_size: u32,
    stream: &RngStream,
) -> TerminalValues {
    let n = contract.steps as usize;
    let dt = contract.dt();
    let sqrt_dt = dt.sqrt();
    let mu_dt = params.drift * dt;
    let market_coef = params.correlation.sqrt() * params.volatility * sqrt_dt;
    let idio_coef = (1.0 - params.correlation).sqrt() * params.volatility * sqrt_dt;

    let mut market = stream.substream(MARKET_NORMALS);
    let market_term: Vec<f64> = (0..n)
        .map(|_| 1.0 + mu_dt + market_coef * market.draw_standard_normal())
        .collect();

    let mut values = Vec::with_capacity(portfolio_size as usize);
    let mut sum = 0.0;
    for k in 0..portfolio_size {
        let mut rng = stream.substream(firm_normals_substream(k));
        let mut v = contract.initial_value;
        for base in &market_term {
            let factor = base + idio_coef * rng.draw_standard_normal();
            v *= factor.max(0.0);
        }
        sum += v;
        values.push(v);
    }
    let market_return = sum / (portfolio_size as f64 * contract.initial_value) - 1.0;
    TerminalValues {
        values,
        market_return,
    }
}

pub fn simulate_jump_diffusion(
    contract: &ContractSpec,
    diffusion: &DiffusionParams,
    jumps: &JumpParams,
    portfolio_size: u32,
    stream: &RngStream,
) -> Result<TerminalValues> {
    let n = contract.steps as usize;
    let dt = contract.dt();
    let sqrt_dt = dt.sqrt();
    let mu_dt = diffusion.drift * dt;
    let market_coef = diffusion.correlation.sqrt() * diffusion.volatility * sqrt_dt;
    let idio_coef = (1.0 - diffusion.correlation).sqrt() * diffusion.volatility * sqrt_dt;
    let step_intensity = jumps.intensity * dt;

    let mut market = stream.substream(MARKET_NORMALS);
    let mut base_term: Vec<f64> = (0..n)
        .map(|_| 1.0 + mu_dt + market_coef * market.draw_standard_normal())
        .collect();
    if step_intensity > 0.0 {
        let mut market_jumps = stream.substream(MARKET_JUMPS);
        for term in base_term.iter_mut() {
            *term += compound_poisson_increment(&mut market_jumps, step_intensity, jumps)?;
        }
    }

    let mut values = Vec::with_capacity(portfolio_size as usize);
    let mut sum = 0.0;
    for k in 0..portfolio_size {
        let mut rng = stream.substream(firm_normals_substream(k));
        let mut v = contract.initial_value;
        if step_intensity > 0.0 {
            let mut jump_rng = stream.substream(firm_jumps_substream(k));
            for base in &base_term {
                let factor = base
                    + idio_coef * rng.draw_standard_normal()
                    + compound_poisson_increment(&mut jump_rng, step_intensity, jumps)?;
                v *= factor.max(0.0);
            }
        } else {
            for base in &base_term {
                let factor = base + idio_coef * rng.draw_standard_normal();
                v *= factor.max(0.0);
            }
        }
        sum += v;
        values.push(v);
    }
    let market_return = sum / (portfolio_size as f64 * contract.initial_value) - 1.0;
    Ok(TerminalValues {
        values,
        market_return,
    })
}

/// Sum of n ~ Poisson(step_intensity) jump factors, each
/// Lambda + 1 ~ LN(log_mean, log_sd). Summed within a step, not compounded.
fn compound_poisson_increment(
    rng: &mut RngStream,
    step_intensity: f64,
    jumps: &JumpParams,
) -> Result<f64> {
    let count = rng.draw_poisson(step_intensity)?;
    let mut increment = 0.0;
    for _ in 0..count {
        let z = rng.draw_standard_normal();
        increment += (jumps.log_mean + jumps.log_sd * z).exp() - 1.0;
    }
    Ok(increment)
}

pub fn simulate_garch(
    contract: &ContractSpec,
    drift: f64,
    garch: &GarchParams,
    correlation: f64,
    portfolio_size: u32,
    stream: &RngStream,
) -> TerminalValues {
    let n = contract.steps as usize;
    let dt = contract.dt();
    let mu_dt = drift * dt;
    let sqrt_c = correlation.sqrt();
    let sqrt_1mc = (1.0 - correlation).sqrt();

    let mut market = stream.substream(MARKET_NORMALS);
    let market_normals: Vec<f64> = (0..n).map(|_| market.draw_standard_normal()).collect();

    let mut values = Vec::with_capacity(portfolio_size as usize);
    let mut sum = 0.0;
    for k in 0..portfolio_size {
        let mut rng = stream.substream(firm_normals_substream(k));
        let mut v = contract.initial_value;
        let mut var = garch.initial_vol * garch.initial_vol;
        for eta in &market_normals {
            let eps = rng.draw_standard_normal();
            let r = var.sqrt() * (sqrt_c * eta + sqrt_1mc * eps);
            v *= (1.0 + mu_dt + r).max(0.0);
            var = garch.alpha0 + garch.alpha1 * r * r + garch.beta1 * var;
        }
        sum += v;
        values.push(v);
    }
    let market_return = sum / (portfolio_size as f64 * contract.initial_value) - 1.0;
    TerminalValues {
        values,
        market_return,
    }
}
