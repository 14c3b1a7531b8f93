//! Expected Loss, Value at Risk and Expected Tail Loss.
//!
//! `alpha` is always the tail mass: a 99%-confidence VaR or ETL is
//! alpha = 0.01 here. Empirical quantiles use the lower (left-continuous)
//! order statistic at ceil(q * n).

use crate::analytics::{
    expected_loss_given_xm, market_return_pdf, market_return_quantile, structural_loss,
    MarketReturnLaw, StructuralParam, PD_CLAMP,
};
use crate::error::{Error, Result};
use crate::model::ContractSpec;
use crate::numerics::{integrate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed forms integrated over the analytic market-return law.
    AnalyticXm,
    /// Closed-form loss curve driven by an empirical X_m sample.
    AnalyticXmEmpirical,
    /// Structural loss driven by an empirical default-probability sample.
    AnalyticPdEmpirical,
    /// Plain empirical quantiles of realized losses.
    Empirical,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::AnalyticXm => "analytic-xm",
            Method::AnalyticXmEmpirical => "analytic-xm-empirical",
            Method::AnalyticPdEmpirical => "analytic-pd-empirical",
            Method::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskReport {
    pub expected_loss: f64,
    pub var: f64,
    pub etl: f64,
    /// Tail mass; reports are often labelled by the confidence level 1 - alpha.
    pub alpha: f64,
    pub method: Method,
}

impl RiskReport {
    pub fn confidence(&self) -> f64 {
        1.0 - self.alpha
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("tail mass alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Loss conditional on the market return, safe at the x_m = -1 boundary.
fn loss_of_xm(x: f64, contract: &ContractSpec, b: &StructuralParam) -> f64 {
    if x <= -1.0 + 1e-15 {
        1.0
    } else {
        expected_loss_given_xm(x, contract, b).unwrap_or(f64::NAN)
    }
}

/// Structural loss as a total function of the default probability.
fn loss_of_pd(pd: f64, b: &StructuralParam) -> f64 {
    if pd <= 0.0 {
        0.0
    } else {
        structural_loss(pd.min(1.0 - PD_CLAMP), b).unwrap_or(f64::NAN)
    }
}

/// VaR_alpha = L(x_q) at the alpha-quantile of the market return (losses
/// grow as the market falls, so the loss tail is the lower return tail).
pub fn var_analytic(
    alpha: f64,
    law: &MarketReturnLaw,
    contract: &ContractSpec,
    b: &StructuralParam,
) -> Result<f64> {
    check_alpha(alpha)?;
    let x_q = market_return_quantile(alpha, law)?;
    expected_loss_given_xm(x_q, contract, b)
}

/// ETL_alpha = (1/alpha) * integral of L(x) p(x) over the tail x <= x_q.
pub fn etl_analytic(
    alpha: f64,
    law: &MarketReturnLaw,
    contract: &ContractSpec,
    b: &StructuralParam,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_alpha(alpha)?;
    let x_q = market_return_quantile(alpha, law)?;
    let tail = integrate(
        |x| {
            if x <= -1.0 {
                0.0
            } else {
                loss_of_xm(x, contract, b) * market_return_pdf(x, law).unwrap_or(f64::NAN)
            }
        },
        -1.0,
        x_q,
        quad,
    )?;
    Ok(tail / alpha)
}

/// Expected loss over the whole market-return law.
pub fn el_analytic(
    law: &MarketReturnLaw,
    contract: &ContractSpec,
    b: &StructuralParam,
    quad: &QuadratureSpec,
) -> Result<f64> {
    integrate(
        |x| {
            if x <= -1.0 {
                0.0
            } else {
                loss_of_xm(x, contract, b) * market_return_pdf(x, law).unwrap_or(f64::NAN)
            }
        },
        -1.0,
        f64::INFINITY,
        quad,
    )
}

/// All three analytic measures in one report.
pub fn risk_analytic(
    alpha: f64,
    law: &MarketReturnLaw,
    contract: &ContractSpec,
    b: &StructuralParam,
    quad: &QuadratureSpec,
) -> Result<RiskReport> {
    Ok(RiskReport {
        expected_loss: el_analytic(law, contract, b, quad)?,
        var: var_analytic(alpha, law, contract, b)?,
        etl: etl_analytic(alpha, law, contract, b, quad)?,
        alpha,
        method: Method::AnalyticXm,
    })
}

fn check_sample_size(alpha: f64, n: usize) -> Result<()> {
    let needed = (1.0 / alpha).ceil() as usize;
    if n < needed {
        return Err(Error::InsufficientSamples { needed, got: n });
    }
    Ok(())
}

/// Lower order statistic at ceil(q * n), 1-based.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let idx = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[idx - 1]
}

/// PD-quantile route: VaR from the (1 - alpha)-quantile of default
/// probabilities pushed through the structural loss, ETL as the tail mean.
pub fn risk_from_pd_samples(
    alpha: f64,
    pd_samples: &[f64],
    b: &StructuralParam,
) -> Result<RiskReport> {
    check_alpha(alpha)?;
    check_sample_size(alpha, pd_samples.len())?;
    let mut sorted = pd_samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let idx = (((1.0 - alpha) * n as f64).ceil() as usize).clamp(1, n);
    let pd_q = sorted[idx - 1];
    let losses: Vec<f64> = sorted.iter().map(|&pd| loss_of_pd(pd, b)).collect();
    let expected_loss = losses.iter().sum::<f64>() / n as f64;
    let tail = &losses[idx - 1..];
    let etl = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok(RiskReport {
        expected_loss,
        var: loss_of_pd(pd_q, b),
        etl,
        alpha,
        method: Method::AnalyticPdEmpirical,
    })
}

/// Diffusion closed forms driven by an empirical market-return sample;
/// the "analytical result" route for processes without a closed-form law.
pub fn risk_from_xm_samples(
    alpha: f64,
    xm_samples: &[f64],
    contract: &ContractSpec,
    b: &StructuralParam,
) -> Result<RiskReport> {
    check_alpha(alpha)?;
    check_sample_size(alpha, xm_samples.len())?;
    let mut sorted = xm_samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let losses: Vec<f64> = sorted.iter().map(|&x| loss_of_xm(x, contract, b)).collect();
    let expected_loss = losses.iter().sum::<f64>() / n as f64;
    // losses decrease in x_m: the loss tail is the low-return head.
    let idx = ((alpha * n as f64).ceil() as usize).clamp(1, n);
    let tail = &losses[..idx];
    let etl = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok(RiskReport {
        expected_loss,
        var: losses[idx - 1],
        etl,
        alpha,
        method: Method::AnalyticXmEmpirical,
    })
}

/// Plain empirical quantile VaR and tail-mean ETL over realized losses.
pub fn risk_empirical(alpha: f64, loss_samples: &[f64]) -> Result<RiskReport> {
    check_alpha(alpha)?;
    check_sample_size(alpha, loss_samples.len())?;
    let mut sorted = loss_samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let expected_loss = sorted.iter().sum::<f64>() / n as f64;
    let idx = (((1.0 - alpha) * n as f64).ceil() as usize).clamp(1, n);
    let tail = &sorted[idx - 1..];
    let etl = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok(RiskReport {
        expected_loss,
        var: sorted[idx - 1],
        etl,
        alpha,
        method: Method::Empirical,
    })
}
