//! Closed-form diffusion analytics: the market-return law, conditional
//! default/recovery/loss, the one-parameter structural recovery and loss
//! relations, and density transforms.

use crate::error::{Error, Result};
use crate::model::ContractSpec;
use crate::numerics::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// Quantiles are clamped here before the inverse cdf so that curve
/// evaluation at extreme default probabilities stays finite.
pub const PD_CLAMP: f64 = 1e-12;

/// The compound parameter B governing the recovery-default relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralParam {
    pub b: f64,
}

impl StructuralParam {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Domain(format!("B must be > 0, got {b}")));
        }
        Ok(Self { b })
    }
}

/// B = sqrt((1 - c) sigma^2 T).
pub fn compound_b(correlation: f64, volatility: f64, maturity: f64) -> Result<StructuralParam> {
    if !(0.0..=1.0).contains(&correlation) {
        return Err(Error::Domain(format!("correlation must lie in [0, 1], got {correlation}")));
    }
    if !(volatility > 0.0) || !(maturity > 0.0) {
        return Err(Error::Domain("volatility and maturity must be > 0".into()));
    }
    if correlation == 1.0 {
        return Err(Error::DegenerateB);
    }
    StructuralParam::new(((1.0 - correlation) * volatility * volatility * maturity).sqrt())
}

/// Shifted lognormal law of the market return: ln(1 + X_m) is normal with
/// mean (mu - c sigma^2 / 2) T and variance c sigma^2 T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketReturnLaw {
    pub drift: f64,
    pub volatility: f64,
    pub correlation: f64,
    pub maturity: f64,
}

impl MarketReturnLaw {
    pub fn new(drift: f64, volatility: f64, correlation: f64, maturity: f64) -> Result<Self> {
        if !(correlation * volatility * volatility * maturity > 0.0) {
            return Err(Error::Domain(
                "market return law is degenerate: c sigma^2 T must be > 0".into(),
            ));
        }
        if correlation > 1.0 {
            return Err(Error::Domain(format!("correlation must lie in [0, 1], got {correlation}")));
        }
        Ok(Self { drift, volatility, correlation, maturity })
    }

    pub fn log_mean(&self) -> f64 {
        (self.drift - 0.5 * self.correlation * self.volatility * self.volatility) * self.maturity
    }

    pub fn log_sd(&self) -> f64 {
        (self.correlation * self.volatility * self.volatility * self.maturity).sqrt()
    }
}

/// Log-distance to default: A = ln(F/V0) - ln(1 + x_m).
pub fn log_distance_a(x_m: f64, contract: &ContractSpec) -> Result<f64> {
    if !(x_m > -1.0) {
        return Err(Error::Domain(format!("market return must exceed -1, got {x_m}")));
    }
    Ok((contract.face_value / contract.initial_value).ln() - x_m.ln_1p())
}

pub fn market_return_pdf(x_m: f64, law: &MarketReturnLaw) -> Result<f64> {
    if !(x_m > -1.0) {
        return Err(Error::Domain(format!("market return must exceed -1, got {x_m}")));
    }
    let s = law.log_sd();
    let z = (x_m.ln_1p() - law.log_mean()) / s;
    Ok(std_normal_pdf(z) / (s * (1.0 + x_m)))
}

pub fn market_return_cdf(x_m: f64, law: &MarketReturnLaw) -> Result<f64> {
    if !(x_m > -1.0) {
        return Err(Error::Domain(format!("market return must exceed -1, got {x_m}")));
    }
    std_normal_cdf((x_m.ln_1p() - law.log_mean()) / law.log_sd())
}

pub fn market_return_quantile(q: f64, law: &MarketReturnLaw) -> Result<f64> {
    let z = std_normal_quantile(q)?;
    Ok((law.log_mean() + law.log_sd() * z).exp() - 1.0)
}

/// P_D(x_m) = Phi((A + B^2/2) / B).
pub fn default_prob_given_xm(
    x_m: f64,
    contract: &ContractSpec,
    b: &StructuralParam,
) -> Result<f64> {
    let a = log_distance_a(x_m, contract)?;
    std_normal_cdf((a + 0.5 * b.b * b.b) / b.b)
}

/// Expected loss given default conditional on the market return, the
/// bracketed closed form divided by P_D.
pub fn expected_lgd_given_xm(
    x_m: f64,
    contract: &ContractSpec,
    b: &StructuralParam,
) -> Result<f64> {
    let a = log_distance_a(x_m, contract)?;
    let pd = std_normal_cdf((a + 0.5 * b.b * b.b) / b.b)?;
    if pd <= 0.0 {
        return Err(Error::Domain(
            "conditional default probability underflows to zero; LGD undefined".into(),
        ));
    }
    let recovery = (-a).exp() * std_normal_cdf((a - 0.5 * b.b * b.b) / b.b)? / pd;
    Ok(1.0 - recovery)
}

pub fn expected_recovery_given_xm(
    x_m: f64,
    contract: &ContractSpec,
    b: &StructuralParam,
) -> Result<f64> {
    Ok(1.0 - expected_lgd_given_xm(x_m, contract, b)?)
}

/// <L(x_m)> = P_D(x_m) <L*(x_m)>; returns 0 where P_D underflows.
pub fn expected_loss_given_xm(
    x_m: f64,
    contract: &ContractSpec,
    b: &StructuralParam,
) -> Result<f64> {
    let a = log_distance_a(x_m, contract)?;
    let pd = std_normal_cdf((a + 0.5 * b.b * b.b) / b.b)?;
    if pd <= 0.0 {
        return Ok(0.0);
    }
    let recovery_mass = (-a).exp() * std_normal_cdf((a - 0.5 * b.b * b.b) / b.b)?;
    Ok(pd - recovery_mass)
}

/// The structural recovery rate:
/// <R(P_D)> = exp(-B Phi^-1(P_D) + B^2/2) Phi(Phi^-1(P_D) - B) / P_D.
pub fn structural_recovery(p_d: f64, b: &StructuralParam) -> Result<f64> {
    if !(p_d > 0.0 && p_d < 1.0) {
        return Err(Error::Domain(format!("default probability must lie in (0, 1), got {p_d}")));
    }
    let p = p_d.clamp(PD_CLAMP, 1.0 - PD_CLAMP);
    let z = std_normal_quantile(p)?;
    let r = (-b.b * z + 0.5 * b.b * b.b).exp() * std_normal_cdf(z - b.b)? / p;
    Ok(r.min(1.0))
}

/// The structural loss:
/// <L(P_D)> = P_D - exp(-B Phi^-1(P_D) + B^2/2) Phi(Phi^-1(P_D) - B).
pub fn structural_loss(p_d: f64, b: &StructuralParam) -> Result<f64> {
    if !(p_d > 0.0 && p_d < 1.0) {
        return Err(Error::Domain(format!("default probability must lie in (0, 1), got {p_d}")));
    }
    let p = p_d.clamp(PD_CLAMP, 1.0 - PD_CLAMP);
    let z = std_normal_quantile(p)?;
    let l = p - (-b.b * z + 0.5 * b.b * b.b).exp() * std_normal_cdf(z - b.b)?;
    Ok(l.max(0.0))
}

/// A = B Phi^-1(P_D) - B^2/2, the inverse of P_D(A).
pub fn a_from_pd(p_d: f64, b: &StructuralParam) -> Result<f64> {
    if !(p_d > 0.0 && p_d < 1.0) {
        return Err(Error::Domain(format!("default probability must lie in (0, 1), got {p_d}")));
    }
    Ok(b.b * std_normal_quantile(p_d)? - 0.5 * b.b * b.b)
}

/// The market return at which the conditional default probability equals
/// `p_d`; inverse of `default_prob_given_xm` in x_m.
pub fn xm_from_pd(p_d: f64, contract: &ContractSpec, b: &StructuralParam) -> Result<f64> {
    let a = a_from_pd(p_d, b)?;
    Ok(contract.face_value / contract.initial_value * (-a).exp() - 1.0)
}

/// A density tabulated on an ordered abscissa grid.
#[derive(Debug, Clone, Default)]
pub struct TabulatedDensity {
    /// (abscissa, density) pairs, sorted by abscissa.
    pub points: Vec<(f64, f64)>,
}

impl TabulatedDensity {
    /// Trapezoidal integral of the density over its tabulated support.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.points, |_x, d| d)
    }

    /// Trapezoidal mean, integral of x * density.
    pub fn mean(&self) -> f64 {
        trapezoid(&self.points, |x, d| x * d)
    }
}

fn trapezoid(points: &[(f64, f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
    points
        .windows(2)
        .map(|w| {
            let (x0, d0) = w[0];
            let (x1, d1) = w[1];
            0.5 * (f(x0, d0) + f(x1, d1)) * (x1 - x0)
        })
        .sum()
}

/// Central finite-difference step for the loss derivative.
fn fd_step(x: f64) -> f64 {
    (1e-4 * (1.0 + x.abs())).max(1e-6)
}

/// Transform the market-return pdf into the portfolio-loss pdf,
/// p_L(L) = p_Xm(x) / |L'(x)|, tabulated on the given x_m grid.
pub fn loss_pdf_from_market(
    law: &MarketReturnLaw,
    contract: &ContractSpec,
    b: &StructuralParam,
    xm_grid: &[f64],
) -> Result<TabulatedDensity> {
    if xm_grid.is_empty() {
        return Err(Error::EmptyData("empty x_m grid".into()));
    }
    let mut points = Vec::with_capacity(xm_grid.len());
    for &x in xm_grid {
        let h = fd_step(x).min(0.5 * (x + 1.0));
        let lp = expected_loss_given_xm(x + h, contract, b)?;
        let lm = expected_loss_given_xm(x - h, contract, b)?;
        let deriv = (lp - lm) / (2.0 * h);
        if deriv.abs() < 1e-300 {
            return Err(Error::GridRefinement(format!(
                "loss derivative vanishes at x_m = {x}; refine or trim the grid"
            )));
        }
        let loss = expected_loss_given_xm(x, contract, b)?;
        let density = market_return_pdf(x, law)? / deriv.abs();
        points.push((loss, density));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(TabulatedDensity { points })
}

/// Transform an empirical default-probability distribution into the
/// portfolio-loss pdf via the structural loss relation,
/// p_L(L) = p_PD(P_D) / |L'(P_D)|. The PD density is a histogram over the
/// given bin edges.
pub fn loss_pdf_from_pd(
    pd_samples: &[f64],
    b: &StructuralParam,
    bin_edges: &[f64],
) -> Result<TabulatedDensity> {
    if pd_samples.is_empty() {
        return Err(Error::EmptyData("no default-probability samples".into()));
    }
    if bin_edges.len() < 2 {
        return Err(Error::Domain("need at least two bin edges".into()));
    }
    let n = pd_samples.len() as f64;
    let mut counts = vec![0u64; bin_edges.len() - 1];
    for &pd in pd_samples {
        if let Some(idx) = bin_index(bin_edges, pd) {
            counts[idx] += 1;
        }
    }
    let mut points = Vec::new();
    for (i, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let center = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
        let width = bin_edges[i + 1] - bin_edges[i];
        let pd_density = count as f64 / (n * width);
        let h = (fd_step(center) * 1e-2).min(0.25 * width).min(0.5 * center);
        let lp = structural_loss((center + h).min(1.0 - PD_CLAMP), b)?;
        let lm = structural_loss((center - h).max(PD_CLAMP), b)?;
        let deriv = (lp - lm) / (2.0 * h);
        if deriv.abs() < 1e-300 {
            return Err(Error::GridRefinement(format!(
                "loss derivative vanishes at P_D = {center}"
            )));
        }
        points.push((structural_loss(center, b)?, pd_density / deriv.abs()));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(TabulatedDensity { points })
}

pub(crate) fn bin_index(edges: &[f64], x: f64) -> Option<usize> {
    if x < edges[0] || x > edges[edges.len() - 1] {
        return None;
    }
    match edges.binary_search_by(|e| e.total_cmp(&x)) {
        Ok(i) => Some(i.min(edges.len() - 2)),
        Err(i) => Some(i - 1),
    }
}
