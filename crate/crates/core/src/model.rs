//! Contract and process parameter types plus the Merton payoff functions.

use crate::error::{Error, Result};

/// Zero-coupon debt contract for a single firm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractSpec {
    pub initial_value: f64,
    pub face_value: f64,
    pub maturity: f64,
    pub steps: u32,
}

impl ContractSpec {
    pub fn new(initial_value: f64, face_value: f64, maturity: f64, steps: u32) -> Result<Self> {
        if !(initial_value > 0.0) {
            return Err(Error::Domain(format!("initial value must be > 0, got {initial_value}")));
        }
        if !(face_value > 0.0) {
            return Err(Error::Domain(format!("face value must be > 0, got {face_value}")));
        }
        if !(maturity > 0.0) {
            return Err(Error::Domain(format!("maturity must be > 0, got {maturity}")));
        }
        if steps == 0 {
            return Err(Error::Domain("steps must be >= 1".into()));
        }
        Ok(Self { initial_value, face_value, maturity, steps })
    }

    pub fn dt(&self) -> f64 {
        self.maturity / self.steps as f64
    }
}

/// Correlated diffusion: drift, volatility and market correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub drift: f64,
    pub volatility: f64,
    pub correlation: f64,
}

impl DiffusionParams {
    pub fn new(drift: f64, volatility: f64, correlation: f64) -> Result<Self> {
        if !(volatility >= 0.0) || !volatility.is_finite() {
            return Err(Error::Domain(format!("volatility must be >= 0, got {volatility}")));
        }
        if !(0.0..=1.0).contains(&correlation) {
            return Err(Error::Domain(format!("correlation must lie in [0, 1], got {correlation}")));
        }
        if !drift.is_finite() {
            return Err(Error::Domain(format!("drift must be finite, got {drift}")));
        }
        Ok(Self { drift, volatility, correlation })
    }
}

/// Compound-Poisson jumps with shifted-lognormal sizes:
/// jump factor Lambda + 1 ~ LN(log_mean, log_sd).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpParams {
    pub intensity: f64,
    pub log_mean: f64,
    pub log_sd: f64,
}

impl JumpParams {
    pub fn new(intensity: f64, log_mean: f64, log_sd: f64) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::Domain(format!("jump intensity must be >= 0, got {intensity}")));
        }
        if !(log_sd > 0.0) {
            return Err(Error::Domain(format!("jump log-sd must be > 0, got {log_sd}")));
        }
        if !log_mean.is_finite() {
            return Err(Error::Domain(format!("jump log-mean must be finite, got {log_mean}")));
        }
        Ok(Self { intensity, log_mean, log_sd })
    }
}

/// GARCH(1,1) per-step recursion parameters. `initial_vol` is the per-step
/// volatility every firm starts from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub initial_vol: f64,
}

impl GarchParams {
    pub fn new(alpha0: f64, alpha1: f64, beta1: f64, initial_vol: f64) -> Result<Self> {
        if !(alpha0 > 0.0) {
            return Err(Error::Domain(format!("alpha0 must be > 0, got {alpha0}")));
        }
        if !(alpha1 >= 0.0) || !(beta1 >= 0.0) {
            return Err(Error::Domain("alpha1 and beta1 must be >= 0".into()));
        }
        if alpha1 + beta1 >= 1.0 {
            return Err(Error::Domain(format!(
                "alpha1 + beta1 must be < 1 for covariance stationarity, got {}",
                alpha1 + beta1
            )));
        }
        if !(initial_vol > 0.0) {
            return Err(Error::Domain(format!("initial volatility must be > 0, got {initial_vol}")));
        }
        Ok(Self { alpha0, alpha1, beta1, initial_vol })
    }

    /// Parameters whose stationary per-step variance equals
    /// `annual_vol^2 * dt`, started homogeneously at `annual_vol * sqrt(dt)`.
    pub fn from_annual_vol(annual_vol: f64, alpha1: f64, beta1: f64, dt: f64) -> Result<Self> {
        if !(annual_vol > 0.0) || !(dt > 0.0) {
            return Err(Error::Domain("annual volatility and dt must be > 0".into()));
        }
        let step_var = annual_vol * annual_vol * dt;
        Self::new((1.0 - alpha1 - beta1) * step_var, alpha1, beta1, step_var.sqrt())
    }

    pub fn stationary_step_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.alpha1 - self.beta1)
    }
}

/// Homogeneous portfolio: `size` identical contracts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioSpec {
    pub size: u32,
    pub contract: ContractSpec,
}

impl PortfolioSpec {
    pub fn new(size: u32, contract: ContractSpec) -> Result<Self> {
        if size == 0 {
            return Err(Error::Domain("portfolio size must be >= 1".into()));
        }
        Ok(Self { size, contract })
    }
}

/// Loss given default, L* = (F - V(T))/F. The caller asserts a default;
/// V(T) >= F is a contract violation, not a zero loss.
pub fn loss_given_default(terminal_value: f64, face_value: f64) -> Result<f64> {
    if !(face_value > 0.0) {
        return Err(Error::Domain(format!("face value must be > 0, got {face_value}")));
    }
    if !(terminal_value >= 0.0) {
        return Err(Error::Domain(format!("terminal value must be >= 0, got {terminal_value}")));
    }
    if terminal_value >= face_value {
        return Err(Error::Contract(format!(
            "terminal value {terminal_value} >= face value {face_value}: not a default"
        )));
    }
    Ok((face_value - terminal_value) / face_value)
}

/// Individual loss including non-default events: (1 - V/F) Theta(1 - V/F),
/// with the boundary V = F counted as non-default.
pub fn individual_loss(terminal_value: f64, face_value: f64) -> f64 {
    debug_assert!(face_value > 0.0 && terminal_value >= 0.0);
    if terminal_value < face_value {
        (face_value - terminal_value) / face_value
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lgd_total_loss() {
        assert_eq!(loss_given_default(0.0, 75.0).unwrap(), 1.0);
    }

    #[test]
    fn lgd_partial() {
        assert!((loss_given_default(60.0, 75.0).unwrap() - 0.2).abs() < 1e-15);
        let near = loss_given_default(74.999, 75.0).unwrap();
        assert!((near - 1.3333333333e-5).abs() < 1e-12, "got {near}");
    }

    #[test]
    fn lgd_rejects_non_default() {
        assert!(matches!(loss_given_default(75.0, 75.0), Err(Error::Contract(_))));
        assert!(matches!(loss_given_default(90.0, 75.0), Err(Error::Contract(_))));
    }

    #[test]
    fn individual_loss_branches() {
        assert_eq!(individual_loss(90.0, 75.0), 0.0);
        assert_eq!(individual_loss(75.0, 75.0), 0.0);
        assert!((individual_loss(60.0, 75.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn individual_loss_matches_lgd_in_default() {
        for v in [0.0, 10.0, 42.5, 74.9] {
            assert_eq!(individual_loss(v, 75.0), loss_given_default(v, 75.0).unwrap());
        }
    }

    #[test]
    fn contract_validation() {
        assert!(ContractSpec::new(100.0, 75.0, 1.0, 250).is_ok());
        assert!(ContractSpec::new(0.0, 75.0, 1.0, 250).is_err());
        assert!(ContractSpec::new(100.0, -1.0, 1.0, 250).is_err());
        assert!(ContractSpec::new(100.0, 75.0, 1.0, 0).is_err());
    }

    #[test]
    fn garch_validation() {
        assert!(GarchParams::new(1e-6, 0.05, 0.90, 0.01).is_ok());
        assert!(GarchParams::new(1e-6, 0.5, 0.5, 0.01).is_err());
        assert!(GarchParams::new(0.0, 0.05, 0.90, 0.01).is_err());
        let g = GarchParams::from_annual_vol(0.15, 0.05, 0.90, 1.0 / 250.0).unwrap();
        let want = 0.15 * 0.15 / 250.0;
        assert!((g.stationary_step_variance() - want).abs() < 1e-18);
        assert!((g.initial_vol - want.sqrt()).abs() < 1e-15);
    }
}
