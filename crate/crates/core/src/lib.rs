//! Structural credit portfolio engine.
//!
//! A zero-coupon obligor defaults at maturity when its asset value ends
//! below the face value of its debt; the recovery is the terminal asset
//! value divided by the face value. Asset paths share a common market
//! factor, which couples default rates and recovery rates across the
//! portfolio. The crate provides
//!
//! * closed-form conditional default/recovery/loss laws and the
//!   one-parameter recovery-versus-default-rate curve they imply
//!   ([`analytics`]),
//! * discrete-time path engines (correlated diffusion, jump-diffusion,
//!   GARCH(1,1)) with reproducible counter-based random streams
//!   ([`processes`], [`numerics`]),
//! * portfolio Monte Carlo with binned curve and histogram summaries
//!   ([`montecarlo`]),
//! * expected loss, value-at-risk, and expected tail loss by analytic
//!   and empirical routes ([`riskmeasures`]),
//! * a least-squares fit of the curve parameter to observed default and
//!   recovery rates ([`calibration`]).

pub mod analytics;
pub mod calibration;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod processes;
pub mod riskmeasures;

pub use error::{Error, Result};
pub use model::{
    individual_loss, loss_given_default, ContractSpec, DiffusionParams, GarchParams, JumpParams,
    PortfolioSpec,
};
pub use processes::{MarketFactorPath, ProcessSpec, TerminalValues};

pub use analytics::{compound_b, structural_loss, structural_recovery, MarketReturnLaw,
    StructuralParam};
pub use montecarlo::{run_simulation, SimConfig, SimulationResult};
pub use riskmeasures::{risk_analytic, risk_empirical, Method, RiskReport};
