//! Numerical kernel: normal distribution functions, adaptive quadrature,
//! reproducible random substreams.

pub mod normal;
pub mod quad;
pub mod rng;

pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use quad::{integrate, QuadratureSpec};
pub use rng::RngStream;
