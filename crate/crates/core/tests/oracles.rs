//! Cross-checks of the closed-form conditional laws and risk measures
//! against direct quadrature of the underlying densities, plus a few
//! frozen reference values computed with an independent implementation.

use merton_core::analytics::{
    compound_b, default_prob_given_xm, expected_loss_given_xm, market_return_pdf,
    MarketReturnLaw, StructuralParam,
};
use merton_core::numerics::{integrate, std_normal_cdf, std_normal_pdf, QuadratureSpec};
use merton_core::riskmeasures::{el_analytic, etl_analytic, risk_analytic, var_analytic};
use merton_core::ContractSpec;

const V0: f64 = 100.0;
const FACE: f64 = 75.0;
const MATURITY: f64 = 1.0;
const CORR: f64 = 0.5;
const DRIFT: f64 = 0.05;
const VOL: f64 = 0.15;

fn contract() -> ContractSpec {
    ContractSpec::new(V0, FACE, MATURITY, 250).unwrap()
}

fn b() -> StructuralParam {
    compound_b(CORR, VOL, MATURITY).unwrap()
}

fn law() -> MarketReturnLaw {
    MarketReturnLaw::new(DRIFT, VOL, CORR, MATURITY).unwrap()
}

/// Density of the terminal firm value conditional on the market return.
fn firm_value_density(v: f64, x_m: f64, b: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let log_mean = V0.ln() + (1.0 + x_m).ln() - 0.5 * b * b;
    std_normal_pdf((v.ln() - log_mean) / b) / (v * b)
}

#[test]
fn conditional_default_probability_matches_value_quadrature() {
    let spec = QuadratureSpec::default();
    let contract = contract();
    let b = b();
    for x_m in [-0.3, -0.1, 0.0, 0.03, 0.2] {
        let closed = default_prob_given_xm(x_m, &contract, &b).unwrap();
        let quad = integrate(|v| firm_value_density(v, x_m, b.b), 1e-12, FACE, &spec).unwrap();
        assert!(
            (closed - quad).abs() < 1e-8,
            "x_m = {x_m}: closed {closed}, quadrature {quad}"
        );
    }
}

#[test]
fn conditional_expected_loss_matches_value_quadrature() {
    let spec = QuadratureSpec::default();
    let contract = contract();
    let b = b();
    for x_m in [-0.3, -0.1, 0.0, 0.03, 0.2] {
        let closed = expected_loss_given_xm(x_m, &contract, &b).unwrap();
        let quad = integrate(
            |v| (FACE - v) / FACE * firm_value_density(v, x_m, b.b),
            1e-12,
            FACE,
            &spec,
        )
        .unwrap();
        assert!(
            (closed - quad).abs() < 1e-8,
            "x_m = {x_m}: closed {closed}, quadrature {quad}"
        );
    }
}

#[test]
fn normal_cdf_matches_density_quadrature_in_the_tail() {
    // the argument that produces the reference default probability at x_m = 0
    let arg = -2.6592595814970617;
    let spec = QuadratureSpec::default();
    let quad = integrate(std_normal_pdf, f64::NEG_INFINITY, arg, &spec).unwrap();
    let closed = std_normal_cdf(arg).unwrap();
    assert!((closed - quad).abs() < 1e-10, "closed {closed}, quadrature {quad}");
    assert!((closed - 3.915629992326962e-3).abs() < 1e-12);
}

#[test]
fn expected_loss_two_routes_agree() {
    // route 1: integrate the conditional expected loss over the market law
    let el = el_analytic(&law(), &contract(), &b(), &QuadratureSpec::default()).unwrap();

    // route 2: the unconditional terminal value is lognormal, so the
    // expected loss has its own closed form
    let m = V0.ln() + DRIFT * MATURITY - 0.5 * VOL * VOL * MATURITY;
    let s = VOL * MATURITY.sqrt();
    let d = (FACE.ln() - m) / s;
    let closed = std_normal_cdf(d).unwrap()
        - V0 * (DRIFT * MATURITY).exp() / FACE * std_normal_cdf(d - s).unwrap();

    assert!((el - closed).abs() < 1e-9, "integral {el}, closed form {closed}");
    assert!((closed - 7.476812585868707e-4).abs() < 1e-12);
}

#[test]
fn market_density_is_normalized_with_correct_mean() {
    let spec = QuadratureSpec::default();
    let law = law();
    let mass = integrate(|x| market_return_pdf(x, &law).unwrap_or(0.0), -1.0, f64::INFINITY, &spec)
        .unwrap();
    assert!((mass - 1.0).abs() < 1e-9, "total mass {mass}");
    let mean =
        integrate(|x| x * market_return_pdf(x, &law).unwrap_or(0.0), -1.0, f64::INFINITY, &spec)
            .unwrap();
    let closed = (law.log_mean() + 0.5 * law.log_sd() * law.log_sd()).exp() - 1.0;
    assert!((mean - closed).abs() < 1e-9, "mean {mean}, closed {closed}");
}

#[test]
fn tail_measures_match_reference_values() {
    let spec = QuadratureSpec::default();
    let report = risk_analytic(0.01, &law(), &contract(), &b(), &spec).unwrap();
    assert!(
        (report.expected_loss - 7.476812585868737e-4).abs() < 1e-10,
        "EL = {}",
        report.expected_loss
    );
    assert!((report.var - 1.3193633452208559e-2).abs() < 1e-10, "VaR = {}", report.var);
    assert!((report.etl - 2.4384619950644115e-2).abs() < 1e-8, "ETL = {}", report.etl);
}

#[test]
fn etl_dominates_var_across_levels() {
    let spec = QuadratureSpec::default();
    let contract = contract();
    let law = law();
    let b = b();
    for alpha in [0.001, 0.01, 0.05, 0.1] {
        let var = var_analytic(alpha, &law, &contract, &b).unwrap();
        let etl = etl_analytic(alpha, &law, &contract, &b, &spec).unwrap();
        assert!(etl >= var, "alpha = {alpha}: ETL {etl} < VaR {var}");
    }
}

#[test]
fn etl_matches_quantile_route() {
    // (1/alpha) * integral_0^alpha L(F^-1(q)) dq
    let spec = QuadratureSpec::default();
    let contract = contract();
    let law = law();
    let b = b();
    let alpha = 0.01;
    let direct = etl_analytic(alpha, &law, &contract, &b, &spec).unwrap();
    let via_quantile = integrate(
        |q| {
            if q <= 0.0 {
                return 0.0;
            }
            let x = merton_core::analytics::market_return_quantile(q, &law).unwrap();
            expected_loss_given_xm(x, &contract, &b).unwrap()
        },
        0.0,
        alpha,
        &spec,
    )
    .unwrap()
        / alpha;
    assert!(
        (direct - via_quantile).abs() < 1e-6,
        "direct {direct}, quantile route {via_quantile}"
    );
}
