//! Nested Monte Carlo driver: inner loop over firms, outer loop over
//! market realizations, with per-realization estimators and aggregation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{individual_loss, ContractSpec};
use crate::numerics::RngStream;
use crate::processes::{simulate, ProcessSpec};

/// Estimators of one market realization: Eqs-of-motion output reduced to
/// (X_m, N_D, P_D hat, L hat, R hat).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioOutcome {
    pub realization: u32,
    pub x_m: f64,
    pub n_default: u32,
    pub pd_hat: f64,
    pub loss_hat: f64,
    /// Absent when no firm defaulted; the recovery estimator divides by N_D.
    pub recovery_hat: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub process: ProcessSpec,
    pub contract: ContractSpec,
    pub portfolio_size: u32,
    pub realizations: u32,
    pub master_seed: u64,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub outcomes: Vec<PortfolioOutcome>,
    pub config: SimConfig,
    pub elapsed: std::time::Duration,
}

impl SimulationResult {
    pub fn pd_samples(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.pd_hat).collect()
    }

    pub fn loss_samples(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.loss_hat).collect()
    }

    pub fn xm_samples(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.x_m).collect()
    }
}

pub fn run_realization(
    process: &ProcessSpec,
    contract: &ContractSpec,
    portfolio_size: u32,
    stream: &RngStream,
) -> Result<PortfolioOutcome> {
    let tv = simulate(process, contract, portfolio_size, stream)?;
    let k = portfolio_size as f64;
    let mut n_default = 0u32;
    let mut loss_sum = 0.0;
    for &v in &tv.values {
        if v < contract.face_value {
            n_default += 1;
            loss_sum += individual_loss(v, contract.face_value);
        }
    }
    let loss_hat = loss_sum / k;
    let recovery_hat = if n_default > 0 {
        Some(1.0 - k * loss_hat / n_default as f64)
    } else {
        None
    };
    Ok(PortfolioOutcome {
        realization: stream.stream_index(),
        x_m: tv.market_return,
        n_default,
        pd_hat: n_default as f64 / k,
        loss_hat,
        recovery_hat,
    })
}

/// Run the outer loop. Realizations are independent through the stream
/// index, so the result is identical for any worker count.
pub fn run_simulation(config: &SimConfig) -> Result<SimulationResult> {
    if config.realizations == 0 {
        return Err(Error::Domain("need at least one realization".into()));
    }
    let start = std::time::Instant::now();
    let outcomes: Result<Vec<PortfolioOutcome>> = (0..config.realizations)
        .into_par_iter()
        .map(|m| {
            let stream = RngStream::new(config.master_seed, m, 0);
            run_realization(&config.process, &config.contract, config.portfolio_size, &stream)
        })
        .collect();
    Ok(SimulationResult {
        outcomes: outcomes?,
        config: config.clone(),
        elapsed: start.elapsed(),
    })
}

/// Axes a binned curve can be built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    PdHat,
    Xm,
    LossHat,
    RecoveryHat,
}

fn axis_value(outcome: &PortfolioOutcome, axis: Axis) -> Option<f64> {
    match axis {
        Axis::PdHat => Some(outcome.pd_hat),
        Axis::Xm => Some(outcome.x_m),
        Axis::LossHat => Some(outcome.loss_hat),
        Axis::RecoveryHat => outcome.recovery_hat,
    }
}

/// Local averages of y over bins in x; empty bins are omitted.
#[derive(Debug, Clone, Default)]
pub struct BinnedCurve {
    pub x_means: Vec<f64>,
    pub y_means: Vec<f64>,
    pub counts: Vec<u64>,
}

pub fn bin_curve(
    outcomes: &[PortfolioOutcome],
    x_axis: Axis,
    y_axis: Axis,
    edges: &[f64],
) -> Result<BinnedCurve> {
    if edges.len() < 2 {
        return Err(Error::Domain("need at least two bin edges".into()));
    }
    let nbins = edges.len() - 1;
    let mut x_sum = vec![0.0; nbins];
    let mut y_sum = vec![0.0; nbins];
    let mut counts = vec![0u64; nbins];
    for o in outcomes {
        let (Some(x), Some(y)) = (axis_value(o, x_axis), axis_value(o, y_axis)) else {
            continue;
        };
        if let Some(i) = crate::analytics::bin_index(edges, x) {
            x_sum[i] += x;
            y_sum[i] += y;
            counts[i] += 1;
        }
    }
    let mut curve = BinnedCurve::default();
    for i in 0..nbins {
        if counts[i] == 0 {
            continue;
        }
        let n = counts[i] as f64;
        curve.x_means.push(x_sum[i] / n);
        curve.y_means.push(y_sum[i] / n);
        curve.counts.push(counts[i]);
    }
    Ok(curve)
}

/// A histogram normalized to unit integral.
#[derive(Debug, Clone, Default)]
pub struct Histogram {
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    pub densities: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples below the first or above the last edge.
    pub out_of_range: u64,
}

pub fn empirical_histogram(samples: &[f64], edges: &[f64]) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptyData("no samples to histogram".into()));
    }
    if edges.len() < 2 {
        return Err(Error::Domain("need at least two bin edges".into()));
    }
    let nbins = edges.len() - 1;
    let mut counts = vec![0u64; nbins];
    let mut out_of_range = 0u64;
    for &s in samples {
        match crate::analytics::bin_index(edges, s) {
            Some(i) => counts[i] += 1,
            None => out_of_range += 1,
        }
    }
    let n = samples.len() as f64;
    let mut hist = Histogram {
        out_of_range,
        ..Default::default()
    };
    for i in 0..nbins {
        let width = edges[i + 1] - edges[i];
        hist.centers.push(0.5 * (edges[i] + edges[i + 1]));
        hist.widths.push(width);
        hist.densities.push(counts[i] as f64 / (n * width));
        hist.counts.push(counts[i]);
    }
    Ok(hist)
}

pub fn linear_edges(lo: f64, hi: f64, nbins: usize) -> Vec<f64> {
    (0..=nbins)
        .map(|i| lo + (hi - lo) * i as f64 / nbins as f64)
        .collect()
}

/// Log-spaced edges, for resolving fat loss tails.
pub fn log_spaced_edges(lo: f64, hi: f64, nbins: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..=nbins)
        .map(|i| (llo + (lhi - llo) * i as f64 / nbins as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiffusionParams;

    fn config(m: u32) -> SimConfig {
        SimConfig {
            process: ProcessSpec::Diffusion(DiffusionParams::new(0.05, 0.15, 0.5).unwrap()),
            contract: ContractSpec::new(100.0, 75.0, 1.0, 50).unwrap(),
            portfolio_size: 100,
            realizations: m,
            master_seed: 42,
        }
    }

    #[test]
    fn noise_free_realization_has_no_defaults() {
        let contract = ContractSpec::new(100.0, 75.0, 1.0, 250).unwrap();
        let process = ProcessSpec::Diffusion(DiffusionParams::new(0.05, 0.0, 0.5).unwrap());
        let stream = RngStream::new(0, 0, 0);
        let o = run_realization(&process, &contract, 50, &stream).unwrap();
        assert_eq!(o.n_default, 0);
        assert_eq!(o.loss_hat, 0.0);
        assert!(o.recovery_hat.is_none());
    }

    #[test]
    fn all_defaults_give_unit_loss() {
        // Huge drift down forces V(T) to the absorbing floor.
        let contract = ContractSpec::new(100.0, 75.0, 1.0, 1).unwrap();
        let process = ProcessSpec::Diffusion(DiffusionParams::new(-2.0, 0.0, 0.5).unwrap());
        let stream = RngStream::new(0, 0, 0);
        let o = run_realization(&process, &contract, 50, &stream).unwrap();
        assert_eq!(o.pd_hat, 1.0);
        assert_eq!(o.loss_hat, 1.0);
        assert_eq!(o.recovery_hat, Some(0.0));
    }

    #[test]
    fn loss_identity_with_recovery() {
        let result = run_simulation(&config(200)).unwrap();
        for o in &result.outcomes {
            if let Some(r) = o.recovery_hat {
                assert!((o.loss_hat - o.pd_hat * (1.0 - r)).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&r));
            } else {
                assert_eq!(o.n_default, 0);
            }
            let k = result.config.portfolio_size as f64;
            let scaled = o.pd_hat * k;
            assert!((scaled - scaled.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn single_realization_equals_driver() {
        let cfg = config(1);
        let result = run_simulation(&cfg).unwrap();
        let stream = RngStream::new(cfg.master_seed, 0, 0);
        let direct =
            run_realization(&cfg.process, &cfg.contract, cfg.portfolio_size, &stream).unwrap();
        assert_eq!(result.outcomes[0], direct);
    }

    #[test]
    fn repeat_runs_are_identical() {
        let cfg = config(500);
        let a = run_simulation(&cfg).unwrap();
        let b = run_simulation(&cfg).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
    }

    #[test]
    fn pooled_mean_permutation_invariant() {
        let cfg = config(500);
        let result = run_simulation(&cfg).unwrap();
        let forward: f64 = result.outcomes.iter().map(|o| o.loss_hat).sum();
        let backward: f64 = result.outcomes.iter().rev().map(|o| o.loss_hat).sum();
        assert!((forward - backward).abs() < 1e-12 * forward.abs().max(1.0));
    }

    #[test]
    fn bin_curve_single_outcome() {
        let o = PortfolioOutcome {
            realization: 0,
            x_m: 0.05,
            n_default: 3,
            pd_hat: 0.03,
            loss_hat: 0.006,
            recovery_hat: Some(0.8),
        };
        let curve = bin_curve(&[o], Axis::PdHat, Axis::RecoveryHat, &linear_edges(0.0, 1.0, 10))
            .unwrap();
        assert_eq!(curve.counts, vec![1]);
        assert_eq!(curve.y_means, vec![0.8]);
    }

    #[test]
    fn bin_curve_reproduces_exact_curve() {
        use crate::analytics::{structural_recovery, StructuralParam};
        let b = StructuralParam::new(0.3).unwrap();
        let outcomes: Vec<PortfolioOutcome> = (1..100)
            .map(|i| {
                let pd = i as f64 / 100.0;
                PortfolioOutcome {
                    realization: i as u32,
                    x_m: 0.0,
                    n_default: 1,
                    pd_hat: pd,
                    loss_hat: 0.0,
                    recovery_hat: Some(structural_recovery(pd, &b).unwrap()),
                }
            })
            .collect();
        let edges = linear_edges(0.0, 1.0, 200); // one point per bin
        let curve = bin_curve(&outcomes, Axis::PdHat, Axis::RecoveryHat, &edges).unwrap();
        for (x, y) in curve.x_means.iter().zip(&curve.y_means) {
            let want = structural_recovery(*x, &b).unwrap();
            assert!((y - want).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_bin_curve() {
        let curve =
            bin_curve(&[], Axis::PdHat, Axis::RecoveryHat, &linear_edges(0.0, 1.0, 4)).unwrap();
        assert!(curve.counts.is_empty());
    }

    #[test]
    fn histogram_uniform_samples() {
        let mut stream = RngStream::new(99, 0, 0);
        let n = 100_000;
        let samples: Vec<f64> = (0..n).map(|_| stream.draw_uniform()).collect();
        let hist = empirical_histogram(&samples, &linear_edges(0.0, 1.0, 20)).unwrap();
        let per_bin = n as f64 / 20.0;
        for (d, c) in hist.densities.iter().zip(&hist.counts) {
            assert!(*c > 0);
            assert!((d - 1.0).abs() < 3.0 / per_bin.sqrt(), "density = {d}");
        }
        let integral: f64 = hist
            .densities
            .iter()
            .zip(&hist.widths)
            .map(|(d, w)| d * w)
            .sum();
        assert!((integral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_point_mass() {
        let samples = vec![0.25; 100];
        let hist = empirical_histogram(&samples, &linear_edges(0.0, 1.0, 10)).unwrap();
        assert_eq!(hist.counts.iter().filter(|&&c| c > 0).count(), 1);
    }
}
