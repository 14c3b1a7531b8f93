//! The five subcommands and their file outputs. Every output file starts
//! with a `# config: ...` provenance line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use merton_core::analytics::{
    default_prob_given_xm, expected_loss_given_xm, loss_pdf_from_market,
    market_return_quantile, structural_loss, structural_recovery, xm_from_pd, StructuralParam,
};
use merton_core::calibration::{fit_b, parse_observations};
use merton_core::montecarlo::{
    bin_curve, empirical_histogram, linear_edges, log_spaced_edges, Axis, SimConfig,
    SimulationResult,
};
use merton_core::numerics::QuadratureSpec;
use merton_core::riskmeasures::{
    risk_analytic, risk_empirical, risk_from_pd_samples, risk_from_xm_samples, RiskReport,
};
use merton_core::run_simulation;

use crate::config::RunConfig;
use crate::error::{AppError, CliResult};

/// Write one file, recording it in `completed` so a later failure can name
/// what already exists on disk.
fn write_file(path: PathBuf, contents: &str, completed: &mut Vec<PathBuf>) -> CliResult<()> {
    std::fs::write(&path, contents).map_err(|source| AppError::Io {
        path: path.clone(),
        source,
        completed: completed.clone(),
    })?;
    completed.push(path);
    Ok(())
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.to_path_buf(),
        source,
        completed: Vec::new(),
    })
}

/// Default-probability grid for curve tabulation: log-spaced through the
/// small-pd regime, linear through the bulk.
fn pd_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(600);
    let (lo, hi) = (1e-6f64, 1e-2f64);
    for i in 0..150 {
        grid.push((lo.ln() + (hi.ln() - lo.ln()) * i as f64 / 150.0).exp());
    }
    for i in 0..=440 {
        grid.push(0.01 + (0.99 - 0.01) * i as f64 / 440.0);
    }
    grid
}

fn report_line(r: &RiskReport) -> String {
    format!(
        "{},{},{},{},{}\n",
        r.method.label(),
        r.alpha,
        r.expected_loss,
        r.var,
        r.etl
    )
}

pub fn cmd_analytic(cfg: &RunConfig, b_sweep: &[f64]) -> CliResult<()> {
    let contract = cfg.contract()?;
    let law = cfg.law()?;
    let implied = cfg.implied_b()?;
    let quad = QuadratureSpec::default();
    let echo = cfg.echo("analytic");
    let mut completed = Vec::new();

    let report = risk_analytic(cfg.alpha, &law, &contract, &implied, &quad)?;
    let mut text = format!("{echo}\n");
    let _ = writeln!(text, "method = {}", report.method.label());
    let _ = writeln!(text, "alpha = {}", report.alpha);
    let _ = writeln!(text, "confidence = {}", report.confidence());
    let _ = writeln!(text, "b = {}", implied.b);
    let _ = writeln!(text, "expected_loss = {}", report.expected_loss);
    let _ = writeln!(text, "var = {}", report.var);
    let _ = writeln!(text, "etl = {}", report.etl);
    write_file(cfg.out_dir.join("analytic_report.txt"), &text, &mut completed)?;
    print!("{text}");

    // recovery and loss versus default probability, optionally for a B sweep
    let bs: Vec<StructuralParam> = if b_sweep.is_empty() {
        vec![implied.clone()]
    } else {
        b_sweep
            .iter()
            .map(|&b| StructuralParam::new(b))
            .collect::<Result<_, _>>()?
    };
    let grid = pd_grid();
    let mut rec = format!("{echo}\nb,pd,recovery\n");
    let mut loss = format!("{echo}\nb,pd,loss\n");
    for b in &bs {
        for &pd in &grid {
            let _ = writeln!(rec, "{},{},{}", b.b, pd, structural_recovery(pd, b)?);
            let _ = writeln!(loss, "{},{},{}", b.b, pd, structural_loss(pd, b)?);
        }
    }
    write_file(cfg.out_dir.join("recovery_vs_pd.csv"), &rec, &mut completed)?;
    write_file(cfg.out_dir.join("loss_vs_pd.csv"), &loss, &mut completed)?;

    // conditional default probability and loss versus the market return
    let x_lo = market_return_quantile(1e-8, &law)?;
    let x_hi = market_return_quantile(1.0 - 1e-8, &law)?;
    let mut pd_x = format!("{echo}\nx_m,pd\n");
    let mut loss_x = format!("{echo}\nx_m,loss\n");
    for i in 0..=800 {
        let x = x_lo + (x_hi - x_lo) * i as f64 / 800.0;
        let _ = writeln!(pd_x, "{},{}", x, default_prob_given_xm(x, &contract, &implied)?);
        let _ = writeln!(loss_x, "{},{}", x, expected_loss_given_xm(x, &contract, &implied)?);
    }
    write_file(cfg.out_dir.join("pd_vs_xm.csv"), &pd_x, &mut completed)?;
    write_file(cfg.out_dir.join("loss_vs_xm.csv"), &loss_x, &mut completed)?;

    // portfolio-loss density via the change of variables L(x_m); tabulated
    // on an x_m grid placed at log-spaced conditional default probabilities
    // so the tail is resolved
    let mut xm_grid: Vec<f64> = Vec::with_capacity(800);
    let (p_lo, p_hi) = (1e-8f64, 0.995f64);
    for i in 0..=800 {
        let pd = (p_lo.ln() + (p_hi.ln() - p_lo.ln()) * i as f64 / 800.0).exp();
        xm_grid.push(xm_from_pd(pd, &contract, &implied)?);
    }
    xm_grid.sort_by(f64::total_cmp);
    let density = loss_pdf_from_market(&law, &contract, &implied, &xm_grid)?;
    let mut pdf = format!("{echo}\nloss,density\n");
    for (l, d) in &density.points {
        let _ = writeln!(pdf, "{l},{d}");
    }
    write_file(cfg.out_dir.join("loss_pdf.csv"), &pdf, &mut completed)?;

    Ok(())
}

pub fn cmd_curves(cfg: &RunConfig, b_sweep: &[f64]) -> CliResult<()> {
    let implied = cfg.implied_b()?;
    let bs: Vec<StructuralParam> = if b_sweep.is_empty() {
        vec![implied]
    } else {
        b_sweep
            .iter()
            .map(|&b| StructuralParam::new(b))
            .collect::<Result<_, _>>()?
    };
    let echo = cfg.echo("curves");
    let mut text = format!("{echo}\nb,pd,recovery,loss\n");
    for b in &bs {
        for &pd in &pd_grid() {
            let _ = writeln!(
                text,
                "{},{},{},{}",
                b.b,
                pd,
                structural_recovery(pd, b)?,
                structural_loss(pd, b)?
            );
        }
    }
    let mut completed = Vec::new();
    write_file(cfg.out_dir.join("structural_curves.csv"), &text, &mut completed)
}

pub fn cmd_simulate(cfg: &RunConfig) -> CliResult<()> {
    let sim_config = SimConfig {
        process: cfg.process_spec()?,
        contract: cfg.contract()?,
        portfolio_size: cfg.portfolio_size,
        realizations: cfg.realizations,
        master_seed: cfg.seed,
    };
    let result = run_simulation(&sim_config)?;
    eprintln!(
        "simulated {} realizations x {} firms in {:.1?}",
        cfg.realizations, cfg.portfolio_size, result.elapsed
    );

    let echo = cfg.echo("simulate");
    let mut completed = Vec::new();

    write_file(
        cfg.out_dir.join("outcomes.csv"),
        &outcomes_csv(&echo, &result),
        &mut completed,
    )?;

    // risk measures: empirical, PD-quantile route, market-return route
    let implied = cfg.implied_b()?;
    let losses = result.loss_samples();
    let pds = result.pd_samples();
    let xms = result.xm_samples();
    let mut report = format!("{echo}\nmethod,alpha,expected_loss,var,etl\n");
    report.push_str(&report_line(&risk_empirical(cfg.alpha, &losses)?));
    report.push_str(&report_line(&risk_from_pd_samples(cfg.alpha, &pds, &implied)?));
    report.push_str(&report_line(&risk_from_xm_samples(
        cfg.alpha,
        &xms,
        &sim_config.contract,
        &implied,
    )?));
    write_file(cfg.out_dir.join("risk_report.csv"), &report, &mut completed)?;
    print!("{report}");

    // loss histogram on log-spaced bins; zero-loss realizations fall below
    // the first edge and are reported as out-of-range
    let min_pos = losses.iter().copied().filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min);
    let max_loss = losses.iter().copied().fold(0.0f64, f64::max);
    let mut hist_text = format!("{echo}\n");
    if min_pos.is_finite() && max_loss > min_pos {
        let edges = log_spaced_edges(min_pos * 0.999, max_loss * 1.001, 60);
        let hist = empirical_histogram(&losses, &edges)?;
        let _ = writeln!(hist_text, "# out_of_range = {}", hist.out_of_range);
        hist_text.push_str("center,width,density,count\n");
        for i in 0..hist.centers.len() {
            let _ = writeln!(
                hist_text,
                "{},{},{},{}",
                hist.centers[i], hist.widths[i], hist.densities[i], hist.counts[i]
            );
        }
    } else {
        hist_text.push_str("# no positive losses observed\ncenter,width,density,count\n");
    }
    write_file(cfg.out_dir.join("loss_hist.csv"), &hist_text, &mut completed)?;

    // binned curves over default probability and over the market return
    let pd_edges = linear_edges(0.0, 1.0, 100);
    let x_min = xms.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let xm_edges = linear_edges(x_min, x_max + 1e-12 * (1.0 + x_max.abs()), 100);
    let curves: [(&str, Axis, Axis, &[f64]); 4] = [
        ("recovery_vs_pd_binned.csv", Axis::PdHat, Axis::RecoveryHat, &pd_edges),
        ("loss_vs_pd_binned.csv", Axis::PdHat, Axis::LossHat, &pd_edges),
        ("pd_vs_xm_binned.csv", Axis::Xm, Axis::PdHat, &xm_edges),
        ("loss_vs_xm_binned.csv", Axis::Xm, Axis::LossHat, &xm_edges),
    ];
    for (name, x_axis, y_axis, edges) in curves {
        let curve = bin_curve(&result.outcomes, x_axis, y_axis, edges)?;
        let mut text = format!("{echo}\nx_mean,y_mean,count\n");
        for i in 0..curve.x_means.len() {
            let _ = writeln!(text, "{},{},{}", curve.x_means[i], curve.y_means[i], curve.counts[i]);
        }
        write_file(cfg.out_dir.join(name), &text, &mut completed)?;
    }

    Ok(())
}

fn outcomes_csv(echo: &str, result: &SimulationResult) -> String {
    let mut text =
        format!("{echo}\nrealization,x_m,n_default,pd_hat,loss_hat,recovery_hat\n");
    for o in &result.outcomes {
        let recovery = o.recovery_hat.map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            o.realization, o.x_m, o.n_default, o.pd_hat, o.loss_hat, recovery
        );
    }
    text
}

pub fn cmd_calibrate(
    cfg: &RunConfig,
    input: &Path,
    b_lo: f64,
    b_hi: f64,
    tol: f64,
) -> CliResult<()> {
    let text = read_file(input)?;
    let (obs, warnings) = parse_observations(&text)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let fit = fit_b(&obs, b_lo, b_hi, tol)?;

    let echo = cfg.echo("calibrate");
    let fit_echo = format!(
        "# fit: input={} b_lo={b_lo} b_hi={b_hi} tol={tol}",
        input.display()
    );
    let mut completed = Vec::new();

    let mut report = format!("{echo}\n{fit_echo}\n");
    let _ = writeln!(report, "b_hat = {}", fit.b_hat);
    let _ = writeln!(report, "sse = {}", fit.sse);
    let _ = writeln!(report, "iterations = {}", fit.iterations);
    let _ = writeln!(report, "converged = {}", fit.converged);
    let _ = writeln!(report, "at_boundary = {}", fit.at_boundary);
    let _ = writeln!(report, "observations = {}", obs.len());
    let _ = writeln!(report, "skipped_rows = {}", warnings.len());
    write_file(cfg.out_dir.join("fit_report.txt"), &report, &mut completed)?;
    print!("{report}");

    // fitted curve tabulated over the observed default-probability range
    let b = StructuralParam::new(fit.b_hat)?;
    let pd_min = obs.records.iter().map(|r| r.pd).fold(f64::INFINITY, f64::min);
    let pd_max = obs.records.iter().map(|r| r.pd).fold(0.0f64, f64::max);
    let mut curve = format!("{echo}\n{fit_echo}\npd,recovery,loss\n");
    for i in 0..=200 {
        let pd = pd_min + (pd_max - pd_min) * i as f64 / 200.0;
        let _ = writeln!(
            curve,
            "{},{},{}",
            pd,
            structural_recovery(pd, &b)?,
            structural_loss(pd, &b)?
        );
    }
    write_file(cfg.out_dir.join("fitted_curve.csv"), &curve, &mut completed)
}

pub fn cmd_report(cfg: &RunConfig, input: &Path) -> CliResult<()> {
    let text = read_file(input)?;
    let (xms, pds, losses) = parse_outcomes(&text)?;

    let contract = cfg.contract()?;
    let implied = cfg.implied_b()?;
    let echo = cfg.echo("report");
    let mut report = format!(
        "{echo}\n# input: {}\nmethod,alpha,expected_loss,var,etl\n",
        input.display()
    );
    report.push_str(&report_line(&risk_empirical(cfg.alpha, &losses)?));
    report.push_str(&report_line(&risk_from_pd_samples(cfg.alpha, &pds, &implied)?));
    report.push_str(&report_line(&risk_from_xm_samples(cfg.alpha, &xms, &contract, &implied)?));

    let mut completed = Vec::new();
    write_file(cfg.out_dir.join("report_summary.csv"), &report, &mut completed)?;
    print!("{report}");
    Ok(())
}

/// Parse an outcomes CSV back into (x_m, pd_hat, loss_hat) samples.
fn parse_outcomes(text: &str) -> CliResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut xms = Vec::new();
    let mut pds = Vec::new();
    let mut losses = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            if !line.starts_with("realization,") {
                return Err(AppError::Config(format!(
                    "line {}: expected outcomes header `realization,x_m,n_default,pd_hat,loss_hat,recovery_hat`",
                    i + 1
                )));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(AppError::Config(format!(
                "line {}: expected 6 columns, got {}",
                i + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> CliResult<f64> {
            s.parse::<f64>().map_err(|_| {
                AppError::Config(format!("line {}: cannot parse number from {s:?}", i + 1))
            })
        };
        xms.push(parse(fields[1])?);
        pds.push(parse(fields[3])?);
        losses.push(parse(fields[4])?);
    }
    if losses.is_empty() {
        return Err(AppError::Config("outcomes file contains no data rows".into()));
    }
    Ok((xms, pds, losses))
}
