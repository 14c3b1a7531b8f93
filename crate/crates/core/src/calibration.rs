//! Least-squares fit of the structural parameter B to observed
//! (default probability, recovery or loss) pairs.

use crate::analytics::{structural_loss, structural_recovery, StructuralParam};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationKind {
    Recovery,
    Loss,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub pd: f64,
    pub value: f64,
    pub kind: ObservationKind,
    pub weight: f64,
    /// Carried through from ingestion when present (e.g. a year label).
    pub label: Option<i64>,
}

impl Observation {
    pub fn new(pd: f64, value: f64, kind: ObservationKind) -> Result<Self> {
        Self::with_weight(pd, value, kind, 1.0)
    }

    pub fn with_weight(pd: f64, value: f64, kind: ObservationKind, weight: f64) -> Result<Self> {
        if !(pd > 0.0 && pd < 1.0) {
            return Err(Error::Domain(format!(
                "observed default probability must lie strictly in (0, 1), got {pd}"
            )));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain(format!("observed value must lie in [0, 1], got {value}")));
        }
        if !(weight >= 0.0) {
            return Err(Error::Domain(format!("weight must be >= 0, got {weight}")));
        }
        Ok(Self { pd, value, kind, weight, label: None })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ObservationSet {
    pub records: Vec<Observation>,
}

impl ObservationSet {
    pub fn new(records: Vec<Observation>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData("observation set is empty".into()));
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub b_hat: f64,
    pub sse: f64,
    pub iterations: u32,
    pub converged: bool,
    /// Set when the minimum sits on an interval endpoint.
    pub at_boundary: bool,
}

fn model_value(obs: &Observation, b: &StructuralParam) -> Result<f64> {
    match obs.kind {
        ObservationKind::Recovery => structural_recovery(obs.pd, b),
        ObservationKind::Loss => structural_loss(obs.pd, b),
    }
}

/// Weighted sum of squared residuals at a given B. The terms are summed
/// in value-sorted order so the result — and therefore the fit — is
/// bitwise independent of the observation order.
pub fn sse(obs: &ObservationSet, b: f64) -> Result<f64> {
    let param = StructuralParam::new(b)?;
    let mut terms = Vec::with_capacity(obs.records.len());
    for record in &obs.records {
        let r = record.value - model_value(record, &param)?;
        terms.push(record.weight * r * r);
    }
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// Per-record residuals value_i - model(pd_i; b).
pub fn residuals(obs: &ObservationSet, b: f64) -> Result<Vec<f64>> {
    let param = StructuralParam::new(b)?;
    obs.records
        .iter()
        .map(|record| Ok(record.value - model_value(record, &param)?))
        .collect()
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const MAX_ITERATIONS: u32 = 200;

/// Minimize the SSE over B in [b_lo, b_hi] by golden-section search,
/// restarted on three subintervals to guard against flat regions.
pub fn fit_b(obs: &ObservationSet, b_lo: f64, b_hi: f64, tol: f64) -> Result<FitResult> {
    if obs.is_empty() {
        return Err(Error::EmptyData("observation set is empty".into()));
    }
    if !(b_lo > 0.0) || !(b_hi > b_lo) {
        return Err(Error::Domain(format!("invalid search interval [{b_lo}, {b_hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }

    let cut_a = b_lo + (b_hi - b_lo) / 3.0;
    let cut_b = b_lo + 2.0 * (b_hi - b_lo) / 3.0;
    let starts = [(b_lo, cut_a), (cut_a, cut_b), (cut_b, b_hi)];

    let mut best: Option<FitResult> = None;
    for (lo, hi) in starts {
        let fit = golden_section(obs, lo, hi, tol)?;
        match &best {
            Some(b) if b.sse <= fit.sse => {}
            _ => best = Some(fit),
        }
    }
    let mut result = best.expect("at least one start");

    // polish across subinterval boundaries
    let span = (b_hi - b_lo) / 3.0;
    let lo = (result.b_hat - 0.5 * span).max(b_lo);
    let hi = (result.b_hat + 0.5 * span).min(b_hi);
    let polished = golden_section(obs, lo, hi, tol)?;
    if polished.sse < result.sse {
        result = polished;
    }

    result.at_boundary =
        (result.b_hat - b_lo).abs() <= 2.0 * tol || (b_hi - result.b_hat).abs() <= 2.0 * tol;
    if !result.converged {
        return Err(Error::NonConvergence {
            best_b: result.b_hat,
            sse: result.sse,
            iterations: result.iterations,
        });
    }
    Ok(result)
}

fn golden_section(obs: &ObservationSet, mut lo: f64, mut hi: f64, tol: f64) -> Result<FitResult> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = sse(obs, x1)?;
    let mut f2 = sse(obs, x2)?;
    let mut iterations = 0u32;
    while (hi - lo) > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = sse(obs, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = sse(obs, x2)?;
        }
    }
    let (b_hat, best_sse) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(FitResult {
        b_hat,
        sse: best_sse,
        iterations,
        converged: (hi - lo) <= tol,
        at_boundary: false,
    })
}

/// Parse observation CSV with header `year,default_rate,recovery_rate`
/// (the year column is optional). Rows with a default rate of exactly 0
/// or 1 are rejected with a warning instead of aborting the parse.
pub fn parse_observations(text: &str) -> Result<(ObservationSet, Vec<String>)> {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    // `year,default_rate,recovery_rate` (year optional), or the binned-curve
    // layout `x_mean,y_mean,count` emitted by the simulation front end.
    let mut has_year = true;
    let mut trailing_count = false;
    let mut seen_first = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !seen_first {
            seen_first = true;
            if fields.iter().any(|f| f.chars().any(|c| c.is_ascii_alphabetic())) {
                has_year = fields.first().map(|f| f.eq_ignore_ascii_case("year")).unwrap_or(false);
                trailing_count =
                    fields.last().map(|f| f.eq_ignore_ascii_case("count")).unwrap_or(false);
                let expected = if has_year || trailing_count { 3 } else { 2 };
                if fields.len() != expected {
                    return Err(Error::MalformedRecord {
                        line: line_no,
                        message: format!(
                            "expected {expected} header columns, got {}",
                            fields.len()
                        ),
                    });
                }
                continue;
            }
            // no header: infer the layout from the first data row
            has_year = fields.len() == 3;
        }
        let expected = if has_year || trailing_count { 3 } else { 2 };
        if fields.len() != expected {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: format!("expected {expected} columns, got {}", fields.len()),
            });
        }
        let parse = |s: &str, name: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::MalformedRecord {
                line: line_no,
                message: format!("cannot parse {name} from {s:?}"),
            })
        };
        let (label, pd_field, value_field) = if has_year {
            let year = fields[0].parse::<i64>().map_err(|_| Error::MalformedRecord {
                line: line_no,
                message: format!("cannot parse year from {:?}", fields[0]),
            })?;
            (Some(year), fields[1], fields[2])
        } else {
            (None, fields[0], fields[1])
        };
        let pd = parse(pd_field, "default rate")?;
        let value = parse(value_field, "recovery rate")?;
        if pd <= 0.0 || pd >= 1.0 {
            warnings.push(format!(
                "line {line_no}: default rate {pd} outside (0, 1); record skipped"
            ));
            continue;
        }
        let mut obs = Observation::new(pd, value, ObservationKind::Recovery)
            .map_err(|e| Error::MalformedRecord { line: line_no, message: e.to_string() })?;
        obs.label = label;
        records.push(obs);
    }
    if records.is_empty() {
        return Err(Error::EmptyData("no usable observation rows".into()));
    }
    Ok((ObservationSet { records }, warnings))
}
