//! Adaptive quadrature over finite and semi-infinite intervals.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub abs_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tolerance: 1e-10,
            max_subdivisions: 1_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerance must be positive, got {abs_tolerance}"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(Self {
            abs_tolerance,
            max_subdivisions,
        })
    }
}

/// Integrate `f` from `lower` to `upper`. Infinite bounds are mapped onto
/// (0, 1] by the substitution x = b - (1 - t)/t before subdivision.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lower: f64, upper: f64, spec: &QuadratureSpec) -> Result<f64> {
    if lower.is_nan() || upper.is_nan() {
        return Err(Error::Domain("integration bound is NaN".into()));
    }
    if lower >= upper {
        return Err(Error::Domain(format!(
            "integration bounds out of order: [{lower}, {upper}]"
        )));
    }
    match (lower.is_infinite(), upper.is_infinite()) {
        (false, false) => finite(&f, lower, upper, spec),
        (true, false) => lower_infinite(&f, upper, spec),
        (false, true) => {
            // mirror: int_a^inf f(x) dx = int_-inf^-a f(-x) dx
            lower_infinite(&|x| f(-x), -lower, spec)
        }
        (true, true) => {
            let half = QuadratureSpec {
                abs_tolerance: spec.abs_tolerance / 2.0,
                max_subdivisions: spec.max_subdivisions / 2,
            };
            let left = lower_infinite(&f, 0.0, &half)?;
            let right = lower_infinite(&|x| f(-x), 0.0, &half)?;
            Ok(left + right)
        }
    }
}

fn lower_infinite<F: Fn(f64) -> f64>(f: &F, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let g = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let x = b - (1.0 - t) / t;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (t * t)
        }
    };
    finite(&g, 0.0, 1.0, spec)
}

/// Adaptive Simpson with an explicit work stack and a subdivision budget.
fn finite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    struct Segment {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    }

    // Refine every segment at least this many times before trusting the
    // error estimate, so a peak that falls between the three initial
    // sample points cannot be silently skipped.
    const MIN_DEPTH: u32 = 6;

    let simpson = |fa: f64, fm: f64, fb: f64, h: f64| (fa + 4.0 * fm + fb) * h / 6.0;

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut stack = vec![Segment {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(fa, fm, fb, b - a),
        tol: spec.abs_tolerance,
        depth: 0,
    }];

    let mut total = 0.0;
    let mut pending_error = 0.0;
    let mut subdivisions = 0usize;
    let mut exhausted = false;

    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(seg.fa, flm, seg.fm, m - seg.a);
        let right = simpson(seg.fm, frm, seg.fb, seg.b - m);
        let err = (left + right - seg.whole) / 15.0;

        let interval_tiny = (seg.b - seg.a) <= f64::EPSILON * (seg.a.abs() + seg.b.abs() + 1.0);
        if (seg.depth >= MIN_DEPTH && err.abs() <= seg.tol) || interval_tiny {
            total += left + right + err;
            pending_error += err.abs();
            continue;
        }

        subdivisions += 1;
        if subdivisions > spec.max_subdivisions || exhausted {
            exhausted = true;
            total += left + right + err;
            pending_error += err.abs();
            continue;
        }

        let half_tol = seg.tol / 2.0;
        stack.push(Segment {
            a: seg.a,
            b: m,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            whole: left,
            tol: half_tol,
            depth: seg.depth + 1,
        });
        stack.push(Segment {
            a: m,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            whole: right,
            tol: half_tol,
            depth: seg.depth + 1,
        });
    }

    if !total.is_finite() {
        return Err(Error::Domain(
            "integrand produced a non-finite value".into(),
        ));
    }
    if exhausted {
        return Err(Error::Quadrature {
            estimate: total,
            error_bound: pending_error,
        });
    }
    Ok(total)
}
