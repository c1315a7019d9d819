//! Small numerical helpers shared by the solver diagnostics, the monitor and
//! the ODE oracle.

use crate::{Error, Result};

/// Second-order derivative estimate of samples `y(t)` on a possibly
/// non-uniform grid: three-point centred differences in the interior and
/// three-point one-sided differences at both ends. With only two samples the
/// end values fall back to the first-order difference quotient.
pub fn derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if t.len() != y.len() {
        return Err(Error::Shape(format!(
            "{} times for {} samples",
            t.len(),
            y.len()
        )));
    }
    let n = t.len();
    if n < 2 {
        return Err(Error::Shape("at least two samples are needed to differentiate".into()));
    }
    if n == 2 {
        let d = (y[1] - y[0]) / (t[1] - t[0]);
        return Ok(vec![d, d]);
    }
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        out[i] = lagrange_slope([t[a], t[b], t[c]], [y[a], y[b], y[c]], t[i]);
    }
    Ok(out)
}

/// Derivative at `x` of the quadratic through three points.
fn lagrange_slope(t: [f64; 3], y: [f64; 3], x: f64) -> f64 {
    let [t0, t1, t2] = t;
    let l0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
    let l1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
    let l2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
    y[0] * l0 + y[1] * l1 + y[2] * l2
}

/// Running trapezoidal integral; `out[0] = 0`.
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Adaptive Simpson quadrature of a smooth integrand on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Outcome of one adaptive integration run.
#[derive(Debug, Clone)]
pub struct DenseRun<const D: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; D]>,
    /// Why the run stopped before `t_end`, if it did.
    pub stopped_early: Option<EarlyStop>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EarlyStop {
    /// The user predicate fired after the last accepted step.
    Event,
    /// The step size fell below `min_step`.
    StepCollapse,
    /// The right-hand side produced a non-finite value.
    NonFinite,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            min_step: 1e-15,
            max_steps: 1_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) integration of `x' = rhs(t, x)` from `t0`
/// to `t_end`, recording every accepted step. Integration stops early once
/// `stop(t, x)` returns true after an accepted step.
pub fn dormand_prince<const D: usize, F, S>(
    rhs: F,
    t0: f64,
    x0: [f64; D],
    t_end: f64,
    tol: Tolerances,
    stop: S,
) -> DenseRun<D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    S: Fn(f64, &[f64; D]) -> bool,
{
    let mut times = vec![t0];
    let mut states = vec![x0];
    let mut t = t0;
    let mut x = x0;
    let span = t_end - t0;
    if span <= 0.0 {
        return DenseRun {
            times,
            states,
            stopped_early: None,
        };
    }
    let mut h = (span * 1e-3).min(1e-3).max(tol.min_step * 10.0);
    let mut k = [[0.0; D]; 7];
    k[0] = rhs(t, &x);
    for _ in 0..tol.max_steps {
        if t >= t_end {
            break;
        }
        let last = h >= t_end - t;
        if last {
            h = t_end - t;
        }
        if h < tol.min_step {
            return DenseRun {
                times,
                states,
                stopped_early: Some(EarlyStop::StepCollapse),
            };
        }
        for s in 1..7 {
            let mut xs = x;
            for d in 0..D {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[d];
                }
                xs[d] += h * acc;
            }
            k[s] = rhs(t + C[s] * h, &xs);
        }
        let mut x5 = x;
        let mut err = 0.0f64;
        for d in 0..D {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B5[s] * k[s][d];
                lo += B4[s] * k[s][d];
            }
            x5[d] += h * hi;
            let scale = tol.atol + tol.rtol * x[d].abs().max(x5[d].abs());
            err = err.max((h * (hi - lo)).abs() / scale);
        }
        if !err.is_finite() || x5.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h < tol.min_step {
                return DenseRun {
                    times,
                    states,
                    stopped_early: Some(EarlyStop::NonFinite),
                };
            }
            continue;
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            x = x5;
            // FSAL: last stage is the derivative at the new point
            k[0] = k[6];
            times.push(t);
            states.push(x);
            if stop(t, &x) {
                return DenseRun {
                    times,
                    states,
                    stopped_early: Some(EarlyStop::Event),
                };
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    DenseRun {
        times,
        states,
        stopped_early: None,
    }
}
