use serde::{Deserialize, Serialize};

use crate::calculus::{adaptive_simpson, dormand_prince, EarlyStop, Tolerances};
use crate::{Error, Result};

/// Scalar comparison equations with finite-time blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum OracleModel {
    /// `y' = α + β y³`
    Cubic { alpha: f64, beta: f64 },
    /// `y' = β y (1 + y²)`
    CubicLogistic { beta: f64 },
}

impl OracleModel {
    fn rhs(&self, y: f64) -> f64 {
        match *self {
            OracleModel::Cubic { alpha, beta } => alpha + beta * y * y * y,
            OracleModel::CubicLogistic { beta } => beta * y * (1.0 + y * y),
        }
    }

    /// `dw/dt` for `w = 1/y²`.
    fn inverse_rhs(&self, w: f64) -> f64 {
        let w = w.max(0.0);
        match *self {
            OracleModel::Cubic { alpha, beta } => -2.0 * (alpha * w * w.sqrt() + beta),
            OracleModel::CubicLogistic { beta } => -2.0 * beta * (1.0 + w),
        }
    }

    /// Time for `w` to fall from `w_s` to zero: `∫₀^{w_s} dw / |dw/dt|`.
    fn remaining_time(&self, w_s: f64) -> f64 {
        match *self {
            OracleModel::Cubic { alpha, beta } => {
                // w = s² removes the square-root singularity of the integrand
                let g = |s: f64| s / (alpha * s * s * s + beta);
                let s_max = w_s.sqrt();
                adaptive_simpson(&g, 0.0, s_max, 1e-15 * s_max * s_max / beta)
            }
            OracleModel::CubicLogistic { beta } => {
                let g = |w: f64| 1.0 / (2.0 * beta * (1.0 + w));
                adaptive_simpson(&g, 0.0, w_s, 1e-15 * w_s / beta)
            }
        }
    }

    fn validate(&self, y0: f64) -> Result<()> {
        let (alpha, beta) = match *self {
            OracleModel::Cubic { alpha, beta } => (alpha, beta),
            OracleModel::CubicLogistic { beta } => (0.0, beta),
        };
        if !(alpha >= 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("oracle needs α ≥ 0 and β > 0, got α = {alpha}, β = {beta}")));
        }
        if !(y0 >= 0.0 && y0.is_finite()) {
            return Err(Error::Domain(format!("oracle needs y₀ ≥ 0, got {y0}")));
        }
        Ok(())
    }

    fn stays_at_zero(&self, y0: f64) -> bool {
        y0 == 0.0
            && match *self {
                OracleModel::Cubic { alpha, .. } => alpha == 0.0,
                OracleModel::CubicLogistic { .. } => true,
            }
    }
}

/// Trajectory of a comparison equation on `[0, min(T, blow-up))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `∫₀ᵗ y(s) ds` at each recorded time.
    pub integrals: Vec<f64>,
    /// Blow-up time, whether or not it falls inside `[0, T]`.
    pub blowup_time: Option<f64>,
}

fn tolerances() -> Tolerances {
    Tolerances {
        rtol: 1e-13,
        atol: 1e-300,
        min_step: 1e-300,
        max_steps: 2_000_000,
    }
}

/// Integrate `model` from `y(0) = y0` and locate its blow-up time.
///
/// The equation is integrated directly until `y` reaches `max(10 y₀, 10)`;
/// from there on in the variable `w = 1/y²`, which reaches zero linearly.
/// The remaining time to blow-up is a one-dimensional quadrature in `w`.
pub fn ode_comparison_oracle(model: OracleModel, y0: f64, t_end: f64) -> Result<OracleRun> {
    model.validate(y0)?;
    if !(t_end >= 0.0) {
        return Err(Error::Domain(format!("oracle horizon must be ≥ 0, got {t_end}")));
    }
    if model.stays_at_zero(y0) {
        let times = if t_end > 0.0 && t_end.is_finite() { vec![0.0, t_end] } else { vec![0.0] };
        let n = times.len();
        return Ok(OracleRun {
            times,
            values: vec![0.0; n],
            integrals: vec![0.0; n],
            blowup_time: None,
        });
    }

    let y_switch = (10.0 * y0).max(10.0);
    let direct = |_: f64, x: &[f64; 2]| [model.rhs(x[0]), x[0]];
    let switched = |_: f64, x: &[f64; 2]| x[0] >= y_switch;

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut integrals = Vec::new();
    let record = |times: &mut Vec<f64>, values: &mut Vec<f64>, integrals: &mut Vec<f64>, t: f64, y: f64, i: f64| {
        if times.last().is_none_or(|&last| t > last) {
            times.push(t);
            values.push(y);
            integrals.push(i);
        }
    };

    // direct phase on [0, T], then onwards (unrecorded) until the switch
    let first = dormand_prince(direct, 0.0, [y0, 0.0], t_end, tolerances(), switched);
    for (t, x) in first.times.iter().zip(&first.states) {
        record(&mut times, &mut values, &mut integrals, *t, x[0], x[1]);
    }
    let (mut t_s, mut x_s) = (*first.times.last().unwrap(), *first.states.last().unwrap());
    if first.stopped_early.is_none() {
        // reached T without switching; keep going to find the blow-up time
        let mut span = t_s.max(1.0);
        while x_s[0] < y_switch {
            let more = dormand_prince(direct, t_s, x_s, t_s + span, tolerances(), switched);
            t_s = *more.times.last().unwrap();
            x_s = *more.states.last().unwrap();
            if more.stopped_early.is_some_and(|s| s != EarlyStop::Event) {
                return Err(Error::Domain("oracle integration failed before switching".into()));
            }
            span *= 2.0;
            if !span.is_finite() {
                return Err(Error::Domain("oracle found no blow-up".into()));
            }
        }
    } else if first.stopped_early != Some(EarlyStop::Event) {
        return Err(Error::Domain("oracle integration failed before switching".into()));
    }

    let w_s = 1.0 / (x_s[0] * x_s[0]);
    let blowup = t_s + model.remaining_time(w_s);

    if t_s < t_end {
        // inverse phase, recorded up to T or until y ~ 10⁸ y_switch
        let inverse = |_: f64, x: &[f64; 2]| [model.inverse_rhs(x[0]), 1.0 / x[0].max(f64::MIN_POSITIVE).sqrt()];
        let w_stop = w_s * 1e-16;
        let second = dormand_prince(
            inverse,
            t_s,
            [w_s, x_s[1]],
            t_end.min(blowup),
            tolerances(),
            |_, x| x[0] <= w_stop,
        );
        for (t, x) in second.times.iter().zip(&second.states) {
            if x[0] > 0.0 && *t < blowup {
                record(&mut times, &mut values, &mut integrals, *t, 1.0 / x[0].sqrt(), x[1]);
            }
        }
    }

    Ok(OracleRun {
        times,
        values,
        integrals,
        blowup_time: Some(blowup),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn pure_cubic_blows_up_at_closed_form_time() {
        for (beta, y0) in [(1.0, 1.0), (64.0, 0.3), (0.2, 5.0), (3.0, 0.01)] {
            let run = ode_comparison_oracle(OracleModel::Cubic { alpha: 0.0, beta }, y0, 1.0).unwrap();
            let exact = 1.0 / (2.0 * beta * y0 * y0);
            assert!(rel(run.blowup_time.unwrap(), exact) < 1e-9, "{beta} {y0}");
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let run = ode_comparison_oracle(OracleModel::Cubic { alpha: 0.0, beta: 1.0 }, 0.0, 3.0).unwrap();
        assert!(run.values.iter().all(|&y| y == 0.0));
        assert_eq!(run.blowup_time, None);
        assert_eq!(*run.times.last().unwrap(), 3.0);
    }

    #[test]
    fn logistic_variant_matches_separable_solution() {
        // ∫ dy / (y (1 + y²)) from 1 to ∞ is ln 2 / 2
        let run = ode_comparison_oracle(OracleModel::CubicLogistic { beta: 1.0 }, 1.0, 0.5).unwrap();
        assert!(rel(run.blowup_time.unwrap(), 0.346_573_590_279_972_65) < 1e-10);
        // 1/y² = (1 + 1/y₀²) e^{−2βt} − 1; compared in w = 1/y², which stays
        // well conditioned up to the blow-up
        for (t, y) in run.times.iter().zip(&run.values) {
            let exact = 2.0 * (-2.0 * t).exp() - 1.0;
            assert!((1.0 / (y * y) - exact).abs() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn trajectory_matches_closed_form_before_blowup() {
        let (beta, y0) = (2.0, 0.5);
        let run = ode_comparison_oracle(OracleModel::Cubic { alpha: 0.0, beta }, y0, 10.0).unwrap();
        let w0 = 1.0 / (y0 * y0);
        for (t, y) in run.times.iter().zip(&run.values) {
            let exact = w0 - 2.0 * beta * t;
            assert!((1.0 / (y * y) - exact).abs() < 1e-11 * w0, "t = {t}");
            if exact > 1e-3 * w0 {
                assert!(rel(*y, exact.powf(-0.5)) < 1e-9, "t = {t}");
            }
        }
        assert!(*run.values.last().unwrap() > 1e6);
        assert!(run.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn forcing_term_shortens_blowup() {
        let free = ode_comparison_oracle(OracleModel::Cubic { alpha: 0.0, beta: 1.0 }, 0.5, 0.0).unwrap();
        let forced = ode_comparison_oracle(OracleModel::Cubic { alpha: 0.5, beta: 1.0 }, 0.5, 0.0).unwrap();
        assert!(forced.blowup_time.unwrap() < free.blowup_time.unwrap());
        let from_zero = ode_comparison_oracle(OracleModel::Cubic { alpha: 1.0, beta: 1.0 }, 0.0, 0.0).unwrap();
        assert!(from_zero.blowup_time.unwrap().is_finite());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ode_comparison_oracle(OracleModel::Cubic { alpha: -1.0, beta: 1.0 }, 1.0, 1.0).is_err());
        assert!(ode_comparison_oracle(OracleModel::CubicLogistic { beta: 0.0 }, 1.0, 1.0).is_err());
        assert!(ode_comparison_oracle(OracleModel::CubicLogistic { beta: 1.0 }, -1.0, 1.0).is_err());
    }
}
