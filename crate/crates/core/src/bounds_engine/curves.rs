use serde::{Deserialize, Serialize};

use super::ledger::ConstantLedger;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    ClassicalForced,
    ClassicalFree,
    ArctanSteady,
    ArctanTimedep,
    ArctanFree,
}

/// An upper bound on `‖u(t)‖₁²` as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundCurve {
    /// `(1 + y₀) / √(1 − K t (1 + √y₀)²)`.
    ClassicalForced { initial_h1_sq: f64, growth_rate: f64 },
    /// `(y₀² / (1 − 2 c t y₀²))^{1/2}`, from the fourth-power Riccati bound.
    ClassicalFree { initial_h1_sq: f64, riccati: f64 },
    /// Constant level `tan(LHS)` valid on `[0, until]`.
    ArctanSteady { level: f64, until: f64 },
    /// Constant level `tan(LHS)` valid on `[0, until]`; `until` may be infinite.
    ArctanTimedep { level: f64, until: f64 },
    /// Constant level `tan(LHS)` valid for all `t ≥ 0`.
    ArctanFree { level: f64 },
}

impl BoundCurve {
    pub fn kind(&self) -> BoundKind {
        match self {
            BoundCurve::ClassicalForced { .. } => BoundKind::ClassicalForced,
            BoundCurve::ClassicalFree { .. } => BoundKind::ClassicalFree,
            BoundCurve::ArctanSteady { .. } => BoundKind::ArctanSteady,
            BoundCurve::ArctanTimedep { .. } => BoundKind::ArctanTimedep,
            BoundCurve::ArctanFree { .. } => BoundKind::ArctanFree,
        }
    }

    /// Supremum of the times at which the curve may be evaluated.
    ///
    /// For the forced classical curve this is where the square root in the
    /// denominator vanishes, `1 / (K (1 + ‖u₀‖₁)²)`.
    pub fn horizon(&self) -> f64 {
        match *self {
            BoundCurve::ClassicalForced {
                initial_h1_sq,
                growth_rate,
            } => 1.0 / (growth_rate * (1.0 + initial_h1_sq.sqrt()).powi(2)),
            BoundCurve::ClassicalFree { initial_h1_sq, riccati } => {
                if initial_h1_sq == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / (2.0 * riccati * initial_h1_sq * initial_h1_sq)
                }
            }
            BoundCurve::ArctanSteady { until, .. } | BoundCurve::ArctanTimedep { until, .. } => until,
            BoundCurve::ArctanFree { .. } => f64::INFINITY,
        }
    }

    fn open_ended(&self) -> bool {
        matches!(
            self,
            BoundCurve::ClassicalForced { .. } | BoundCurve::ClassicalFree { .. }
        )
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("bound evaluated at negative time {t}")));
        }
        let horizon = self.horizon();
        // the classical curves are singular at their horizon, the arctan ones are not
        let beyond = if self.open_ended() { t >= horizon } else { t > horizon };
        if beyond {
            return Err(Error::HorizonExceeded { t, horizon });
        }
        Ok(match *self {
            BoundCurve::ClassicalForced {
                initial_h1_sq,
                growth_rate,
            } => {
                let d = 1.0 - growth_rate * t * (1.0 + initial_h1_sq.sqrt()).powi(2);
                (1.0 + initial_h1_sq) / d.sqrt()
            }
            BoundCurve::ClassicalFree { initial_h1_sq, riccati } => {
                let y4 = initial_h1_sq * initial_h1_sq;
                (y4 / (1.0 - 2.0 * riccati * t * y4)).sqrt()
            }
            BoundCurve::ArctanSteady { level, .. }
            | BoundCurve::ArctanTimedep { level, .. }
            | BoundCurve::ArctanFree { level } => level,
        })
    }
}

fn check_h1_sq(h1_sq: f64) -> Result<()> {
    if h1_sq.is_finite() && h1_sq >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("‖u₀‖₁² must be finite and ≥ 0, got {h1_sq}")))
    }
}

pub fn classical_curve_forced(initial_h1_sq: f64, f_norm: f64, ledger: &ConstantLedger) -> Result<BoundCurve> {
    check_h1_sq(initial_h1_sq)?;
    Ok(BoundCurve::ClassicalForced {
        initial_h1_sq,
        growth_rate: ledger.growth_rate(f_norm),
    })
}

/// Classical forced bound `(1 + ‖u₀‖₁²) / √(1 − K t (1 + ‖u₀‖₁)²)` on `‖u(t)‖₁²`.
pub fn classical_bound_forced(t: f64, initial_h1_sq: f64, f_norm: f64, ledger: &ConstantLedger) -> Result<f64> {
    classical_curve_forced(initial_h1_sq, f_norm, ledger)?.evaluate(t)
}

/// Existence time `1 / (K (1 + ‖u₀‖₁²))` of the classical forced estimate.
pub fn classical_horizon_forced(initial_h1_sq: f64, f_norm: f64, ledger: &ConstantLedger) -> f64 {
    1.0 / (ledger.growth_rate(f_norm) * (1.0 + initial_h1_sq))
}

pub fn classical_curve_free(initial_h1_sq: f64, ledger: &ConstantLedger) -> Result<BoundCurve> {
    check_h1_sq(initial_h1_sq)?;
    Ok(BoundCurve::ClassicalFree {
        initial_h1_sq,
        riccati: ledger.free_riccati,
    })
}

/// Classical unforced bound on `‖u(t)‖₁²`, the square root of
/// `‖u₀‖₁⁴ / (1 − 2 c₁₂ t ‖u₀‖₁⁴)`.
pub fn classical_bound_free(t: f64, initial_h1_sq: f64, ledger: &ConstantLedger) -> Result<f64> {
    classical_curve_free(initial_h1_sq, ledger)?.evaluate(t)
}

/// `ν³ / (128 ‖u₀‖₁⁴)`: how long the classical unforced estimate stays finite.
pub fn classical_horizon_free(initial_h1_sq: f64, nu: f64) -> f64 {
    if initial_h1_sq == 0.0 {
        f64::INFINITY
    } else {
        nu.powi(3) / (128.0 * initial_h1_sq * initial_h1_sq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger() -> ConstantLedger {
        ConstantLedger::with_defaults(1.0, 1.0).unwrap()
    }

    #[test]
    fn forced_bound_at_zero_time() {
        let l = ledger();
        assert_eq!(classical_bound_forced(0.0, 2.5, 0.3, &l).unwrap(), 3.5);
        assert_eq!(classical_bound_forced(0.0, 0.0, 0.0, &l).unwrap(), 1.0);
    }

    #[test]
    fn forced_horizon_example() {
        // K = 2 + 64 = 66, (1 + ‖u₀‖₁²) = 2
        let l = ledger();
        assert_eq!(l.growth_rate(1.0), 66.0);
        assert_eq!(classical_horizon_forced(1.0, 1.0, &l), 1.0 / 132.0);
        assert_eq!(classical_horizon_forced(0.0, 0.0, &l), 1.0 / 64.0);
        assert!(classical_horizon_forced(1e12, 1.0, &l) < 1e-13);
    }

    #[test]
    fn forced_curve_rejects_times_past_singularity() {
        let l = ledger();
        let c = classical_curve_forced(1.0, 1.0, &l).unwrap();
        // (1 + ‖u₀‖₁)² = 4, so the square root vanishes at 1/264
        assert_eq!(c.horizon(), 1.0 / 264.0);
        assert!(c.evaluate(0.9 / 264.0).unwrap().is_finite());
        match c.evaluate(1.0 / 200.0) {
            Err(Error::HorizonExceeded { horizon, .. }) => assert_eq!(horizon, 1.0 / 264.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.evaluate(1.0 / 264.0).is_err());
    }

    #[test]
    fn free_bound_and_horizon() {
        let l = ledger();
        assert_eq!(classical_bound_free(0.0, 0.7, &l).unwrap(), 0.7);
        assert_eq!(classical_horizon_free(1.0, 1.0), 1.0 / 128.0);
        let c = classical_curve_free(1.0, &l).unwrap();
        assert_eq!(c.horizon(), 1.0 / 128.0);
        assert!(matches!(c.evaluate(1.0 / 128.0), Err(Error::HorizonExceeded { .. })));
        // halfway to the horizon the fourth power has doubled
        let v = c.evaluate(1.0 / 256.0).unwrap();
        assert!((v * v - 2.0).abs() < 1e-14);
        assert_eq!(classical_horizon_free(0.0, 1.0), f64::INFINITY);
    }

    #[test]
    fn ledger_and_closed_form_free_horizons_agree() {
        for nu in [0.1, 0.5, 1.0, 3.0] {
            let l = ConstantLedger::with_defaults(nu, 1.0).unwrap();
            for y in [0.01, 1.0, 7.5] {
                let a = classical_curve_free(y, &l).unwrap().horizon();
                let b = classical_horizon_free(y, nu);
                assert!((a - b).abs() <= 1e-14 * b);
            }
        }
    }

    #[test]
    fn arctan_curves_are_constant_up_to_their_horizon() {
        let c = BoundCurve::ArctanSteady { level: 2.0, until: 1.0 };
        assert_eq!(c.evaluate(1.0).unwrap(), 2.0);
        assert!(c.evaluate(1.5).is_err());
        let f = BoundCurve::ArctanFree { level: 3.0 };
        assert_eq!(f.evaluate(1e9).unwrap(), 3.0);
        assert!(f.evaluate(-1.0).is_err());
    }
}
