use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::curves::BoundCurve;
use super::ledger::ConstantLedger;
use crate::{Error, Result};

/// Forcing data entering a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ForcingData {
    None,
    /// `‖f‖` of a time-independent force.
    Steady { norm: f64 },
    /// `∫₀ᵀ ‖f(s)‖² ds`.
    Integrated { int_f_sq: f64 },
}

/// Scalar data of a regularity criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionInput {
    /// `‖u₀‖`
    pub l2_norm: f64,
    /// `‖u₀‖₁²`
    pub h1_sq: f64,
    /// Length of the interval of interest; may be infinite.
    pub horizon: f64,
    pub forcing: ForcingData,
}

impl CriterionInput {
    pub fn free(l2_norm: f64, h1_sq: f64) -> Self {
        Self {
            l2_norm,
            h1_sq,
            horizon: f64::INFINITY,
            forcing: ForcingData::None,
        }
    }

    pub fn steady(l2_norm: f64, h1_sq: f64, horizon: f64, f_norm: f64) -> Self {
        Self {
            l2_norm,
            h1_sq,
            horizon,
            forcing: ForcingData::Steady { norm: f_norm },
        }
    }

    pub fn time_dependent(l2_norm: f64, h1_sq: f64, horizon: f64, int_f_sq: f64) -> Self {
        Self {
            l2_norm,
            h1_sq,
            horizon,
            forcing: ForcingData::Integrated { int_f_sq },
        }
    }

    /// Signs, finiteness and `‖u₀‖₁² ≥ λ₁‖u₀‖²`.
    pub fn validate(&self, lambda1: f64) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite and ≥ 0, got {v}")))
            }
        };
        finite_nonneg("‖u₀‖", self.l2_norm)?;
        finite_nonneg("‖u₀‖₁²", self.h1_sq)?;
        if !(self.horizon > 0.0) {
            return Err(Error::Domain(format!("T must be positive, got {}", self.horizon)));
        }
        match self.forcing {
            ForcingData::None => {}
            ForcingData::Steady { norm } => finite_nonneg("‖f‖", norm)?,
            ForcingData::Integrated { int_f_sq } => finite_nonneg("∫‖f‖²", int_f_sq)?,
        }
        let lower = lambda1 * self.l2_norm * self.l2_norm;
        // relative slack for inputs computed from the same field in floating point
        if self.h1_sq < lower * (1.0 - 1e-12) {
            return Err(Error::Poincare {
                lhs: lower,
                rhs: self.h1_sq,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Steady,
    TimeDependent,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    pub lhs: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// `π/2 − lhs`
    pub margin: f64,
    pub bound: Option<BoundCurve>,
    /// End of the interval the verdict speaks about.
    pub horizon: f64,
}

impl CriterionReport {
    fn new(kind: CriterionKind, lhs: f64, horizon: f64) -> Self {
        let satisfied = lhs < FRAC_PI_2;
        let bound = satisfied.then(|| {
            let level = lhs.tan();
            match kind {
                CriterionKind::Steady => BoundCurve::ArctanSteady { level, until: horizon },
                CriterionKind::TimeDependent => BoundCurve::ArctanTimedep { level, until: horizon },
                CriterionKind::Free => BoundCurve::ArctanFree { level },
            }
        });
        Self {
            kind,
            lhs,
            threshold: FRAC_PI_2,
            satisfied,
            margin: FRAC_PI_2 - lhs,
            bound,
            horizon,
        }
    }

    /// Certified level `tan(lhs)`, if any.
    pub fn bound_level(&self) -> Option<f64> {
        self.bound.map(|b| match b {
            BoundCurve::ArctanSteady { level, .. }
            | BoundCurve::ArctanTimedep { level, .. }
            | BoundCurve::ArctanFree { level } => level,
            other => other.evaluate(0.0).unwrap_or(f64::NAN),
        })
    }

    /// Sample times used in the JSON dump: five equispaced points on a
    /// finite horizon, a few decades otherwise.
    pub fn default_sample_times(&self) -> Vec<f64> {
        if self.horizon.is_finite() {
            (0..=4).map(|i| self.horizon * i as f64 / 4.0).collect()
        } else {
            vec![0.0, 1.0, 10.0, 100.0]
        }
    }

    /// `{kind, lhs, threshold, satisfied, margin, bound_at, horizon}`; an
    /// infinite horizon is written as `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let bound_at: Vec<serde_json::Value> = match &self.bound {
            None => Vec::new(),
            Some(b) => self
                .default_sample_times()
                .into_iter()
                .filter_map(|t| b.evaluate(t).ok().map(|v| json!({ "t": t, "value": v })))
                .collect(),
        };
        json!({
            "kind": self.kind,
            "lhs": finite_or_null(self.lhs),
            "threshold": self.threshold,
            "satisfied": self.satisfied,
            "margin": finite_or_null(self.margin),
            "bound_at": bound_at,
            "horizon": finite_or_null(self.horizon),
        })
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// `a · b`, with `0 · ∞ = 0` so that an absent force over an infinite
/// horizon contributes nothing.
fn product(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn wrong_forcing(kind: &str) -> Error {
    Error::Usage(format!("{kind} criterion called with mismatched forcing data"))
}

/// `c₈ T ‖f‖² + c₉ ‖u₀‖² + arctan ‖u₀‖₁²` for a time-independent force.
pub fn arctan_bound_steady(input: &CriterionInput, ledger: &ConstantLedger) -> Result<CriterionReport> {
    input.validate(ledger.lambda1)?;
    let f = match input.forcing {
        ForcingData::Steady { norm } => norm,
        ForcingData::None => 0.0,
        ForcingData::Integrated { .. } => return Err(wrong_forcing("steady")),
    };
    let lhs = product(ledger.steady_forcing, product(input.horizon, f * f))
        + ledger.steady_energy * input.l2_norm * input.l2_norm
        + input.h1_sq.atan();
    Ok(CriterionReport::new(CriterionKind::Steady, lhs, input.horizon))
}

/// `c₁₀ ∫₀ᵀ‖f‖² + c₁₁ ‖u₀‖² + arctan ‖u₀‖₁²`.
pub fn arctan_bound_timedep(input: &CriterionInput, ledger: &ConstantLedger) -> Result<CriterionReport> {
    input.validate(ledger.lambda1)?;
    let int_f_sq = match input.forcing {
        ForcingData::Integrated { int_f_sq } => int_f_sq,
        ForcingData::None => 0.0,
        ForcingData::Steady { norm } => product(input.horizon, norm * norm),
    };
    let lhs = ledger.timedep_forcing * int_f_sq
        + ledger.energy * input.l2_norm * input.l2_norm
        + input.h1_sq.atan();
    Ok(CriterionReport::new(CriterionKind::TimeDependent, lhs, input.horizon))
}

/// `c₁₁ ‖u₀‖² + arctan ‖u₀‖₁²` without forcing; the certified bound holds
/// for all time.
pub fn arctan_bound_free(input: &CriterionInput, ledger: &ConstantLedger) -> Result<CriterionReport> {
    input.validate(ledger.lambda1)?;
    if input.forcing != ForcingData::None {
        return Err(wrong_forcing("force-free"));
    }
    let lhs = ledger.energy * input.l2_norm * input.l2_norm + input.h1_sq.atan();
    Ok(CriterionReport::new(CriterionKind::Free, lhs, f64::INFINITY))
}

/// Dispatch on the forcing data.
pub fn evaluate_criterion(input: &CriterionInput, ledger: &ConstantLedger) -> Result<CriterionReport> {
    match input.forcing {
        ForcingData::None => arctan_bound_free(input, ledger),
        ForcingData::Steady { .. } => arctan_bound_steady(input, ledger),
        ForcingData::Integrated { .. } => arctan_bound_timedep(input, ledger),
    }
}
