use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::criteria::{arctan_bound_free, CriterionInput};
use super::curves::classical_horizon_free;
use super::ledger::ConstantLedger;
use crate::{Error, Result};

pub const COMPARISON_CSV_HEADER: &str =
    "l2_norm,classical_horizon,free_lhs,free_certified,tstar_lhs,tstar_certified,extends";

/// One sweep point of the classical-horizon versus free-criterion comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub l2_norm: f64,
    /// `ν³ / (128 ‖u₀‖₁⁴)`, infinite for a zero field.
    pub classical_horizon: f64,
    /// `c₁₁‖u₀‖² + arctan ‖u₀‖₁²`
    pub free_lhs: f64,
    pub free_certified: bool,
    /// `c₁₁‖u₀‖² + arctan √(ν³ / (128 T*))` with `T*` a fixed fraction of the
    /// classical horizon.
    pub tstar_lhs: f64,
    pub tstar_certified: bool,
    /// Certified for all time while the classical estimate stops at a
    /// finite horizon.
    pub extends: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub nu: f64,
    pub h1_sq: f64,
    /// `T* / classical horizon` used for the `T*`-form columns.
    pub horizon_fraction: f64,
    /// Largest `‖u₀‖` the free criterion certifies, `√((π/2 − arctan ‖u₀‖₁²) / c₁₁)`.
    pub threshold_l2: f64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{COMPARISON_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.l2_norm,
                r.classical_horizon,
                r.free_lhs,
                r.free_certified,
                r.tstar_lhs,
                r.tstar_certified,
                r.extends
            )?;
        }
        Ok(())
    }
}

/// Sweep `‖u₀‖` at fixed `‖u₀‖₁²`, reporting for each point the classical
/// unforced horizon and the verdict of the force-free arctan criterion.
pub fn interval_comparison(
    h1_sq: f64,
    l2_sweep: &[f64],
    ledger: &ConstantLedger,
    horizon_fraction: f64,
) -> Result<ComparisonTable> {
    if !(horizon_fraction > 0.0 && horizon_fraction.is_finite()) {
        return Err(Error::Domain(format!(
            "T* fraction must be positive, got {horizon_fraction}"
        )));
    }
    let nu = ledger.nu;
    let classical_horizon = classical_horizon_free(h1_sq, nu);
    let mut rows = Vec::with_capacity(l2_sweep.len());
    for &l2 in l2_sweep {
        let report = arctan_bound_free(&CriterionInput::free(l2, h1_sq), ledger).map_err(|e| match e {
            Error::Poincare { lhs, rhs } => Error::Domain(format!(
                "sweep value ‖u₀‖ = {l2} incompatible with ‖u₀‖₁² = {rhs}: λ₁‖u₀‖² = {lhs} is larger"
            )),
            other => other,
        })?;
        let t_star = horizon_fraction * classical_horizon;
        let tstar_arg = if t_star.is_finite() {
            (nu.powi(3) / (128.0 * t_star)).sqrt()
        } else {
            0.0
        };
        let tstar_lhs = ledger.energy * l2 * l2 + tstar_arg.atan();
        rows.push(ComparisonRow {
            l2_norm: l2,
            classical_horizon,
            free_lhs: report.lhs,
            free_certified: report.satisfied,
            tstar_lhs,
            tstar_certified: tstar_lhs < FRAC_PI_2,
            extends: report.satisfied && classical_horizon.is_finite(),
        });
    }
    Ok(ComparisonTable {
        nu,
        h1_sq,
        horizon_fraction,
        threshold_l2: ((FRAC_PI_2 - h1_sq.atan()) / ledger.energy).sqrt(),
        rows,
    })
}
