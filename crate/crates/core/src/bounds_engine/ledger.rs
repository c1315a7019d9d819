use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `(2048/27)^{1/4}`: the default value of `C_S · C_I`, chosen so that the
/// cubic enstrophy coefficient equals `64/ν³` and the free-decay horizon
/// is `ν³ / (128 ‖u₀‖₁⁴)`.
pub fn default_holder_product() -> f64 {
    (2048.0f64 / 27.0).powf(0.25)
}

/// Every constant of the energy-estimate chain, derived from the viscosity,
/// the first Stokes eigenvalue and the two functional-inequality constants.
///
/// | field                      | value                      | conventional symbol |
/// |----------------------------|----------------------------|---------------------|
/// | `forcing`                  | `1/(2ν)`                   | c₃                  |
/// | `holder`                   | `C_S C_I`                  | c₅                  |
/// | `cubic`                    | `27 c₅⁴ / (32 ν³)`         | c₆                  |
/// | `energy_forcing`           | `1/(2νλ₁)`                 | c₇                  |
/// | `steady_forcing`           | `c₃ + 2c₆c₇/ν`             | c₈                  |
/// | `steady_energy`            | `c₆/ν`                     | c₉ (criterion)      |
/// | `timedep_forcing`          | `c₃ + 2c₆c₇/ν`             | c₁₀                 |
/// | `energy`                   | `c₆/ν`                     | c₁₁                 |
/// | `free_riccati`             | `c₆`                       | c₁₂                 |
/// | `classical_nonlinear`      | `c₆ν³`                     | c₁                  |
/// | `enstrophy_integral`       | `1/ν`                      | c₉ (`∫y ≤ c₉‖u₀‖²`) |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub nu: f64,
    pub lambda1: f64,
    pub sobolev_constant: f64,
    pub interpolation_constant: f64,
    pub forcing: f64,
    pub holder: f64,
    pub cubic: f64,
    pub energy_forcing: f64,
    pub steady_forcing: f64,
    pub steady_energy: f64,
    pub timedep_forcing: f64,
    pub energy: f64,
    pub free_riccati: f64,
    pub classical_nonlinear: f64,
    pub enstrophy_integral: f64,
}

impl ConstantLedger {
    pub fn derive(nu: f64, lambda1: f64, sobolev_constant: f64, interpolation_constant: f64) -> Result<Self> {
        Self::build(
            nu,
            lambda1,
            sobolev_constant,
            interpolation_constant,
            sobolev_constant * interpolation_constant,
        )
    }

    fn build(nu: f64, lambda1: f64, sobolev_constant: f64, interpolation_constant: f64, holder: f64) -> Result<Self> {
        for (name, v) in [
            ("viscosity", nu),
            ("first eigenvalue", lambda1),
            ("Sobolev constant", sobolev_constant),
            ("interpolation constant", interpolation_constant),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let forcing = 1.0 / (2.0 * nu);
        let cubic = 27.0 * holder.powi(4) / (32.0 * nu.powi(3));
        let energy_forcing = 1.0 / (2.0 * nu * lambda1);
        let steady_forcing = forcing + 2.0 * cubic * energy_forcing / nu;
        let energy = cubic / nu;
        Ok(Self {
            nu,
            lambda1,
            sobolev_constant,
            interpolation_constant,
            forcing,
            holder,
            cubic,
            energy_forcing,
            steady_forcing,
            steady_energy: energy,
            timedep_forcing: steady_forcing,
            energy,
            free_riccati: cubic,
            classical_nonlinear: cubic * nu.powi(3),
            enstrophy_integral: 1.0 / nu,
        })
    }

    /// Ledger with the default product `C_S C_I = (2048/27)^{1/4}`.
    pub fn with_defaults(nu: f64, lambda1: f64) -> Result<Self> {
        Self::with_holder_product(nu, lambda1, default_holder_product())
    }

    /// Ledger for a given product `C_S · C_I`. Only the product enters the
    /// chain; it is kept as given and the reported individual constants are
    /// the even split `√product` each.
    pub fn with_holder_product(nu: f64, lambda1: f64, product: f64) -> Result<Self> {
        if !(product.is_finite() && product > 0.0) {
            return Err(Error::Config(format!("C_S·C_I must be positive, got {product}")));
        }
        let c = product.sqrt();
        Self::build(nu, lambda1, c, c, product)
    }

    /// `K = 2‖f‖²/ν + c₁/ν³` of the classical forced bound.
    pub fn growth_rate(&self, f_norm: f64) -> f64 {
        2.0 * f_norm * f_norm / self.nu + self.classical_nonlinear / self.nu.powi(3)
    }

    /// Flat listing with internal names, conventional aliases and values.
    pub fn entries(&self) -> Vec<LedgerEntry> {
        let e = |name: &'static str, alias: &'static str, value: f64| LedgerEntry { name, alias, value };
        vec![
            e("nu", "ν", self.nu),
            e("lambda1", "λ₁", self.lambda1),
            e("sobolev_constant", "C_S", self.sobolev_constant),
            e("interpolation_constant", "C_I", self.interpolation_constant),
            e("forcing", "c3", self.forcing),
            e("holder", "c5", self.holder),
            e("cubic", "c6", self.cubic),
            e("energy_forcing", "c7", self.energy_forcing),
            e("steady_forcing", "c8", self.steady_forcing),
            e("steady_energy", "c9", self.steady_energy),
            e("timedep_forcing", "c10", self.timedep_forcing),
            e("energy", "c11", self.energy),
            e("free_riccati", "c12", self.free_riccati),
            e("classical_nonlinear", "c1", self.classical_nonlinear),
            e("enstrophy_integral", "c9 (integral of y)", self.enstrophy_integral),
        ]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "constants": self.entries(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub name: &'static str,
    pub alias: &'static str,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_calibration_gives_cubic_64() {
        let l = ConstantLedger::with_defaults(1.0, 1.0).unwrap();
        assert_eq!(l.cubic, 64.0);
        assert_eq!(2.0 * l.free_riccati, 128.0);
        assert_eq!(l.energy, 64.0);
        assert_eq!(l.classical_nonlinear, 64.0);
        assert_eq!(l.steady_forcing, 64.5);
    }

    #[test]
    fn simple_coefficients_at_nu_2() {
        let l = ConstantLedger::with_defaults(2.0, 1.0).unwrap();
        assert_eq!(l.forcing, 0.25);
        assert_eq!(l.energy_forcing, 0.25);
    }

    #[test]
    fn cubic_coefficient_is_quartic_in_holder_product() {
        let a = ConstantLedger::with_holder_product(1.0, 1.0, 1.3).unwrap();
        let b = ConstantLedger::with_holder_product(1.0, 1.0, 2.6).unwrap();
        assert!((b.cubic / a.cubic - 16.0).abs() < 1e-12);
    }

    #[test]
    fn identities_hold_bitwise() {
        for (nu, lam, cs, ci) in [(1.0, 1.0, 0.7, 1.9), (0.013, 4.0, 0.4, 0.8), (3.5, 0.25, 2.0, 2.0)] {
            let l = ConstantLedger::derive(nu, lam, cs, ci).unwrap();
            assert_eq!(l.forcing, 1.0 / (2.0 * nu));
            assert_eq!(l.holder, cs * ci);
            assert_eq!(l.cubic, 27.0 * (cs * ci).powi(4) / (32.0 * nu.powi(3)));
            assert_eq!(l.energy_forcing, 1.0 / (2.0 * nu * lam));
            assert_eq!(l.steady_energy, l.cubic / nu);
            assert_eq!(l.energy, l.cubic / nu);
            assert_eq!(l.steady_forcing, l.forcing + 2.0 * l.cubic * l.energy_forcing / nu);
            assert_eq!(l.timedep_forcing, l.steady_forcing);
            assert_eq!(l.free_riccati, l.cubic);
            assert_eq!(l.classical_nonlinear, l.cubic * nu.powi(3));
            assert_eq!(l.growth_rate(0.3), 2.0 * 0.3 * 0.3 / nu + l.classical_nonlinear / nu.powi(3));
            assert!(l.entries().iter().all(|e| e.value > 0.0));
        }
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(ConstantLedger::derive(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ConstantLedger::derive(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ConstantLedger::derive(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ConstantLedger::derive(1.0, 1.0, 1.0, f64::NAN).is_err());
    }
}
