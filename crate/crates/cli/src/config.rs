//! Resolution of experiment settings: command-line flag, then config file,
//! then built-in default.

use std::path::{Path, PathBuf};

use nsreg::bounds_engine::{default_holder_product, ConstantLedger};
use nsreg::ns_solver::{IntegratorOrder, SolverConfig};
use nsreg::regularity_monitor::MonitorTolerances;
use serde::{Deserialize, Serialize};

use crate::args::{
    BoundsArgs, CalibrateArgs, CalibrationInit, CompareArgs, ForcingKind, InitKind, LedgerArgs, MonitorArgs,
    OrderArg, SimArgs,
};
use crate::error::CliError;

/// Keys accepted in the TOML config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub init: Option<InitKind>,
    pub snapshot: Option<PathBuf>,
    pub nu: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub amplitude: Option<f64>,
    pub slope: Option<f64>,
    pub forcing: Option<ForcingKind>,
    pub force_amplitude: Option<f64>,
    pub order: Option<OrderArg>,
    pub cfl: Option<f64>,
    pub lambda1: Option<f64>,
    pub holder_product: Option<f64>,
    pub l2: Option<f64>,
    pub h1sq: Option<f64>,
    pub f: Option<f64>,
    pub intf2: Option<f64>,
    pub sweep: Option<Vec<f64>>,
    pub tstar_fraction: Option<f64>,
    pub ensemble: Option<usize>,
    pub target_lhs: Option<f64>,
    pub levels: Option<usize>,
    pub calibration_init: Option<CalibrationInit>,
    pub h1_tolerance: Option<f64>,
    pub energy_tolerance: Option<f64>,
    pub dominance_tolerance: Option<f64>,
    pub balance_tolerance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| CliError::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSettings {
    pub init: InitKind,
    pub snapshot: Option<PathBuf>,
    pub nu: f64,
    pub t_end: f64,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
    pub amplitude: f64,
    pub slope: f64,
    pub forcing: ForcingKind,
    pub force_amplitude: f64,
    pub order: OrderArg,
    pub cfl: Option<f64>,
    pub save_snapshot: Option<PathBuf>,
}

impl SimSettings {
    pub fn resolve(a: &SimArgs, f: &FileConfig) -> Result<Self, CliError> {
        let init = pick(&a.init, &f.init, InitKind::Shear);
        // a Kolmogorov start is only stationary under its own force
        let default_forcing = if init == InitKind::Kolmogorov {
            ForcingKind::Shear
        } else {
            ForcingKind::Zero
        };
        let s = Self {
            init,
            snapshot: a.snapshot.clone().or_else(|| f.snapshot.clone()),
            nu: pick(&a.nu, &f.nu, 1.0),
            t_end: pick(&a.t_end, &f.t_end, 1.0),
            n: pick(&a.n, &f.n, 16),
            dt: pick(&a.dt, &f.dt, 1e-3),
            seed: pick(&a.seed, &f.seed, 0),
            amplitude: pick(&a.amplitude, &f.amplitude, 1.0),
            slope: pick(&a.slope, &f.slope, -2.0),
            forcing: pick(&a.forcing, &f.forcing, default_forcing),
            force_amplitude: pick(&a.force_amplitude, &f.force_amplitude, 1.0),
            order: pick(&a.order, &f.order, OrderArg::Rk4),
            cfl: a.cfl.or(f.cfl),
            save_snapshot: a.save_snapshot.clone(),
        };
        if s.init == InitKind::Snapshot && s.snapshot.is_none() {
            return Err(CliError::Usage("--init snapshot needs --snapshot PATH".into()));
        }
        if !(s.amplitude.is_finite() && s.amplitude >= 0.0) {
            return Err(CliError::Usage(format!("amplitude must be ≥ 0, got {}", s.amplitude)));
        }
        if !s.force_amplitude.is_finite() {
            return Err(CliError::Usage("force amplitude must be finite".into()));
        }
        if let Some(c) = s.cfl {
            if !(c > 0.0 && c.is_finite()) {
                return Err(CliError::Usage(format!("Courant number must be positive, got {c}")));
            }
        }
        s.solver_config()?;
        Ok(s)
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let order = match self.order {
            OrderArg::Rk2 => IntegratorOrder::Rk2,
            OrderArg::Rk4 => IntegratorOrder::Rk4,
        };
        let mut cfg = SolverConfig::new(self.nu, self.dt, self.t_end)?.with_order(order);
        if let Some(c) = self.cfl {
            cfg = cfg.with_cfl(c);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerSettings {
    pub nu: f64,
    pub lambda1: f64,
    pub holder_product: f64,
}

impl LedgerSettings {
    pub fn resolve(nu: f64, a: &LedgerArgs, f: &FileConfig) -> Self {
        Self {
            nu,
            lambda1: pick(&a.lambda1, &f.lambda1, 1.0),
            holder_product: pick(&a.holder_product, &f.holder_product, default_holder_product()),
        }
    }

    pub fn ledger(&self) -> Result<ConstantLedger, CliError> {
        Ok(ConstantLedger::with_holder_product(self.nu, self.lambda1, self.holder_product)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionChoice {
    Free,
    Steady,
    Timedep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSettings {
    pub criterion: CriterionChoice,
    pub l2: f64,
    pub h1sq: f64,
    pub t_end: f64,
    pub f: f64,
    pub intf2: f64,
    pub ledger: LedgerSettings,
}

impl BoundsSettings {
    pub fn resolve(a: &BoundsArgs, f: &FileConfig) -> Result<Self, CliError> {
        let criterion = if a.steady {
            CriterionChoice::Steady
        } else if a.timedep {
            CriterionChoice::Timedep
        } else {
            CriterionChoice::Free
        };
        let h1sq = a
            .h1sq
            .or(f.h1sq)
            .ok_or_else(|| CliError::Usage("bounds needs --h1sq".into()))?;
        let t_default = if criterion == CriterionChoice::Steady { 1.0 } else { f64::INFINITY };
        Ok(Self {
            criterion,
            l2: pick(&a.l2, &f.l2, 0.0),
            h1sq,
            t_end: pick(&a.t_end, &f.t_end, t_default),
            f: pick(&a.f, &f.f, 0.0),
            intf2: pick(&a.intf2, &f.intf2, 0.0),
            ledger: LedgerSettings::resolve(pick(&a.nu, &f.nu, 1.0), &a.ledger, f),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSettings {
    pub h1sq: f64,
    pub sweep: Vec<f64>,
    pub tstar_fraction: f64,
    pub simulate: bool,
    pub n: usize,
    pub t_end: f64,
    pub dt: f64,
    pub ledger: LedgerSettings,
}

/// `1, 0.5, 0.2, 0.15, 0.12, 0.11, 0.1, 0.05, 0.02, 0.01, 0.001`
pub fn default_sweep() -> Vec<f64> {
    vec![1.0, 0.5, 0.2, 0.15, 0.12, 0.11, 0.1, 0.05, 0.02, 0.01, 0.001]
}

impl CompareSettings {
    pub fn resolve(a: &CompareArgs, f: &FileConfig) -> Result<Self, CliError> {
        let s = Self {
            h1sq: pick(&a.h1sq, &f.h1sq, 1.0),
            sweep: pick(&a.sweep, &f.sweep, default_sweep()),
            tstar_fraction: pick(&a.tstar_fraction, &f.tstar_fraction, 1.0),
            simulate: a.simulate,
            n: pick(&a.n, &f.n, 32),
            t_end: pick(&a.t_end, &f.t_end, 1.0),
            dt: pick(&a.dt, &f.dt, 1e-2),
            ledger: LedgerSettings::resolve(pick(&a.nu, &f.nu, 1.0), &a.ledger, f),
        };
        if s.sweep.is_empty() {
            return Err(CliError::Usage("--sweep must list at least one value".into()));
        }
        if let Some(bad) = s.sweep.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(CliError::Usage(format!("--sweep values must be finite and ≥ 0, got {bad}")));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrateSettings {
    pub n: usize,
    pub ensemble: usize,
    pub seed: u64,
    pub slope: f64,
    pub init: CalibrationInit,
    pub levels: usize,
}

impl CalibrateSettings {
    pub fn resolve(a: &CalibrateArgs, f: &FileConfig) -> Result<Self, CliError> {
        let s = Self {
            n: pick(&a.n, &f.n, 16),
            ensemble: pick(&a.ensemble, &f.ensemble, 16),
            seed: pick(&a.seed, &f.seed, 0),
            slope: pick(&a.slope, &f.slope, -2.0),
            init: pick(&a.init, &f.calibration_init, CalibrationInit::Random),
            levels: pick(&a.levels, &f.levels, 3),
        };
        if s.ensemble == 0 {
            return Err(CliError::Usage("ensemble size must be at least 1".into()));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSettings {
    pub sim: SimSettings,
    pub ledger: LedgerSettings,
    pub ensemble: Option<usize>,
    pub target_lhs: Option<f64>,
    pub tolerances: MonitorTolerances,
}

impl MonitorSettings {
    pub fn resolve(a: &MonitorArgs, f: &FileConfig) -> Result<Self, CliError> {
        let sim = SimSettings::resolve(&a.sim, f)?;
        let d = MonitorTolerances::default();
        let s = Self {
            ledger: LedgerSettings::resolve(sim.nu, &a.ledger, f),
            ensemble: a.ensemble.or(f.ensemble),
            target_lhs: a.target_lhs.or(f.target_lhs),
            tolerances: MonitorTolerances {
                h1_relative: pick(&a.h1_tolerance, &f.h1_tolerance, d.h1_relative),
                energy_relative: pick(&a.energy_tolerance, &f.energy_tolerance, d.energy_relative),
                dominance_relative: pick(&a.dominance_tolerance, &f.dominance_tolerance, d.dominance_relative),
                balance_relative: pick(&a.balance_tolerance, &f.balance_tolerance, d.balance_relative),
            },
            sim,
        };
        if s.ensemble == Some(0) {
            return Err(CliError::Usage("ensemble size must be at least 1".into()));
        }
        if s.ensemble.is_some() && s.sim.init != InitKind::Random {
            return Err(CliError::Usage("--ensemble needs --init random".into()));
        }
        if let Some(t) = s.target_lhs {
            if !(t > 0.0 && t < std::f64::consts::FRAC_PI_2) {
                return Err(CliError::Usage(format!("target LHS must lie in (0, π/2), got {t}")));
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let file: FileConfig = toml::from_str("nu = 0.5\nT = 3.0\nN = 8\n").unwrap();
        let args = SimArgs {
            nu: Some(0.25),
            ..Default::default()
        };
        let s = SimSettings::resolve(&args, &file).unwrap();
        assert_eq!(s.nu, 0.25);
        assert_eq!(s.t_end, 3.0);
        assert_eq!(s.n, 8);
        assert_eq!(s.dt, 1e-3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("viscosity = 1.0").is_err());
    }

    #[test]
    fn kolmogorov_start_brings_its_force() {
        let args = SimArgs {
            init: Some(InitKind::Kolmogorov),
            ..Default::default()
        };
        let s = SimSettings::resolve(&args, &FileConfig::default()).unwrap();
        assert_eq!(s.forcing, ForcingKind::Shear);
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let args = SimArgs {
            dt: Some(-1.0),
            ..Default::default()
        };
        assert!(SimSettings::resolve(&args, &FileConfig::default()).is_err());
        let args = SimArgs {
            init: Some(InitKind::Snapshot),
            ..Default::default()
        };
        assert!(matches!(
            SimSettings::resolve(&args, &FileConfig::default()),
            Err(CliError::Usage(_))
        ));
    }
}
