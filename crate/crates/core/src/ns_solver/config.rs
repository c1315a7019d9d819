use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorOrder {
    /// Integrating-factor Heun.
    Rk2,
    /// Integrating-factor classical Runge–Kutta.
    Rk4,
}

impl IntegratorOrder {
    pub fn order(self) -> u32 {
        match self {
            IntegratorOrder::Rk2 => 2,
            IntegratorOrder::Rk4 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepPolicy {
    Fixed,
    /// `dt ≤ courant · Δx / max|u|`, capped by the configured `dt`.
    Cfl { courant: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub order: IntegratorOrder,
    pub step_policy: StepPolicy,
    /// A run is declared blown up once `‖u‖₁²` exceeds this value.
    pub enstrophy_ceiling: f64,
    /// Check divergence and zero mean after every step.
    pub verify_invariants: bool,
}

impl SolverConfig {
    pub fn new(nu: f64, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            nu,
            dt,
            t_end,
            order: IntegratorOrder::Rk4,
            step_policy: StepPolicy::Fixed,
            enstrophy_ceiling: 1e12,
            verify_invariants: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_order(mut self, order: IntegratorOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_cfl(mut self, courant: f64) -> Self {
        self.step_policy = StepPolicy::Cfl { courant };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("viscosity", self.nu)?;
        positive("time step", self.dt)?;
        positive("final time", self.t_end)?;
        positive("enstrophy ceiling", self.enstrophy_ceiling)?;
        if let StepPolicy::Cfl { courant } = self.step_policy {
            positive("Courant number", courant)?;
        }
        Ok(())
    }
}
