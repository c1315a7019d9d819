use std::fmt;
use std::sync::Arc;

use crate::spectral_field::{leray_project, SpectralVelocity, VectorSpectrum, WaveGrid};
use crate::{Error, Result};

/// Generator for a time-dependent body force; the output is projected onto
/// divergence-free fields before use.
pub type ForceGenerator = Arc<dyn Fn(f64) -> VectorSpectrum + Send + Sync>;

/// Body force `f` on the right-hand side of the momentum equation.
#[derive(Clone, Default)]
pub enum ForcingSpec {
    #[default]
    Zero,
    /// A time-independent force in `V₀`.
    Steady(SpectralVelocity),
    /// `f(t)`, evaluated at every Runge–Kutta stage.
    TimeDependent(ForceGenerator),
}

impl ForcingSpec {
    /// Steady force `P f` from an arbitrary raw field.
    pub fn steady(raw: &VectorSpectrum) -> Self {
        ForcingSpec::Steady(leray_project(raw))
    }

    pub fn time_dependent<F>(generator: F) -> Self
    where
        F: Fn(f64) -> VectorSpectrum + Send + Sync + 'static,
    {
        ForcingSpec::TimeDependent(Arc::new(generator))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingSpec::Zero)
    }

    /// `P f(t)`, or `None` for the zero force.
    pub fn evaluate(&self, t: f64, grid: &WaveGrid) -> Result<Option<SpectralVelocity>> {
        match self {
            ForcingSpec::Zero => Ok(None),
            ForcingSpec::Steady(f) => {
                f.grid().ensure_same(grid)?;
                Ok(Some(f.clone()))
            }
            ForcingSpec::TimeDependent(gen) => {
                let raw = gen(t);
                raw.grid().ensure_same(grid)?;
                if !raw.is_finite() {
                    return Err(Error::Domain(format!("forcing is not finite at t = {t}")));
                }
                Ok(Some(leray_project(&raw)))
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ForcingSpec::Zero => "zero",
            ForcingSpec::Steady(_) => "steady",
            ForcingSpec::TimeDependent(_) => "time_dependent",
        }
    }
}

impl fmt::Debug for ForcingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingSpec::Zero => write!(f, "ForcingSpec::Zero"),
            ForcingSpec::Steady(v) => write!(f, "ForcingSpec::Steady(n = {})", v.grid().n()),
            ForcingSpec::TimeDependent(_) => write!(f, "ForcingSpec::TimeDependent(..)"),
        }
    }
}
