use serde::{Deserialize, Serialize};

use super::config::{IntegratorOrder, SolverConfig, StepPolicy};
use super::forcing::ForcingSpec;
use super::trace::{NormSample, NormTrace};
use crate::spectral_field::{
    l2_inner, nonlinear_term, sobolev_norm_sq, SobolevIndex, SpectralVelocity, DEFAULT_DIV_TOLERANCE,
};
use crate::{Error, Result};

/// `−B(u, u) + P f(t)`.
fn explicit_rhs(u: &SpectralVelocity, f: &ForcingSpec, t: f64) -> Result<SpectralVelocity> {
    let mut rhs = nonlinear_term(u).scaled(-1.0);
    if let Some(force) = f.evaluate(t, u.grid())? {
        rhs.add_scaled(1.0, &force)?;
    }
    Ok(rhs)
}

fn decay(u: &SpectralVelocity, nu: f64, dt: f64) -> SpectralVelocity {
    u.map_modes(|k2| (-nu * k2 * dt).exp())
}

fn combine(terms: &[(f64, &SpectralVelocity)]) -> Result<SpectralVelocity> {
    let (a0, first) = terms[0];
    let mut out = first.scaled(a0);
    for (a, v) in &terms[1..] {
        out.add_scaled(*a, v)?;
    }
    Ok(out)
}

/// Advance `du/dt = −νAu − B(u,u) + Pf` by one step of length `dt`.
///
/// The viscous term is integrated exactly through the factor `e^{−ν|k|²t}`;
/// the nonlinear and forcing terms by explicit Runge–Kutta of the configured
/// order applied to `e^{νAt} u`.
pub fn step(
    u: &SpectralVelocity,
    forcing: &ForcingSpec,
    t: f64,
    dt: f64,
    config: &SolverConfig,
) -> Result<SpectralVelocity> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let nu = config.nu;
    let next = match config.order {
        IntegratorOrder::Rk4 => {
            let half = 0.5 * dt;
            let u_half = decay(u, nu, half);
            let u_full = decay(u, nu, dt);
            let k1 = explicit_rhs(u, forcing, t)?;
            let a = decay(&combine(&[(1.0, u), (half, &k1)])?, nu, half);
            let k2 = explicit_rhs(&a, forcing, t + half)?;
            let b = combine(&[(1.0, &u_half), (half, &k2)])?;
            let k3 = explicit_rhs(&b, forcing, t + half)?;
            let c = combine(&[(1.0, &u_full), (dt, &decay(&k3, nu, half))])?;
            let k4 = explicit_rhs(&c, forcing, t + dt)?;
            let k1e = decay(&k1, nu, dt);
            let k23e = decay(&combine(&[(1.0, &k2), (1.0, &k3)])?, nu, half);
            combine(&[
                (1.0, &u_full),
                (dt / 6.0, &k1e),
                (dt / 3.0, &k23e),
                (dt / 6.0, &k4),
            ])?
        }
        IntegratorOrder::Rk2 => {
            let u_full = decay(u, nu, dt);
            let k1 = explicit_rhs(u, forcing, t)?;
            let a = decay(&combine(&[(1.0, u), (dt, &k1)])?, nu, dt);
            let k2 = explicit_rhs(&a, forcing, t + dt)?;
            combine(&[(1.0, &u_full), (0.5 * dt, &decay(&k1, nu, dt)), (0.5 * dt, &k2)])?
        }
    };
    if !next.is_finite() {
        return Err(Error::NumericalBlowup {
            last_valid_time: t,
            reason: "non-finite spectral coefficient".into(),
        });
    }
    if config.verify_invariants {
        let g = next.grid();
        let scale = next.max_abs();
        let mean = next.mode(0).iter().map(|c| c.norm()).fold(0.0, f64::max);
        let div = next.max_divergence() / (g.scale() * g.n() as f64);
        if mean > DEFAULT_DIV_TOLERANCE * scale || div > DEFAULT_DIV_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!(
                "step from t = {t} broke incompressibility (mean {mean:e}, divergence {div:e})"
            )));
        }
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    NumericalBlowup { last_valid_time: f64, reason: String },
}

impl Termination {
    pub fn is_blowup(&self) -> bool {
        matches!(self, Termination::NumericalBlowup { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub trace: NormTrace,
    pub final_state: SpectralVelocity,
    pub final_time: f64,
    pub steps: usize,
    pub termination: Termination,
}

pub fn measure(u: &SpectralVelocity, forcing: &ForcingSpec, t: f64) -> Result<NormSample> {
    let (f_dot_u, f_sq) = match forcing.evaluate(t, u.grid())? {
        Some(f) => (l2_inner(&f, u)?, sobolev_norm_sq(&f, SobolevIndex::L2)),
        None => (0.0, 0.0),
    };
    Ok(NormSample {
        t,
        l2_sq: sobolev_norm_sq(u, SobolevIndex::L2),
        h1_sq: sobolev_norm_sq(u, SobolevIndex::H1),
        h2_sq: sobolev_norm_sq(u, SobolevIndex::H2),
        f_dot_u,
        f_sq,
    })
}

fn cfl_step(u: &SpectralVelocity, courant: f64, dt_max: f64) -> f64 {
    let phys = u.to_physical();
    let umax = (0..3)
        .flat_map(|c| phys.component(c).iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    if umax == 0.0 {
        dt_max
    } else {
        (courant * u.grid().spacing() / umax).min(dt_max)
    }
}

/// Integrate from `t = 0` to `config.t_end`, recording norms after every step.
///
/// Numerical blow-up (non-finite coefficients or enstrophy above the
/// configured ceiling) ends the run early and is reported through
/// [`Simulation::termination`]; the trace holds every valid sample.
pub fn simulate(u0: &SpectralVelocity, forcing: &ForcingSpec, config: &SolverConfig) -> Result<Simulation> {
    config.validate()?;
    let mut trace = NormTrace::new(config.nu);
    trace.push(measure(u0, forcing, 0.0)?)?;
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let fixed_steps = (config.t_end / config.dt).round();
    let uniform = config.step_policy == StepPolicy::Fixed
        && (fixed_steps * config.dt - config.t_end).abs() <= 1e-9 * config.t_end;
    let mut termination = Termination::Completed;

    while t < config.t_end {
        let (dt, t_next) = if uniform {
            let t_next = if steps + 1 == fixed_steps as usize {
                config.t_end
            } else {
                (steps + 1) as f64 * config.dt
            };
            (t_next - t, t_next)
        } else {
            let proposed = match config.step_policy {
                StepPolicy::Fixed => config.dt,
                StepPolicy::Cfl { courant } => cfl_step(&u, courant, config.dt),
            };
            let remaining = config.t_end - t;
            if proposed >= remaining * (1.0 - 1e-12) {
                (remaining, config.t_end)
            } else {
                (proposed, t + proposed)
            }
        };
        let next = match step(&u, forcing, t, dt, config) {
            Ok(v) => v,
            Err(Error::NumericalBlowup { last_valid_time, reason }) => {
                termination = Termination::NumericalBlowup { last_valid_time, reason };
                break;
            }
            Err(e) => return Err(e),
        };
        let sample = measure(&next, forcing, t_next)?;
        if !(sample.h1_sq.is_finite() && sample.l2_sq.is_finite() && sample.h2_sq.is_finite()) {
            termination = Termination::NumericalBlowup {
                last_valid_time: t,
                reason: "non-finite norm".into(),
            };
            break;
        }
        if sample.h1_sq > config.enstrophy_ceiling {
            termination = Termination::NumericalBlowup {
                last_valid_time: t,
                reason: format!(
                    "enstrophy {:e} exceeded ceiling {:e}",
                    sample.h1_sq, config.enstrophy_ceiling
                ),
            };
            break;
        }
        trace.push(sample)?;
        u = next;
        t = t_next;
        steps += 1;
    }

    Ok(Simulation {
        trace,
        final_state: u,
        final_time: t,
        steps,
        termination,
    })
}
