//! Time integration of the incompressible Navier–Stokes equations
//! `du/dt + νAu + B(u,u) = Pf` on the periodic box.

mod config;
mod forcing;
mod integrator;
mod trace;

pub use config::{IntegratorOrder, SolverConfig, StepPolicy};
pub use forcing::{ForceGenerator, ForcingSpec};
pub use integrator::{measure, simulate, step, Simulation, Termination};
pub use trace::{energy_balance_residual, NormSample, NormTrace, CSV_HEADER};
