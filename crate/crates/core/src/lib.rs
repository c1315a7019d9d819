//! Pseudo-spectral solver for the incompressible Navier-Stokes equations on
//! the periodic box, together with an engine that evaluates a-priori bounds
//! on the enstrophy `‖∇u‖²` and checks them against simulated trajectories.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral_field`]: wave grids, divergence-free spectral velocity
//!   fields, the Leray projector, Stokes operator powers, Sobolev norms and
//!   the trilinear form `b(u, v, w)`.
//! * [`ns_solver`]: integrating-factor Runge-Kutta time stepping with
//!   recorded norm traces.
//! * [`bounds_engine`]: constant ledger, classical Riccati-type bounds,
//!   arctan-type regularity criteria and an independent ODE oracle.
//! * [`regularity_monitor`]: checks of the differential and integral
//!   inequalities and of certified bounds along a trace.

pub mod bounds_engine;
pub mod calculus;
mod error;
pub mod ns_solver;
pub mod regularity_monitor;
pub mod spectral_field;

pub use error::{Error, Result};
