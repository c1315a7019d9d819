//! Divergence-free periodic vector fields in Fourier space.

pub mod embedding;
mod fft;
mod grid;
mod ops;
pub mod snapshot;
mod velocity;

pub use grid::{first_eigenvalue, stokes_eigenvalues, Eigenvalue, EigenvalueList, WaveGrid};
pub use ops::{
    l2_inner, leray_project, nonlinear_term, random_divfree_field, shear_flow, sobolev_norm,
    sobolev_norm_sq, stokes_apply, trilinear_b,
};
/// Complex coefficient type of all spectra.
pub use rustfft::num_complex::Complex64;
pub use velocity::{RealVelocity, SobolevIndex, SpectralVelocity, VectorSpectrum, DEFAULT_DIV_TOLERANCE};
