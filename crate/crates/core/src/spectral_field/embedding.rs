//! Physical-space `Lᵖ` norms used to estimate the embedding constants
//! `‖u‖_{L⁶} ≤ C_S ‖∇u‖` and `‖∇u‖_{L³} ≤ C_I ‖∇u‖^{1/2} ‖Δu‖^{1/2}`.
//!
//! Integrals are trapezoidal sums on zero-padded grids. Polynomial integrands
//! such as `|u|⁶` are integrated exactly once the padded grid exceeds their
//! bandwidth; `|∇u|³` is not polynomial, so the sums from successively
//! doubled grids are combined by Richardson extrapolation in `h⁴` and `h⁶`.

use serde::{Deserialize, Serialize};

use super::fft;
use super::ops::sobolev_norm;
use super::velocity::{SobolevIndex, SpectralVelocity};
use crate::{Error, Result};

/// Padded grids `base·n, 2·base·n, …` used for the extrapolated quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureLevels {
    pub base_factor: usize,
    pub levels: usize,
}

impl Default for QuadratureLevels {
    fn default() -> Self {
        Self {
            base_factor: 2,
            levels: 3,
        }
    }
}

impl QuadratureLevels {
    fn validate(&self) -> Result<()> {
        if self.base_factor < 2 || self.levels == 0 || self.levels > 4 {
            return Err(Error::Config(format!(
                "quadrature needs base factor ≥ 2 and 1..=4 levels, got {:?}",
                self
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRatios {
    /// `‖u‖_{L⁶} / ‖∇u‖`
    pub sobolev: f64,
    /// `‖∇u‖_{L³} / (‖∇u‖^{1/2} ‖Δu‖^{1/2})`
    pub interpolation: f64,
}

impl EmbeddingRatios {
    pub fn product(&self) -> f64 {
        self.sobolev * self.interpolation
    }
}

/// Samples of the nine gradient components `∂ᵢuⱼ` and the three velocity
/// components on an `m`-point padded grid.
fn padded_samples(u: &SpectralVelocity, m: usize, gradient: bool) -> Vec<Vec<f64>> {
    let g = *u.grid();
    let n = g.n();
    let plan = fft::plan(m);
    let mut out = Vec::new();
    for j in 0..3 {
        if gradient {
            for i in 0..3 {
                let coeffs: Vec<_> = u
                    .component(j)
                    .iter()
                    .enumerate()
                    .map(|(idx, c)| c * rustfft::num_complex::Complex64::new(0.0, g.wavevector(idx)[i]))
                    .collect();
                let mut data = fft::pad(&coeffs, n, m);
                plan.inverse(&mut data);
                out.push(data.into_iter().map(|c| c.re).collect());
            }
        } else {
            let mut data = fft::pad(u.component(j), n, m);
            plan.inverse(&mut data);
            out.push(data.into_iter().map(|c| c.re).collect());
        }
    }
    out
}

/// `∫ (Σ_c f_c²)^{p/2} dx` by the trapezoidal rule on an `m`-point grid.
fn power_integral(samples: &[Vec<f64>], p: f64, length: f64, m: usize) -> f64 {
    let len = samples[0].len();
    let mut sum = 0.0;
    for idx in 0..len {
        let sq: f64 = samples.iter().map(|c| c[idx] * c[idx]).sum();
        sum += if p == 6.0 { sq * sq * sq } else { sq.powf(p / 2.0) };
    }
    sum * (length / m as f64).powi(3)
}

fn extrapolate(values: &[f64]) -> f64 {
    // successive grid doublings; error terms h⁴ then h⁶ then h⁸
    let mut table = values.to_vec();
    let mut factor = 16.0;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    table[0]
}

fn lp_integral(u: &SpectralVelocity, p: f64, gradient: bool, quad: QuadratureLevels) -> Result<f64> {
    quad.validate()?;
    let g = *u.grid();
    let values: Vec<f64> = (0..quad.levels)
        .map(|lvl| {
            let m = (quad.base_factor * g.n()) << lvl;
            let samples = padded_samples(u, m, gradient);
            power_integral(&samples, p, g.length(), m)
        })
        .collect();
    Ok(extrapolate(&values))
}

/// `‖u‖_{Lᵖ}` for the pointwise Euclidean magnitude of `u`.
pub fn velocity_lp_norm(u: &SpectralVelocity, p: f64, quad: QuadratureLevels) -> Result<f64> {
    Ok(lp_integral(u, p, false, quad)?.max(0.0).powf(1.0 / p))
}

/// `‖∇u‖_{Lᵖ}` for the pointwise Frobenius norm of the velocity gradient.
pub fn gradient_lp_norm(u: &SpectralVelocity, p: f64, quad: QuadratureLevels) -> Result<f64> {
    Ok(lp_integral(u, p, true, quad)?.max(0.0).powf(1.0 / p))
}

/// Both embedding ratios of a non-zero field.
pub fn embedding_ratios(u: &SpectralVelocity, quad: QuadratureLevels) -> Result<EmbeddingRatios> {
    let grad = sobolev_norm(u, SobolevIndex::H1);
    let lap = sobolev_norm(u, SobolevIndex::H2);
    if grad == 0.0 {
        return Err(Error::Domain("embedding ratios undefined for the zero field".into()));
    }
    let l6 = velocity_lp_norm(u, 6.0, quad)?;
    let grad_l3 = gradient_lp_norm(u, 3.0, quad)?;
    Ok(EmbeddingRatios {
        sobolev: l6 / grad,
        interpolation: grad_l3 / (grad * lap).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral_field::{shear_flow, WaveGrid};

    #[test]
    fn shear_flow_ratios_match_closed_form() {
        // ∫ sin⁶y = 5π³/2 and ∫ |cos y|³ = 32π²/3 over the 2π box; ‖∇u‖ = ‖Δu‖ = √(4π³).
        let g = WaveGrid::periodic_2pi(8).unwrap();
        let u = shear_flow(g, 1.0);
        let r = embedding_ratios(&u, QuadratureLevels::default()).unwrap();
        let h1 = (4.0 * PI.powi(3)).sqrt();
        let sob = (2.5 * PI.powi(3)).powf(1.0 / 6.0) / h1;
        let interp = (32.0 * PI * PI / 3.0).powf(1.0 / 3.0) / h1;
        assert!((r.sobolev - sob).abs() < 1e-12 * sob);
        assert!((r.interpolation - interp).abs() < 1e-8 * interp, "{} vs {}", r.interpolation, interp);
    }

    #[test]
    fn zero_field_is_rejected() {
        let g = WaveGrid::periodic_2pi(8).unwrap();
        let u = SpectralVelocity::zeros(g);
        assert!(embedding_ratios(&u, QuadratureLevels::default()).is_err());
    }
}
