use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::WaveGrid;
use super::velocity::{SobolevIndex, SpectralVelocity, VectorSpectrum};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Orthogonal projection onto divergence-free, zero-mean fields:
/// `û(k) ← û(k) − k (k·û(k)) / |k|²`, with `û(0)` and Nyquist planes zeroed.
pub fn leray_project(raw: &VectorSpectrum) -> SpectralVelocity {
    let g = *raw.grid();
    let mut out = raw.clone();
    for idx in 0..g.len() {
        if idx == 0 || g.is_nyquist(idx) {
            out.set_mode(idx, [Complex64::default(); 3]);
            continue;
        }
        let k = g.lattice(idx).map(|c| c as f64);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let m = raw.mode(idx);
        let kdotu = (m[0] * k[0] + m[1] * k[1] + m[2] * k[2]) / k2;
        out.set_mode(
            idx,
            [m[0] - kdotu * k[0], m[1] - kdotu * k[1], m[2] - kdotu * k[2]],
        );
    }
    SpectralVelocity::from_spectrum_unchecked(out)
}

/// `A^power u`, i.e. multiplication of mode `k` by `|k|^{2·power}`.
pub fn stokes_apply(u: &SpectralVelocity, power: f64) -> Result<SpectralVelocity> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::Domain(format!(
            "Stokes operator power must be ≥ 0, got {power}"
        )));
    }
    Ok(u.map_modes(|k2| stokes_symbol(k2, power)))
}

#[inline]
fn stokes_symbol(k2: f64, power: f64) -> f64 {
    if k2 == 0.0 {
        0.0
    } else if power == 0.0 {
        1.0
    } else if power == 0.5 {
        k2.sqrt()
    } else if power == 1.0 {
        k2
    } else if power == 2.0 {
        k2 * k2
    } else {
        k2.powf(power)
    }
}

/// `‖A^{m/2} u‖²` with the physical normalisation `∫_Ω |·|² dx`.
pub fn sobolev_norm_sq(u: &VectorSpectrum, m: SobolevIndex) -> f64 {
    let g = *u.grid();
    let mut sum = 0.0;
    for idx in 0..g.len() {
        let k2 = g.k_squared(idx);
        let w = if m.value() == 0.0 {
            1.0
        } else {
            stokes_symbol(k2, m.value())
        };
        if w == 0.0 {
            continue;
        }
        let e: f64 = u.mode(idx).iter().map(|c| c.norm_sqr()).sum();
        sum += w * e;
    }
    sum * g.volume()
}

pub fn sobolev_norm(u: &VectorSpectrum, m: SobolevIndex) -> f64 {
    sobolev_norm_sq(u, m).sqrt()
}

/// Physical `L²` inner product `∫ a·b dx` of two real fields.
pub fn l2_inner(a: &VectorSpectrum, b: &VectorSpectrum) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let mut sum = 0.0;
    for c in 0..3 {
        for (x, y) in a.component(c).iter().zip(b.component(c)) {
            sum += (x * y.conj()).re;
        }
    }
    Ok(sum * a.grid().volume())
}

/// Spectral derivative `∂_axis` of component `comp`.
fn derivative(u: &VectorSpectrum, axis: usize, comp: usize) -> Vec<Complex64> {
    let g = *u.grid();
    u.component(comp)
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            if g.is_nyquist(idx) {
                Complex64::default()
            } else {
                I * g.wavevector(idx)[axis] * c
            }
        })
        .collect()
}

/// The trilinear form `b(u, v, w) = Σᵢⱼ ∫ uᵢ ∂ᵢvⱼ wⱼ dx`.
///
/// The cubic integrand is sampled on a grid padded to `3n/2` points per
/// axis, on which the trapezoidal rule is exact for any fields stored on the
/// `n`-grid.
pub fn trilinear_b(u: &SpectralVelocity, v: &SpectralVelocity, w: &SpectralVelocity) -> Result<f64> {
    let g = *u.grid();
    g.ensure_same(v.grid())?;
    g.ensure_same(w.grid())?;
    let n = g.n();
    let m = 3 * n / 2;
    let plan = fft::plan(m);
    let to_padded_physical = |coeffs: &[Complex64]| -> Vec<f64> {
        let mut data = fft::pad(coeffs, n, m);
        plan.inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    };
    let u_phys: Vec<Vec<f64>> = (0..3).map(|i| to_padded_physical(u.component(i))).collect();
    let mut total = 0.0;
    for j in 0..3 {
        let w_j = to_padded_physical(w.component(j));
        let mut adv = vec![0.0; m * m * m];
        for (i, u_i) in u_phys.iter().enumerate() {
            let dv = to_padded_physical(&derivative(v, i, j));
            for ((a, ui), d) in adv.iter_mut().zip(u_i).zip(&dv) {
                *a += ui * d;
            }
        }
        total += adv.iter().zip(&w_j).map(|(a, b)| a * b).sum::<f64>();
    }
    let cell = (g.length() / m as f64).powi(3);
    Ok(total * cell)
}

/// `B(u, u) = P[(u·∇)u]`, dealiased by the 2/3 rule.
///
/// The input is truncated to the resolved cube before the product and the
/// product is truncated again afterwards, so for resolved `u` the result is
/// the exact projection of `(u·∇)u` onto the resolved modes.
pub fn nonlinear_term(u: &SpectralVelocity) -> SpectralVelocity {
    let g = *u.grid();
    let plan = fft::plan(g.n());
    let mut trunc = VectorSpectrum::clone(u);
    trunc.dealias();
    let to_physical = |mut data: Vec<Complex64>| -> Vec<f64> {
        plan.inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    };
    let u_phys: Vec<Vec<f64>> = (0..3)
        .map(|i| to_physical(trunc.component(i).to_vec()))
        .collect();
    let mut out = VectorSpectrum::zeros(g);
    for j in 0..3 {
        let mut adv = vec![0.0; g.len()];
        for (i, u_i) in u_phys.iter().enumerate() {
            let d = to_physical(derivative(&trunc, i, j));
            for ((a, ui), dv) in adv.iter_mut().zip(u_i).zip(&d) {
                *a += ui * dv;
            }
        }
        let mut spec: Vec<Complex64> = adv.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        plan.forward(&mut spec);
        out.component_mut(j).copy_from_slice(&spec);
    }
    out.dealias();
    leray_project(&out)
}

/// Random solenoidal field with `|û(k)| ∝ |k|^{slope/2}` on the modes with
/// `|k| ≤ n/3` that survive dealiasing, rescaled so that `‖u‖ = amplitude`.
/// Deterministic in `seed`.
pub fn random_divfree_field(
    grid: WaveGrid,
    seed: u64,
    energy_spectrum_slope: f64,
    amplitude: f64,
) -> Result<SpectralVelocity> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::Config(format!(
            "amplitude must be finite and ≥ 0, got {amplitude}"
        )));
    }
    if !energy_spectrum_slope.is_finite() {
        return Err(Error::Config("energy spectrum slope must be finite".into()));
    }
    if amplitude == 0.0 {
        return Ok(SpectralVelocity::zeros(grid));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = VectorSpectrum::zeros(grid);
    let kmax = grid.n() as f64 / 3.0;
    for idx in 1..grid.len() {
        if grid.is_nyquist(idx) || !grid.is_resolved(idx) {
            continue;
        }
        let k = grid.lattice(idx);
        let representative = k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)));
        if !representative {
            continue;
        }
        let kf = k.map(|c| c as f64);
        let kn = (kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2]).sqrt();
        if kn > kmax {
            continue;
        }
        let weight = (kn * grid.scale()).powf(energy_spectrum_slope / 2.0);
        let mut mode = [Complex64::default(); 3];
        for c in mode.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *c = Complex64::new(re, im) * weight;
        }
        let kdotu = (mode[0] * kf[0] + mode[1] * kf[1] + mode[2] * kf[2]) / (kn * kn);
        for (c, kc) in mode.iter_mut().zip(kf) {
            *c -= kdotu * kc;
        }
        raw.set_hermitian_pair(k, mode);
    }
    let u = leray_project(&raw);
    let norm = sobolev_norm(&u, SobolevIndex::L2);
    if norm == 0.0 {
        return Err(Error::Config(
            "grid too coarse: no resolved modes for a random field".into(),
        ));
    }
    Ok(u.scaled(amplitude / norm))
}

/// `(a sin(y·2π/L), 0, 0)`: a steady shear profile on the first shell.
pub fn shear_flow(grid: WaveGrid, amplitude: f64) -> SpectralVelocity {
    let mut raw = VectorSpectrum::zeros(grid);
    // sin y = (e^{iy} − e^{−iy}) / 2i
    raw.set_hermitian_pair(
        [0, 1, 0],
        [
            Complex64::new(0.0, -0.5 * amplitude),
            Complex64::default(),
            Complex64::default(),
        ],
    );
    leray_project(&raw)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral_field::velocity::RealVelocity;

    fn grid(n: usize) -> WaveGrid {
        WaveGrid::periodic_2pi(n).unwrap()
    }

    fn single(grid: WaveGrid, k: [i64; 3], v: [f64; 3]) -> VectorSpectrum {
        let mut raw = VectorSpectrum::zeros(grid);
        raw.set_hermitian_pair(k, v.map(|x| Complex64::new(x, 0.0)));
        raw
    }

    fn random_hermitian(grid: WaveGrid, seed: u64) -> VectorSpectrum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let real = RealVelocity::from_fn(grid, |_, _, _| {
            [0, 1, 2].map(|_| StandardNormal.sample(&mut rng))
        });
        VectorSpectrum::from_physical(&real)
    }

    #[test]
    fn gradient_mode_is_annihilated() {
        let g = grid(8);
        let p = leray_project(&single(g, [1, 0, 0], [1.0, 0.0, 0.0]));
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn transverse_mode_is_unchanged() {
        let g = grid(8);
        let raw = single(g, [1, 0, 0], [0.0, 1.0, 0.0]);
        let p = leray_project(&raw);
        assert_eq!(&*p, &raw);
    }

    #[test]
    fn projection_of_random_field_is_solenoidal_and_idempotent() {
        let g = grid(8);
        let raw = random_hermitian(g, 11);
        let p = leray_project(&raw);
        let rel = p.max_divergence() / (p.max_abs() * g.scale() * g.n() as f64);
        assert!(rel <= 1e-12, "relative divergence {rel}");
        assert!(p.hermitian_defect() < 1e-14);
        assert_eq!(p.mode(0), [Complex64::default(); 3]);
        let pp = leray_project(&p);
        for c in 0..3 {
            for (a, b) in pp.component(c).iter().zip(p.component(c)) {
                assert!((a - b).norm() <= 1e-15 * p.max_abs());
            }
        }
        SpectralVelocity::try_from_spectrum(p.into_spectrum(), 1e-12).unwrap();
    }

    #[test]
    fn validation_rejects_broken_fields() {
        let g = grid(8);
        let grad = single(g, [1, 0, 0], [1.0, 0.0, 0.0]);
        assert!(SpectralVelocity::try_from_spectrum(grad, 1e-12).is_err());
        let mut mean = VectorSpectrum::zeros(g);
        mean.set_mode(0, [Complex64::new(1.0, 0.0); 3]);
        assert!(SpectralVelocity::try_from_spectrum(mean, 1e-12).is_err());
        let mut skew = VectorSpectrum::zeros(g);
        skew.set_mode(g.flat(1, 0, 0), [Complex64::default(), Complex64::new(1.0, 0.0), Complex64::default()]);
        assert!(SpectralVelocity::try_from_spectrum(skew, 1e-12).is_err());
    }

    #[test]
    fn stokes_powers() {
        let g = grid(8);
        let u = shear_flow(g, 1.0);
        assert_eq!(stokes_apply(&u, 1.0).unwrap(), u);
        assert_eq!(stokes_apply(&u, 0.0).unwrap(), u);
        assert!(matches!(stokes_apply(&u, -0.5), Err(Error::Domain(_))));

        let w = leray_project(&single(g, [1, 1, 0], [0.0, 0.0, 1.0]));
        let half = stokes_apply(&w, 0.5).unwrap();
        let idx = g.flat(1, 1, 0);
        assert!((half.mode(idx)[2].re - 2f64.sqrt()).abs() < 1e-15);
        let full = stokes_apply(&w, 1.0).unwrap();
        assert_eq!(full.mode(idx)[2].re, 2.0);
    }

    #[test]
    fn shear_flow_norms() {
        let g = grid(8);
        let u = shear_flow(g, 1.0);
        let expect = (4.0 * PI.powi(3)).sqrt();
        assert!((sobolev_norm(&u, SobolevIndex::L2) - expect).abs() < 1e-12 * expect);
        assert!((sobolev_norm(&u, SobolevIndex::H1) - expect).abs() < 1e-12 * expect);
        assert_eq!(sobolev_norm(&SpectralVelocity::zeros(g), SobolevIndex::H1), 0.0);
        // physical samples agree with sin y
        let phys = u.to_physical();
        let h = g.spacing();
        for iy in 0..8 {
            let v = phys.component(0)[g.flat(3, iy, 5)];
            assert!((v - (iy as f64 * h).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn parseval_matches_physical_quadrature() {
        let g = grid(12);
        let u = random_divfree_field(g, 5, -2.0, 1.7).unwrap();
        let spec = sobolev_norm_sq(&u, SobolevIndex::L2);
        let phys = u.to_physical().l2_norm_sq();
        assert!((spec - phys).abs() <= 1e-10 * spec);
    }

    #[test]
    fn shear_flow_is_an_exact_steady_euler_solution() {
        let g = grid(8);
        let u = shear_flow(g, 1.0);
        assert!(nonlinear_term(&u).max_abs() < 1e-15);
        assert!(trilinear_b(&u, &u, &u).unwrap().abs() < 1e-12);
    }

    #[test]
    fn trilinear_matches_analytic_quadrature() {
        // u = (sin y, 0, 0), v = (0, 0, sin x), w = (0, 0, cos x sin y):
        // b = ∫ sin y · cos x · cos x sin y dx, evaluated on a 4× finer grid.
        let g = grid(8);
        let u = leray_project(&VectorSpectrum::from_physical(&RealVelocity::from_fn(g, |_, y, _| [y.sin(), 0.0, 0.0])));
        let v = leray_project(&VectorSpectrum::from_physical(&RealVelocity::from_fn(g, |x, _, _| [0.0, 0.0, x.sin()])));
        let w = leray_project(&VectorSpectrum::from_physical(&RealVelocity::from_fn(g, |x, y, _| [0.0, 0.0, x.cos() * y.sin()])));
        let fine = 4 * g.n();
        let h = 2.0 * PI / fine as f64;
        let mut quad = 0.0;
        for ix in 0..fine {
            for iy in 0..fine {
                let (x, y) = (ix as f64 * h, iy as f64 * h);
                // only u₁ ∂₁v₃ w₃ survives
                quad += y.sin() * x.cos() * (x.cos() * y.sin());
            }
        }
        quad *= h * h * 2.0 * PI;
        let b = trilinear_b(&u, &v, &w).unwrap();
        assert!((b - quad).abs() < 1e-12 * quad.abs());
        assert!((b - 2.0 * PI.powi(3)).abs() < 1e-11);
    }

    #[test]
    fn trilinear_rejects_grid_mismatch() {
        let a = shear_flow(grid(8), 1.0);
        let b = shear_flow(grid(6), 1.0);
        assert!(matches!(trilinear_b(&a, &b, &a), Err(Error::Shape(_))));
    }

    #[test]
    fn random_field_contract() {
        let g = grid(8);
        assert_eq!(random_divfree_field(g, 3, -2.0, 0.0).unwrap().max_abs(), 0.0);
        let a = random_divfree_field(g, 9, -2.0, 1.0).unwrap();
        let b = random_divfree_field(g, 9, -2.0, 1.0).unwrap();
        assert_eq!(a, b);
        let u = random_divfree_field(g, 1, -2.0, 1.0).unwrap();
        assert!((sobolev_norm(&u, SobolevIndex::L2) - 1.0).abs() <= 1e-12);
        SpectralVelocity::try_from_spectrum(u.clone().into_spectrum(), 1e-12).unwrap();
        let cut = g.dealias_cutoff();
        for idx in 0..g.len() {
            if u.mode(idx).iter().any(|c| c.norm() > 0.0) {
                assert!(g.lattice(idx).iter().all(|k| k.abs() <= cut));
            }
        }
        assert!(random_divfree_field(g, 1, -2.0, -1.0).is_err());
    }
}
