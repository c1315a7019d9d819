use std::ops::Deref;

use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::WaveGrid;
use crate::{Error, Result};

/// Relative divergence tolerance used when validating a [`SpectralVelocity`].
pub const DEFAULT_DIV_TOLERANCE: f64 = 1e-12;

/// Three complex coefficient arrays on a [`WaveGrid`], with no invariants
/// attached. This is the input side of the Leray projector and the output
/// side of raw spectral products.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpectrum {
    grid: WaveGrid,
    comps: [Vec<Complex64>; 3],
}

impl VectorSpectrum {
    pub fn zeros(grid: WaveGrid) -> Self {
        let len = grid.len();
        Self {
            grid,
            comps: [
                vec![Complex64::default(); len],
                vec![Complex64::default(); len],
                vec![Complex64::default(); len],
            ],
        }
    }

    pub fn from_components(grid: WaveGrid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "expected {} coefficients per component",
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    /// Spectrum of a real field given by samples.
    pub fn from_physical(real: &RealVelocity) -> Self {
        let grid = real.grid;
        let plan = fft::plan(grid.n());
        let comps = real.comps.clone().map(|samples| {
            let mut data: Vec<Complex64> =
                samples.into_iter().map(|s| Complex64::new(s, 0.0)).collect();
            plan.forward(&mut data);
            data
        });
        Self { grid, comps }
    }

    pub fn grid(&self) -> &WaveGrid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    #[inline]
    pub fn set_mode(&mut self, idx: usize, value: [Complex64; 3]) {
        for (c, v) in value.into_iter().enumerate() {
            self.comps[c][idx] = v;
        }
    }

    /// Set the coefficient at lattice vector `k` and its Hermitian partner at `-k`.
    pub fn set_hermitian_pair(&mut self, k: [i64; 3], value: [Complex64; 3]) {
        let g = self.grid;
        let idx = g.flat(g.index_of(k[0]), g.index_of(k[1]), g.index_of(k[2]));
        self.set_mode(idx, value);
        let conj = g.conjugate_index(idx);
        if conj != idx {
            self.set_mode(conj, value.map(|v| v.conj()));
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest deviation from `û(-k) = conj(û(k))`, ignoring unpaired Nyquist planes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for idx in 0..g.len() {
            if g.is_nyquist(idx) {
                continue;
            }
            let j = g.conjugate_index(idx);
            for c in 0..3 {
                worst = worst.max((self.comps[c][idx] - self.comps[c][j].conj()).norm());
            }
        }
        worst
    }

    /// Largest `|k·û(k)|` over all modes, in physical wavenumber units.
    pub fn max_divergence(&self) -> f64 {
        let g = self.grid;
        (0..g.len())
            .map(|idx| {
                let k = g.wavevector(idx);
                let m = self.mode(idx);
                (m[0] * k[0] + m[1] * k[1] + m[2] * k[2]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Zero every mode outside the 2/3-rule cube `|kᵢ| ≤ (n-1)/3`.
    pub fn dealias(&mut self) {
        let g = self.grid;
        for idx in 0..g.len() {
            if !g.is_resolved(idx) {
                self.set_mode(idx, [Complex64::default(); 3]);
            }
        }
    }

    /// Samples on the native grid (real part of the inverse transform).
    pub fn to_physical(&self) -> RealVelocity {
        let plan = fft::plan(self.grid.n());
        let comps = self.comps.clone().map(|mut data| {
            plan.inverse(&mut data);
            data.into_iter().map(|c| c.re).collect()
        });
        RealVelocity {
            grid: self.grid,
            comps,
        }
    }

    pub(crate) fn scale_in_place(&mut self, a: f64) {
        self.comps
            .iter_mut()
            .flat_map(|c| c.iter_mut())
            .for_each(|v| *v *= a);
    }
}

/// A velocity field on the torus that is real (Hermitian coefficients),
/// zero-mean and divergence-free. Nyquist planes are kept at zero.
///
/// Values are obtained through [`leray_project`](super::leray_project),
/// [`SpectralVelocity::try_from_spectrum`], or operations that preserve the
/// invariants (scaling, addition, Stokes powers, the integrating factor).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVelocity(VectorSpectrum);

impl SpectralVelocity {
    pub fn zeros(grid: WaveGrid) -> Self {
        Self(VectorSpectrum::zeros(grid))
    }

    pub(crate) fn from_spectrum_unchecked(raw: VectorSpectrum) -> Self {
        Self(raw)
    }

    /// Accept `raw` as-is if it already satisfies every invariant to within
    /// `div_tolerance` (relative to the largest coefficient).
    pub fn try_from_spectrum(raw: VectorSpectrum, div_tolerance: f64) -> Result<Self> {
        let g = *raw.grid();
        let scale = raw.max_abs();
        let zero = raw.mode(0);
        if zero.iter().any(|c| c.norm() > div_tolerance * scale) {
            return Err(Error::Domain("field has a non-zero mean".into()));
        }
        if (0..g.len()).any(|i| g.is_nyquist(i) && raw.mode(i).iter().any(|c| c.norm() > 0.0)) {
            return Err(Error::Domain("field has energy on a Nyquist plane".into()));
        }
        if raw.hermitian_defect() > div_tolerance * scale {
            return Err(Error::Domain("field is not Hermitian symmetric".into()));
        }
        for idx in 1..g.len() {
            let k = g.wavevector(idx);
            let kn = g.k_squared(idx).sqrt();
            let m = raw.mode(idx);
            let div = (m[0] * k[0] + m[1] * k[1] + m[2] * k[2]).norm();
            if div > div_tolerance * kn * scale {
                return Err(Error::Domain(format!(
                    "field is not divergence-free at k = {:?}",
                    g.lattice(idx)
                )));
            }
        }
        Ok(Self(raw))
    }

    pub fn into_spectrum(self) -> VectorSpectrum {
        self.0
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.0.clone();
        out.scale_in_place(a);
        Self(out)
    }

    /// `self += a · other`.
    pub fn add_scaled(&mut self, a: f64, other: &SpectralVelocity) -> Result<()> {
        self.0.grid.ensure_same(&other.0.grid)?;
        for c in 0..3 {
            for (x, y) in self.0.comps[c].iter_mut().zip(&other.0.comps[c]) {
                *x += *y * a;
            }
        }
        Ok(())
    }

    /// Multiply mode `k` by a real weight `w(|k|²)`.
    pub fn map_modes<F: Fn(f64) -> f64>(&self, weight: F) -> Self {
        let mut out = self.0.clone();
        let g = *out.grid();
        for idx in 0..g.len() {
            let w = weight(g.k_squared(idx));
            for c in 0..3 {
                out.comps[c][idx] *= w;
            }
        }
        Self(out)
    }
}

impl Deref for SpectralVelocity {
    type Target = VectorSpectrum;

    fn deref(&self) -> &VectorSpectrum {
        &self.0
    }
}

/// Real samples of a vector field at the grid points `x = (i, j, l) · L/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVelocity {
    grid: WaveGrid,
    comps: [Vec<f64>; 3],
}

impl RealVelocity {
    pub fn new(grid: WaveGrid, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "expected {} samples per component",
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    /// Sample a closure `f(x, y, z) -> [u, v, w]` on the grid.
    pub fn from_fn<F: FnMut(f64, f64, f64) -> [f64; 3]>(grid: WaveGrid, mut f: F) -> Self {
        let n = grid.n();
        let h = grid.spacing();
        let mut comps = [
            vec![0.0; grid.len()],
            vec![0.0; grid.len()],
            vec![0.0; grid.len()],
        ];
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let v = f(ix as f64 * h, iy as f64 * h, iz as f64 * h);
                    let idx = grid.flat(ix, iy, iz);
                    for c in 0..3 {
                        comps[c][idx] = v[c];
                    }
                }
            }
        }
        Self { grid, comps }
    }

    pub fn grid(&self) -> &WaveGrid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    /// Trapezoidal `∫ |u|² dx`, exact for band-limited fields.
    pub fn l2_norm_sq(&self) -> f64 {
        let cell = self.grid.spacing().powi(3);
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v * v)
            .sum::<f64>()
            * cell
    }
}

/// Order `m ≥ 0` of the homogeneous Sobolev norm `‖A^{m/2} u‖`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub const L2: SobolevIndex = SobolevIndex(0.0);
    pub const HALF: SobolevIndex = SobolevIndex(0.5);
    pub const H1: SobolevIndex = SobolevIndex(1.0);
    pub const H2: SobolevIndex = SobolevIndex(2.0);

    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m >= 0.0 {
            Ok(Self(m))
        } else {
            Err(Error::Domain(format!("Sobolev index must be ≥ 0, got {m}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
