use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform periodic grid with `n` samples per axis on the box `[0, L)³`.
///
/// Modes are stored in FFT order: index `i` along an axis carries the integer
/// wavenumber `i` for `i < n/2` and `i - n` otherwise, so the stored modes are
/// in bijection with the lattice box `[-n/2, n/2)³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveGrid {
    n: usize,
    length: f64,
}

impl WaveGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid resolution must be even and at least 4, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!(
                "domain period must be positive and finite, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    /// The `[0, 2π)³` box, for which `λ₁ = 1`.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2π / L`, the physical size of one lattice step in wavenumber space.
    pub fn scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Integer wavenumber carried by FFT index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT index of integer wavenumber `k`, which must lie in `[-n/2, n/2)`.
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn flat(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Integer lattice vector of the mode stored at flat index `idx`.
    #[inline]
    pub fn lattice(&self, idx: usize) -> [i64; 3] {
        let [ix, iy, iz] = self.unflat(idx);
        [self.wavenumber(ix), self.wavenumber(iy), self.wavenumber(iz)]
    }

    /// Physical wavevector `k · 2π/L` at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let s = self.scale();
        let k = self.lattice(idx);
        [k[0] as f64 * s, k[1] as f64 * s, k[2] as f64 * s]
    }

    /// `|k|²` in physical units.
    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Flat index of the mode `-k` for the mode at `idx`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let [ix, iy, iz] = self.unflat(idx);
        let n = self.n;
        self.flat((n - ix) % n, (n - iy) % n, (n - iz) % n)
    }

    /// True if any component sits on the unpaired Nyquist plane `k = -n/2`.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = self.n / 2;
        let [ix, iy, iz] = self.unflat(idx);
        ix == half || iy == half || iz == half
    }

    /// Largest per-axis integer wavenumber kept by the 2/3 rule: `3K < n`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    /// Mode survives 2/3-rule truncation.
    #[inline]
    pub fn is_resolved(&self, idx: usize) -> bool {
        let cut = self.dealias_cutoff();
        self.lattice(idx).iter().all(|k| k.abs() <= cut)
    }

    pub fn ensure_same(&self, other: &WaveGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grid mismatch: (n={}, L={}) vs (n={}, L={})",
                self.n, self.length, other.n, other.length
            )))
        }
    }
}

/// One distinct Stokes eigenvalue with the number of lattice vectors on its shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Set when fewer complete shells fit on the grid than were requested.
    pub truncated: bool,
}

/// The first `count` distinct eigenvalues `|k|²(2π/L)²` of the Stokes operator,
/// restricted to shells that lie entirely inside the stored lattice box.
pub fn stokes_eigenvalues(grid: &WaveGrid, count: usize) -> Result<EigenvalueList> {
    if count == 0 {
        return Err(Error::Config("eigenvalue count must be at least 1".into()));
    }
    let half = (grid.n() / 2) as i64;
    // A shell |k|² = s is complete when every lattice point on it has |kᵢ| < n/2.
    let limit = half * half;
    let mut counts = vec![0usize; limit as usize];
    for kx in -half + 1..half {
        for ky in -half + 1..half {
            for kz in -half + 1..half {
                let s = kx * kx + ky * ky + kz * kz;
                if s > 0 && s < limit {
                    counts[s as usize] += 1;
                }
            }
        }
    }
    let scale2 = grid.scale() * grid.scale();
    let all: Vec<Eigenvalue> = counts
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(s, &m)| Eigenvalue {
            value: s as f64 * scale2,
            multiplicity: m,
        })
        .collect();
    let truncated = all.len() < count;
    Ok(EigenvalueList {
        eigenvalues: all.into_iter().take(count).collect(),
        truncated,
    })
}

/// First Stokes eigenvalue `λ₁ = (2π/L)²`.
pub fn first_eigenvalue(grid: &WaveGrid) -> f64 {
    grid.scale() * grid.scale()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_resolution_and_period() {
        assert!(matches!(WaveGrid::new(3, 1.0), Err(Error::Config(_))));
        assert!(matches!(WaveGrid::new(2, 1.0), Err(Error::Config(_))));
        assert!(matches!(WaveGrid::new(7, 1.0), Err(Error::Config(_))));
        assert!(matches!(WaveGrid::new(8, 0.0), Err(Error::Config(_))));
        assert!(matches!(WaveGrid::new(8, -1.0), Err(Error::Config(_))));
        assert!(matches!(WaveGrid::new(8, f64::NAN), Err(Error::Config(_))));
    }

    #[test]
    fn n4_wavenumbers_cover_minus2_to_1() {
        let g = WaveGrid::periodic_2pi(4).unwrap();
        let ks: Vec<i64> = (0..4).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, -2, -1]);
    }

    #[test]
    fn n8_has_512_modes_in_bijection_with_box() {
        let g = WaveGrid::periodic_2pi(8).unwrap();
        assert_eq!(g.len(), 512);
        let mut seen = std::collections::HashSet::new();
        for idx in 0..g.len() {
            let k = g.lattice(idx);
            assert!(k.iter().all(|&c| (-4..4).contains(&c)));
            assert!(seen.insert(k));
            let [a, b, c] = k;
            assert_eq!(g.flat(g.index_of(a), g.index_of(b), g.index_of(c)), idx);
        }
        assert_eq!(seen.len(), 512);
    }

    #[test]
    fn period_pi_doubles_wavevectors() {
        let g = WaveGrid::new(6, PI).unwrap();
        assert!((g.scale() - 2.0).abs() < 1e-15);
        for idx in 0..g.len() {
            let k = g.wavevector(idx);
            for c in k {
                let q = c / 2.0;
                assert!((q - q.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalues_unit_box() {
        let g = WaveGrid::periodic_2pi(16).unwrap();
        let list = stokes_eigenvalues(&g, 7).unwrap();
        assert!(!list.truncated);
        let vals: Vec<f64> = list.eigenvalues.iter().map(|e| e.value).collect();
        // 7 is not a sum of three squares
        assert_eq!(vals, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0]);
        let mult: Vec<usize> = list.eigenvalues.iter().map(|e| e.multiplicity).collect();
        assert_eq!(mult, vec![6, 12, 8, 6, 24, 24, 12]);
        assert_eq!(first_eigenvalue(&g), 1.0);
    }

    #[test]
    fn eigenvalues_half_box_scale_by_four() {
        let g = WaveGrid::new(8, PI).unwrap();
        let list = stokes_eigenvalues(&g, 1).unwrap();
        assert!((list.eigenvalues[0].value - 4.0).abs() < 1e-12);
        assert!((first_eigenvalue(&g) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_request_beyond_grid_is_flagged() {
        let g = WaveGrid::periodic_2pi(4).unwrap();
        // complete shells for n=4: |k|² ∈ {1, 2, 3}
        let list = stokes_eigenvalues(&g, 10).unwrap();
        assert!(list.truncated);
        assert_eq!(list.eigenvalues.len(), 3);
        assert!(stokes_eigenvalues(&g, 0).is_err());
    }

    #[test]
    fn dealias_cutoff_satisfies_two_thirds_rule() {
        for n in [4usize, 6, 8, 12, 16, 32] {
            let g = WaveGrid::periodic_2pi(n).unwrap();
            let k = g.dealias_cutoff();
            assert!(3 * k < n as i64);
            assert!(3 * (k + 1) >= n as i64);
        }
    }
}
