//! Cached 3D complex FFTs on cubic grids.
//!
//! Spectral coefficients are normalised so that `u(x) = Σ_k û(k) e^{ik·x}`:
//! the forward transform divides by `n³`, the inverse does not scale.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

pub(crate) fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    /// Physical samples to normalised coefficients, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
        let norm = 1.0 / (self.n * self.n * self.n) as f64;
        data.iter_mut().for_each(|c| *c *= norm);
    }

    /// Coefficients to physical samples, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // z lines are contiguous
        fft.process_with_scratch(data, &mut scratch);

        let mut line = vec![Complex64::default(); n];
        // y lines: stride n
        for ix in 0..n {
            for iz in 0..n {
                let base = ix * n * n + iz;
                for (iy, v) in line.iter_mut().enumerate() {
                    *v = data[base + iy * n];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (iy, v) in line.iter().enumerate() {
                    data[base + iy * n] = *v;
                }
            }
        }
        // x lines: stride n²
        for iy in 0..n {
            for iz in 0..n {
                let base = iy * n + iz;
                for (ix, v) in line.iter_mut().enumerate() {
                    *v = data[base + ix * n * n];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (ix, v) in line.iter().enumerate() {
                    data[base + ix * n * n] = *v;
                }
            }
        }
    }
}

/// Copy coefficients from an `n`-grid onto a larger `m`-grid by wavenumber.
/// Nyquist planes of the source are dropped since they have no conjugate partner.
pub(crate) fn pad(src: &[Complex64], n: usize, m: usize) -> Vec<Complex64> {
    debug_assert!(m >= n);
    let half = (n / 2) as i64;
    let mut out = vec![Complex64::default(); m * m * m];
    let wrap = |i: usize| -> Option<usize> {
        let k = if (i as i64) < half {
            i as i64
        } else {
            i as i64 - n as i64
        };
        if k == -half {
            None
        } else {
            Some(k.rem_euclid(m as i64) as usize)
        }
    };
    for ix in 0..n {
        let Some(jx) = wrap(ix) else { continue };
        for iy in 0..n {
            let Some(jy) = wrap(iy) else { continue };
            for iz in 0..n {
                let Some(jz) = wrap(iz) else { continue };
                out[(jx * m + jy) * m + jz] = src[(ix * n + iy) * n + iz];
            }
        }
    }
    out
}
