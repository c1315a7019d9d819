use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::calculus;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "t,l2_sq,h1_sq,h2_sq,f_dot_u,int_h1_sq,int_f_sq,residual";

/// Norms of the state at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    /// `‖u‖²`
    pub l2_sq: f64,
    /// `‖u‖₁² = ‖A^{1/2}u‖²`, the enstrophy `y(t)`.
    pub h1_sq: f64,
    /// `‖Au‖²`
    pub h2_sq: f64,
    /// `(f, u)`
    pub f_dot_u: f64,
    /// `‖f‖²`
    pub f_sq: f64,
}

/// Time series of norms along a run, with running trapezoidal integrals of
/// `‖u‖₁²` and `‖f‖²`. Append-only.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NormTrace {
    pub nu: f64,
    pub t: Vec<f64>,
    pub l2_sq: Vec<f64>,
    pub h1_sq: Vec<f64>,
    pub h2_sq: Vec<f64>,
    pub f_dot_u: Vec<f64>,
    pub f_sq: Vec<f64>,
    pub int_h1_sq: Vec<f64>,
    pub int_f_sq: Vec<f64>,
}

impl NormTrace {
    pub fn new(nu: f64) -> Self {
        Self {
            nu,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn push(&mut self, s: NormSample) -> Result<()> {
        if let Some(&last) = self.t.last() {
            if s.t <= last {
                return Err(Error::Shape(format!(
                    "trace times must increase: {} after {last}",
                    s.t
                )));
            }
        }
        let (ih, ifs) = match self.t.last() {
            None => (0.0, 0.0),
            Some(&t0) => {
                let i = self.len() - 1;
                let h = s.t - t0;
                (
                    self.int_h1_sq[i] + 0.5 * h * (self.h1_sq[i] + s.h1_sq),
                    self.int_f_sq[i] + 0.5 * h * (self.f_sq[i] + s.f_sq),
                )
            }
        };
        self.t.push(s.t);
        self.l2_sq.push(s.l2_sq);
        self.h1_sq.push(s.h1_sq);
        self.h2_sq.push(s.h2_sq);
        self.f_dot_u.push(s.f_dot_u);
        self.f_sq.push(s.f_sq);
        self.int_h1_sq.push(ih);
        self.int_f_sq.push(ifs);
        Ok(())
    }

    pub fn sample(&self, i: usize) -> NormSample {
        NormSample {
            t: self.t[i],
            l2_sq: self.l2_sq[i],
            h1_sq: self.h1_sq[i],
            h2_sq: self.h2_sq[i],
            f_dot_u: self.f_dot_u[i],
            f_sq: self.f_sq[i],
        }
    }

    /// Keep samples with `t ≤ t_max`.
    pub fn truncated(&self, t_max: f64) -> NormTrace {
        let keep = self.t.iter().take_while(|&&t| t <= t_max).count();
        let cut = |v: &Vec<f64>| v[..keep].to_vec();
        NormTrace {
            nu: self.nu,
            t: cut(&self.t),
            l2_sq: cut(&self.l2_sq),
            h1_sq: cut(&self.h1_sq),
            h2_sq: cut(&self.h2_sq),
            f_dot_u: cut(&self.f_dot_u),
            f_sq: cut(&self.f_sq),
            int_h1_sq: cut(&self.int_h1_sq),
            int_f_sq: cut(&self.int_f_sq),
        }
    }

    /// Times strictly increasing, squares non-negative, integrals non-decreasing.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Shape(format!("trace invariant violated: {what}")));
        if self.t.windows(2).any(|w| w[1] <= w[0]) {
            return bad("times not strictly increasing");
        }
        for v in [&self.l2_sq, &self.h1_sq, &self.h2_sq, &self.f_sq] {
            if v.iter().any(|x| !(*x >= 0.0)) {
                return bad("negative or non-finite square");
            }
        }
        for v in [&self.int_h1_sq, &self.int_f_sq] {
            if v.windows(2).any(|w| w[1] < w[0]) {
                return bad("cumulative integral decreased");
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let residual = if self.len() >= 2 {
            energy_balance_residual(self)?
        } else {
            vec![0.0; self.len()]
        };
        writeln!(out, "{CSV_HEADER}")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.t[i],
                self.l2_sq[i],
                self.h1_sq[i],
                self.h2_sq[i],
                self.f_dot_u[i],
                self.int_h1_sq[i],
                self.int_f_sq[i],
                residual[i]
            )?;
        }
        Ok(())
    }
}

/// `r(t) = ½ d/dt‖u‖² + ν‖u‖₁² − (f, u)`, which vanishes for exact solutions.
/// The time derivative uses second-order finite differences on the samples.
pub fn energy_balance_residual(trace: &NormTrace) -> Result<Vec<f64>> {
    if trace.len() < 2 {
        return Err(Error::Shape(
            "energy balance residual needs at least two samples".into(),
        ));
    }
    let d = calculus::derivative(&trace.t, &trace.l2_sq)?;
    Ok(d.iter()
        .enumerate()
        .map(|(i, di)| 0.5 * di + trace.nu * trace.h1_sq[i] - trace.f_dot_u[i])
        .collect())
}
