//! Checks of the enstrophy and energy inequalities, and of certified bounds,
//! along simulated trajectories.

use serde::{Deserialize, Serialize};

use crate::bounds_engine::{ConstantLedger, CriterionReport};
use crate::calculus;
use crate::ns_solver::{energy_balance_residual, simulate, ForcingSpec, NormTrace, SolverConfig, Termination};
use crate::spectral_field::SpectralVelocity;
use crate::{Error, Result};

/// Relative tolerances of the monitor checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorTolerances {
    /// Excursions of `y' − c₃‖f‖² − c₆y³` above zero, relative to
    /// `max(c₃‖f‖² + c₆y³)`. The finite-difference error in `y'` at
    /// `dt ≤ 10⁻²` sits orders of magnitude below this.
    pub h1_relative: f64,
    /// Relative to the largest right-hand side of the energy inequality;
    /// covers trapezoidal quadrature of `∫y` and `∫‖f‖²`.
    pub energy_relative: f64,
    /// Relative to the bound value at each sample.
    pub dominance_relative: f64,
    /// Solver diagnostic: `|½ d/dt‖u‖² + ν‖u‖₁² − (f,u)|` relative to
    /// `max(ν‖u‖₁² + |(f,u)|)`, on top of the estimated sampling error.
    pub balance_relative: f64,
}

impl Default for MonitorTolerances {
    fn default() -> Self {
        Self {
            h1_relative: 1e-3,
            energy_relative: 1e-9,
            dominance_relative: 1e-6,
            balance_relative: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Failure points at the solver.
    Solver,
    /// Failure points at the ledger constants or the bounds.
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: CheckKind,
    /// Largest excess of the left over the right side, clamped at zero.
    pub max_violation: f64,
    /// First sample whose excess is above tolerance.
    pub first_violation_t: Option<f64>,
    pub passed: bool,
}

impl CheckResult {
    fn from_excess(name: &str, kind: CheckKind, t: &[f64], excess: &[f64], tol: &[f64]) -> Self {
        let mut max_violation = 0.0f64;
        let mut first = None;
        for i in 0..t.len() {
            max_violation = max_violation.max(excess[i]);
            if first.is_none() && !(excess[i] <= tol[i]) {
                first = Some(t[i]);
            }
        }
        Self {
            name: name.to_string(),
            kind,
            max_violation,
            first_violation_t: first,
            passed: first.is_none(),
        }
    }
}

/// `y' − c₃‖f‖² − c₆y³` per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub t: Vec<f64>,
    pub residual: Vec<f64>,
    pub tolerance: f64,
}

impl ResidualSeries {
    pub fn check(&self) -> CheckResult {
        let tol = vec![self.tolerance; self.t.len()];
        CheckResult::from_excess("h1_inequality", CheckKind::Inequality, &self.t, &self.residual, &tol)
    }
}

pub fn check_h1_inequality(trace: &NormTrace, ledger: &ConstantLedger, tol: &MonitorTolerances) -> Result<ResidualSeries> {
    let dy = calculus::derivative(&trace.t, &trace.h1_sq)?;
    let mut scale = 0.0f64;
    let residual = (0..trace.len())
        .map(|i| {
            let y = trace.h1_sq[i];
            let rhs = ledger.forcing * trace.f_sq[i] + ledger.cubic * y * y * y;
            scale = scale.max(rhs);
            dy[i] - rhs
        })
        .collect();
    Ok(ResidualSeries {
        t: trace.t.clone(),
        residual,
        tolerance: tol.h1_relative * scale,
    })
}

/// `‖u(t)‖² + (ν/2)∫₀ᵗ y ≤ 2c₇∫₀ᵗ‖f‖² + ‖u₀‖²` at every sample.
pub fn check_energy_inequality(trace: &NormTrace, ledger: &ConstantLedger, tol: &MonitorTolerances) -> CheckResult {
    let Some(&e0) = trace.l2_sq.first() else {
        return CheckResult::from_excess("energy_inequality", CheckKind::Inequality, &[], &[], &[]);
    };
    let rhs: Vec<f64> = trace
        .int_f_sq
        .iter()
        .map(|i| 2.0 * ledger.energy_forcing * i + e0)
        .collect();
    let excess: Vec<f64> = (0..trace.len())
        .map(|i| trace.l2_sq[i] + 0.5 * ledger.nu * trace.int_h1_sq[i] - rhs[i])
        .collect();
    let scale = rhs.iter().fold(0.0f64, |m, &x| m.max(x));
    let t = vec![tol.energy_relative * scale; trace.len()];
    CheckResult::from_excess("energy_inequality", CheckKind::Inequality, &trace.t, &excess, &t)
}

/// `y(tᵢ) ≤ bound(tᵢ)(1 + rel)` on every sample inside the report's horizon.
pub fn check_bound_dominance(trace: &NormTrace, report: &CriterionReport, rel: f64) -> Result<CheckResult> {
    let Some(curve) = report.bound.filter(|_| report.satisfied) else {
        return Err(Error::Usage(
            "bound dominance needs a satisfied criterion report".into(),
        ));
    };
    let mut t = Vec::new();
    let mut excess = Vec::new();
    let mut tol = Vec::new();
    for i in 0..trace.len() {
        if trace.t[i] > report.horizon {
            break;
        }
        let b = curve.evaluate(trace.t[i])?;
        t.push(trace.t[i]);
        excess.push(trace.h1_sq[i] - b);
        tol.push(rel * b);
    }
    Ok(CheckResult::from_excess("bound_dominance", CheckKind::Inequality, &t, &excess, &tol))
}

/// Richardson estimate of the error in the centred derivative of `y`:
/// twice `|D₂ₕ − Dₕ| / 3`, from the derivative of every other sample. `None`
/// where no centred coarse difference exists, i.e. within two samples of an
/// end.
fn sampling_error(t: &[f64], y: &[f64]) -> Result<Vec<Option<f64>>> {
    let n = t.len();
    let fine = calculus::derivative(t, y)?;
    let mut est = vec![None; n];
    for parity in 0..2 {
        let idx: Vec<usize> = (parity..n).step_by(2).collect();
        if idx.len() < 3 {
            continue;
        }
        let ts: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let coarse = calculus::derivative(&ts, &ys)?;
        for j in 1..idx.len() - 1 {
            est[idx[j]] = Some(2.0 * (coarse[j] - fine[idx[j]]).abs() / 3.0);
        }
    }
    Ok(est)
}

/// Solver diagnostic: `|½ d/dt‖u‖² + ν‖u‖₁² − (f, u)|` against
/// `balance_relative · max(ν‖u‖₁² + |(f, u)|)` plus the sampling error of the
/// difference quotient. Stiff modes make differences near the ends
/// unreliable and leave no error estimate there, so only samples with an
/// estimate are checked.
pub fn check_energy_balance(trace: &NormTrace, tol: &MonitorTolerances) -> Result<CheckResult> {
    let r = energy_balance_residual(trace)?;
    let n = trace.len();
    let scale = (0..n)
        .map(|i| trace.nu * trace.h1_sq[i] + trace.f_dot_u[i].abs())
        .fold(0.0f64, f64::max);
    let slack = sampling_error(&trace.t, &trace.l2_sq)?;
    let (mut t, mut excess, mut allowed) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        if let Some(s) = slack[i] {
            t.push(trace.t[i]);
            excess.push(r[i].abs());
            allowed.push(tol.balance_relative * scale + 0.5 * s);
        }
    }
    Ok(CheckResult::from_excess("energy_balance", CheckKind::Solver, &t, &excess, &allowed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    /// Name of the check whose first violation comes earliest.
    pub first_failure: Option<String>,
}

impl MonitorReport {
    pub fn new(checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        let first_failure = checks
            .iter()
            .filter_map(|c| c.first_violation_t.map(|t| (t, c)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, c)| c.name.clone());
        Self {
            checks,
            passed,
            first_failure,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 when every check passes, 3 when a solver diagnostic fails, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else if self.checks.iter().any(|c| !c.passed && c.kind == CheckKind::Solver) {
            3
        } else {
            2
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "max_violation": c.max_violation,
                "first_violation_t": c.first_violation_t,
            })).collect::<Vec<_>>(),
            "passed": self.passed,
        })
    }
}

/// Energy balance, enstrophy and energy inequalities, and dominance of the
/// certified bound when a satisfied report is given.
pub fn monitor_trace(
    trace: &NormTrace,
    ledger: &ConstantLedger,
    report: Option<&CriterionReport>,
    tol: &MonitorTolerances,
) -> Result<MonitorReport> {
    let mut checks = vec![
        check_energy_balance(trace, tol)?,
        check_h1_inequality(trace, ledger, tol)?.check(),
        check_energy_inequality(trace, ledger, tol),
    ];
    if let Some(r) = report.filter(|r| r.satisfied) {
        checks.push(check_bound_dominance(trace, r, tol.dominance_relative)?);
    }
    Ok(MonitorReport::new(checks))
}

/// A numerical blow-up counts as a failed solver diagnostic, reported with
/// unit excess at the last valid time.
pub fn termination_check(termination: &Termination, t_end: f64) -> CheckResult {
    let (t, excess) = match termination {
        Termination::Completed => (vec![t_end], vec![0.0]),
        Termination::NumericalBlowup { last_valid_time, .. } => (vec![*last_valid_time], vec![1.0]),
    };
    CheckResult::from_excess("solver_termination", CheckKind::Solver, &t, &excess, &[0.0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub dt: f64,
    pub report: MonitorReport,
}

/// Rerun with `dt, dt/2, dt/4, …` and monitor each run.
pub fn dt_refinement_study(
    u0: &SpectralVelocity,
    forcing: &ForcingSpec,
    config: &SolverConfig,
    ledger: &ConstantLedger,
    report: Option<&CriterionReport>,
    levels: usize,
    tol: &MonitorTolerances,
) -> Result<Vec<RefinementLevel>> {
    (0..levels)
        .map(|l| {
            let mut cfg = *config;
            cfg.dt = config.dt / (1u64 << l) as f64;
            let sim = simulate(u0, forcing, &cfg)?;
            let mut m = monitor_trace(&sim.trace, ledger, report, tol)?;
            m.checks.push(termination_check(&sim.termination, cfg.t_end));
            Ok(RefinementLevel {
                dt: cfg.dt,
                report: MonitorReport::new(m.checks),
            })
        })
        .collect()
}

/// True when, for every check, the largest excess does not grow as `dt`
/// decreases (up to `slack` in absolute terms).
pub fn violations_shrink(study: &[RefinementLevel], slack: f64) -> bool {
    study.windows(2).all(|w| {
        w[0].report.checks.iter().all(|coarse| match w[1].report.check(&coarse.name) {
            Some(fine) => fine.max_violation <= coarse.max_violation + slack,
            None => true,
        })
    })
}
