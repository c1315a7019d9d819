use nsreg::bounds_engine::{
    arctan_bound_free, arctan_bound_steady, arctan_bound_timedep, interval_comparison, ComparisonTable,
    ConstantLedger, CriterionInput, CriterionReport,
};
use nsreg::ns_solver::{simulate, ForcingSpec, NormTrace, Simulation};
use nsreg::regularity_monitor::{monitor_trace, termination_check, CheckResult, MonitorReport, MonitorTolerances};
use nsreg::spectral_field::embedding::{embedding_ratios, EmbeddingRatios, QuadratureLevels};
use nsreg::spectral_field::snapshot::{write_snapshot, SnapshotMeta};
use nsreg::spectral_field::{random_divfree_field, shear_flow, SpectralVelocity};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CalibrationInit, InitKind};
use crate::config::{BoundsSettings, CalibrateSettings, CompareSettings, CriterionChoice, MonitorSettings, SimSettings};
use crate::error::{CliError, EXIT_SOLVER, EXIT_VIOLATION};
use crate::fields::{grid, initial_state, norms, scale_to_free_lhs, two_shell_field};
use crate::output::{json_bytes, OutputDir};

/// What a command hands back to the front end.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub summary: Value,
    /// Human-readable warnings for stderr.
    pub warnings: Vec<String>,
}

fn trace_csv(trace: &NormTrace) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    Ok(buf)
}

fn pretty(v: &Value) -> String {
    String::from_utf8(json_bytes(v)).expect("JSON is UTF-8")
}

fn run_summary(sim: &Simulation) -> Value {
    let tr = &sim.trace;
    let last = tr.len() - 1;
    let ratio = if tr.l2_sq[0] > 0.0 {
        Some(tr.l2_sq[last] / tr.l2_sq[0])
    } else {
        None
    };
    json!({
        "termination": sim.termination,
        "steps": sim.steps,
        "final_time": sim.final_time,
        "samples": tr.len(),
        "initial": { "l2_sq": tr.l2_sq[0], "h1_sq": tr.h1_sq[0] },
        "final": { "l2_sq": tr.l2_sq[last], "h1_sq": tr.h1_sq[last], "h2_sq": tr.h2_sq[last] },
        "energy_ratio": ratio,
        "max_h1_sq": tr.h1_sq.iter().fold(0.0f64, |m, &x| m.max(x)),
    })
}

fn sim_meta(command: &str, s: &SimSettings, u0: &SpectralVelocity, forcing: &ForcingSpec, seed: u64) -> Value {
    let g = u0.grid();
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "settings": s,
        "seed": seed,
        "grid": { "n": g.n(), "length": g.length() },
        "forcing": forcing.label(),
    })
}

pub fn cmd_simulate(s: &SimSettings, out: Option<&OutputDir>) -> Result<Outcome, CliError> {
    let (u0, forcing) = initial_state(s, s.seed)?;
    let sim = simulate(&u0, &forcing, &s.solver_config()?)?;
    let summary = run_summary(&sim);
    if let Some(dir) = out {
        dir.write("trace.csv", &trace_csv(&sim.trace)?)?;
        dir.write_json("meta.json", &sim_meta("simulate", s, &u0, &forcing, s.seed))?;
        dir.write_json("report.json", &summary)?;
    }
    if let Some(path) = &s.save_snapshot {
        let meta = SnapshotMeta {
            seed: (s.init == InitKind::Random).then_some(s.seed),
            time: sim.final_time,
            provenance: format!("nsreg simulate --init {:?}", s.init).to_lowercase(),
        };
        write_snapshot(path, &sim.final_state, &meta)?;
    }
    // a numerical blow-up is a result, not a failure
    Ok(Outcome {
        exit_code: 0,
        stdout: pretty(&summary),
        summary,
        warnings: Vec::new(),
    })
}

pub fn evaluate_bounds(s: &BoundsSettings, ledger: &ConstantLedger) -> Result<CriterionReport, CliError> {
    let report = match s.criterion {
        CriterionChoice::Free => arctan_bound_free(&CriterionInput::free(s.l2, s.h1sq), ledger)?,
        CriterionChoice::Steady => {
            arctan_bound_steady(&CriterionInput::steady(s.l2, s.h1sq, s.t_end, s.f), ledger)?
        }
        CriterionChoice::Timedep => {
            arctan_bound_timedep(&CriterionInput::time_dependent(s.l2, s.h1sq, s.t_end, s.intf2), ledger)?
        }
    };
    Ok(report)
}

pub fn cmd_bounds(s: &BoundsSettings, out: Option<&OutputDir>) -> Result<Outcome, CliError> {
    let ledger = s.ledger.ledger()?;
    let report = evaluate_bounds(s, &ledger)?;
    let v = report.to_json();
    if let Some(dir) = out {
        dir.write_json("report.json", &v)?;
        dir.write_json(
            "meta.json",
            &json!({
                "command": "bounds",
                "version": env!("CARGO_PKG_VERSION"),
                "settings": s,
                "ledger": ledger.to_json(),
            }),
        )?;
    }
    Ok(Outcome {
        exit_code: 0,
        stdout: pretty(&v),
        summary: json!({ "satisfied": report.satisfied, "lhs": v["lhs"] }),
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttachedRun {
    pub l2_norm: f64,
    /// `completed`, `numerical_blowup` or `unrepresentable`.
    pub status: String,
    pub last_valid_time: Option<f64>,
    pub max_h1_sq: Option<f64>,
    pub monitor: Option<MonitorReport>,
    /// `certified`, `not_certified`, or `contradiction` when a certified
    /// point blew up before `T`.
    pub verdict: String,
}

fn attach_run(
    s: &CompareSettings,
    ledger: &ConstantLedger,
    l2: f64,
    certified: bool,
    out: Option<&OutputDir>,
    label: &str,
) -> Result<AttachedRun, CliError> {
    let verdict = |blew_up: bool| {
        match (certified, blew_up) {
            (true, true) => "contradiction",
            (true, false) => "certified",
            (false, _) => "not_certified",
        }
        .to_string()
    };
    let g = grid(s.n)?;
    let Some(u0) = two_shell_field(g, l2, s.h1sq) else {
        return Ok(AttachedRun {
            l2_norm: l2,
            status: "unrepresentable".into(),
            last_valid_time: None,
            max_h1_sq: None,
            monitor: None,
            verdict: verdict(false),
        });
    };
    let cfg = nsreg::ns_solver::SolverConfig::new(ledger.nu, s.dt, s.t_end)?;
    let sim = simulate(&u0, &ForcingSpec::Zero, &cfg)?;
    let report = arctan_bound_free(&CriterionInput::free(l2, s.h1sq), ledger)?;
    let tol = MonitorTolerances::default();
    let mut checks = monitor_trace(&sim.trace, ledger, Some(&report), &tol)?.checks;
    checks.push(termination_check(&sim.termination, s.t_end));
    let monitor = MonitorReport::new(checks);
    let (status, last) = match &sim.termination {
        nsreg::ns_solver::Termination::Completed => ("completed", None),
        nsreg::ns_solver::Termination::NumericalBlowup { last_valid_time, .. } => {
            ("numerical_blowup", Some(*last_valid_time))
        }
    };
    if let Some(dir) = out {
        dir.write(&format!("{label}/trace.csv"), &trace_csv(&sim.trace)?)?;
        dir.write_json(&format!("{label}/report.json"), &monitor.to_json())?;
        dir.write_json(
            &format!("{label}/meta.json"),
            &json!({ "l2_norm": l2, "h1_sq": s.h1sq, "n": s.n, "dt": s.dt, "T": s.t_end }),
        )?;
    }
    Ok(AttachedRun {
        l2_norm: l2,
        status: status.into(),
        last_valid_time: last,
        max_h1_sq: Some(sim.trace.h1_sq.iter().fold(0.0f64, |m, &x| m.max(x))),
        monitor: Some(monitor),
        verdict: verdict(sim.termination.is_blowup()),
    })
}

pub fn comparison_table(s: &CompareSettings, ledger: &ConstantLedger) -> Result<ComparisonTable, CliError> {
    for &l2 in &s.sweep {
        let lower = ledger.lambda1 * l2 * l2;
        if s.h1sq < lower {
            return Err(nsreg::Error::Poincare {
                lhs: lower,
                rhs: s.h1sq,
            }
            .into());
        }
    }
    Ok(interval_comparison(s.h1sq, &s.sweep, ledger, s.tstar_fraction)?)
}

pub fn cmd_compare(s: &CompareSettings, out: Option<&OutputDir>) -> Result<Outcome, CliError> {
    let ledger = s.ledger.ledger()?;
    let table = comparison_table(s, &ledger)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;

    let runs: Vec<AttachedRun> = if s.simulate {
        table
            .rows
            .par_iter()
            .enumerate()
            .map(|(i, r)| attach_run(s, &ledger, r.l2_norm, r.free_certified, out, &format!("point_{i:03}")))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };

    let contradictions = runs.iter().filter(|r| r.verdict == "contradiction").count();
    let monitor_code = runs
        .iter()
        .filter_map(|r| r.monitor.as_ref().map(|m| m.exit_code()))
        .fold(0, combine_exit);
    let exit_code = if contradictions > 0 { combine_exit(EXIT_VIOLATION, monitor_code) } else { monitor_code };

    let report = json!({
        "table": table,
        "threshold_l2": table.threshold_l2,
        "simulations": runs,
        "contradictions": contradictions,
    });
    if let Some(dir) = out {
        dir.write("comparison.csv", &csv)?;
        dir.write_json("report.json", &report)?;
        dir.write_json(
            "meta.json",
            &json!({
                "command": "compare",
                "version": env!("CARGO_PKG_VERSION"),
                "settings": s,
                "ledger": ledger.to_json(),
            }),
        )?;
    }
    Ok(Outcome {
        exit_code,
        stdout: String::from_utf8(csv).expect("CSV is UTF-8"),
        summary: json!({
            "threshold_l2": table.threshold_l2,
            "certified_points": table.rows.iter().filter(|r| r.free_certified).count(),
            "contradictions": contradictions,
        }),
        warnings: Vec::new(),
    })
}

/// 3 beats 2 beats 0.
pub fn combine_exit(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_SOLVER => 2,
        EXIT_VIOLATION => 1,
        _ => 0,
    };
    if rank(a) >= rank(b) {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationMember {
    pub seed: Option<u64>,
    pub sobolev: f64,
    pub interpolation: f64,
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub members: Vec<CalibrationMember>,
    pub max_sobolev: f64,
    pub max_interpolation: f64,
    /// `max_sobolev · max_interpolation`, a lower bound on admissible `C_S C_I`.
    pub product_of_maxima: f64,
    /// Running maxima of the two ratios over the first `k` members.
    pub running_max_sobolev: Vec<f64>,
    pub running_max_interpolation: Vec<f64>,
    pub default_product: f64,
    pub exceeds_default: bool,
}

pub fn calibrate(s: &CalibrateSettings) -> Result<Calibration, CliError> {
    let g = grid(s.n)?;
    let quad = QuadratureLevels {
        base_factor: 2,
        levels: s.levels,
    };
    let members: Vec<CalibrationMember> = match s.init {
        CalibrationInit::Shear => vec![member(None, embedding_ratios(&shear_flow(g, 1.0), quad)?)],
        CalibrationInit::Random => (0..s.ensemble as u64)
            .into_par_iter()
            .map(|i| {
                let seed = s.seed + i;
                let u = random_divfree_field(g, seed, s.slope, 1.0)?;
                Ok(member(Some(seed), embedding_ratios(&u, quad)?))
            })
            .collect::<Result<_, CliError>>()?,
    };
    let mut running_max_sobolev = Vec::with_capacity(members.len());
    let mut running_max_interpolation = Vec::with_capacity(members.len());
    let (mut ms, mut mi) = (0.0f64, 0.0f64);
    for m in &members {
        ms = ms.max(m.sobolev);
        mi = mi.max(m.interpolation);
        running_max_sobolev.push(ms);
        running_max_interpolation.push(mi);
    }
    let default_product = nsreg::bounds_engine::default_holder_product();
    Ok(Calibration {
        max_sobolev: ms,
        max_interpolation: mi,
        product_of_maxima: ms * mi,
        running_max_sobolev,
        running_max_interpolation,
        default_product,
        exceeds_default: ms * mi > default_product,
        members,
    })
}

fn member(seed: Option<u64>, r: EmbeddingRatios) -> CalibrationMember {
    CalibrationMember {
        seed,
        sobolev: r.sobolev,
        interpolation: r.interpolation,
        product: r.product(),
    }
}

pub fn cmd_calibrate(s: &CalibrateSettings, out: Option<&OutputDir>) -> Result<Outcome, CliError> {
    let cal = calibrate(s)?;
    let v = serde_json::to_value(&cal).expect("calibration serializes");
    let mut warnings = Vec::new();
    if cal.exceeds_default {
        warnings.push(format!(
            "warning: empirical C_S·C_I ≥ {:.6} exceeds the default {:.6}",
            cal.product_of_maxima, cal.default_product
        ));
    }
    if let Some(dir) = out {
        dir.write_json("report.json", &v)?;
        dir.write_json(
            "meta.json",
            &json!({ "command": "calibrate", "version": env!("CARGO_PKG_VERSION"), "settings": s }),
        )?;
    }
    Ok(Outcome {
        exit_code: 0,
        stdout: pretty(&v),
        summary: json!({
            "product_of_maxima": cal.product_of_maxima,
            "exceeds_default": cal.exceeds_default,
        }),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitoredRun {
    pub seed: u64,
    pub criterion: CriterionReport,
    pub termination: nsreg::ns_solver::Termination,
    pub monitor: MonitorReport,
    pub exit_code: i32,
}

/// Simulate from `u0` and run every monitor check, including dominance of
/// the criterion's bound when it is satisfied.
pub fn monitored_run(
    s: &MonitorSettings,
    ledger: &ConstantLedger,
    u0: &SpectralVelocity,
    forcing: &ForcingSpec,
    seed: u64,
) -> Result<(MonitoredRun, Simulation), CliError> {
    let sim = simulate(u0, forcing, &s.sim.solver_config()?)?;
    let (l2, h1) = norms(u0);
    let criterion = match forcing {
        ForcingSpec::Zero => arctan_bound_free(&CriterionInput::free(l2, h1), ledger)?,
        ForcingSpec::Steady(_) => {
            let f_norm = sim.trace.f_sq[0].sqrt();
            arctan_bound_steady(&CriterionInput::steady(l2, h1, s.sim.t_end, f_norm), ledger)?
        }
        ForcingSpec::TimeDependent(_) => {
            let int_f = *sim.trace.int_f_sq.last().expect("trace is never empty");
            arctan_bound_timedep(&CriterionInput::time_dependent(l2, h1, sim.final_time, int_f), ledger)?
        }
    };
    let mut checks = monitor_trace(&sim.trace, ledger, Some(&criterion), &s.tolerances)?.checks;
    checks.push(termination_check(&sim.termination, s.sim.t_end));
    let monitor = MonitorReport::new(checks);
    let exit_code = monitor.exit_code();
    Ok((
        MonitoredRun {
            seed,
            criterion,
            termination: sim.termination.clone(),
            monitor,
            exit_code,
        },
        sim,
    ))
}

fn merge_checks(runs: &[MonitoredRun]) -> MonitorReport {
    let mut merged: Vec<CheckResult> = Vec::new();
    for r in runs {
        for c in &r.monitor.checks {
            match merged.iter_mut().find(|m| m.name == c.name) {
                Some(m) => {
                    m.max_violation = m.max_violation.max(c.max_violation);
                    m.first_violation_t = match (m.first_violation_t, c.first_violation_t) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    m.passed &= c.passed;
                }
                None => merged.push(c.clone()),
            }
        }
    }
    MonitorReport::new(merged)
}

fn member_json(r: &MonitoredRun) -> Value {
    json!({
        "seed": r.seed,
        "criterion": r.criterion.to_json(),
        "termination": r.termination,
        "monitor": r.monitor.to_json(),
        "exit_code": r.exit_code,
    })
}

pub fn run_monitor(s: &MonitorSettings, out: Option<&OutputDir>) -> Result<(Vec<MonitoredRun>, MonitorReport), CliError> {
    let ledger = s.ledger.ledger()?;
    let prepare = |seed: u64| -> Result<(SpectralVelocity, ForcingSpec), CliError> {
        let (u0, f) = initial_state(&s.sim, seed)?;
        let u0 = match s.target_lhs {
            Some(t) => scale_to_free_lhs(&u0, &ledger, t),
            None => u0,
        };
        Ok((u0, f))
    };
    let runs: Vec<MonitoredRun> = match s.ensemble {
        None => {
            let (u0, f) = prepare(s.sim.seed)?;
            let (run, sim) = monitored_run(s, &ledger, &u0, &f, s.sim.seed)?;
            if let Some(dir) = out {
                dir.write("trace.csv", &trace_csv(&sim.trace)?)?;
                let mut meta = sim_meta("monitor", &s.sim, &u0, &f, s.sim.seed);
                meta["ledger"] = ledger.to_json();
                meta["tolerances"] = json!(s.tolerances);
                dir.write_json("meta.json", &meta)?;
            }
            vec![run]
        }
        Some(m) => (0..m as u64)
            .into_par_iter()
            .map(|i| {
                let seed = s.sim.seed + i;
                let (u0, f) = prepare(seed)?;
                let (run, sim) = monitored_run(s, &ledger, &u0, &f, seed)?;
                if let Some(dir) = out {
                    let label = format!("member_{i:03}");
                    dir.write(&format!("{label}/trace.csv"), &trace_csv(&sim.trace)?)?;
                    dir.write_json(&format!("{label}/report.json"), &member_json(&run))?;
                    dir.write_json(
                        &format!("{label}/meta.json"),
                        &sim_meta("monitor", &s.sim, &u0, &f, seed),
                    )?;
                }
                Ok(run)
            })
            .collect::<Result<_, CliError>>()?,
    };
    let merged = merge_checks(&runs);
    if let Some(dir) = out {
        if s.ensemble.is_some() {
            dir.write_json(
                "meta.json",
                &json!({
                    "command": "monitor",
                    "version": env!("CARGO_PKG_VERSION"),
                    "settings": s,
                    "ledger": ledger.to_json(),
                }),
            )?;
        }
    }
    Ok((runs, merged))
}

pub fn cmd_monitor(s: &MonitorSettings, out: Option<&OutputDir>) -> Result<Outcome, CliError> {
    let (runs, merged) = run_monitor(s, out)?;
    let exit_code = runs.iter().map(|r| r.exit_code).fold(0, combine_exit);
    let mut v = merged.to_json();
    v["members"] = Value::Array(runs.iter().map(member_json).collect());
    if let Some(dir) = out {
        dir.write_json("report.json", &v)?;
    }
    Ok(Outcome {
        exit_code,
        stdout: pretty(&v),
        summary: json!({
            "passed": merged.passed,
            "members": runs.len(),
            "certified_members": runs.iter().filter(|r| r.criterion.satisfied).count(),
        }),
        warnings: Vec::new(),
    })
}
