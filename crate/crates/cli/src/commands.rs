//! `verify`, `scenario` and `clock-info`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use trinity_core::clock::{build_clock, clock_checks, diagnostics, ClockDiagnostics};
use trinity_core::constraint::ConstraintModel;
use trinity_core::exec::{self, Strategy};
use trinity_core::framechange::{
    frame_change_report, mirrored_model, nonlocality_scenario, reduce_coefficients, tfc_state, Frame, NonlocalityConfig, Perspective,
    ThreeFrameModel,
};
use trinity_core::probability::{default_delays, probability_report, propagator, propagator_oracle};
use trinity_core::reductions::{constraint_checks, verify_trinity};
use trinity_core::report::{max_defect, CheckRow, Report};
use trinity_core::TrinityError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ModelConfig, Resolved};
use crate::output::{report_csv, scenario_csv, timings_json, write_text, RunReport, ScenarioRow, Timings};
use crate::CliError;

/// Mirrored three-frame models above this reduced dimension skip the frame-change suite.
const MAX_FRAME_REDUCED_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    Propagator,
    FrameChange,
    Nonlocality,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Propagator => "propagator",
            Scenario::FrameChange => "frame-change",
            Scenario::Nonlocality => "nonlocality",
        }
    }
}

/// Errors from model construction are config errors; the rest are run failures.
fn classify(e: TrinityError) -> CliError {
    match e {
        TrinityError::Config(_)
        | TrinityError::EmptyPhysicalSpace
        | TrinityError::DimensionMismatch { .. }
        | TrinityError::NonHermitian { .. }
        | TrinityError::DegenerateClock(_)
        | TrinityError::CompactnessViolated { .. }
        | TrinityError::NonUniformGrid(_)
        | TrinityError::InvalidSpace(_)
        | TrinityError::LabelCollision(_) => CliError::Config(e.to_string()),
        other => CliError::Run(other.to_string()),
    }
}

pub fn load(path: &Path) -> Result<ModelConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ModelConfig::from_json(&text)
}

fn resolve(path: &Path, output: Option<PathBuf>) -> Result<Resolved, CliError> {
    let mut r = load(path)?.resolve(path)?;
    if let Some(dir) = output {
        r.output_dir = dir;
    }
    Ok(r)
}

fn timed<T>(timings: &mut Timings, stage: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.record(stage, start.elapsed().as_secs_f64());
    out
}

fn finish(r: &Resolved, command: &str, mut report: Report, timings: &Timings, stem: &str) -> Result<RunReport, CliError> {
    if let Some(tol) = r.config.tolerances.override_all {
        report.override_tolerance(tol);
    }
    let run = RunReport::new(command, &r.config_hash, r.config.seed, report);
    write_text(&r.output_dir.join(format!("{stem}.json")), &run.to_json())?;
    write_text(&r.output_dir.join(format!("{stem}.csv")), &report_csv(&run)?)?;
    write_text(&r.output_dir.join(format!("timings-{stem}.json")), &timings_json(timings))?;
    Ok(run)
}

fn print_summary(run: &RunReport, out_dir: &Path) {
    for row in run.rows.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} defect={:.3e} tol={:.1e} ({})", row.name, row.defect, row.tolerance, row.anchor);
    }
    println!(
        "{}: {} rows, {} failed, {} skipped; reports in {}",
        run.command,
        run.summary.rows,
        run.summary.failed,
        run.summary.skipped,
        out_dir.display()
    );
}

fn exit_code(run: &RunReport) -> i32 {
    if run.passed() {
        0
    } else {
        1
    }
}

fn three_frame(r: &Resolved) -> Result<ThreeFrameModel, CliError> {
    mirrored_model(&r.clock, r.system.clone(), r.model.tol_match).map_err(classify)
}

/// Runs every suite on the configured model and writes `report.json`, `report.csv` and `timings-report.json`.
pub fn cmd_verify(path: &Path, output: Option<PathBuf>, strategy: Strategy) -> Result<i32, CliError> {
    let r = resolve(path, output)?;
    r.model.require_nonempty().map_err(classify)?;
    let frames = three_frame(&r)?;
    let seed = r.config.seed;
    let mut timings = Timings::default();
    let mut report = Report::new();

    let clock = timed(&mut timings, "clock", || clock_checks(&r.model.clock)).map_err(classify)?;
    report.extend(clock.prefixed("clock"));
    let constraint = timed(&mut timings, "constraint", || constraint_checks(&r.model, seed)).map_err(classify)?;
    report.extend(constraint.prefixed("constraint"));
    let trinity = timed(&mut timings, "trinity", || verify_trinity(&r.model, &r.observables, &r.taus, seed, strategy)).map_err(classify)?;
    report.extend(trinity.prefixed("trinity"));
    let probability = timed(&mut timings, "probability", || probability_report(&r.model, seed, &r.taus, strategy)).map_err(classify)?;
    report.extend(probability.prefixed("probability"));
    let frame = if frames.triples().is_empty() {
        skipped("frame-change", "no kernel triples for the mirrored three-clock model")
    } else if frames.reduced_dim(Frame::A) > MAX_FRAME_REDUCED_DIM {
        skipped("frame-change", "mirrored three-clock model too large")
    } else {
        timed(&mut timings, "frame-change", || frame_change_report(&frames, seed, &r.taus, strategy)).map_err(classify)?
    };
    report.extend(frame.prefixed("frame-change"));

    let run = finish(&r, "verify", report, &timings, "report")?;
    print_summary(&run, &r.output_dir);
    Ok(exit_code(&run))
}

fn skipped(name: &str, reason: &str) -> Report {
    let mut report = Report::new();
    report.push(CheckRow::skipped(name, "temporal frame change between two clocks", reason));
    report
}

/// Runs one scenario and writes `scenario-<name>.csv` plus its check report.
pub fn cmd_scenario(which: Scenario, path: &Path, output: Option<PathBuf>, strategy: Strategy) -> Result<i32, CliError> {
    let r = resolve(path, output)?;
    let mut timings = Timings::default();
    let start = Instant::now();
    let (rows, report) = match which {
        Scenario::Propagator => propagator_rows(&r, strategy)?,
        Scenario::FrameChange => frame_change_rows(&r, strategy)?,
        Scenario::Nonlocality => nonlocality_rows(&r, strategy)?,
    };
    timings.record(which.name(), start.elapsed().as_secs_f64());
    let stem = format!("scenario-{}", which.name());
    write_text(&r.output_dir.join(format!("{stem}-table.csv")), &scenario_csv(&rows)?)?;
    let run = finish(&r, &format!("scenario {}", which.name()), report, &timings, &stem)?;
    print_summary(&run, &r.output_dir);
    Ok(exit_code(&run))
}

fn missing(name: &str) -> CliError {
    CliError::Config(format!("scenario `{name}` needs a `scenario.{}` block", name.replace('-', "_")))
}

fn propagator_rows(r: &Resolved, strategy: Strategy) -> Result<(Vec<ScenarioRow>, Report), CliError> {
    let cfg = r.config.scenario.propagator.as_ref().ok_or_else(|| missing("propagator"))?;
    let ds = r.model.system_dim();
    if cfg.q >= ds || cfg.q_prime >= ds {
        return Err(CliError::Config(format!("propagator indices must be below the system dimension {ds}")));
    }
    let delays = cfg.delays.clone().unwrap_or_else(|| default_delays(cfg.n_delays));
    if delays.is_empty() || delays.iter().any(|d| !d.is_finite()) {
        return Err(CliError::Config("propagator needs finite delays".into()));
    }
    let model: &ConstraintModel = &r.model;
    let results = exec::map(strategy, &delays, |&d| {
        let tp = cfg.tau + d;
        Ok::<_, TrinityError>((propagator(model, cfg.q, cfg.tau, cfg.q_prime, tp)?, propagator_oracle(model, cfg.q, cfg.tau, cfg.q_prime, tp)?))
    });
    let tol = 1e-9;
    let mut rows = Vec::new();
    let mut report = Report::new();
    let (mut worst_oracle, mut worst_path) = (0.0_f64, 0.0_f64);
    for (d, res) in delays.iter().zip(results) {
        let param = format!("delta_tau={d}");
        match res {
            Ok((p, oracle)) => {
                rows.push(ScenarioRow::data("propagator", param.clone(), "probability", p.value));
                rows.push(ScenarioRow::data("propagator", param.clone(), "oracle", oracle));
                rows.push(ScenarioRow::checked("propagator", param.clone(), "oracle-defect", (p.value - oracle).abs(), tol));
                rows.push(ScenarioRow::checked("propagator", param, "path-defect", p.path_defect(), tol));
                worst_oracle = max_defect([worst_oracle, (p.value - oracle).abs()]);
                worst_path = max_defect([worst_path, p.path_defect()]);
            }
            Err(TrinityError::Config(msg)) => return Err(CliError::Config(msg)),
            Err(e) => {
                rows.push(ScenarioRow::checked("propagator", param.clone(), "probability", f64::NAN, tol));
                report.push(CheckRow::new(format!("propagator-row/{param}"), "two-time transition probability", f64::NAN, tol).with_note(e.to_string()));
            }
        }
    }
    report.check("propagator-oracle", "conditional probability equals |⟨q'|U_S(τ'-τ)|q⟩|²", worst_oracle, tol);
    report.check("propagator-paths", "relational, kinematical and reduced forms agree", worst_path, tol);
    Ok((rows, report))
}

fn frame_change_rows(r: &Resolved, strategy: Strategy) -> Result<(Vec<ScenarioRow>, Report), CliError> {
    let cfg = r.config.scenario.frame_change.as_ref().ok_or_else(|| missing("frame-change"))?;
    let model = three_frame(r)?;
    model.require_nonempty().map_err(classify)?;
    if model.reduced_dim(Frame::A) > MAX_FRAME_REDUCED_DIM {
        return Err(CliError::Config("mirrored three-clock model too large for the frame-change scenario".into()));
    }
    let seed = cfg.seed.unwrap_or(r.config.seed);
    let taus = cfg.taus.clone().unwrap_or_else(|| {
        let (a, b) = model.clock_a.group().bounds();
        (0..12).map(|k| a + (b - a) * (k as f64 + 0.5) / 12.0).collect()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = model.random_coefficients(&mut rng).map_err(classify)?;
    let pairs: Vec<(f64, f64)> = taus.iter().flat_map(|&a| taus.iter().map(move |&b| (a, b))).collect();
    let results = exec::map(strategy, &pairs, |&(ta, tb)| -> Result<(f64, f64), TrinityError> {
        let a = Perspective::schrodinger(Frame::A, ta);
        let b = Perspective::schrodinger(Frame::B, tb);
        let psi = reduce_coefficients(&model, a, &coeffs)?;
        let there = tfc_state(&model, a, b, &psi)?.vector;
        let back = tfc_state(&model, b, a, &there)?.vector;
        Ok(((back - &psi).norm(), (there.norm() - psi.norm()).abs()))
    });
    let tol = 1e-9;
    let mut rows = Vec::new();
    let (mut worst_round, mut worst_norm) = (0.0_f64, 0.0_f64);
    for (&(ta, tb), res) in pairs.iter().zip(results) {
        let (round, norm) = res.map_err(classify)?;
        let param = format!("tau_a={ta};tau_b={tb}");
        rows.push(ScenarioRow::checked("frame-change", param.clone(), "round-trip-defect", round, tol));
        rows.push(ScenarioRow::checked("frame-change", param, "norm-defect", norm, tol));
        worst_round = max_defect([worst_round, round]);
        worst_norm = max_defect([worst_norm, norm]);
    }
    let mut report = Report::new();
    report.check("round-trip", "A → B → A returns the input state", worst_round, tol);
    report.check("norm", "the frame change preserves the norm", worst_norm, tol);
    report.extend(frame_change_report(&model, seed, &taus, strategy).map_err(classify)?);
    Ok((rows, report))
}

fn nonlocality_rows(r: &Resolved, strategy: Strategy) -> Result<(Vec<ScenarioRow>, Report), CliError> {
    let base = r.config.scenario.nonlocality.clone().ok_or_else(|| missing("nonlocality"))?;
    let outcome = nonlocality_scenario(&base, strategy).map_err(classify)?;
    let mut rows = fidelity_rows(&base, &outcome.samples);
    rows.push(ScenarioRow::checked("nonlocality", param(&base, None), "truncation", outcome.truncation, 1e-6));
    for &sigma in r.config.scenario.nonlocality_sigma_sweep.as_deref().unwrap_or(&[]) {
        let cfg = NonlocalityConfig { sigma, ..base.clone() };
        match nonlocality_scenario(&cfg, strategy) {
            Ok(o) => rows.extend(fidelity_rows(&cfg, &o.samples)),
            Err(TrinityError::WindowTooSmall(t)) => rows.push(ScenarioRow::checked("nonlocality", param(&cfg, None), "truncation", t, 1e-6)),
            Err(e) => return Err(classify(e)),
        }
    }
    Ok((rows, outcome.report))
}

fn param(cfg: &NonlocalityConfig, tau_b: Option<f64>) -> String {
    let ratio = if cfg.delta > 0.0 { cfg.sigma / cfg.delta } else { f64::INFINITY };
    match tau_b {
        Some(t) => format!("sigma={};delta={};sigma_over_delta={ratio};tau_b={t}", cfg.sigma, cfg.delta),
        None => format!("sigma={};delta={};sigma_over_delta={ratio}", cfg.sigma, cfg.delta),
    }
}

fn fidelity_rows(cfg: &NonlocalityConfig, samples: &[trinity_core::framechange::NonlocalitySample]) -> Vec<ScenarioRow> {
    samples
        .iter()
        .flat_map(|s| {
            let p = param(cfg, Some(s.tau_b));
            [
                ScenarioRow::data("nonlocality", p.clone(), "local-evolution-fidelity", s.local_evolution),
                ScenarioRow::data("nonlocality", p.clone(), "single-peak-fidelity", s.single_peak),
                ScenarioRow::data("nonlocality", p.clone(), "mixture-fidelity", s.mixture),
                ScenarioRow::data("nonlocality", p, "branch-mixture-fidelity", s.branch_mixture),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct ClockInfo {
    diagnostics: ClockDiagnostics,
    checks: Vec<CheckRow>,
}

/// Prints clock diagnostics and checks as JSON; needs only the clock part of the config.
pub fn cmd_clock_info(path: &Path) -> Result<i32, CliError> {
    let config = load(path)?;
    let clock = build_clock(config.clock_spec()?).map_err(classify)?;
    let mut checks = clock_checks(&clock).map_err(classify)?;
    if let Some(tol) = config.tolerances.override_all {
        checks.override_tolerance(tol);
    }
    let pass = checks.all_pass();
    let info = ClockInfo { diagnostics: diagnostics(&clock).map_err(classify)?, checks: checks.rows };
    println!("{}", serde_json::to_string_pretty(&info).expect("clock info serializes"));
    Ok(if pass { 0 } else { 1 })
}
