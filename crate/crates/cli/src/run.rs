//! Command pipelines.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dnls_core::blowup::{
    blowup_fields_with, blowup_gauge, blowup_norm_curve, blowup_residual, blowup_state, log_fit_slope, NormPoint,
    BLOWUP_TIME,
};
use dnls_core::cole_hopf::{alpha_threshold, check_conditions, inverse_gauge, ExactSolver, W_MIN};
use dnls_core::dynamics::{dnls_residual, integrate_rk4_with, Rk4Options, Trajectory};
use dnls_core::invariants::{compute_q_lower_band, summarize, traces_to_csv};
use dnls_core::normal_form::{picard_solve_with, series_constant, ContractionConstants, PicardOptions};
use dnls_core::spectral::{embedding_constant, l2_norm, young_constant, FLParams, Regime, SpectralState};
use dnls_core::Error as CoreError;
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifact::{write_manifest, Certificate, RunArtifact, RunDir, RUN_DIR_ENV};
use crate::config::{Command, RunConfig, TrajectorySource};
use crate::error::{CliError, Context};
use crate::presets::initial_state;

/// Output root: `DNLS_RUN_DIR`, else the config's `output_dir`, else `runs`.
pub fn output_root(config: &RunConfig) -> PathBuf {
    std::env::var_os(RUN_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs"))
}

pub fn execute_run(config: &RunConfig) -> Result<RunArtifact, CliError> {
    execute_run_in(config, &output_root(config))
}

/// Runs `config` into a fresh `<root>/<timestamp>-<command>/` directory.
pub fn execute_run_in(config: &RunConfig, root: &Path) -> Result<RunArtifact, CliError> {
    config.validate()?;
    let start = Instant::now();
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let mut dir = RunDir::create(root, &stamp, config.command.name())?;
    dir.write_json("config.json", config)?;
    let certificates = dispatch(config, &mut dir)?;
    let directory = dir.path().to_path_buf();
    let artifact = RunArtifact {
        config: config.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        directory,
        files: dir.into_files(),
        passed: certificates.iter().all(|c| c.passed),
        certificates,
    };
    write_manifest(&artifact)?;
    Ok(artifact)
}

fn params(config: &RunConfig) -> Result<FLParams, CliError> {
    FLParams::new(config.fl.s, config.fl.p).map_err(|e| CliError::field("fl", e))
}

fn dispatch(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    match config.command {
        Command::Simulate => simulate(config, dir),
        Command::Exact => exact(config, dir),
        Command::Compare => compare(config, dir),
        Command::NfSolve => nf_solve(config, dir),
        Command::Invariants => invariants(config, dir),
        Command::Check => check(config, dir),
        Command::Blowup => blowup(config, dir),
        Command::Constants => constants(config, dir),
    }
}

fn steps_of(config: &RunConfig) -> Result<usize, CliError> {
    let steps = (config.t_final / config.dt).round();
    if (steps * config.dt - config.t_final).abs() > 1e-9 * config.t_final {
        return Err(CliError::field(
            "dt",
            format!("T = {} is not a multiple of dt", config.t_final),
        ));
    }
    Ok(steps as usize)
}

fn rk4(config: &RunConfig, phi: &SpectralState) -> Result<Trajectory, CliError> {
    steps_of(config)?;
    let opts = Rk4Options {
        max_samples: config.max_samples,
        ..Rk4Options::default()
    };
    Ok(
        integrate_rk4_with(&phi.to_interaction(), config.t_final, config.dt, &opts)
            .context("rk4")?
            .to_physical(),
    )
}

/// Sample count used by RK4 at this config, shared by the other solvers.
fn sample_count(config: &RunConfig) -> Result<usize, CliError> {
    let steps = steps_of(config)?;
    Ok(steps / dnls_core::dynamics::sample_stride(steps, config.max_samples) + 1)
}

fn residual_certificate(name: &str, traj: &Trajectory, tol: f64) -> Result<Certificate, CliError> {
    let report = dnls_residual(traj).context("residual")?;
    let value = if report.max_residual == 0.0 {
        0.0
    } else {
        report.relative
    };
    Ok(Certificate::at_most(name, value, tol))
}

fn simulate(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let phi = initial_state(&config.data, config.k_max, &params)?;
    let traj = rk4(config, &phi)?;
    dir.write("trajectory.csv", traj.to_csv().as_bytes())?;
    dir.write_json("summary.json", &traj.summary(&params))?;
    Ok(vec![
        Certificate::holds("finite", traj.states().iter().all(|s| s.is_finite())),
        residual_certificate("rk4_residual", &traj, config.tolerances.residual)?,
    ])
}

fn exact_trajectory(config: &RunConfig, phi: &SpectralState) -> Result<Trajectory, CliError> {
    let solver = ExactSolver::new(phi)
        .context("exact solver")?
        .truncating(config.exact_truncation);
    solver
        .trajectory(config.t_final, sample_count(config)?)
        .context("exact solver")
}

fn exact(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let phi = initial_state(&config.data, config.k_max, &params)?;
    let traj = exact_trajectory(config, &phi)?;
    let report = check_conditions(&phi, &FLParams::l2()).context("conditions")?;
    dir.write("trajectory.csv", traj.to_csv().as_bytes())?;
    dir.write_json("summary.json", &traj.summary(&params))?;
    dir.write_json("conditions.json", &report)?;
    let mut certs = vec![residual_certificate(
        "exact_residual",
        &traj,
        config.tolerances.residual,
    )?];
    if let Some(bound) = report.l2_apriori {
        let worst = traj.states().iter().map(l2_norm).fold(0.0, f64::max);
        certs.push(Certificate::at_most("l2_apriori", worst, bound));
    }
    Ok(certs)
}

fn picard(config: &RunConfig, phi: &SpectralState, nodes: usize) -> Result<(Trajectory, Value), CliError> {
    let opts = PicardOptions {
        params: FLParams::l2(),
        allow_large_data: config.picard.allow_large_data,
        ..PicardOptions::default()
    };
    let nodes = if config.picard.quad_nodes == 0 {
        nodes
    } else {
        config.picard.quad_nodes
    };
    let (traj, report) = picard_solve_with(
        phi,
        config.t_final,
        config.n_max,
        nodes,
        config.tolerances.picard,
        config.picard.max_iter,
        &opts,
    )
    .context("picard")?;
    Ok((traj, serde_json::to_value(report).expect("serializable")))
}

fn sup_gap(a: &[SpectralState], b: &[SpectralState]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| l2_norm(&x.sub(y))).collect()
}

fn compare(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let phi = initial_state(&config.data, config.k_max, &params)?;
    let rk = rk4(config, &phi)?;
    let exact = exact_trajectory(config, &phi)?;
    let (nf, report) = picard(config, &phi, rk.len())?;
    let nf = nf.to_physical();
    let stride = (nf.len() - 1) / (rk.len() - 1);
    let nf_states: Vec<SpectralState> = nf.states().iter().step_by(stride).cloned().collect();

    let rk_exact = sup_gap(rk.states(), exact.states());
    let rk_nf = sup_gap(rk.states(), &nf_states);
    let exact_nf = sup_gap(exact.states(), &nf_states);
    let mut csv = String::from("t,rk4_exact,rk4_picard,exact_picard\n");
    for (i, s) in rk.states().iter().enumerate() {
        let _ = writeln!(
            csv,
            "{:.17e},{:.17e},{:.17e},{:.17e}",
            s.time(),
            rk_exact[i],
            rk_nf[i],
            exact_nf[i]
        );
    }
    dir.write("discrepancy.csv", csv.as_bytes())?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let summary = json!({
        "samples": rk.len(),
        "max_rk4_exact": max(&rk_exact),
        "max_rk4_picard": max(&rk_nf),
        "max_exact_picard": max(&exact_nf),
        "picard": report,
    });
    dir.write_json("compare.json", &summary)?;
    let tol = config.tolerances.compare;
    Ok(vec![
        Certificate::at_most("rk4_vs_exact", max(&rk_exact), tol),
        Certificate::at_most("rk4_vs_picard", max(&rk_nf), tol),
        Certificate::at_most("exact_vs_picard", max(&exact_nf), tol),
    ])
}

fn nf_solve(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let phi = initial_state(&config.data, config.k_max, &params)?;
    let (traj, report) = picard(config, &phi, sample_count(config)?)?;
    dir.write("trajectory.csv", traj.to_csv().as_bytes())?;
    dir.write_json("picard.json", &report)?;
    let contraction = report["contraction"].as_f64().unwrap_or(f64::INFINITY);
    Ok(vec![Certificate::at_most("contraction", contraction, 1.0)])
}

fn invariants(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let phi = initial_state(&config.data, config.k_max, &params)?;
    let (traj, tol) = match config.source {
        TrajectorySource::Exact => (exact_trajectory(config, &phi)?, config.tolerances.drift_exact),
        TrajectorySource::Rk4 => (rk4(config, &phi)?, config.tolerances.drift_rk4),
    };
    let traces = compute_q_lower_band(&traj, config.n_max).context("invariants")?;
    let summary = summarize(&traces);
    dir.write("invariants.csv", traces_to_csv(&traces).as_bytes())?;
    let per_k: Vec<Value> = traces
        .iter()
        .map(|t| json!({"k": t.k, "drift": t.drift, "reference_deviation": t.reference_deviation}))
        .collect();
    dir.write_json(
        "invariants.json",
        &json!({"summary": summary, "traces": per_k, "source": config.source}),
    )?;
    Ok(vec![
        Certificate::at_most("q_drift", summary.max_drift, tol),
        Certificate::at_most("q_reference", summary.max_reference_deviation, tol),
    ])
}

fn check(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let phi = initial_state(&config.data, config.k_max, &params)?;
    let report = check_conditions(&phi, &params).context("conditions")?;
    dir.write_json("conditions.json", &report)?;
    Ok(Vec::new())
}

#[derive(Serialize)]
struct FieldRow {
    t: f64,
    l1: f64,
    l2: f64,
    linf: f64,
    fl: f64,
    min_w_modulus: f64,
}

fn blowup(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let params = params(config)?;
    let b = &config.blowup;
    let mut certs = Vec::new();

    let mut fields_csv = String::from("t,p,norm,error\n");
    let mut rows = Vec::new();
    for &t in &b.times {
        let sample = blowup_fields_with(t, b.grid, &[params]).context("blowup fields")?;
        for (p, v) in [("1", sample.l1), ("2", sample.l2), ("inf", sample.linf)] {
            let _ = writeln!(fields_csv, "{t:.17e},{p},{v:.17e},0");
        }
        rows.push(FieldRow {
            t,
            l1: sample.l1,
            l2: sample.l2,
            linf: sample.linf,
            fl: sample.fl[0].1,
            min_w_modulus: sample.min_w_modulus,
        });
    }
    dir.write("blowup_fields.csv", fields_csv.as_bytes())?;

    let mut curve_csv = String::from("eps,p,norm,error\n");
    let mut curves: Vec<(Option<f64>, Vec<NormPoint>)> = Vec::new();
    for &p in &b.p_list {
        let curve = blowup_norm_curve(p.unwrap_or(f64::INFINITY), &b.eps_list).context("blowup norm curve")?;
        for point in &curve {
            let label = p.map_or("inf".to_string(), |p| p.to_string());
            let _ = writeln!(
                curve_csv,
                "{:.17e},{label},{:.17e},{:.17e}",
                point.eps, point.value, point.error
            );
        }
        if b.eps_list.len() >= 2 {
            let increasing = curve
                .windows(2)
                .all(|w| (w[0].eps > w[1].eps) == (w[1].value > w[0].value));
            let label = p.map_or("inf".to_string(), |p| p.to_string());
            certs.push(Certificate::holds(&format!("norm_growth_p{label}"), increasing));
        }
        curves.push((p, curve));
    }
    dir.write("blowup_curve.csv", curve_csv.as_bytes())?;
    let l1_slope = curves
        .iter()
        .find(|(p, c)| *p == Some(1.0) && c.len() >= 2)
        .map(|(_, c)| log_fit_slope(c));
    if let Some(slope) = l1_slope {
        certs.push(Certificate::holds("l1_log_slope_positive", slope > 0.0));
    }

    let residual = blowup_residual(b.residual_t, b.residual_dt, config.k_max).context("blowup residual")?;
    certs.push(Certificate::at_most(
        "closed_form_residual",
        residual.residual,
        config.tolerances.blowup_residual,
    ));

    let initial = blowup_fields_with(0.0, b.grid, &[]).context("blowup fields")?;
    let expect = 2.0 * (2f64.sqrt() - 1.0).sqrt();
    certs.push(Certificate::at_most("initial_l2", (initial.l2 - expect).abs(), 1e-10));

    let singular = matches!(
        inverse_gauge(&blowup_gauge(BLOWUP_TIME, b.grid).context("blowup gauge")?, W_MIN),
        Err(CoreError::GaugeSingular { .. })
    );
    certs.push(Certificate::holds("gauge_singular_at_blowup", singular));

    let u0 = blowup_state(0.0, config.k_max).context("blowup data")?;
    let conditions = check_conditions(&u0, &FLParams::l2()).context("conditions")?;
    certs.push(Certificate::holds(
        "conditions_fail_for_large_data",
        !conditions.verdicts.noint && !conditions.verdicts.sgwp2,
    ));

    dir.write_json(
        "blowup.json",
        &json!({
            "fields": rows,
            "l1_log_slope": l1_slope,
            "residual": residual,
            "initial_l2": initial.l2,
            "initial_l2_closed_form": expect,
            "conditions_at_t0": conditions,
            "blowup_time": PI / 2.0,
        }),
    )?;
    Ok(certs)
}

#[derive(Serialize)]
struct ConstantsRow {
    s: f64,
    p: f64,
    regime: Regime,
    young: Option<f64>,
    embedding: Option<f64>,
    series: Option<f64>,
    smallness: Option<f64>,
}

fn constants(config: &RunConfig, dir: &mut RunDir) -> Result<Vec<Certificate>, CliError> {
    let chosen = params(config)?;
    let mut list = vec![chosen];
    for (s, p) in [(0.0, 2.0), (0.5, 4.0), (0.3, 3.0), (1.0, 2.0), (0.0, 1.0)] {
        let params = FLParams::new(s, p).context("constants")?;
        if !list.contains(&params) {
            list.push(params);
        }
    }
    let rows: Vec<ConstantsRow> = list
        .iter()
        .map(|params| {
            let regime = params.regime();
            let contraction = ContractionConstants::new(params).ok();
            ConstantsRow {
                s: params.s,
                p: params.p,
                regime,
                young: young_constant(params).ok(),
                embedding: embedding_constant(params).ok(),
                series: regime.is_well_posed().then(|| series_constant(params.s)),
                smallness: contraction.map(|c| c.smallness),
            }
        })
        .collect();
    let alpha = alpha_threshold();
    let fmt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.17e}"));
    let mut csv = String::from("s,p,regime,Z,z,A_s,delta1\n");
    for r in &rows {
        let regime = serde_json::to_value(r.regime).expect("serializable");
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.s,
            r.p,
            regime.as_str().unwrap_or_default(),
            fmt(r.young),
            fmt(r.embedding),
            fmt(r.series),
            fmt(r.smallness)
        );
    }
    dir.write("constants.csv", csv.as_bytes())?;
    dir.write_json("constants.json", &json!({"rows": rows, "alpha": alpha}))?;
    Ok(vec![Certificate::holds(
        "alpha_root",
        (2.0 * (-2.0 * alpha).exp() * alpha.cos() - 1.0).abs() < 1e-10,
    )])
}

/// Runs each patch merged onto `base` on its own worker thread pool;
/// results keep the order of `patches`.
pub fn execute_sweep(
    base: &Value,
    patches: &[Value],
    root: &Path,
    workers: usize,
) -> Vec<Result<RunArtifact, CliError>> {
    let workers = workers.max(1).min(patches.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<Option<Result<RunArtifact, CliError>>> = (0..patches.len()).map(|_| None).collect();
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= patches.len() {
                    break;
                }
                let mut doc = base.clone();
                crate::config::merge(&mut doc, &patches[i]);
                let outcome = RunConfig::from_value(doc).and_then(|config| execute_run_in(&config, root));
                slots.lock().expect("no poisoned workers")[i] = Some(outcome);
            });
        }
    });
    results.into_iter().map(|r| r.expect("every index visited")).collect()
}
