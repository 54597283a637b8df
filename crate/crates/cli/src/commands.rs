use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use ringtube_core::analytic::{arrival_probability, arrival_rate, uniform_grid, SeriesModel};
use ringtube_core::csvio::{self, MetricsRow};
use ringtube_core::mcsim::run_ensemble;
use ringtube_core::pipeline::{self, Scores};
use ringtube_core::scenario::validate_regime;
use ringtube_core::{RegimeReport, Scenario, SimConfig};

use crate::config::RunConfig;
use crate::Failure;

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn report_regime(r: &RegimeReport) {
    println!("{r}");
    if !r.laminar {
        eprintln!("warning: Re >= 2000, the uniform-flow model does not apply");
    }
    if !r.flow_dominated {
        eprintln!("warning: Pe below threshold, the flow-dominated approximation may be poor");
    }
}

pub fn analytic(cfg: &RunConfig) -> Result<(), Failure> {
    let s = cfg.require_scenario()?;
    let regime = validate_regime(&s, cfg.pe_threshold)?;
    prepare_dir(&cfg.output_dir)?;
    report_regime(&regime);
    let model = SeriesModel::new(s, cfg.trunc)?;
    let grid = uniform_grid(cfg.sim.horizon, cfg.grid_step)?;
    let opts = cfg.response_options();
    let prob = arrival_probability(&model, &grid, &opts)?;
    let rate = arrival_rate(&model, &grid, &opts)?;
    csvio::save(&cfg.output_dir.join("arrival_probability.csv"), |w| {
        csvio::write_response_curve(w, &prob)
    })?;
    csvio::save(&cfg.output_dir.join("arrival_rate.csv"), |w| {
        csvio::write_response_curve(w, &rate)
    })?;
    if let Some(last) = prob.values.last() {
        println!("R({}) = {last:.6}", cfg.sim.horizon);
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    seed: u64,
    dt: f64,
    horizon: f64,
    n_molecules: usize,
    replications: usize,
    bin_width: f64,
    tube_length: f64,
    early_exit: bool,
    early_exit_sigma: f64,
    wall_clock_seconds: f64,
    absorbed: usize,
    exited: usize,
    overshoot_clamps: u64,
    scenario: Scenario,
}

fn write_manifest(dir: &Path, command: &str, s: &Scenario, sim: &SimConfig, res: &ringtube_core::EnsembleResult, seconds: f64) -> Result<(), Failure> {
    let m = Manifest {
        command,
        seed: sim.seed,
        dt: sim.dt,
        horizon: sim.horizon,
        n_molecules: sim.n_molecules,
        replications: sim.replications,
        bin_width: sim.bin_width,
        tube_length: sim.tube_length,
        early_exit: sim.early_exit_sigma > 0.0,
        early_exit_sigma: sim.early_exit_sigma,
        wall_clock_seconds: seconds,
        absorbed: res.absorbed(),
        exited: res.exited(),
        overshoot_clamps: res.overshoot_clamps(),
        scenario: *s,
    };
    let text = toml::to_string(&m).map_err(|e| Failure::Numerical(e.to_string()))?;
    let path = dir.join("manifest.toml");
    std::fs::write(&path, text)
        .map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))
}

pub fn simulate(cfg: &RunConfig) -> Result<(), Failure> {
    let s = cfg.require_scenario()?;
    prepare_dir(&cfg.output_dir)?;
    let start = Instant::now();
    let res = run_ensemble(&s, &cfg.sim)?;
    let seconds = start.elapsed().as_secs_f64();
    csvio::save_ensemble(&cfg.output_dir, &res)?;
    write_manifest(&cfg.output_dir, "simulate", &s, &cfg.sim, &res, seconds)?;
    println!(
        "absorbed {} of {} ({:.6}), exited {}, {seconds:.1} s",
        res.absorbed(),
        res.total_molecules(),
        res.final_absorbed_fraction(),
        res.exited()
    );
    Ok(())
}

fn metrics_row(id: String, sc: &Scores, seed: u64) -> MetricsRow {
    MetricsRow {
        example_id: id,
        rmse: sc.rmse,
        nmse: sc.nmse,
        nrmse: sc.nrmse,
        n_samples: sc.n_samples,
        seed,
    }
}

fn print_scores(label: &str, sc: &Scores) {
    println!(
        "{label}: rmse={:.6} nmse={:.6} nrmse={:.6} n={}",
        sc.rmse, sc.nmse, sc.nrmse, sc.n_samples
    );
}

pub fn validate(cfg: &RunConfig, self_check: bool) -> Result<(), Failure> {
    let s = cfg.require_scenario()?;
    prepare_dir(&cfg.output_dir)?;
    let opts = cfg.response_options();
    let scores = if self_check {
        report_regime(&validate_regime(&s, cfg.pe_threshold)?);
        pipeline::self_validate(&s, cfg.trunc, cfg.sim.horizon, cfg.grid_step, &opts)?
    } else {
        let start = Instant::now();
        let v = pipeline::validate(&s, cfg.trunc, &cfg.sim, cfg.grid_step, cfg.pe_threshold, &opts)?;
        report_regime(&v.regime);
        let dir = &cfg.output_dir;
        csvio::save(&dir.join("arrival_probability.csv"), |w| {
            csvio::write_response_curve(w, &v.theory)
        })?;
        csvio::save_ensemble(dir, &v.simulation)?;
        write_manifest(dir, "validate", &s, &cfg.sim, &v.simulation, start.elapsed().as_secs_f64())?;
        v.scores
    };
    let row = metrics_row(cfg.label(), &scores, cfg.sim.seed);
    csvio::save(&cfg.output_dir.join("metrics.csv"), |w| csvio::write_metrics(w, &[row]))?;
    print_scores(&cfg.label(), &scores);
    Ok(())
}

pub fn reproduce_table2(cfg: &RunConfig) -> Result<(), Failure> {
    let dir = &cfg.output_dir;
    prepare_dir(dir)?;
    let report = pipeline::reproduce_table2(
        cfg.trunc,
        &cfg.sim,
        cfg.grid_step,
        cfg.pe_threshold,
        &cfg.response_options(),
    );

    let mut metrics = Vec::new();
    for (row, v) in report.rows.iter().zip(&report.validations) {
        let Some(v) = v else { continue };
        let sub = dir.join(format!("ex{}", row.example_id));
        prepare_dir(&sub)?;
        csvio::save(&sub.join("arrival_probability.csv"), |w| {
            csvio::write_response_curve(w, &v.theory)
        })?;
        csvio::save_ensemble(&sub, &v.simulation)?;
        metrics.push(metrics_row(format!("ex{}", row.example_id), &v.scores, cfg.sim.seed));
    }
    csvio::save(&dir.join("table2.csv"), |w| csvio::write_table2(w, &report))?;
    csvio::save(&dir.join("metrics.csv"), |w| csvio::write_metrics(w, &metrics))?;
    let mut summaries = Vec::new();
    if let Some(s) = report.rmse_summary() {
        summaries.push(("rmse", s));
    }
    if let Some(s) = report.nrmse_summary() {
        summaries.push(("nrmse", s));
    }
    csvio::save(&dir.join("summary.csv"), |w| csvio::write_summaries(w, &summaries))?;

    println!(
        "{:>3} {:>8} {:>8} {:>10} {:>10} {:>8} {:>8} {:>8}  status",
        "ex", "Re", "Re_ref", "Pe", "Pe_ref", "NRMSE", "ref", "RMSE"
    );
    for r in &report.rows {
        let (nrmse, rmse) = match r.scores {
            Some(s) => (format!("{:.4}", s.nrmse), format!("{:.4}", s.rmse)),
            None => ("-".into(), "-".into()),
        };
        println!(
            "{:>3} {:>8.4} {:>8.4} {:>10.4} {:>10.4} {:>8} {:>8.4} {:>8}  {}",
            r.example_id,
            r.reynolds,
            r.reynolds_ref,
            r.peclet,
            r.peclet_ref,
            nrmse,
            r.nrmse_ref,
            rmse,
            if r.passed() { "pass".to_owned() } else { format!("FAIL: {}", r.failures.join("; ")) }
        );
    }
    for (name, s) in &summaries {
        println!(
            "{name}: min={:.4} max={:.4} mean={:.4} std={:.4}",
            s.min, s.max, s.mean, s.std
        );
    }
    if report.all_passed() {
        Ok(())
    } else {
        let failed = report.rows.iter().filter(|r| !r.passed()).count();
        Err(Failure::Partial(format!("{failed} of {} rows out of tolerance", report.rows.len())))
    }
}
