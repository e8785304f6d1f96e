use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use super::svg::{render_predictions_svg, render_series_svg};
use super::{
    ensure_dir, write_json, BenchmarkCase, CheckArgs, CrossvalArgs, FitArgs, IngestArgs, McArgs, ModelKind, PlotArgs,
    PredictArgs, SimulateArgs,
};
use crate::assumptions::check_all;
use crate::error::{Error, Result};
use crate::experiments::{case1_params, case2_params, run_crossval, run_mc_study, McConfig};
use crate::inference::{
    bootstrap_ci_glv, confidence_intervals, fit_glv_ls, fit_sglv_amle, predict_one_step, ConfidenceIntervals,
    DriftModel,
};
use crate::ingest::{aggregate_taxa, load_counts_csv, select_top_k, to_proportions};
use crate::model::{Drift, ModelParams, ObservationSeries};
use crate::numerics::RngStream;
use crate::simulator::{load_series_csv, save_series_csv, simulate_observed, SamplingSchedule, SimConfig};

fn write_text(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn resolve_x0(params: &ModelParams, flag: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    flag.clone()
        .or_else(|| params.x0().map(<[f64]>::to_vec))
        .ok_or_else(|| Error::InvalidInput("no initial state: pass --x0 or add \"x0\" to the parameter file".into()))
}

pub(super) fn simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let mut params = ModelParams::from_json_file(&args.params)?;
    if let Some(scale) = args.sigma_scale {
        params = params.with_sigma_scale(scale)?;
    }
    let x0 = resolve_x0(&params, &args.x0)?;
    let schedule = SamplingSchedule::new(args.schedule.gaps.clone(), args.schedule.probs.clone(), args.n)?;
    let config = SimConfig {
        fine_dt: args.schedule.fine_dt,
        x0,
        seed: args.seed,
        stream_id: args.stream,
    };
    let mut rng = config.rng();
    let series = simulate_observed(&params, &config, &schedule, &mut rng)?;

    ensure_dir(&args.out)?;
    let csv = args.out.join("series.csv");
    save_series_csv(&series, &csv)?;
    let echo = json!({ "args": args, "params": params, "sim": config, "schedule": schedule });
    let summary = json!({
        "n_obs": series.n_obs(),
        "total_time": series.total_time(),
        "series": "series.csv",
    });
    let meta = write_json(&args.out, "simulate", Some(args.seed), &echo, &summary)?;
    Ok(vec![csv, meta])
}

#[derive(Serialize)]
struct NetworkEdge<'a> {
    from: &'a str,
    to: &'a str,
    weight: f64,
    sign: i8,
    lower: f64,
    upper: f64,
}

/// Edges `l → k` for every `a_kl` whose interval excludes zero.
fn network<'a>(labels: &'a [String], ci: &ConfidenceIntervals) -> Vec<NetworkEdge<'a>> {
    let mut edges = Vec::new();
    for (k, s) in ci.species.iter().enumerate() {
        for l in 0..labels.len() {
            if !ci.interaction_significant(k, l) {
                continue;
            }
            let (lower, upper) = ci.interaction(k, l).expect("significant implies available");
            let weight = s.estimate[l + 1];
            edges.push(NetworkEdge {
                from: &labels[l],
                to: &labels[k],
                weight,
                sign: if weight > 0.0 { 1 } else { -1 },
                lower,
                upper,
            });
        }
    }
    edges
}

pub(super) fn fit(args: &FitArgs) -> Result<Vec<PathBuf>> {
    let series = load_series_csv(&args.series)?;
    let sglv = fit_sglv_amle(&series)?;
    let ci = confidence_intervals(&sglv, args.level)?;
    let glv = if args.no_glv { None } else { Some(fit_glv_ls(&series)?) };
    let boot = match (&glv, args.bootstrap) {
        (Some(g), b) if b > 0 => {
            let mut rng = RngStream::new(args.seed, 0);
            Some(bootstrap_ci_glv(&series, g, b, args.level, &mut rng)?)
        }
        _ => None,
    };
    let labels = series.labels();
    let fitted = ModelParams::new(
        sglv.r_hat.clone(),
        sglv.a_hat.clone(),
        sglv.sigma2_hat.iter().map(|s| s.sqrt()).collect(),
    )?;
    let report = check_all(&fitted, series.x(0))?;

    ensure_dir(&args.out)?;
    let seed = (args.bootstrap > 0).then_some(args.seed);
    let fit_json = json!({ "labels": labels, "sglv": sglv, "glv": glv });
    let ci_json = json!({ "labels": labels, "sglv": ci, "glv_bootstrap": boot });
    let net_json = json!({ "nodes": labels, "level": args.level, "edges": network(labels, &ci) });
    Ok(vec![
        write_json(&args.out, "fit", seed, args, &fit_json)?,
        write_json(&args.out, "ci", seed, args, &ci_json)?,
        write_json(&args.out, "network", seed, args, &net_json)?,
        write_json(&args.out, "assumptions", seed, args, &report)?,
    ])
}

pub(super) fn check(args: &CheckArgs) -> Result<Vec<PathBuf>> {
    let params = ModelParams::from_json_file(&args.params)?;
    let x0 = resolve_x0(&params, &args.x0)?;
    let report = check_all(&params, &x0)?;
    for (name, pass) in [
        ("A1", report.a1_pass),
        ("A2", report.a2_pass),
        ("A3", report.a3_pass),
        ("A4", report.a4_pass),
    ] {
        eprintln!("{name}: {}", if pass { "pass" } else { "fail" });
    }
    ensure_dir(&args.out)?;
    let echo = json!({ "args": args, "params": params });
    Ok(vec![write_json(&args.out, "check", None, &echo, &report)?])
}

pub(super) fn mc(args: &McArgs) -> Result<Vec<PathBuf>> {
    let params = match (&args.params, args.case) {
        (Some(path), _) => ModelParams::from_json_file(path)?,
        (None, BenchmarkCase::One) => case1_params(),
        (None, BenchmarkCase::Two) => case2_params(),
    };
    let mut config = McConfig::new(params, args.n.clone(), args.replicates, args.seed)?;
    config.schedule = SamplingSchedule {
        gaps: args.schedule.gaps.clone(),
        probs: args.schedule.probs.clone(),
        n_obs: 2,
    };
    config.fine_dt = args.schedule.fine_dt;
    let result = run_mc_study(&config, args.jobs)?;

    ensure_dir(&args.out)?;
    let csv = args.out.join("mc.csv");
    let mut buf = Vec::new();
    result.write_csv(&mut buf).map_err(|e| Error::io(&csv, e))?;
    std::fs::write(&csv, buf).map_err(|e| Error::io(&csv, e))?;
    let echo = json!({ "args": args, "study": config });
    Ok(vec![csv, write_json(&args.out, "mc", Some(args.seed), &echo, &result)?])
}

pub(super) fn crossval(args: &CrossvalArgs) -> Result<Vec<PathBuf>> {
    let series = load_series_csv(&args.series)?;
    let mut rng = RngStream::new(args.seed, args.stream);
    let result = run_crossval(&series, &args.k, args.splits, args.jobs, &mut rng)?;

    ensure_dir(&args.out)?;
    let mut csv = String::from("k,splits_used,dropped,sglv_mspe,sglv_se,glv_mspe,glv_se,sglv_wins\n");
    for r in &result.rows {
        csv.push_str(&format!(
            "{},{},{},{:.10e},{:.10e},{:.10e},{:.10e},{}\n",
            r.k, r.splits_used, r.dropped, r.sglv.mse, r.sglv.se, r.glv.mse, r.glv.se, r.sglv_wins
        ));
    }
    Ok(vec![
        write_text(args.out.join("crossval.csv"), &csv)?,
        write_json(&args.out, "crossval", Some(args.seed), args, &result)?,
    ])
}

pub(super) fn ingest(args: &IngestArgs) -> Result<Vec<PathBuf>> {
    let table = load_counts_csv(&args.counts, &args.taxonomy)?.filter_time(args.start, args.end);
    let grouped = aggregate_taxa(&table, &args.rank)?;
    let top = select_top_k(&grouped, args.top)?;
    let series = to_proportions(&top, args.pseudocount, args.renormalize.into())?;

    ensure_dir(&args.out)?;
    let csv = args.out.join("series.csv");
    save_series_csv(&series, &csv)?;
    let totals = top.taxon_totals();
    let taxa: Vec<_> = top
        .taxa_ids
        .iter()
        .zip(&totals)
        .map(|(id, total)| json!({ "name": id, "total": total, "lineage": top.taxonomy[id] }))
        .collect();
    let summary = json!({
        "n_samples": series.n_obs(),
        "groups_before_selection": grouped.n_taxa(),
        "otus": table.n_taxa(),
        "selected": taxa,
        "series": "series.csv",
    });
    Ok(vec![csv, write_json(&args.out, "ingest", None, args, &summary)?])
}

/// Parameter-file drift in log space, `R = r − σ²/2`.
fn params_drift(path: &PathBuf) -> Result<Drift> {
    Ok(ModelParams::from_json_file(path)?.drift())
}

fn model_drift(series: &ObservationSeries, params: &Option<PathBuf>, kind: ModelKind) -> Result<Drift> {
    match (params, kind) {
        (Some(p), _) => params_drift(p),
        (None, ModelKind::Sglv) => Ok(fit_sglv_amle(series)?.drift()),
        (None, ModelKind::Glv) => Ok(fit_glv_ls(series)?.drift()),
    }
}

/// `û_i` for `i ≥ 1` from the observed `u_{i−1}`.
fn one_step_predictions(drift: &Drift, series: &ObservationSeries) -> Vec<Vec<f64>> {
    (1..series.n_obs())
        .map(|i| {
            let dt = series.times()[i] - series.times()[i - 1];
            predict_one_step(drift, series.u(i - 1), dt)
        })
        .collect()
}

pub(super) fn predict(args: &PredictArgs) -> Result<Vec<PathBuf>> {
    let series = load_series_csv(&args.series)?;
    let drift = model_drift(&series, &args.params, args.model)?;
    if drift.n_species() != series.n_species() {
        return Err(Error::Dimension(
            "parameters and series disagree on species count".into(),
        ));
    }
    let preds = one_step_predictions(&drift, &series);

    ensure_dir(&args.out)?;
    let path = args.out.join("predictions.csv");
    let mut out = Vec::new();
    let labels = series.labels();
    let io = |e| Error::io(&path, e);
    write!(out, "time").map_err(io)?;
    for l in labels {
        write!(out, ",u_{l}").map_err(io)?;
    }
    for l in labels {
        write!(out, ",u_hat_{l}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    let mut sq = 0.0;
    for (j, p) in preds.iter().enumerate() {
        let i = j + 1;
        write!(out, "{:.16e}", series.times()[i]).map_err(io)?;
        for v in series.u(i) {
            write!(out, ",{v:.16e}").map_err(io)?;
        }
        for (v, u) in p.iter().zip(series.u(i)) {
            write!(out, ",{v:.16e}").map_err(io)?;
            sq += (v - u).powi(2);
        }
        writeln!(out).map_err(io)?;
    }
    std::fs::write(&path, out).map_err(io)?;
    let summary = json!({
        "drift": drift,
        "n_predictions": preds.len(),
        "mspe": sq / preds.len().max(1) as f64,
        "predictions": "predictions.csv",
    });
    Ok(vec![
        path.clone(),
        write_json(&args.out, "predict", None, args, &summary)?,
    ])
}

pub(super) fn plot(args: &PlotArgs) -> Result<Vec<PathBuf>> {
    let series = load_series_csv(&args.series)?;
    ensure_dir(&args.out)?;
    let mut written = vec![write_text(
        args.out.join("proportions.svg"),
        &render_series_svg(&series),
    )?];
    match model_drift(&series, &args.params, ModelKind::Sglv) {
        Ok(drift) if drift.n_species() == series.n_species() => {
            let preds = one_step_predictions(&drift, &series);
            let svg = render_predictions_svg(&series, &preds);
            written.push(write_text(args.out.join("log_predictions.svg"), &svg)?);
        }
        Ok(_) => {
            return Err(Error::Dimension(
                "parameters and series disagree on species count".into(),
            ))
        }
        Err(e) => eprintln!("note: prediction overlay skipped ({e})"),
    }
    Ok(written)
}
