//! Time-dependent detuning runs: concurrence along trajectories under atomic
//! decay, coupling asymmetry and detuning asymmetry.

use entangler_core::{
    derive, offset_for_target, quad_fit, steady_concurrence, steady_states, time_to_threshold,
    DetuningSchedule64, PhysicalParams64, ThresholdSearch, ThresholdTime,
};
use entangler_core::qops::partial_trace;
use entangler_core::concurrence;
use serde_json::{json, Value as Json};

use super::{build_model, initial_atomic_state, lift, par_map, simulate, Series};
use crate::config::Config;
use crate::table::{RunOutput, Table};
use crate::HarnessError;

const DEFAULT_T_FINAL: f64 = 20.0;
/// Slack for the monotonicity checks, above integration noise.
const MONOTONE_SLACK: f64 = 1e-6;

fn t_final(config: &Config) -> f64 {
    config.t_final.unwrap_or(DEFAULT_T_FINAL)
}

fn linear_standard() -> DetuningSchedule64 {
    DetuningSchedule64::linear(100.0, DetuningSchedule64::DEFAULT_LINEAR_T_END).expect("valid ramp")
}

/// The configured schedule alone, or the given defaults.
fn profiles(
    config: &Config,
    defaults: Vec<DetuningSchedule64>,
) -> Result<Vec<DetuningSchedule64>, HarnessError> {
    match &config.schedule {
        Some(s) => Ok(vec![s.build()?]),
        None => Ok(defaults),
    }
}

fn constant_and_exponential(config: &Config) -> Result<Vec<DetuningSchedule64>, HarnessError> {
    profiles(
        config,
        vec![
            DetuningSchedule64::standard_constant(),
            DetuningSchedule64::standard_exponential(),
        ],
    )
}

fn run_one(
    config: &Config,
    params: &PhysicalParams64,
    schedule: &DetuningSchedule64,
) -> Result<Series, HarnessError> {
    let model = build_model(config.model, params, schedule)?;
    simulate(&model, &initial_atomic_state(config)?, t_final(config), config)
}

fn threshold_time(
    config: &Config,
    params: &PhysicalParams64,
    schedule: &DetuningSchedule64,
    c_ref: f64,
) -> Result<Option<f64>, HarnessError> {
    let model = build_model(config.model, params, schedule)?;
    let rho0 = lift(&initial_atomic_state(config)?, &model)?;
    let search = ThresholdSearch {
        evolve: config.evolve_options(),
        ..ThresholdSearch::default()
    };
    Ok(
        match time_to_threshold(&model, &rho0, config.threshold, c_ref, t_final(config), &search)? {
            ThresholdTime::Reached(t) => Some(t),
            ThresholdTime::NotReached => None,
        },
    )
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Number of (sample, neighbour) pairs where concurrence rises as the swept
/// value grows in magnitude.
fn monotonicity_violations(values: &[f64], series: &[&Series]) -> usize {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    order
        .windows(2)
        .map(|w| {
            let (lo, hi) = (&series[w[0]].concurrence, &series[w[1]].concurrence);
            lo.iter().zip(hi).filter(|(a, b)| **b > **a + MONOTONE_SLACK).count()
        })
        .sum()
}

fn slice_summary(series: &Series) -> Json {
    let (t_peak, peak) = series.peak();
    json!({ "peak": peak, "t_peak": t_peak, "final": series.last() })
}

pub fn run_fig3(config: &Config) -> Result<RunOutput, HarnessError> {
    let params = config.physical_params();
    let schedules = profiles(
        config,
        vec![
            DetuningSchedule64::standard_constant(),
            linear_standard(),
            DetuningSchedule64::standard_exponential(),
        ],
    )?;
    let runs = par_map(config.workers, &schedules, |s| {
        Ok((
            run_one(config, &params, s)?,
            threshold_time(config, &params, s, 1.0)?,
        ))
    })?;
    let mut table = Table::new("", &["profile", "t", "delta_omega", "concurrence", "purity"]);
    let mut summary = serde_json::Map::new();
    for (s, (series, t_thr)) in schedules.iter().zip(&runs) {
        for (k, &t) in series.times.iter().enumerate() {
            table.push(vec![
                s.name().into(),
                t.into(),
                s.value_at(t)?.into(),
                series.concurrence[k].into(),
                series.purity[k].into(),
            ]);
        }
        let mut entry = slice_summary(series);
        entry["t_threshold"] = json!(t_thr);
        summary.insert(s.name().into(), entry);
    }
    Ok(RunOutput {
        experiment: "fig3".into(),
        tables: vec![table],
        summary: json!({ "threshold": config.threshold, "profiles": summary }),
    })
}

pub fn run_fig4(config: &Config) -> Result<RunOutput, HarnessError> {
    let base = config.physical_params();
    let schedules = constant_and_exponential(config)?;
    let mut rates = config.gamma_n_grid();
    // the γn = 0 slice is the reference for every other slice
    let has_zero = rates.contains(&0.0);
    if !has_zero {
        rates.insert(0, 0.0);
    }
    let jobs: Vec<(usize, f64)> = (0..schedules.len())
        .flat_map(|p| rates.iter().map(move |&g| (p, g)))
        .collect();
    let runs = par_map(config.workers, &jobs, |&(p, g)| {
        run_one(config, &base.with_atomic_decay(g), &schedules[p])
    })?;

    let mut table = Table::new("", &["profile", "gamma_n", "t", "concurrence", "purity"]);
    let mut summary = serde_json::Map::new();
    for (p, s) in schedules.iter().enumerate() {
        let slices: Vec<&Series> = runs[p * rates.len()..(p + 1) * rates.len()].iter().collect();
        let reference = slices[0];
        let mut per_rate = Vec::new();
        for (i, (&g, series)) in rates.iter().zip(&slices).enumerate() {
            if i == 0 && !has_zero {
                continue;
            }
            for (k, &t) in series.times.iter().enumerate() {
                table.push(vec![
                    s.name().into(),
                    g.into(),
                    t.into(),
                    series.concurrence[k].into(),
                    series.purity[k].into(),
                ]);
            }
            let mut entry = slice_summary(series);
            entry["gamma_n"] = json!(g);
            entry["max_abs_diff_vs_zero"] =
                json!(max_abs_diff(&series.concurrence, &reference.concurrence));
            entry["peak_drop_vs_zero"] = json!(reference.peak().1 - series.peak().1);
            per_rate.push(entry);
        }
        summary.insert(
            s.name().into(),
            json!({
                "slices": per_rate,
                "monotonicity_violations": monotonicity_violations(&rates, &slices),
            }),
        );
    }
    Ok(RunOutput {
        experiment: "fig4".into(),
        tables: vec![table],
        summary: Json::Object(summary),
    })
}

/// Exponential sweep with a constant offset chosen so that the offset's
/// steady-state concurrence equals the peak of the plain exponential run.
pub fn run_fig5(config: &Config) -> Result<RunOutput, HarnessError> {
    let base = config.physical_params();
    let alpha_mag = derive(&base)?.alpha_magnitude();
    let (initial, rate) = match config.schedule.as_ref().map(|s| s.build()).transpose()? {
        Some(DetuningSchedule64::Exponential { initial, rate })
        | Some(DetuningSchedule64::ExponentialOffset { initial, rate, .. }) => (initial, rate),
        Some(other) => {
            return Err(HarnessError::Config(format!(
                "fig5 needs an exponential schedule, got {}",
                other.name()
            )))
        }
        None => (100.0, 0.8),
    };
    let pure = DetuningSchedule64::exponential(initial, rate)?;

    let mut jobs: Vec<(&str, f64, PhysicalParams64)> = Vec::new();
    for g in config.gamma_n_grid() {
        jobs.push(("gamma_n", g, base.with_atomic_decay(g)));
    }
    for eta in config.eta_g_grid() {
        jobs.push(("eta_g", eta, PhysicalParams64 { eta_g: eta, ..base }));
    }
    let runs = par_map(config.workers, &jobs, |(_, _, params)| {
        let plain = run_one(config, params, &pure)?;
        let peak = plain.peak().1;
        let offset = offset_for_target(peak.min(1.0), alpha_mag)?;
        let shifted = DetuningSchedule64::exponential_offset(initial, offset, rate)?;
        Ok((plain, offset, run_one(config, params, &shifted)?))
    })?;

    let mut table = Table::new("", &["sweep", "value", "t", "c_offset", "c_exponential"]);
    let mut offsets = Table::new(
        "offsets",
        &["sweep", "value", "peak_exponential", "offset", "final_offset", "final_exponential"],
    );
    for ((sweep, value, _), (plain, offset, shifted)) in jobs.iter().zip(&runs) {
        for (k, &t) in plain.times.iter().enumerate() {
            table.push(vec![
                (*sweep).into(),
                (*value).into(),
                t.into(),
                shifted.concurrence[k].into(),
                plain.concurrence[k].into(),
            ]);
        }
        offsets.push(vec![
            (*sweep).into(),
            (*value).into(),
            plain.peak().1.into(),
            (*offset).into(),
            shifted.last().into(),
            plain.last().into(),
        ]);
    }
    let gains: Vec<Json> = jobs
        .iter()
        .zip(&runs)
        .map(|((sweep, value, _), (plain, offset, shifted))| {
            json!({
                "sweep": sweep,
                "value": value,
                "offset": offset,
                "final_gain": shifted.last() - plain.last(),
            })
        })
        .collect();
    Ok(RunOutput {
        experiment: "fig5".into(),
        tables: vec![table, offsets],
        summary: json!({ "initial": initial, "rate": rate, "runs": gains }),
    })
}

pub fn run_fig6(config: &Config) -> Result<RunOutput, HarnessError> {
    let base = config.physical_params();
    let alpha_mag = derive(&base)?.alpha_magnitude();
    let schedules = constant_and_exponential(config)?;
    let etas = config.eta_g_grid();
    let jobs: Vec<(usize, f64)> = (0..schedules.len())
        .flat_map(|p| etas.iter().map(move |&e| (p, e)))
        .collect();
    let runs = par_map(config.workers, &jobs, |&(p, eta)| {
        run_one(config, &PhysicalParams64 { eta_g: eta, ..base }, &schedules[p])
    })?;

    let mut table = Table::new("", &["profile", "eta_g", "t", "concurrence", "purity"]);
    let mut steady = Table::new(
        "steady",
        &["profile", "eta_g", "null_dim", "purity", "concurrence", "c_ss"],
    );
    let mut summary = serde_json::Map::new();
    for (p, s) in schedules.iter().enumerate() {
        let slices: Vec<&Series> = runs[p * etas.len()..(p + 1) * etas.len()].iter().collect();
        let mut per_eta = Vec::new();
        for (&eta, series) in etas.iter().zip(&slices) {
            for (k, &t) in series.times.iter().enumerate() {
                table.push(vec![
                    s.name().into(),
                    eta.into(),
                    t.into(),
                    series.concurrence[k].into(),
                    series.purity[k].into(),
                ]);
            }
            let mut entry = slice_summary(series);
            entry["eta_g"] = json!(eta);
            entry["final_purity"] = json!(series.purity.last());
            per_eta.push(entry);
        }
        summary.insert(
            s.name().into(),
            json!({
                "slices": per_eta,
                "monotonicity_violations": monotonicity_violations(&etas, &slices),
            }),
        );
    }

    // long-time states of the frozen generator at the asymptotic detuning
    let steady_jobs: Vec<(usize, f64)> = (0..schedules.len())
        .flat_map(|p| etas.iter().map(move |&e| (p, e)))
        .filter(|&(p, _)| schedules[p].asymptote() != 0.0)
        .collect();
    let cells = par_map(config.workers, &steady_jobs, |&(p, eta)| {
        let model = build_model(
            config.model,
            &PhysicalParams64 { eta_g: eta, ..base },
            &DetuningSchedule64::constant(schedules[p].asymptote()),
        )?;
        let ss = steady_states(&model, 0.0)?;
        Ok(match ss.unique {
            Some(rho) => {
                let atoms = if rho.layout().num_factors() == 2 {
                    rho
                } else {
                    partial_trace(&rho, &[0, 1])?
                };
                (ss.dimension, atoms.purity(), concurrence(&atoms)?)
            }
            None => (ss.dimension, f64::NAN, f64::NAN),
        })
    })?;
    for (&(p, eta), &(dim, purity, c)) in steady_jobs.iter().zip(&cells) {
        let c_ss = steady_concurrence(schedules[p].asymptote() / alpha_mag);
        steady.push(vec![
            schedules[p].name().into(),
            eta.into(),
            dim.into(),
            purity.into(),
            c.into(),
            c_ss.into(),
        ]);
    }
    Ok(RunOutput {
        experiment: "fig6".into(),
        tables: vec![table, steady],
        summary: Json::Object(summary),
    })
}

/// Concurrence at the horizon as a function of the detuning asymmetry, with
/// a quadratic fit per profile.
pub fn run_offset_fit(config: &Config) -> Result<RunOutput, HarnessError> {
    let base = config.physical_params();
    let schedules = constant_and_exponential(config)?;
    let etas = config.eta_omega_grid();
    let jobs: Vec<(usize, f64)> = (0..schedules.len())
        .flat_map(|p| etas.iter().map(move |&e| (p, e)))
        .collect();
    let finals = par_map(config.workers, &jobs, |&(p, eta)| {
        let params = PhysicalParams64 { eta_omega: eta, ..base };
        Ok(run_one(config, &params, &schedules[p])?.last())
    })?;

    let mut table = Table::new("", &["profile", "eta_omega", "c_final"]);
    let mut fits = Table::new("fits", &["profile", "a2", "a1", "a0", "residual"]);
    let mut summary = serde_json::Map::new();
    for (p, s) in schedules.iter().enumerate() {
        let ys = &finals[p * etas.len()..(p + 1) * etas.len()];
        for (&eta, &c) in etas.iter().zip(ys) {
            table.push(vec![s.name().into(), eta.into(), c.into()]);
        }
        let fit = quad_fit(&etas, ys)?;
        fits.push(vec![
            s.name().into(),
            fit.a2.into(),
            fit.a1.into(),
            fit.a0.into(),
            fit.residual.into(),
        ]);
        summary.insert(
            s.name().into(),
            json!({ "a2": fit.a2, "a1": fit.a1, "a0": fit.a0, "residual": fit.residual }),
        );
    }
    if schedules.len() == 2 {
        let n = etas.len();
        let beats: Vec<bool> = (0..n)
            .filter(|&i| etas[i] > 0.2)
            .map(|i| finals[i] > finals[n + i])
            .collect();
        summary.insert(
            "first_beats_second_above_0_2".into(),
            json!(!beats.is_empty() && beats.iter().all(|&b| b)),
        );
    }
    Ok(RunOutput {
        experiment: "offset-fit".into(),
        tables: vec![table, fits],
        summary: Json::Object(summary),
    })
}

/// Cartesian product of every configured grid. Missing grids contribute the
/// configured value; a κ grid replaces the schedule with constant `κ|α|`.
pub fn run_sweep(config: &Config) -> Result<RunOutput, HarnessError> {
    let base = config.physical_params();
    let alpha_mag = derive(&base)?.alpha_magnitude();
    let g = &config.grids;
    let one = |v: f64| vec![v];
    let gamma_n = g.gamma_n.clone().unwrap_or_else(|| one(f64::NAN));
    let eta_g = g.eta_g.clone().unwrap_or_else(|| one(base.eta_g));
    let eta_omega = g.eta_omega.clone().unwrap_or_else(|| one(base.eta_omega));
    let scale = g.gamma_b_scale.clone().unwrap_or_else(|| one(1.0));
    let kappa = g.kappa.clone().unwrap_or_else(|| one(f64::NAN));
    let default_schedule = config.schedule_or(DetuningSchedule64::standard_exponential())?;

    let mut jobs = Vec::new();
    for &gn in &gamma_n {
        for &eg in &eta_g {
            for &ew in &eta_omega {
                for &sc in &scale {
                    for &k in &kappa {
                        jobs.push([gn, eg, ew, sc, k]);
                    }
                }
            }
        }
    }
    let rows = par_map(config.workers, &jobs, |&[gn, eg, ew, sc, k]| {
        let mut params = PhysicalParams64 {
            eta_g: eg,
            eta_omega: ew,
            ..base
        };
        if !gn.is_nan() {
            params = params.with_atomic_decay(gn);
        }
        if sc != 1.0 {
            params = params.with_cavity_separation(sc);
        }
        let schedule = if k.is_nan() {
            default_schedule
        } else {
            DetuningSchedule64::constant(k * alpha_mag)
        };
        let series = run_one(config, &params, &schedule)?;
        let t_thr = threshold_time(config, &params, &schedule, 1.0)?;
        let (t_peak, peak) = series.peak();
        Ok([
            series.last(),
            peak,
            t_peak,
            *series.purity.last().expect("non-empty"),
            t_thr.unwrap_or(f64::NAN),
        ])
    })?;

    let mut table = Table::new(
        "",
        &[
            "gamma_n",
            "eta_g",
            "eta_omega",
            "gamma_b_scale",
            "kappa",
            "c_final",
            "c_peak",
            "t_peak",
            "purity_final",
            "t_threshold",
        ],
    );
    for (job, row) in jobs.iter().zip(&rows) {
        let gn = if job[0].is_nan() { base.gamma1 } else { job[0] };
        table.push(
            [gn, job[1], job[2], job[3], job[4]]
                .into_iter()
                .chain(row.iter().copied())
                .map(Into::into)
                .collect(),
        );
    }
    Ok(RunOutput {
        experiment: "sweep".into(),
        tables: vec![table],
        summary: json!({
            "cells": jobs.len(),
            "schedule": default_schedule.name(),
            "t_final": t_final(config),
            "threshold": config.threshold,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Config {
        Config {
            t_final: Some(2.0),
            output_points: 21,
            ..Config::default()
        }
    }

    #[test]
    fn fig3_starts_unentangled() {
        let out = run_fig3(&quick()).unwrap();
        let t = &out.tables[0];
        for profile in ["constant", "linear", "exponential"] {
            let rows = t.filter("profile", profile);
            assert_eq!(rows.rows.len(), 21);
            assert!(rows.floats("concurrence")[0] < 1e-12);
        }
    }

    #[test]
    fn fig4_zero_slice_is_reference() {
        let mut cfg = quick();
        cfg.grids.gamma_n = Some(vec![0.0, 0.5]);
        let out = run_fig4(&cfg).unwrap();
        let first = &out.summary["constant"]["slices"][0];
        assert_eq!(first["max_abs_diff_vs_zero"], json!(0.0));
        assert_eq!(out.tables[0].rows.len(), 2 * 2 * 21);
    }

    #[test]
    fn monotonicity_counts_rises() {
        let s = |c: Vec<f64>| Series {
            times: vec![0.0; c.len()],
            purity: vec![1.0; c.len()],
            concurrence: c,
        };
        let (a, b) = (s(vec![0.5, 0.6]), s(vec![0.4, 0.7]));
        assert_eq!(monotonicity_violations(&[0.0, 0.1], &[&a, &b]), 1);
        assert_eq!(monotonicity_violations(&[0.1, 0.0], &[&a, &b]), 1);
    }

    #[test]
    fn sweep_crosses_grids() {
        let mut cfg = quick();
        cfg.grids.kappa = Some(vec![0.14, 0.5]);
        cfg.grids.eta_g = Some(vec![0.0, 0.1]);
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.tables[0].rows.len(), 4);
    }
}
