//! Time to reach a fraction of the steady-state concurrence, over the
//! (γ/α, κ) plane.

use entangler_core::qops::{DensityMatrix, Ket, SpaceLayout};
use entangler_core::{
    derive, steady_concurrence, time_to_threshold, DensityMatrix64, DetuningSchedule64,
    PhysicalParams64, ThresholdSearch, ThresholdTime,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{build_model, haar_vector, lift, par_map};
use crate::config::{range, Config};
use crate::table::{RunOutput, Table};
use crate::HarnessError;

/// Number of random product states added to the four basis states.
pub const RANDOM_STARTS: usize = 8;

/// The four computational basis states followed by [`RANDOM_STARTS`]
/// Haar-random product states drawn from `seed`.
pub fn ensemble(seed: u64) -> Vec<DensityMatrix64> {
    let layout = SpaceLayout::atoms();
    let qubit = SpaceLayout::single(2).expect("qubit layout");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states: Vec<DensityMatrix64> = (0..4)
        .map(|k| DensityMatrix::pure(&Ket::basis(&layout, k).unwrap()).unwrap())
        .collect();
    for _ in 0..RANDOM_STARTS {
        let a = Ket::new(qubit.clone(), haar_vector(&mut rng, 2)).unwrap();
        let b = Ket::new(qubit.clone(), haar_vector(&mut rng, 2)).unwrap();
        let psi = Ket::product(&[a, b]).unwrap();
        states.push(DensityMatrix::pure(&psi).unwrap());
    }
    states
}

/// Parameters with collective decay `ratio·|α|` at the configured `|α|` and `γ_b`.
pub fn params_for_ratio(config: &Config, ratio: f64) -> Result<PhysicalParams64, HarnessError> {
    let base = config.physical_params();
    let alpha_mag = derive(&base)?.alpha_magnitude();
    let p = PhysicalParams64::from_reduced_rates(ratio * alpha_mag, alpha_mag, base.gamma_b)?;
    Ok(PhysicalParams64 {
        alpha0: p.alpha0,
        g1: p.g1,
        ..base
    })
}

/// Threshold time from one start state, `None` when not reached by `t_max`.
pub fn cell_time(
    config: &Config,
    ratio: f64,
    kappa: f64,
    rho0: &DensityMatrix64,
    t_max: f64,
) -> Result<Option<f64>, HarnessError> {
    let params = params_for_ratio(config, ratio)?;
    let alpha_mag = derive(&params)?.alpha_magnitude();
    let model = build_model(
        config.model,
        &params,
        &DetuningSchedule64::constant(kappa * alpha_mag),
    )?;
    let search = ThresholdSearch {
        evolve: config.evolve_options(),
        ..ThresholdSearch::default()
    };
    let t = time_to_threshold(
        &model,
        &lift(rho0, &model)?,
        config.threshold,
        steady_concurrence(kappa),
        t_max,
        &search,
    )?;
    Ok(match t {
        ThresholdTime::Reached(t) => Some(t),
        ThresholdTime::NotReached => None,
    })
}

pub fn run_fig2b(config: &Config) -> Result<RunOutput, HarnessError> {
    let ratios = config.gamma_over_alpha_grid();
    let kappas = config.kappa_grid(|| range(0.1, 1.0, 0.1));
    let t_max = config.t_final.unwrap_or(200.0);
    let starts = ensemble(config.seed);
    let alpha_mag = derive(&config.physical_params())?.alpha_magnitude();

    let mut jobs = Vec::new();
    for &r in &ratios {
        for &k in &kappas {
            for s in 0..starts.len() {
                jobs.push((r, k, s));
            }
        }
    }
    let times = par_map(config.workers, &jobs, |&(r, k, s)| {
        cell_time(config, r, k, &starts[s], t_max)
    })?;

    let mut table = Table::new(
        "",
        &[
            "gamma_over_alpha",
            "kappa",
            "gamma",
            "delta_omega",
            "c_ss",
            "t99_mean",
            "log10_t99_mean",
            "t99_min",
            "t99_max",
            "t99_std",
            "reached",
        ],
    );
    let mut means = Vec::new();
    for (cell, chunk) in times.chunks(starts.len()).enumerate() {
        let r = ratios[cell / kappas.len()];
        let k = kappas[cell % kappas.len()];
        let reached: Vec<f64> = chunk.iter().flatten().copied().collect();
        let all = reached.len() == chunk.len();
        let n = reached.len() as f64;
        let (mean, min, max, std) = if all {
            let mean = reached.iter().sum::<f64>() / n;
            let var = reached.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
            let min = reached.iter().copied().fold(f64::INFINITY, f64::min);
            let max = reached.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (mean, min, max, var.sqrt())
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };
        means.push(mean);
        table.push(vec![
            r.into(),
            k.into(),
            (r * alpha_mag).into(),
            (k * alpha_mag).into(),
            steady_concurrence(k).into(),
            mean.into(),
            mean.log10().into(),
            min.into(),
            max.into(),
            std.into(),
            reached.len().into(),
        ]);
    }

    let mut argmin = Vec::new();
    for (j, &k) in kappas.iter().enumerate() {
        let best = ratios
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, means[i * kappas.len() + j]))
            .filter(|(_, t)| t.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1));
        argmin.push(json!({
            "kappa": k,
            "gamma_over_alpha": best.map(|b| b.0),
            "t99_mean": best.map(|b| b.1),
        }));
    }
    Ok(RunOutput {
        experiment: "fig2b".into(),
        tables: vec![table],
        summary: json!({
            "t_max": t_max,
            "threshold": config.threshold,
            "ensemble_size": starts.len(),
            "ensemble_seed": config.seed,
            "argmin_per_kappa": argmin,
        }),
    })
}
