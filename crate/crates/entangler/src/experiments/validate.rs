//! Accuracy of the reduced model against the atom-cavity model.

use entangler_core::{
    build_full, build_reduced, correction_diagnostic, evolve, norm_error, DetuningSchedule64,
    NormKind, OutputGrid, PhysicalParams64,
};
use serde_json::json;

use super::{initial_atomic_state, lift, par_map};
use crate::config::Config;
use crate::table::{RunOutput, Table};
use crate::HarnessError;

const DEFAULT_T_FINAL: f64 = 20.0;
/// Horizon of the cavity-separation comparison, ms. Larger `γ_b` makes the
/// full model stiff, so the comparison runs on a shorter window.
pub const SEPARATION_HORIZON: f64 = 5.0;
/// The largest deviation sits in the initial slip, tens of μs after the
/// start; the comparison grid is refined there.
const EARLY_WINDOW: f64 = 0.1;
const EARLY_POINTS: usize = 40;

/// Uniform output grid merged with a dense grid over the initial slip.
pub fn comparison_grid(horizon: f64, points: usize) -> Vec<f64> {
    let early = horizon.min(EARLY_WINDOW);
    let mut times: Vec<f64> = (0..=EARLY_POINTS)
        .map(|k| early * k as f64 / EARLY_POINTS as f64)
        .chain((0..points).map(|k| horizon * k as f64 / (points - 1) as f64))
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * horizon);
    times
}

#[derive(Debug, Clone, Copy)]
struct Job {
    profile: usize,
    fock_dim: usize,
    scale: f64,
    horizon: f64,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    eps_frobenius: f64,
    eps_trace: f64,
    t_at_max: f64,
    p1_max: f64,
    correction_max: f64,
    steps: usize,
}

fn compare(
    config: &Config,
    schedule: &DetuningSchedule64,
    job: Job,
) -> Result<Outcome, HarnessError> {
    let params = PhysicalParams64 {
        fock_dim: job.fock_dim,
        ..config.physical_params()
    }
    .with_cavity_separation(job.scale);
    let atoms0 = initial_atomic_state(config)?;
    let grid = OutputGrid::Times(comparison_grid(job.horizon, config.output_points));
    let opts = config.evolve_options();

    let reduced = build_reduced(&params, schedule, true)?;
    let approx = evolve(&reduced, &atoms0, job.horizon, &grid, opts)?;
    let full = build_full(&params, schedule)?;
    let exact_full = evolve(&full, &lift(&atoms0, &full)?, job.horizon, &grid, opts)?;
    let exact = exact_full.reduce(&[0, 1])?;

    let (t_at_max, _) = exact
        .iter()
        .zip(approx.iter())
        .map(|((t, a), (_, b))| (t, NormKind::Frobenius.of(&(a.matrix() - b.matrix()))))
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let corrections = correction_diagnostic(&exact_full, &params)?;
    Ok(Outcome {
        eps_frobenius: norm_error(&exact, &approx, NormKind::Frobenius)?,
        eps_trace: norm_error(&exact, &approx, NormKind::Trace)?,
        t_at_max,
        p1_max: corrections.iter().map(|c| c.p1).fold(0.0, f64::max),
        correction_max: corrections.iter().map(|c| c.correction_norm).fold(0.0, f64::max),
        steps: exact_full.meta().steps,
    })
}

/// Largest distance between the reduced model and the traced-out full model,
/// per profile, Fock cutoff and cavity separation.
pub fn run_validation(config: &Config) -> Result<RunOutput, HarnessError> {
    let schedules = match &config.schedule {
        Some(s) => vec![s.build()?],
        None => vec![
            DetuningSchedule64::standard_constant(),
            DetuningSchedule64::standard_exponential(),
        ],
    };
    let nc = config.fock_dim;
    let horizon = config.t_final.unwrap_or(DEFAULT_T_FINAL);
    let short = horizon.min(SEPARATION_HORIZON);

    let mut jobs = Vec::new();
    for p in 0..schedules.len() {
        for fock_dim in [nc, nc + 2] {
            jobs.push(Job { profile: p, fock_dim, scale: 1.0, horizon });
        }
    }
    let separation_start = jobs.len();
    for scale in std::iter::once(1.0).chain(config.gamma_b_scale_grid()) {
        jobs.push(Job { profile: 0, fock_dim: nc, scale, horizon: short });
    }
    let outcomes = par_map(config.workers, &jobs, |job| compare(config, &schedules[job.profile], *job))?;

    let mut table = Table::new(
        "",
        &[
            "profile",
            "fock_dim",
            "gamma_b_scale",
            "horizon",
            "eps_frobenius",
            "eps_trace",
            "t_at_max",
            "p1_max",
            "correction_max",
            "steps",
        ],
    );
    for (job, o) in jobs.iter().zip(&outcomes) {
        table.push(vec![
            schedules[job.profile].name().into(),
            job.fock_dim.into(),
            job.scale.into(),
            job.horizon.into(),
            o.eps_frobenius.into(),
            o.eps_trace.into(),
            o.t_at_max.into(),
            o.p1_max.into(),
            o.correction_max.into(),
            o.steps.into(),
        ]);
    }

    let mut profiles = serde_json::Map::new();
    for (p, s) in schedules.iter().enumerate() {
        let (base, finer) = (outcomes[2 * p], outcomes[2 * p + 1]);
        profiles.insert(
            s.name().into(),
            json!({
                "eps_frobenius": base.eps_frobenius,
                "eps_trace": base.eps_trace,
                "eps_frobenius_finer_cutoff": finer.eps_frobenius,
                "fock_relative_change":
                    (finer.eps_frobenius - base.eps_frobenius).abs() / base.eps_frobenius,
                "t_at_max": base.t_at_max,
            }),
        );
    }
    let separation: Vec<_> = jobs[separation_start..]
        .iter()
        .zip(&outcomes[separation_start..])
        .map(|(j, o)| json!({ "gamma_b_scale": j.scale, "eps_frobenius": o.eps_frobenius }))
        .collect();
    let eps_sep: Vec<f64> = outcomes[separation_start..].iter().map(|o| o.eps_frobenius).collect();
    Ok(RunOutput {
        experiment: "validate".into(),
        tables: vec![table],
        summary: json!({
            "horizon": horizon,
            "fock_dim": nc,
            "profiles": profiles,
            "separation": {
                "profile": schedules[0].name(),
                "horizon": short,
                "runs": separation,
                "larger_gamma_b_smaller_eps": eps_sep[1..].iter().all(|&e| e < eps_sep[0]),
            },
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_resolves_initial_slip() {
        let g = comparison_grid(20.0, 401);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 20.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(g.iter().filter(|&&t| t <= 0.1).count() >= 40);
        assert!(g.contains(&0.05) && g.contains(&19.95));
    }

    #[test]
    fn short_validation_run() {
        let cfg = Config {
            t_final: Some(0.5),
            output_points: 11,
            fock_dim: 3,
            grids: crate::config::Grids {
                gamma_b_scale: Some(vec![4.0]),
                ..Default::default()
            },
            ..Config::default()
        };
        let out = run_validation(&cfg).unwrap();
        let t = &out.tables[0];
        assert_eq!(t.rows.len(), 2 * 2 + 2);
        for (f, tr) in t.floats("eps_frobenius").iter().zip(t.floats("eps_trace")) {
            assert!(*f > 0.0 && *f < 0.1);
            // ‖A‖_F ≤ ‖A‖_1 for any matrix
            assert!(*f <= tr + 1e-15);
        }
    }
}
