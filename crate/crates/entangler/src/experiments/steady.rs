//! Long-time states of frozen generators.

use entangler_core::qops::partial_trace;
use entangler_core::{
    analytic_steady_state, concurrence, derive, fidelity, spectral_gap, steady_concurrence,
    steady_states, DetuningSchedule64, Error,
};
use serde_json::json;

use super::{build_model, par_map};
use crate::config::{range, Config, ModelKind};
use crate::table::{RunOutput, Table};
use crate::HarnessError;

struct Cell {
    null_dim: usize,
    c_numeric: f64,
    state_error: f64,
    purity: f64,
    fidelity: f64,
    gap: f64,
}

fn solve(config: &Config, kind: ModelKind, delta_omega: f64) -> Result<Cell, HarnessError> {
    let params = config.physical_params();
    let alpha = derive(&params)?.alpha;
    let model = build_model(kind, &params, &DetuningSchedule64::constant(delta_omega))?;
    let ss = steady_states(&model, 0.0)?;
    let nan = f64::NAN;
    let Some(rho) = ss.unique else {
        return Ok(Cell {
            null_dim: ss.dimension,
            c_numeric: nan,
            state_error: nan,
            purity: nan,
            fidelity: nan,
            gap: nan,
        });
    };
    let atoms = if rho.layout().num_factors() == 2 {
        rho
    } else {
        partial_trace(&rho, &[0, 1])?
    };
    let psi = analytic_steady_state(delta_omega, alpha)?;
    let gap = match spectral_gap(&model, 0.0) {
        Ok(g) => g,
        Err(Error::DegenerateNullSpace { .. }) => nan,
        Err(e) => return Err(e.into()),
    };
    Ok(Cell {
        null_dim: 1,
        c_numeric: concurrence(&atoms)?,
        state_error: (atoms.matrix() - psi.projector()).norm(),
        purity: atoms.purity(),
        fidelity: fidelity(&atoms, &psi)?,
        gap,
    })
}

/// Analytic steady-state concurrence over κ, cross-checked against the
/// null-space state of the reduced model.
pub fn run_fig2a(config: &Config) -> Result<RunOutput, HarnessError> {
    let alpha_mag = derive(&config.physical_params())?.alpha_magnitude();
    let kappas = config.kappa_grid(|| range(0.0, 1.0, 0.01));
    let cells = par_map(config.workers, &kappas, |&k| {
        solve(config, ModelKind::Reduced, k * alpha_mag)
    })?;
    let mut table = Table::new(
        "",
        &["kappa", "delta_omega", "c_ss", "c_numeric", "abs_diff", "null_dim", "state_error"],
    );
    let mut max_diff = 0.0f64;
    let mut max_state_error = 0.0f64;
    for (&k, cell) in kappas.iter().zip(&cells) {
        let c_ss = steady_concurrence(k);
        let diff = (cell.c_numeric - c_ss).abs();
        if cell.null_dim == 1 {
            max_diff = max_diff.max(diff);
            max_state_error = max_state_error.max(cell.state_error);
        }
        table.push(vec![
            k.into(),
            (k * alpha_mag).into(),
            c_ss.into(),
            cell.c_numeric.into(),
            diff.into(),
            cell.null_dim.into(),
            cell.state_error.into(),
        ]);
    }
    let degenerate: Vec<f64> = kappas
        .iter()
        .zip(&cells)
        .filter(|(_, c)| c.null_dim != 1)
        .map(|(&k, _)| k)
        .collect();
    Ok(RunOutput {
        experiment: "fig2a".into(),
        tables: vec![table],
        summary: json!({
            "max_concurrence_discrepancy": max_diff,
            "max_state_error_frobenius": max_state_error,
            "degenerate_kappa": degenerate,
        }),
    })
}

/// Null-space dimension, spectral gap and steady-state metrics of the
/// configured model, over the κ grid or at the schedule's asymptote.
pub fn run_steady_state(config: &Config) -> Result<RunOutput, HarnessError> {
    let alpha_mag = derive(&config.physical_params())?.alpha_magnitude();
    let kappas = match (&config.grids.kappa, &config.schedule) {
        (Some(k), _) => k.clone(),
        (None, Some(s)) => vec![s.build()?.asymptote() / alpha_mag],
        (None, None) => vec![5.6 / alpha_mag],
    };
    let cells = par_map(config.workers, &kappas, |&k| {
        solve(config, config.model, k * alpha_mag)
    })?;
    let mut table = Table::new(
        "",
        &[
            "kappa",
            "delta_omega",
            "null_dim",
            "spectral_gap",
            "concurrence",
            "purity",
            "c_formula",
            "fidelity",
        ],
    );
    for (&k, cell) in kappas.iter().zip(&cells) {
        table.push(vec![
            k.into(),
            (k * alpha_mag).into(),
            cell.null_dim.into(),
            cell.gap.into(),
            cell.c_numeric.into(),
            cell.purity.into(),
            steady_concurrence(k).into(),
            cell.fidelity.into(),
        ]);
    }
    Ok(RunOutput {
        experiment: "steady-state".into(),
        tables: vec![table],
        summary: json!({
            "model": match config.model { ModelKind::Reduced => "reduced", ModelKind::Full => "full" },
            "unique": cells.iter().all(|c| c.null_dim == 1),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2a_small_grid() {
        let mut cfg = Config::default();
        cfg.grids.kappa = Some(vec![0.0, 0.14, 0.5]);
        let out = run_fig2a(&cfg).unwrap();
        let t = &out.tables[0];
        assert_eq!(t.floats("c_ss")[0], 1.0);
        assert!(t.floats("null_dim")[0] >= 2.0);
        assert!(t.floats("c_numeric")[0].is_nan());
        assert!((t.floats("c_ss")[1] - 0.9903).abs() < 1e-4);
        assert!(t.floats("abs_diff")[1] < 1e-9);
        assert!(t.floats("state_error")[2] < 1e-7);
    }

    #[test]
    fn steady_state_defaults_to_standard_detuning() {
        let out = run_steady_state(&Config::default()).unwrap();
        let t = &out.tables[0];
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.floats("null_dim"), vec![1.0]);
        assert!(t.floats("spectral_gap")[0] > 0.0);
        assert!((t.floats("fidelity")[0] - 1.0).abs() < 1e-8);
    }
}
