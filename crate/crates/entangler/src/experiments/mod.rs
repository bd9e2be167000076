//! Named experiments. Each one turns a [`Config`] into result tables.

mod convergence;
mod profiles;
mod steady;
mod validate;

use std::fmt;
use std::str::FromStr;

use entangler_core::analysis::concurrence;
use entangler_core::qops::{partial_trace, DensityMatrix, Ket, SpaceLayout};
use entangler_core::{
    build_full, build_reduced, evolve, CMatrix, CVector, Complex, DensityMatrix64,
    DetuningSchedule64, LindbladModel64, OutputGrid, PhysicalParams64, Trajectory64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{Config, InitialState, ModelKind};
use crate::table::RunOutput;
use crate::HarnessError;

pub use convergence::{ensemble, run_fig2b};
pub use profiles::{run_fig3, run_fig4, run_fig5, run_fig6, run_offset_fit, run_sweep};
pub use steady::{run_fig2a, run_steady_state};
pub use validate::run_validation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    OffsetFit,
    Validate,
    Sweep,
    SteadyState,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::Fig6,
        Self::OffsetFit,
        Self::Validate,
        Self::Sweep,
        Self::SteadyState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::OffsetFit => "offset-fit",
            Self::Validate => "validate",
            Self::Sweep => "sweep",
            Self::SteadyState => "steady-state",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
                format!("unknown experiment `{s}`; expected one of {}", names.join(", "))
            })
    }
}

pub fn run(experiment: Experiment, config: &Config) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    match experiment {
        Experiment::Fig2a => run_fig2a(config),
        Experiment::Fig2b => run_fig2b(config),
        Experiment::Fig3 => run_fig3(config),
        Experiment::Fig4 => run_fig4(config),
        Experiment::Fig5 => run_fig5(config),
        Experiment::Fig6 => run_fig6(config),
        Experiment::OffsetFit => run_offset_fit(config),
        Experiment::Validate => run_validation(config),
        Experiment::Sweep => run_sweep(config),
        Experiment::SteadyState => run_steady_state(config),
    }
}

/// Maps `f` over `items` on a pool of `workers` threads, keeping input order.
pub(crate) fn par_map<I, O, F>(workers: usize, items: &[I], f: F) -> Result<Vec<O>, HarnessError>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> Result<O, HarnessError> + Sync + Send,
{
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Io(std::io::Error::other(e.to_string())))?;
    pool.install(|| items.par_iter().map(f).collect())
}

/// Haar-random pure state of dimension `d`.
pub(crate) fn haar_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector<f64> {
    let v = CVector::from_fn(d, |_, _| {
        Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let n = v.norm();
    v / Complex::new(n, 0.0)
}

/// Starting state of the atoms as configured.
pub fn initial_atomic_state(config: &Config) -> Result<DensityMatrix64, HarnessError> {
    let layout = SpaceLayout::atoms();
    let state = match &config.initial_state {
        InitialState::Basis { index } => {
            Ket::basis(&layout, *index).and_then(|k| DensityMatrix::pure(&k))
        }
        InitialState::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let v = haar_vector(&mut rng, 4);
            Ket::new(layout, v).and_then(|k| DensityMatrix::pure(&k))
        }
        InitialState::Matrix { re, im } => {
            let m = CMatrix::from_fn(4, 4, |i, j| {
                let imag = im.as_ref().map_or(0.0, |m| m[i][j]);
                Complex::new(re[i][j], imag)
            });
            DensityMatrix::new(layout, m)
        }
    };
    state.map_err(|e| HarnessError::Config(format!("initial_state: {e}")))
}

/// Lifts an atomic state onto the model's layout, with the cavity in vacuum.
pub(crate) fn lift(
    atoms: &DensityMatrix64,
    model: &LindbladModel64,
) -> Result<DensityMatrix64, HarnessError> {
    let dims = model.layout().factor_dims();
    if dims.len() == 2 {
        return Ok(atoms.clone());
    }
    let cavity = SpaceLayout::single(dims[2])?;
    let vacuum = DensityMatrix::pure(&Ket::basis(&cavity, 0)?)?;
    Ok(atoms.product(&vacuum)?)
}

pub(crate) fn build_model(
    kind: ModelKind,
    params: &PhysicalParams64,
    schedule: &DetuningSchedule64,
) -> Result<LindbladModel64, HarnessError> {
    let model = match kind {
        ModelKind::Reduced => build_reduced(params, schedule, true),
        ModelKind::Full => build_full(params, schedule),
    };
    model.map_err(|e| HarnessError::Config(e.to_string()))
}

/// Atomic concurrence and purity along a trajectory.
pub(crate) struct Series {
    pub times: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub purity: Vec<f64>,
}

impl Series {
    pub fn from_trajectory(traj: &Trajectory64) -> Result<Self, HarnessError> {
        let mut out = Self {
            times: traj.times().to_vec(),
            concurrence: Vec::with_capacity(traj.len()),
            purity: Vec::with_capacity(traj.len()),
        };
        for (_, rho) in traj.iter() {
            let atoms = if rho.layout().num_factors() == 2 {
                rho.clone()
            } else {
                partial_trace(rho, &[0, 1])?
            };
            out.concurrence.push(concurrence(&atoms)?);
            out.purity.push(atoms.purity());
        }
        Ok(out)
    }

    pub fn peak(&self) -> (f64, f64) {
        self.times
            .iter()
            .zip(&self.concurrence)
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, (&t, &c)| {
                if c > acc.1 {
                    (t, c)
                } else {
                    acc
                }
            })
    }

    pub fn last(&self) -> f64 {
        *self.concurrence.last().expect("non-empty series")
    }
}

pub(crate) fn simulate(
    model: &LindbladModel64,
    atoms0: &DensityMatrix64,
    t_final: f64,
    config: &Config,
) -> Result<Series, HarnessError> {
    let rho0 = lift(atoms0, model)?;
    let traj = evolve(
        model,
        &rho0,
        t_final,
        &OutputGrid::Uniform(config.output_points),
        config.evolve_options(),
    )?;
    Series::from_trajectory(&traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("fig7".parse::<Experiment>().is_err());
    }

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<u64> = (0..100).collect();
        let out = par_map(4, &items, |&x| Ok(x * x)).unwrap();
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn initial_states() {
        let mut cfg = Config::default();
        let up = initial_atomic_state(&cfg).unwrap();
        assert_eq!(up.matrix()[(0, 0)].re, 1.0);
        cfg.initial_state = InitialState::Random { seed: 3 };
        let a = initial_atomic_state(&cfg).unwrap();
        let b = initial_atomic_state(&cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lift_adds_vacuum() {
        let params = PhysicalParams64 {
            fock_dim: 3,
            ..PhysicalParams64::standard()
        };
        let model = build_model(ModelKind::Full, &params, &DetuningSchedule64::constant(5.6)).unwrap();
        let atoms = initial_atomic_state(&Config::default()).unwrap();
        let rho = lift(&atoms, &model).unwrap();
        assert_eq!(rho.dim(), 12);
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert_eq!(partial_trace(&rho, &[0, 1]).unwrap(), atoms);
    }
}
