//! Generators in matrix form, time integration and steady states.

mod integrate;
mod liouvillian;
mod steady;

pub use integrate::{
    evolve, evolve_from, EvolveOptions, OutputGrid, Propagator, Trajectory, TrajectoryMeta,
};
pub use liouvillian::{liouvillian, unvec, vec, Superoperator};
pub use steady::{spectral_gap, steady_states, SteadyStates, MIN_GAP_RATIO, NULL_THRESHOLD};
