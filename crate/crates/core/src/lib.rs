//! Open-system simulation of two atoms coupled to a heavily damped cavity.
//!
//! The crate covers the whole numerical pipeline: operator algebra on
//! composite Hilbert spaces ([`qops`]), construction of the atom-cavity and
//! the adiabatically reduced Dicke-type generators ([`model`]), detuning
//! profiles ([`schedules`]), time integration and steady-state analysis
//! ([`dynamics`]) and entanglement metrics ([`analysis`]).
//!
//! Every numerical type is generic over the real scalar `T: Real`
//! (`f32` or `f64`). Aliases with an `64` suffix fix `T = f64`, which is what
//! the experiment harness uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // the negated forms also reject NaN

pub mod analysis;
pub mod dynamics;
mod error;
pub mod model;
pub mod qops;
pub mod schedules;

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

pub use nalgebra::Complex;

pub use analysis::{
    concurrence, fidelity, norm_error, purity, quad_fit, time_to_threshold, FitResult, NormKind,
    ThresholdSearch, ThresholdTime,
};
pub use dynamics::{
    evolve, liouvillian, spectral_gap, steady_states, EvolveOptions, OutputGrid, Propagator,
    SteadyStates, Superoperator, Trajectory,
};
pub use error::{Error, Result};
pub use model::{
    analytic_steady_state, build_full, build_reduced, correction_diagnostic, derive,
    steady_concurrence, CorrectionSample, DerivedParams, Hamiltonian, LindbladModel,
    PhysicalParams,
};
pub use qops::{
    annihilator, collective_j, dissipator, partial_trace, sigma_lower, tensor, DensityMatrix, Ket,
    Operator, SpaceLayout,
};
pub use schedules::{offset_for_target, DetuningSchedule};

/// Real scalar the simulator is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type CVector<T> = DVector<Complex<T>>;

pub type Operator64 = Operator<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type Ket64 = Ket<f64>;
pub type PhysicalParams64 = PhysicalParams<f64>;
pub type DerivedParams64 = DerivedParams<f64>;
pub type DetuningSchedule64 = DetuningSchedule<f64>;
pub type LindbladModel64 = LindbladModel<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type Superoperator64 = Superoperator<f64>;

pub type Operator32 = Operator<f32>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type LindbladModel32 = LindbladModel<f32>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    <T as FromPrimitive>::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    <T as ToPrimitive>::to_f64(&x).unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// A tolerance stated for `f64`, widened to what the scalar type can resolve.
#[inline]
pub(crate) fn tol<T: Real>(f64_tol: f64) -> T {
    let floor = T::default_epsilon() * lit::<T>(64.0);
    let t = lit::<T>(f64_tol);
    if t > floor {
        t
    } else {
        floor
    }
}
