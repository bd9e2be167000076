//! Atom-cavity and reduced atomic Lindblad models.
//!
//! Units: frequencies and rates are angular rates in kHz (10³ rad/s), times
//! in ms. The full model lives in the displaced rotating frame where the
//! coherent cavity drive has been absorbed into the atomic term `αJ_x`:
//!
//! ```text
//! H(t) = Δω₁(t) σ₁†σ₁ + Δω₂(t) σ₂†σ₂ + α J_x + g (J b† + J† b)
//! jumps: γ_b D[b], γ₁ D[σ₁], γ₂ D[σ₂]
//! ```
//!
//! Eliminating the cavity gives the Dicke-type generator
//!
//! ```text
//! H(t) = Δω₁(t) σ₁†σ₁ + Δω₂(t) σ₂†σ₂ + α J_x,   jumps: γ D[J] (+ γₙ D[σₙ])
//! ```
//!
//! with `λ = g/γ_b`, `α = −2α₀λ`, `γ = 4g²/γ_b`, and the asymmetric
//! detunings `Δω₁ = (1 + η_ω)Δω`, `Δω₂ = (η_ω − 1)Δω`.

use crate::dynamics::Trajectory;
use crate::qops::{
    annihilator, collective_j, dissipator_matrix, excitation_number, j_x, sigma_lower, tensor,
    Ket, Operator, SpaceLayout,
};
use crate::schedules::DetuningSchedule;
use crate::{cplx, lit, tol, to_f64, CMatrix, CVector, Error, Real, Result};

/// Experimental knobs of the two-atom cavity setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T: Real> {
    /// Rabi frequency of the cavity drive, kHz.
    pub alpha0: T,
    /// Coupling of atom 1, kHz. Atom 2 couples with `(1 + eta_g)·g1`.
    pub g1: T,
    /// Cavity field decay rate, kHz.
    pub gamma_b: T,
    /// Spontaneous decay of atom 1, kHz.
    pub gamma1: T,
    /// Spontaneous decay of atom 2, kHz.
    pub gamma2: T,
    pub eta_g: T,
    pub eta_omega: T,
    /// Number of cavity Fock levels kept.
    pub fock_dim: usize,
}

impl<T: Real> PhysicalParams<T> {
    pub const DEFAULT_FOCK_DIM: usize = 5;

    /// `α₀ = g = 200 kHz`, `γ_b = 10g`, no atomic decay, no asymmetry.
    pub fn standard() -> Self {
        Self {
            alpha0: lit(200.0),
            g1: lit(200.0),
            gamma_b: lit(2000.0),
            gamma1: T::zero(),
            gamma2: T::zero(),
            eta_g: T::zero(),
            eta_omega: T::zero(),
            fock_dim: Self::DEFAULT_FOCK_DIM,
        }
    }

    /// Parameters whose reduced model has collective decay `gamma` and drive
    /// magnitude `alpha_mag`, for a given cavity decay `gamma_b`.
    pub fn from_reduced_rates(gamma: T, alpha_mag: T, gamma_b: T) -> Result<Self> {
        if !(gamma > T::zero()) || !(gamma_b > T::zero()) || alpha_mag < T::zero() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "need gamma > 0, gamma_b > 0, alpha >= 0".into(),
            });
        }
        let four = lit::<T>(4.0);
        let two = lit::<T>(2.0);
        let g = (gamma * gamma_b / four).sqrt();
        Ok(Self {
            alpha0: alpha_mag * gamma_b / (two * g),
            g1: g,
            gamma_b,
            ..Self::standard()
        })
    }

    pub fn g2(&self) -> T {
        (T::one() + self.eta_g) * self.g1
    }

    /// Same atomic decay on both atoms.
    pub fn with_atomic_decay(mut self, gamma_n: T) -> Self {
        self.gamma1 = gamma_n;
        self.gamma2 = gamma_n;
        self
    }

    /// Scales `γ_b` by `s` and `g`, `α₀` by `√s`, which keeps `γ` and `α`
    /// fixed while shrinking `λ = g/γ_b`.
    pub fn with_cavity_separation(mut self, s: T) -> Self {
        let r = s.sqrt();
        self.gamma_b *= s;
        self.g1 *= r;
        self.alpha0 *= r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.into(),
            })
        };
        let all = [
            self.alpha0,
            self.g1,
            self.gamma_b,
            self.gamma1,
            self.gamma2,
            self.eta_g,
            self.eta_omega,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return invalid("params", "all parameters must be finite");
        }
        if !(self.gamma_b > T::zero()) {
            return invalid("gamma_b", "must be positive");
        }
        if !(self.g1 > T::zero()) {
            return invalid("g1", "must be positive");
        }
        if self.gamma1 < T::zero() {
            return invalid("gamma1", "must be non-negative");
        }
        if self.gamma2 < T::zero() {
            return invalid("gamma2", "must be non-negative");
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidFockDim(self.fock_dim));
        }
        Ok(())
    }
}

/// Quantities derived from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams<T: Real> {
    /// `g/γ_b`.
    pub lambda: T,
    /// Displacement `−2α₀/γ_b`.
    pub beta: T,
    /// Effective drive `βg = −2α₀λ`, kHz. Signed.
    pub alpha: T,
    /// Collective decay `4λ²γ_b = 4g²/γ_b`, kHz.
    pub gamma: T,
}

impl<T: Real> DerivedParams<T> {
    /// `κ = Δω/α` at detuning `delta_omega`, using `|α|`.
    pub fn kappa(&self, delta_omega: T) -> T {
        delta_omega / self.alpha.abs()
    }

    pub fn alpha_magnitude(&self) -> T {
        self.alpha.abs()
    }
}

pub fn derive<T: Real>(params: &PhysicalParams<T>) -> Result<DerivedParams<T>> {
    params.validate()?;
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let lambda = params.g1 / params.gamma_b;
    let beta = -two * params.alpha0 / params.gamma_b;
    Ok(DerivedParams {
        lambda,
        beta,
        alpha: beta * params.g1,
        gamma: four * lambda * lambda * params.gamma_b,
    })
}

/// `H(t) = H₀ + Σₖ fₖ(t) Hₖ` with scalar detuning profiles `fₖ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian<T: Real> {
    constant: Operator<T>,
    modulated: Vec<(DetuningSchedule<T>, Operator<T>)>,
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(
        constant: Operator<T>,
        modulated: Vec<(DetuningSchedule<T>, Operator<T>)>,
    ) -> Result<Self> {
        let eps = tol::<T>(1e-12);
        for op in std::iter::once(&constant).chain(modulated.iter().map(|(_, op)| op)) {
            constant.layout().ensure_same(op.layout())?;
            if !op.is_hermitian(eps) {
                return Err(Error::InvalidParameter {
                    name: "hamiltonian",
                    reason: "terms must be Hermitian".into(),
                });
            }
        }
        Ok(Self {
            constant,
            modulated,
        })
    }

    pub fn constant(op: Operator<T>) -> Result<Self> {
        Self::new(op, Vec::new())
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.constant.layout()
    }

    pub fn static_part(&self) -> &Operator<T> {
        &self.constant
    }

    pub fn modulated_terms(&self) -> &[(DetuningSchedule<T>, Operator<T>)] {
        &self.modulated
    }

    pub fn is_autonomous(&self) -> bool {
        self.modulated.iter().all(|(s, _)| s.is_constant())
    }

    /// `H(t)` as a raw matrix.
    pub fn matrix_at(&self, t: T) -> CMatrix<T> {
        let mut h = self.constant.matrix().clone();
        for (schedule, op) in &self.modulated {
            let f = schedule.value_unchecked(t);
            if f != T::zero() {
                h += op.matrix().map(|z| z * f);
            }
        }
        h
    }

    pub fn at(&self, t: T) -> Result<Operator<T>> {
        if t < T::zero() {
            return Err(Error::NegativeTime(to_f64(t)));
        }
        Operator::new(self.layout().clone(), self.matrix_at(t))
    }
}

/// Time-dependent Lindblad generator on a fixed layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel<T: Real> {
    name: String,
    hamiltonian: Hamiltonian<T>,
    jumps: Vec<(T, Operator<T>)>,
}

impl<T: Real> LindbladModel<T> {
    pub fn new(
        name: impl Into<String>,
        hamiltonian: Hamiltonian<T>,
        jumps: Vec<(T, Operator<T>)>,
    ) -> Result<Self> {
        for (rate, op) in &jumps {
            hamiltonian.layout().ensure_same(op.layout())?;
            if *rate < T::zero() || !rate.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "rate",
                    reason: format!("jump rate {} must be finite and >= 0", to_f64(*rate)),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            hamiltonian,
            jumps,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.hamiltonian.layout()
    }

    pub fn dim(&self) -> usize {
        self.layout().total_dim()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian<T> {
        &self.hamiltonian
    }

    pub fn hamiltonian_at(&self, t: T) -> Result<Operator<T>> {
        self.hamiltonian.at(t)
    }

    pub fn jumps(&self) -> &[(T, Operator<T>)] {
        &self.jumps
    }

    pub fn is_autonomous(&self) -> bool {
        self.hamiltonian.is_autonomous()
    }

    /// Right-hand side `−i[H(t), ρ] + Σ rateₖ D[Lₖ]ρ` for an arbitrary matrix.
    pub fn apply(&self, t: T, rho: &CMatrix<T>) -> CMatrix<T> {
        let h = self.hamiltonian.matrix_at(t);
        let minus_i = cplx(T::zero(), -T::one());
        let mut out = (&h * rho - rho * &h).map(|z| z * minus_i);
        for (rate, op) in &self.jumps {
            if *rate != T::zero() {
                out += dissipator_matrix(op.matrix(), rho).map(|z| z * *rate);
            }
        }
        out
    }
}

/// `Δω(t)·[(1 + η_ω) σ₁†σ₁ + (η_ω − 1) σ₂†σ₂]`.
fn detuning_term<T: Real>(
    params: &PhysicalParams<T>,
    layout: &SpaceLayout,
) -> Result<Operator<T>> {
    let n1 = excitation_number::<T>(0, layout)?;
    let n2 = excitation_number::<T>(1, layout)?;
    n1.scale(T::one() + params.eta_omega)
        .add(&n2.scale(params.eta_omega - T::one()))
}

/// Atoms coupled to the damped cavity, displaced frame.
pub fn build_full<T: Real>(
    params: &PhysicalParams<T>,
    schedule: &DetuningSchedule<T>,
) -> Result<LindbladModel<T>> {
    let derived = derive(params)?;
    let layout = SpaceLayout::atoms_cavity(params.fock_dim)?;
    let j = collective_j(params.g1, params.g2(), params.g1, &layout)?;
    let b = tensor(&layout, &[(2, &annihilator::<T>(params.fock_dim)?)])?;
    let jb = j.compose(&b.adjoint())?;
    let exchange = jb.add(&jb.adjoint())?;
    let constant = j_x(&j)
        .scale(derived.alpha)
        .add(&exchange.scale(derived.lambda * params.gamma_b))?;
    let hamiltonian = Hamiltonian::new(
        constant,
        vec![(*schedule, detuning_term(params, &layout)?)],
    )?;
    let jumps = vec![
        (params.gamma_b, b),
        (params.gamma1, sigma_lower(0, &layout)?),
        (params.gamma2, sigma_lower(1, &layout)?),
    ];
    LindbladModel::new(
        format!("full(fock_dim={})", params.fock_dim),
        hamiltonian,
        jumps,
    )
}

/// Dicke-type model of the atoms alone, optionally with atomic decay.
pub fn build_reduced<T: Real>(
    params: &PhysicalParams<T>,
    schedule: &DetuningSchedule<T>,
    include_atomic_decay: bool,
) -> Result<LindbladModel<T>> {
    let derived = derive(params)?;
    let layout = SpaceLayout::atoms();
    let j = collective_j(params.g1, params.g2(), params.g1, &layout)?;
    let hamiltonian = Hamiltonian::new(
        j_x(&j).scale(derived.alpha),
        vec![(*schedule, detuning_term(params, &layout)?)],
    )?;
    let mut jumps = vec![(derived.gamma, j)];
    if include_atomic_decay {
        jumps.push((params.gamma1, sigma_lower(0, &layout)?));
        jumps.push((params.gamma2, sigma_lower(1, &layout)?));
    }
    LindbladModel::new("reduced", hamiltonian, jumps)
}

/// Zero-eigenvalue state of `ΔωJ_z + αJ_x` that is also annihilated by `J`:
/// `(Δω|↑↑⟩ + α|↑↓⟩ − α|↓↑⟩)/Ω`, `Ω = √(Δω² + 2α²)`.
pub fn analytic_steady_state<T: Real>(delta_omega: T, alpha: T) -> Result<Ket<T>> {
    if delta_omega == T::zero() && alpha == T::zero() {
        return Err(Error::UndefinedState);
    }
    let omega = (delta_omega * delta_omega + lit::<T>(2.0) * alpha * alpha).sqrt();
    let z = T::zero();
    let amps = CVector::from_vec(vec![
        cplx(delta_omega / omega, z),
        cplx(alpha / omega, z),
        cplx(-alpha / omega, z),
        cplx(z, z),
    ]);
    Ket::new(SpaceLayout::atoms(), amps)
}

/// Concurrence of the analytic steady state, `(1 + κ²/2)⁻¹`.
pub fn steady_concurrence<T: Real>(kappa: T) -> T {
    T::one() / (T::one() + kappa * kappa / lit(2.0))
}

/// One sample of the adiabatic-elimination correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionSample<T: Real> {
    pub t: T,
    /// Population of the one-photon cavity level.
    pub p1: T,
    /// `‖(D[J†] − D[J]) ⟨1|ρ|1⟩‖_F`.
    pub correction_norm: T,
}

/// Size of the term dropped when eliminating the cavity, along a trajectory
/// of the full model.
pub fn correction_diagnostic<T: Real>(
    trajectory: &Trajectory<T>,
    params: &PhysicalParams<T>,
) -> Result<Vec<CorrectionSample<T>>> {
    let layout = trajectory.layout();
    let dims = layout.factor_dims();
    if dims.len() != 3 || dims[0] != 2 || dims[1] != 2 {
        return Err(Error::LayoutMismatch {
            left: layout.to_string(),
            right: "[2, 2, N]".into(),
        });
    }
    let atoms = SpaceLayout::atoms();
    let j = collective_j(params.g1, params.g2(), params.g1, &atoms)?;
    let jd = j.adjoint();
    trajectory
        .iter()
        .map(|(t, rho)| {
            let block = photon_block(rho.matrix(), dims[2], 1);
            let p1 = block.trace().re;
            let corr = dissipator_matrix(jd.matrix(), &block) - dissipator_matrix(j.matrix(), &block);
            Ok(CorrectionSample {
                t,
                p1,
                correction_norm: corr.norm(),
            })
        })
        .collect()
}

/// Atomic block `⟨n|ρ|n⟩` of a `[2, 2, N]` matrix.
pub fn photon_block<T: Real>(rho: &CMatrix<T>, fock_dim: usize, n: usize) -> CMatrix<T> {
    CMatrix::from_fn(4, 4, |i, j| rho[(i * fock_dim + n, j * fock_dim + n)])
}
