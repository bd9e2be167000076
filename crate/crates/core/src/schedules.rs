//! Detuning profiles `Δω(t)` (kHz, with `t` in ms).

use crate::{lit, to_f64, Error, Real, Result};

/// Time profile of the symmetric detuning `Δω(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetuningSchedule<T: Real> {
    Constant { delta_omega: T },
    /// Ramps linearly from `initial` to 0 at `t_end`, then stays at 0.
    Linear { initial: T, t_end: T },
    /// `initial · e^{−rate·t}`.
    Exponential { initial: T, rate: T },
    /// `fin + (initial − fin) · e^{−rate·t}`.
    ExponentialOffset { initial: T, fin: T, rate: T },
}

impl<T: Real> DetuningSchedule<T> {
    /// Default ramp length of the linear profile, ms.
    pub const DEFAULT_LINEAR_T_END: f64 = 5.0;

    pub fn constant(delta_omega: T) -> Self {
        Self::Constant { delta_omega }
    }

    pub fn linear(initial: T, t_end: T) -> Result<Self> {
        if !(t_end > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: "linear ramp needs t_end > 0".into(),
            });
        }
        Ok(Self::Linear { initial, t_end })
    }

    pub fn exponential(initial: T, rate: T) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::Exponential { initial, rate })
    }

    pub fn exponential_offset(initial: T, fin: T, rate: T) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::ExponentialOffset { initial, fin, rate })
    }

    /// `100 e^{−0.8 t}`: start at 2.5|α| for the default parameters and decay
    /// on a millisecond scale.
    pub fn standard_exponential() -> Self {
        Self::Exponential {
            initial: lit(100.0),
            rate: lit(0.8),
        }
    }

    /// `Δω = 5.6 kHz`, the largest constant detuning with 99 % steady-state
    /// concurrence at `|α| = 40 kHz`.
    pub fn standard_constant() -> Self {
        Self::Constant {
            delta_omega: lit(5.6),
        }
    }

    pub fn value_at(&self, t: T) -> Result<T> {
        if t < T::zero() {
            return Err(Error::NegativeTime(to_f64(t)));
        }
        Ok(self.value_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: T) -> T {
        match *self {
            Self::Constant { delta_omega } => delta_omega,
            Self::Linear { initial, t_end } => initial * (T::one() - t / t_end).max(T::zero()),
            Self::Exponential { initial, rate } => initial * (-rate * t).exp(),
            Self::ExponentialOffset { initial, fin, rate } => {
                fin + (initial - fin) * (-rate * t).exp()
            }
        }
    }

    /// Largest `|Δω(t)|` over `t ≥ 0`.
    pub fn max_abs(&self) -> T {
        match *self {
            Self::Constant { delta_omega } => delta_omega.abs(),
            Self::Linear { initial, .. } | Self::Exponential { initial, .. } => initial.abs(),
            Self::ExponentialOffset { initial, fin, .. } => initial.abs().max(fin.abs()),
        }
    }

    /// `Δω(t → ∞)`.
    pub fn asymptote(&self) -> T {
        match *self {
            Self::Constant { delta_omega } => delta_omega,
            Self::Linear { .. } | Self::Exponential { .. } => T::zero(),
            Self::ExponentialOffset { fin, .. } => fin,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Linear { .. } => "linear",
            Self::Exponential { .. } => "exponential",
            Self::ExponentialOffset { .. } => "exponential-offset",
        }
    }
}

fn check_rate<T: Real>(rate: T) -> Result<()> {
    if rate < T::zero() || !rate.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rate",
            reason: "decay rate must be finite and non-negative".into(),
        });
    }
    Ok(())
}

/// Detuning whose steady-state concurrence `(1 + (Δω/α)²/2)⁻¹` equals
/// `c_target`: `Δω_f = |α| √(2(1/C − 1))`.
pub fn offset_for_target<T: Real>(c_target: T, alpha: T) -> Result<T> {
    if !(c_target > T::zero() && c_target <= T::one()) {
        return Err(Error::InvalidParameter {
            name: "c_target",
            reason: format!("must lie in (0, 1], got {}", to_f64(c_target)),
        });
    }
    if alpha == T::zero() || !alpha.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must be finite and non-zero".into(),
        });
    }
    let two = lit::<T>(2.0);
    Ok(alpha.abs() * (two * (T::one() / c_target - T::one())).sqrt())
}
