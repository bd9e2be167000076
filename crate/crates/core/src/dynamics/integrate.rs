//! Adaptive Dormand–Prince 5(4) integration of the Lindblad equation,
//! working directly on the `d × d` density matrix.

use nalgebra::ComplexField;

use crate::model::LindbladModel;
use crate::qops::{hermitian_eigenvalues, partial_trace_matrix, DensityMatrix, SpaceLayout};
use crate::{cplx, lit, tol, to_f64, CMatrix, Complex, Error, Real, Result};

/// Step-size control for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions<T: Real> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on accepted plus rejected steps per call.
    pub max_steps: usize,
    /// Optional ceiling on the internal step, ms.
    pub max_step: Option<T>,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self {
            rtol: lit(1e-8),
            atol: lit(1e-10),
            max_steps: 20_000_000,
            max_step: None,
        }
    }
}

impl<T: Real> EvolveOptions<T> {
    /// Same relative and absolute tolerance.
    pub fn with_tolerance(tolerance: T) -> Self {
        Self {
            rtol: tolerance,
            atol: tolerance,
            ..Self::default()
        }
    }
}

/// Times at which [`evolve`] records the state.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputGrid<T: Real> {
    /// `points` equally spaced times covering `[0, t_final]`, both ends included.
    Uniform(usize),
    /// Explicit, non-decreasing times inside `[0, t_final]`.
    Times(Vec<T>),
}

impl<T: Real> Default for OutputGrid<T> {
    fn default() -> Self {
        Self::Uniform(400)
    }
}

impl<T: Real> OutputGrid<T> {
    pub fn times(&self, t_final: T) -> Result<Vec<T>> {
        match self {
            Self::Uniform(points) => {
                if *points < 2 {
                    return Err(Error::GridMismatch(format!(
                        "uniform grid needs at least 2 points, got {points}"
                    )));
                }
                let n = *points - 1;
                Ok((0..=n)
                    .map(|k| t_final * lit::<T>(k as f64) / lit::<T>(n as f64))
                    .collect())
            }
            Self::Times(times) => {
                if times.is_empty() {
                    return Err(Error::GridMismatch("empty output grid".into()));
                }
                if times.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::GridMismatch("output times must be sorted".into()));
                }
                if times[0] < T::zero() || times[times.len() - 1] > t_final {
                    return Err(Error::GridMismatch(
                        "output times must lie inside [0, t_final]".into(),
                    ));
                }
                Ok(times.clone())
            }
        }
    }
}

/// Density matrices sampled along a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    times: Vec<T>,
    states: Vec<DensityMatrix<T>>,
    meta: TrajectoryMeta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub model: String,
    pub rtol: f64,
    pub atol: f64,
    /// Internal steps taken, accepted and rejected.
    pub steps: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn new(times: Vec<T>, states: Vec<DensityMatrix<T>>, meta: TrajectoryMeta) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::GridMismatch(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        let layout = states[0].layout();
        for s in &states[1..] {
            layout.ensure_same(s.layout())?;
        }
        Ok(Self {
            times,
            states,
            meta,
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.states[0].layout()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &DensityMatrix<T>)> + '_ {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn final_state(&self) -> &DensityMatrix<T> {
        &self.states[self.states.len() - 1]
    }

    /// Partial trace of every state onto the factors in `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| {
                let (layout, m) = partial_trace_matrix(s.layout(), s.matrix(), keep)?;
                Ok(DensityMatrix::from_raw(layout, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: self.times.clone(),
            states,
            meta: self.meta.clone(),
        })
    }

    /// Applies `f` to every state.
    pub fn map<U>(&self, f: impl Fn(&DensityMatrix<T>) -> U) -> Vec<U> {
        self.states.iter().map(f).collect()
    }
}

/// Precomputed pieces of the generator:
/// `ρ̇ = −i(H_eff ρ − ρ H_eff†) + Σ rₖ Lₖ ρ Lₖ†`, `H_eff = H − (i/2) Σ rₖ Lₖ†Lₖ`.
struct Generator<T: Real> {
    h_eff_static: CMatrix<T>,
    modulated: Vec<(crate::schedules::DetuningSchedule<T>, CMatrix<T>)>,
    jumps: Vec<(CMatrix<T>, CMatrix<T>)>,
}

impl<T: Real> Generator<T> {
    fn new(model: &LindbladModel<T>) -> Self {
        let d = model.dim();
        let mut anti = CMatrix::<T>::zeros(d, d);
        let mut jumps = Vec::new();
        for (rate, op) in model.jumps() {
            if *rate == T::zero() {
                continue;
            }
            let a = op.matrix();
            anti += (a.adjoint() * a).map(|z| z * *rate);
            // √r L ρ (√r L)†
            let scaled = a.map(|z| z * rate.sqrt());
            let adj = scaled.adjoint();
            jumps.push((scaled, adj));
        }
        let minus_half_i = cplx(T::zero(), -lit::<T>(0.5));
        let h_eff_static =
            model.hamiltonian().static_part().matrix() + anti.map(|z| z * minus_half_i);
        let modulated = model
            .hamiltonian()
            .modulated_terms()
            .iter()
            .map(|(s, op)| (*s, op.matrix().clone()))
            .collect();
        Self {
            h_eff_static,
            modulated,
            jumps,
        }
    }

    /// Evaluates the right-hand side for a Hermitian `rho` into `out`.
    fn eval(&self, t: T, rho: &CMatrix<T>, out: &mut CMatrix<T>, scratch: &mut CMatrix<T>) {
        scratch.copy_from(&self.h_eff_static);
        for (schedule, op) in &self.modulated {
            let f = schedule.value_unchecked(t);
            if f != T::zero() {
                scratch.zip_apply(op, |s, o| *s += o * f);
            }
        }
        // X = H_eff ρ; for Hermitian ρ, ρ H_eff† = X†.
        let x = &*scratch * rho;
        let d = rho.nrows();
        for j in 0..d {
            for i in 0..d {
                let v = x[(i, j)] - x[(j, i)].conj();
                out[(i, j)] = Complex::new(v.im, -v.re);
            }
        }
        for (l, ld) in &self.jumps {
            let lr = l * rho;
            out.gemm(T::one().into(), &lr, ld, T::one().into());
        }
        // The X − X† form is only valid on Hermitian matrices; an
        // anti-Hermitian round-off component would otherwise grow under the
        // jump terms alone. Keep the derivative exactly Hermitian.
        let half = lit::<T>(0.5);
        for j in 0..d {
            for i in 0..=j {
                let v = (out[(i, j)] + out[(j, i)].conj()) * half;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Incremental integrator: holds the current state and advances it to
/// requested times.
pub struct Propagator<T: Real> {
    generator: Generator<T>,
    layout: SpaceLayout,
    options: EvolveOptions<T>,
    t: T,
    state: CMatrix<T>,
    k: Vec<CMatrix<T>>,
    fsal_valid: bool,
    scratch: CMatrix<T>,
    stage: CMatrix<T>,
    h: Option<T>,
    err_prev: T,
    steps: usize,
    a: [[T; 6]; 7],
    c: [T; 7],
    e: [T; 7],
}

impl<T: Real> Propagator<T> {
    pub fn new(
        model: &LindbladModel<T>,
        rho0: &DensityMatrix<T>,
        t0: T,
        options: EvolveOptions<T>,
    ) -> Result<Self> {
        model.layout().ensure_same(rho0.layout())?;
        if t0 < T::zero() {
            return Err(Error::NegativeTime(to_f64(t0)));
        }
        if !(options.rtol > T::zero()) || !(options.atol > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: "rtol and atol must be positive".into(),
            });
        }
        let d = model.dim();
        let zeros = CMatrix::<T>::zeros(d, d);
        let mut a = [[T::zero(); 6]; 7];
        for (row, src) in a.iter_mut().zip(A.iter()) {
            for (x, &y) in row.iter_mut().zip(src.iter()) {
                *x = lit(y);
            }
        }
        Ok(Self {
            generator: Generator::new(model),
            layout: model.layout().clone(),
            options,
            t: t0,
            state: rho0.matrix().clone(),
            k: vec![zeros.clone(); 7],
            fsal_valid: false,
            scratch: zeros.clone(),
            stage: zeros,
            h: None,
            err_prev: lit(1e-4),
            steps: 0,
            a,
            c: C.map(lit),
            e: E.map(lit),
        })
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn state(&self) -> DensityMatrix<T> {
        DensityMatrix::from_raw(self.layout.clone(), self.state.clone())
    }

    pub fn state_matrix(&self) -> &CMatrix<T> {
        &self.state
    }

    fn failure(&self, reason: impl Into<String>) -> Error {
        Error::IntegrationFailed {
            t: to_f64(self.t),
            steps: self.steps,
            step_size: self.h.map(to_f64).unwrap_or(0.0),
            reason: reason.into(),
        }
    }

    fn error_norm(&self, new: &CMatrix<T>, err: &CMatrix<T>) -> T {
        let mut acc = T::zero();
        for ((y0, y1), e) in self.state.iter().zip(new.iter()).zip(err.iter()) {
            let scale = self.options.atol + self.options.rtol * y0.modulus().max(y1.modulus());
            let r = e.modulus() / scale;
            acc += r * r;
        }
        (acc / lit(new.len() as f64)).sqrt()
    }

    fn initial_step(&mut self, span: T) -> T {
        let d0 = self.state.norm();
        let mut f0 = self.state.clone();
        self.generator
            .eval(self.t, &self.state, &mut f0, &mut self.scratch);
        let d1 = f0.norm();
        let tiny = lit::<T>(1e-12);
        let h = if d1 > tiny {
            lit::<T>(0.01) * (d0 / d1)
        } else {
            span
        };
        let mut h = h.min(span);
        if let Some(m) = self.options.max_step {
            h = h.min(m);
        }
        h
    }

    /// Integrates forward to `t_target`, landing on it exactly.
    pub fn advance_to(&mut self, t_target: T) -> Result<()> {
        if t_target < self.t {
            return Err(self.failure("cannot integrate backwards"));
        }
        if t_target == self.t {
            return Ok(());
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(t_target - self.t),
        };
        let min_step = lit::<T>(1e-14) * t_target.abs().max(T::one());
        let safety = lit::<T>(0.9);
        let beta = lit::<T>(0.04);
        let expo = lit::<T>(0.2) - beta * lit(0.75);
        let fac_min = lit::<T>(0.2);
        let fac_max = lit::<T>(10.0);

        while self.t < t_target {
            if self.steps >= self.options.max_steps {
                return Err(self.failure("step budget exhausted"));
            }
            if let Some(m) = self.options.max_step {
                h = h.min(m);
            }
            let remaining = t_target - self.t;
            let landing = h >= remaining;
            let step = if landing { remaining } else { h };
            if step < min_step && !landing {
                return Err(self.failure("step size underflow"));
            }

            if !self.fsal_valid {
                let (k0, rest) = self.k.split_first_mut().expect("seven stages");
                let _ = rest;
                self.generator
                    .eval(self.t, &self.state, k0, &mut self.scratch);
                self.fsal_valid = true;
            }
            for s in 1..7 {
                self.stage.copy_from(&self.state);
                for j in 0..s {
                    let coeff = self.a[s][j] * step;
                    if coeff != T::zero() {
                        self.stage.zip_apply(&self.k[j], |y, k| *y += k * coeff);
                    }
                }
                let ts = self.t + self.c[s] * step;
                let mut out = std::mem::replace(&mut self.k[s], CMatrix::zeros(0, 0));
                self.generator
                    .eval(ts, &self.stage, &mut out, &mut self.scratch);
                self.k[s] = out;
            }
            // stage 6 evaluated the 5th-order solution (FSAL)
            let mut err = CMatrix::<T>::zeros(self.state.nrows(), self.state.ncols());
            for (j, kj) in self.k.iter().enumerate() {
                let coeff = self.e[j] * step;
                if coeff != T::zero() {
                    err.zip_apply(kj, |e, k| *e += k * coeff);
                }
            }
            let err_norm = self.error_norm(&self.stage, &err);
            self.steps += 1;

            if !err_norm.is_finite() {
                h = step * lit(0.1);
                continue;
            }
            if err_norm <= T::one() {
                self.t = if landing { t_target } else { self.t + step };
                std::mem::swap(&mut self.state, &mut self.stage);
                self.k.swap(0, 6);
                let err_c = err_norm.max(lit(1e-10));
                let fac = safety * err_c.powf(-expo) * self.err_prev.powf(beta);
                let fac = fac.max(fac_min).min(fac_max);
                self.err_prev = err_c.max(lit(1e-4));
                // a clipped landing step says nothing about the natural step size
                if !landing {
                    h = step * fac;
                }
            } else {
                let fac = (safety * err_norm.powf(-lit::<T>(0.2))).max(fac_min);
                h = step * fac;
            }
        }
        self.h = Some(h);
        Ok(())
    }
}

/// Integrates `model` from `rho0` at `t = 0` and records the state on the
/// output grid.
pub fn evolve<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    t_final: T,
    grid: &OutputGrid<T>,
    options: EvolveOptions<T>,
) -> Result<Trajectory<T>> {
    evolve_from(model, rho0, T::zero(), t_final, grid, options)
}

/// Like [`evolve`], starting at `t0`. Grid times are absolute.
pub fn evolve_from<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    t0: T,
    t_final: T,
    grid: &OutputGrid<T>,
    options: EvolveOptions<T>,
) -> Result<Trajectory<T>> {
    if !(t_final > t0) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            reason: format!("must exceed start time {}", to_f64(t0)),
        });
    }
    let times: Vec<T> = match grid {
        OutputGrid::Uniform(points) => OutputGrid::Uniform(*points)
            .times(t_final - t0)?
            .into_iter()
            .map(|t| t + t0)
            .collect(),
        OutputGrid::Times(_) => grid.times(t_final)?,
    };
    if times[0] < t0 {
        return Err(Error::GridMismatch("output time before start".into()));
    }
    let mut prop = Propagator::new(model, rho0, t0, options)?;
    let mut states = Vec::with_capacity(times.len());
    let positivity = tol::<T>(1e-6);
    for &t in &times {
        prop.advance_to(t)?;
        let m = prop.state_matrix();
        let min_eig = hermitian_eigenvalues(m)
            .into_iter()
            .reduce(|a, b| a.min(b))
            .unwrap_or(T::zero());
        if min_eig < -positivity {
            return Err(prop.failure(format!(
                "positivity lost: eigenvalue {:e}",
                to_f64(min_eig)
            )));
        }
        states.push(prop.state());
    }
    Trajectory::new(
        times,
        states,
        TrajectoryMeta {
            model: model.name().to_string(),
            rtol: to_f64(options.rtol),
            atol: to_f64(options.atol),
            steps: prop.steps(),
        },
    )
}
