//! Entanglement and comparison metrics.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dynamics::{EvolveOptions, Propagator, Trajectory};
use crate::model::LindbladModel;
use crate::qops::{
    hermitian_eigenvalues, partial_trace_matrix, DensityMatrix, Ket, SpaceLayout,
};
use crate::{lit, to_f64, CMatrix, CVector, Complex, Error, Real, Result};

/// Wootters concurrence of a two-qubit state.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let expected = SpaceLayout::atoms();
    if rho.layout() != &expected {
        return Err(Error::LayoutMismatch {
            left: expected.to_string(),
            right: rho.layout().to_string(),
        });
    }
    Ok(concurrence_matrix(rho.matrix()))
}

/// Eigenvalues of ρ below this fraction of the largest are treated as round-off.
pub const RANK_CUTOFF: f64 = 1e-11;

/// Concurrence of a raw 4×4 matrix, basis order (↑↑, ↑↓, ↓↑, ↓↓).
///
/// With `ρ = W W†`, the square roots of the eigenvalues of `ρ ρ̃` are the
/// singular values of `Wᵀ (σ_y ⊗ σ_y) W`. Working with those avoids taking
/// square roots of round-off sized eigenvalues, which would otherwise move
/// the result by `√ε`.
pub(crate) fn concurrence_matrix<T: Real>(rho: &CMatrix<T>) -> T {
    let half = lit::<T>(0.5);
    let h = (rho + rho.adjoint()).map(|z| z * half);
    let eig = SymmetricEigen::new(h);
    let top = eig.eigenvalues.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let cutoff = top * lit(RANK_CUTOFF);
    let cols: Vec<CVector<T>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cutoff)
        .map(|(k, &l)| eig.eigenvectors.column(k) * Complex::new(l.sqrt(), T::zero()))
        .collect();
    if cols.is_empty() {
        return T::zero();
    }
    let w = CMatrix::from_columns(&cols);
    // σ_y ⊗ σ_y is anti-diagonal with entries (−1, 1, 1, −1).
    let mut yw = CMatrix::zeros(4, w.ncols());
    for (i, s) in [(0usize, -T::one()), (1, T::one()), (2, T::one()), (3, -T::one())] {
        yw.row_mut(i).copy_from(&(w.row(3 - i) * Complex::new(s, T::zero())));
    }
    let tau = w.transpose() * yw;
    let mut lambdas: Vec<T> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let c = lambdas
        .iter()
        .skip(1)
        .fold(lambdas[0], |acc, &l| acc - l);
    c.max(T::zero()).min(T::one())
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity<T: Real>(rho: &DensityMatrix<T>, target: &Ket<T>) -> Result<T> {
    rho.expectation_ket(target)
}

/// `Tr ρ²`.
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.purity()
}

/// Matrix norm used to compare trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormKind {
    #[default]
    Frobenius,
    /// Sum of singular values; for Hermitian differences, of |eigenvalues|.
    Trace,
}

impl NormKind {
    pub fn of<T: Real>(self, m: &CMatrix<T>) -> T {
        match self {
            Self::Frobenius => m.norm(),
            Self::Trace => {
                let h = (m + m.adjoint()).map(|z| z * lit::<T>(0.5));
                hermitian_eigenvalues(&h)
                    .into_iter()
                    .fold(T::zero(), |acc, x| acc + x.abs())
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Frobenius => "frobenius",
            Self::Trace => "trace",
        }
    }
}

/// Largest distance between two trajectories sampled on the same grid.
pub fn norm_error<T: Real>(
    reference: &Trajectory<T>,
    approx: &Trajectory<T>,
    kind: NormKind,
) -> Result<T> {
    if reference.len() != approx.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} samples",
            reference.len(),
            approx.len()
        )));
    }
    let slack = lit::<T>(1e-9);
    let mut worst = T::zero();
    for ((ta, ra), (tb, rb)) in reference.iter().zip(approx.iter()) {
        if (ta - tb).abs() > slack * ta.abs().max(T::one()) {
            return Err(Error::GridMismatch(format!(
                "sample at {} ms vs {} ms",
                to_f64(ta),
                to_f64(tb)
            )));
        }
        ra.layout().ensure_same(rb.layout())?;
        worst = worst.max(kind.of(&(ra.matrix() - rb.matrix())));
    }
    Ok(worst)
}

/// Outcome of [`time_to_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdTime<T: Real> {
    Reached(T),
    NotReached,
}

impl<T: Real> ThresholdTime<T> {
    pub fn time(self) -> Option<T> {
        match self {
            Self::Reached(t) => Some(t),
            Self::NotReached => None,
        }
    }
}

/// Grid and accuracy used by [`time_to_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSearch<T: Real> {
    /// Spacing of the coarse scan, ms.
    pub scan_step: T,
    /// Width of the final bisection bracket, ms.
    pub resolution: T,
    pub evolve: EvolveOptions<T>,
}

impl<T: Real> Default for ThresholdSearch<T> {
    fn default() -> Self {
        Self {
            scan_step: lit(0.05),
            resolution: lit(1e-3),
            evolve: EvolveOptions::default(),
        }
    }
}

fn atomic_concurrence<T: Real>(layout: &SpaceLayout, m: &CMatrix<T>) -> Result<T> {
    if layout.factor_dims() == [2, 2] {
        return Ok(concurrence_matrix(m));
    }
    let (_, atoms) = partial_trace_matrix(layout, m, &[0, 1])?;
    Ok(concurrence_matrix(&atoms))
}

/// First time at which the two-atom concurrence reaches
/// `fraction · c_ref`, scanning on a uniform grid and refining by bisection.
///
/// States on a layout with a cavity factor are traced down to the atoms.
pub fn time_to_threshold<T: Real>(
    model: &LindbladModel<T>,
    rho0: &DensityMatrix<T>,
    fraction: T,
    c_ref: T,
    t_max: T,
    search: &ThresholdSearch<T>,
) -> Result<ThresholdTime<T>> {
    if !(fraction >= T::zero() && fraction <= T::one()) {
        return Err(Error::InvalidParameter {
            name: "threshold_fraction",
            reason: format!("must lie in [0, 1], got {}", to_f64(fraction)),
        });
    }
    if !(c_ref > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "c_ref",
            reason: "reference concurrence must be positive".into(),
        });
    }
    let target = fraction * c_ref;
    let layout = model.layout().clone();
    let reached = |m: &CMatrix<T>| -> Result<bool> { Ok(atomic_concurrence(&layout, m)? >= target) };

    if reached(rho0.matrix())? {
        return Ok(ThresholdTime::Reached(T::zero()));
    }
    let mut prop = Propagator::new(model, rho0, T::zero(), search.evolve)?;
    let mut lo_state = rho0.clone();
    let mut lo = T::zero();
    let mut hi = None;
    let mut k = 1usize;
    while lo < t_max {
        let t = (search.scan_step * lit(k as f64)).min(t_max);
        prop.advance_to(t)?;
        if reached(prop.state_matrix())? {
            hi = Some(t);
            break;
        }
        lo = t;
        lo_state = prop.state();
        k += 1;
    }
    let Some(mut hi) = hi else {
        return Ok(ThresholdTime::NotReached);
    };
    while hi - lo > search.resolution {
        let mid = (lo + hi) * lit(0.5);
        let mut p = Propagator::new(model, &lo_state, lo, search.evolve)?;
        p.advance_to(mid)?;
        if reached(p.state_matrix())? {
            hi = mid;
        } else {
            lo = mid;
            lo_state = p.state();
        }
    }
    Ok(ThresholdTime::Reached(hi))
}

/// Least-squares quadratic `y ≈ a2 x² + a1 x + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T: Real> {
    pub a2: T,
    pub a1: T,
    pub a0: T,
    /// Root-mean-square residual.
    pub residual: T,
}

impl<T: Real> FitResult<T> {
    pub fn eval(&self, x: T) -> T {
        (self.a2 * x + self.a1) * x + self.a0
    }
}

pub fn quad_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<FitResult<T>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData(n));
    }
    let mut distinct: Vec<T> = xs.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite abscissae"));
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit);
    }
    // Centre and scale x for conditioning, then map coefficients back.
    let nf = lit::<T>(n as f64);
    let mean = xs.iter().copied().fold(T::zero(), |a, b| a + b) / nf;
    let spread = xs
        .iter()
        .map(|&x| (x - mean).abs())
        .fold(T::zero(), |a, b| a.max(b));
    let v = DMatrix::from_fn(n, 3, |i, j| {
        let u = (xs[i] - mean) / spread;
        match j {
            0 => u * u,
            1 => u,
            _ => T::one(),
        }
    });
    let y = DVector::from_column_slice(ys);
    let qr = v.qr();
    let rhs = qr.q().transpose() * &y;
    let c = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::DegenerateFit)?;
    let (b2, b1, b0) = (c[0], c[1], c[2]);
    let s2 = spread * spread;
    let a2 = b2 / s2;
    let a1 = b1 / spread - lit::<T>(2.0) * b2 * mean / s2;
    let a0 = b0 - b1 * mean / spread + b2 * mean * mean / s2;
    let mut fit = FitResult {
        a2,
        a1,
        a0,
        residual: T::zero(),
    };
    let sse = xs
        .iter()
        .zip(ys)
        .fold(T::zero(), |acc, (&x, &y)| {
            let r = y - fit.eval(x);
            acc + r * r
        });
    fit.residual = (sse / nf).sqrt();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TrajectoryMeta;
    use crate::model::analytic_steady_state;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn ket(a: [Complex<f64>; 4]) -> Ket<f64> {
        Ket::new(SpaceLayout::atoms(), CVector::from_column_slice(&a)).unwrap()
    }

    fn pure(k: &Ket<f64>) -> DensityMatrix<f64> {
        DensityMatrix::pure(&k.normalized()).unwrap()
    }

    fn singlet() -> Ket<f64> {
        let s = 0.5f64.sqrt();
        ket([c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)])
    }

    fn random_ket(rng: &mut ChaCha8Rng, d: usize) -> CVector<f64> {
        let v = CVector::from_fn(d, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = v.norm();
        v / c(n, 0.0)
    }

    fn random_unitary2(rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        let a = random_ket(rng, 2);
        let b = random_ket(rng, 2);
        let b = &b - &a * a.dotc(&b);
        let b = &b / c(b.norm(), 0.0);
        CMatrix::from_columns(&[a, b])
    }

    fn random_mixed(rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
        let mut m = CMatrix::zeros(4, 4);
        let weights: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            let v = random_ket(rng, 4);
            m += &v * v.adjoint() * c(w / total, 0.0);
        }
        DensityMatrix::new(SpaceLayout::atoms(), m).unwrap()
    }

    #[test]
    fn concurrence_of_simple_states() {
        assert_relative_eq!(concurrence(&pure(&singlet())).unwrap(), 1.0, epsilon = 1e-12);
        let up_up = Ket::basis(&SpaceLayout::atoms(), 0).unwrap();
        assert!(concurrence(&pure(&up_up)).unwrap() < 1e-12);
        let mixed = DensityMatrix::<f64>::maximally_mixed(&SpaceLayout::atoms());
        assert!(concurrence(&mixed).unwrap() < 1e-12);
    }

    #[test]
    fn concurrence_of_analytic_steady_state() {
        let psi = analytic_steady_state::<f64>(0.14 * 40.0, -40.0).unwrap();
        let cc = concurrence(&DensityMatrix::pure(&psi).unwrap()).unwrap();
        assert!((cc - 0.9903).abs() < 1e-4);
        assert_relative_eq!(cc, 1.0 / (1.0 + 0.0098), max_relative = 1e-10);
    }

    #[test]
    fn concurrence_rejects_other_layouts() {
        let layout = SpaceLayout::atoms_cavity(2).unwrap();
        let rho = DensityMatrix::<f64>::maximally_mixed(&layout);
        assert!(matches!(
            concurrence(&rho),
            Err(Error::LayoutMismatch { .. })
        ));
    }

    /// Pure-state concurrence `2|ad − bc|`.
    fn pure_concurrence(v: &CVector<f64>) -> f64 {
        2.0 * (v[0] * v[3] - v[1] * v[2]).norm()
    }

    /// Convex-roof estimate over rank-2 decompositions: every ensemble of a
    /// rank-2 state is `√λ_i V` rotated by a unitary; scan a grid of
    /// `m × 2` isometries with m = 2, 3.
    fn convex_roof_rank2(rho: &DensityMatrix<f64>) -> f64 {
        let (vals, vecs) = {
            let e = rho.matrix().clone().symmetric_eigen();
            (e.eigenvalues, e.eigenvectors)
        };
        let mut idx: Vec<usize> = (0..4).collect();
        idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
        let w: Vec<CVector<f64>> = idx[..2]
            .iter()
            .map(|&k| vecs.column(k).into_owned() * c(vals[k].max(0.0).sqrt(), 0.0))
            .collect();
        let mut best = f64::INFINITY;
        let steps = 48;
        for i in 0..=steps {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
            for j in 0..steps {
                let phi = std::f64::consts::TAU * j as f64 / steps as f64;
                let (ct, st) = (theta.cos(), theta.sin());
                let ph = c(phi.cos(), phi.sin());
                let u = [[c(ct, 0.0), ph * st], [-ph.conj() * st, c(ct, 0.0)]];
                let mut avg = 0.0;
                for row in u {
                    let v = &w[0] * row[0] + &w[1] * row[1];
                    let p = v.norm_squared();
                    if p > 1e-15 {
                        avg += p * pure_concurrence(&(&v / c(p.sqrt(), 0.0)));
                    }
                }
                best = best.min(avg);
            }
        }
        best
    }

    #[test]
    fn concurrence_matches_convex_roof() {
        let up_up = Ket::basis(&SpaceLayout::atoms(), 0).unwrap().projector();
        let m = (up_up + singlet().projector()) * c(0.5, 0.0);
        let rho = DensityMatrix::new(SpaceLayout::atoms(), m).unwrap();
        let wootters = concurrence(&rho).unwrap();
        let roof = convex_roof_rank2(&rho);
        // the grid search only bounds the roof from above
        assert!(roof >= wootters - 1e-9);
        assert!(roof - wootters < 2e-3, "roof {roof} vs {wootters}");
        assert_relative_eq!(wootters, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn pure_states_match_determinant_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let v = random_ket(&mut rng, 4);
            let rho = DensityMatrix::new(SpaceLayout::atoms(), &v * v.adjoint()).unwrap();
            let cc = concurrence(&rho).unwrap();
            assert!((cc - pure_concurrence(&v)).abs() < 1e-7);
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let rho = random_mixed(&mut rng);
            let u = random_unitary2(&mut rng).kronecker(&random_unitary2(&mut rng));
            let rotated = &u * rho.matrix() * u.adjoint();
            let rotated = DensityMatrix::new(SpaceLayout::atoms(), rotated).unwrap();
            let (a, b) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn concurrence_in_unit_interval(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cc = concurrence(&random_mixed(&mut rng)).unwrap();
            prop_assert!((0.0..=1.0).contains(&cc));
        }

        #[test]
        fn quad_fit_ignores_ordering(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ys: Vec<f64> = xs.iter().map(|x| x * x - 0.3 + rng.random_range(-0.1..0.1)).collect();
            let a = quad_fit(&xs, &ys).unwrap();
            let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
            pairs.reverse();
            pairs.swap(0, 3);
            let (xs2, ys2): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let b = quad_fit(&xs2, &ys2).unwrap();
            prop_assert!((a.a2 - b.a2).abs() < 1e-9);
            prop_assert!((a.a1 - b.a1).abs() < 1e-9);
            prop_assert!((a.a0 - b.a0).abs() < 1e-9);
            prop_assert!((a.residual - b.residual).abs() < 1e-9);
            prop_assert!(a.residual >= 0.0);
        }
    }

    #[test]
    fn fidelity_examples() {
        let s = singlet();
        let rho = pure(&s);
        assert_relative_eq!(fidelity(&rho, &s).unwrap(), 1.0, epsilon = 1e-12);
        let up_up = Ket::basis(&SpaceLayout::atoms(), 0).unwrap();
        assert!(fidelity(&rho, &up_up).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(&SpaceLayout::atoms());
        assert_relative_eq!(fidelity(&mixed, &s).unwrap(), 0.25, epsilon = 1e-12);
        let other = Ket::basis(&SpaceLayout::single(4).unwrap(), 0).unwrap();
        assert!(fidelity(&rho, &other).is_err());
    }

    fn single_point(m: CMatrix<f64>, t: f64) -> Trajectory<f64> {
        let meta = TrajectoryMeta {
            model: "test".into(),
            rtol: 0.0,
            atol: 0.0,
            steps: 0,
        };
        let rho = DensityMatrix::with_tolerances(
            SpaceLayout::atoms(),
            m,
            crate::qops::DensityTolerances::EVOLVED,
        )
        .unwrap();
        Trajectory::new(vec![t], vec![rho], meta).unwrap()
    }

    #[test]
    fn norm_error_of_rank_one_perturbation() {
        let base = DensityMatrix::maximally_mixed(&SpaceLayout::atoms());
        let a = single_point(base.matrix().clone(), 1.0);
        assert_eq!(norm_error(&a, &a, NormKind::Frobenius).unwrap(), 0.0);
        // shift weight 0.1 from |↓↓⟩ to |↑↑⟩: difference diag(0.1, 0, 0, −0.1)
        let mut m = base.matrix().clone();
        m[(0, 0)] += c(0.1, 0.0);
        m[(3, 3)] -= c(0.1, 0.0);
        let b = single_point(m, 1.0);
        assert_relative_eq!(
            norm_error(&a, &b, NormKind::Frobenius).unwrap(),
            0.02f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(norm_error(&a, &b, NormKind::Trace).unwrap(), 0.2, epsilon = 1e-12);
        // rank-1 coherence ε(|↑↑⟩⟨↓↓| + h.c.): Frobenius √2 ε, trace 2ε
        let mut m = base.matrix().clone();
        m[(0, 3)] += c(0.05, 0.0);
        m[(3, 0)] += c(0.05, 0.0);
        let b = single_point(m, 1.0);
        assert_relative_eq!(norm_error(&a, &b, NormKind::Frobenius).unwrap(), 0.05 * 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(norm_error(&a, &b, NormKind::Trace).unwrap(), 0.1, epsilon = 1e-12);
        let shifted = single_point(base.matrix().clone(), 2.0);
        assert!(matches!(
            norm_error(&a, &shifted, NormKind::Frobenius),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn exact_quadratic_fit() {
        let xs = [0.0, 0.1, 0.2, 0.5, 1.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.062 * x * x - 0.0024 * x + 0.99).collect();
        let f = quad_fit(&xs, &ys).unwrap();
        assert_relative_eq!(f.a2, -0.062, epsilon = 1e-12);
        assert_relative_eq!(f.a1, -0.0024, epsilon = 1e-12);
        assert_relative_eq!(f.a0, 0.99, epsilon = 1e-12);
        assert!(f.residual < 1e-13);
        assert_eq!(quad_fit(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::InsufficientData(2)));
        assert_eq!(quad_fit(&[1.0, 1.0, 2.0], &[1.0, 1.0, 2.0]), Err(Error::DegenerateFit));
    }

    /// Normal equations `(VᵀV) a = Vᵀy` solved by Cramer's rule.
    fn normal_equation_oracle(xs: &[f64], ys: &[f64]) -> [f64; 3] {
        let s = |p: i32| xs.iter().map(|x| x.powi(p)).sum::<f64>();
        let t = |p: i32| xs.iter().zip(ys).map(|(x, y)| x.powi(p) * y).sum::<f64>();
        let m = [[s(4), s(3), s(2)], [s(3), s(2), s(1)], [s(2), s(1), s(0)]];
        let r = [t(2), t(1), t(0)];
        let det = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det(m);
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut mk = m;
            for row in 0..3 {
                mk[row][k] = r[row];
            }
            *o = det(mk) / d;
        }
        out
    }

    #[test]
    fn noisy_fit_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let xs: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| -0.06 * x * x - 0.002 * x + 0.99 + 1e-3 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let f = quad_fit(&xs, &ys).unwrap();
        let o = normal_equation_oracle(&xs, &ys);
        assert!((f.a2 - o[0]).abs() < 1e-9);
        assert!((f.a1 - o[1]).abs() < 1e-9);
        assert!((f.a0 - o[2]).abs() < 1e-9);
        assert!(f.residual > 0.0);
    }
}
