use nalgebra::{ComplexField, SVD};

use super::liouvillian::{liouvillian, unvec};
use crate::model::LindbladModel;
use crate::qops::DensityMatrix;
use crate::{cplx, lit, to_f64, CMatrix, Complex, Error, Real, Result};

/// Relative singular-value threshold separating the null space.
pub const NULL_THRESHOLD: f64 = 1e-10;
/// Minimum ratio of the smallest retained to the largest discarded singular value.
pub const MIN_GAP_RATIO: f64 = 10.0;

/// Null space of a frozen generator.
#[derive(Debug, Clone)]
pub struct SteadyStates<T: Real> {
    pub dimension: usize,
    /// Hermitian basis of the null space. Elements with non-zero trace are
    /// scaled to unit trace; traceless ones to unit Frobenius norm.
    pub basis: Vec<CMatrix<T>>,
    /// The steady state when the null space is one-dimensional.
    pub unique: Option<DensityMatrix<T>>,
}

struct NullSpace<T: Real> {
    vectors: Vec<CMatrix<T>>,
    sigma_max: T,
}

fn null_space<T: Real>(l: &CMatrix<T>) -> Result<NullSpace<T>> {
    let eps = T::default_epsilon() * lit(4.0);
    let svd = SVD::try_new(l.clone(), false, true, eps, 0)
        .ok_or_else(|| Error::LinearAlgebra("SVD of the generator did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::LinearAlgebra("SVD returned no right singular vectors".into()))?;
    let sigma: Vec<T> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let threshold = sigma_max * lit(NULL_THRESHOLD);

    let (mut kept, mut dropped) = (Vec::new(), Vec::new());
    for (k, &s) in sigma.iter().enumerate() {
        if s <= threshold {
            dropped.push(k);
        } else {
            kept.push(s);
        }
    }
    if !dropped.is_empty() && !kept.is_empty() {
        let smallest_kept = kept.iter().copied().fold(sigma_max, |a, b| a.min(b));
        let largest_dropped = dropped.iter().map(|&k| sigma[k]).fold(T::zero(), |a, b| a.max(b));
        if largest_dropped > T::zero() {
            let ratio = smallest_kept / largest_dropped;
            if ratio < lit(MIN_GAP_RATIO) {
                return Err(Error::AmbiguousNullSpace { ratio: to_f64(ratio) });
            }
        }
    }
    let vectors = dropped
        .into_iter()
        .map(|k| {
            let col = v_t.row(k).adjoint();
            CMatrix::from_column_slice(col.len(), 1, col.as_slice())
        })
        .collect();
    Ok(NullSpace { vectors, sigma_max })
}

/// Real coordinates of a Hermitian matrix: its real and imaginary parts.
fn hermitian_coords<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)).collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Null space of the generator frozen at `t`, with a Hermitian basis.
pub fn steady_states<T: Real>(model: &LindbladModel<T>, t: T) -> Result<SteadyStates<T>> {
    let d = model.dim();
    let l = liouvillian(model, t);
    let ns = null_space(l.matrix())?;
    let dimension = ns.vectors.len();

    // The null space is closed under †, so Hermitian and anti-Hermitian parts
    // of a basis span it. Orthonormalize them as real vectors.
    let half = lit::<T>(0.5);
    let minus_half_i = cplx(T::zero(), -half);
    let mut candidates = Vec::with_capacity(2 * dimension);
    for v in &ns.vectors {
        let x = unvec(v, d);
        let xd = x.adjoint();
        candidates.push((&x + &xd).map(|z| z * half));
        candidates.push((&x - &xd).map(|z| z * minus_half_i));
    }
    let mut ortho: Vec<(Vec<T>, CMatrix<T>)> = Vec::with_capacity(dimension);
    let drop_below = lit::<T>(1e-6);
    for c in candidates {
        if ortho.len() == dimension {
            break;
        }
        let mut coords = hermitian_coords(&c);
        let mut m = c;
        for _ in 0..2 {
            for (q, qm) in &ortho {
                let p = dot(&coords, q);
                for (x, y) in coords.iter_mut().zip(q) {
                    *x -= p * *y;
                }
                m.zip_apply(qm, |a, b| *a -= b * p);
            }
        }
        let n = dot(&coords, &coords).sqrt();
        if n > drop_below {
            let inv = T::one() / n;
            coords.iter_mut().for_each(|x| *x *= inv);
            ortho.push((coords, m.map(|z| z * inv)));
        }
    }
    if ortho.len() != dimension {
        return Err(Error::LinearAlgebra(format!(
            "found {} Hermitian basis elements for a null space of dimension {dimension}",
            ortho.len()
        )));
    }

    let trace_floor = lit::<T>(1e-8);
    let basis: Vec<CMatrix<T>> = ortho
        .into_iter()
        .map(|(_, m)| {
            let tr = m.trace();
            if tr.modulus() > trace_floor {
                m.map(|z| z / tr)
            } else {
                m
            }
        })
        .collect();

    let unique = if dimension == 1 {
        let m = basis[0].clone();
        Some(DensityMatrix::new(model.layout().clone(), m)?)
    } else {
        None
    };
    Ok(SteadyStates {
        dimension,
        basis,
        unique,
    })
}

/// `−max Re λ` over the non-null eigenvalues of the generator frozen at `t`.
pub fn spectral_gap<T: Real>(model: &LindbladModel<T>, t: T) -> Result<T> {
    let l = liouvillian(model, t);
    let ns = null_space(l.matrix())?;
    if ns.vectors.len() != 1 {
        return Err(Error::DegenerateNullSpace {
            dimension: ns.vectors.len(),
        });
    }
    let threshold = ns.sigma_max * lit(1e-8);
    let eigenvalues: Vec<Complex<T>> = l.eigenvalues()?;
    let mut by_modulus = eigenvalues.clone();
    by_modulus.sort_by(|a, b| a.modulus().partial_cmp(&b.modulus()).expect("finite eigenvalues"));
    // the single null eigenvalue is the one closest to zero
    let rest = &by_modulus[1..];
    let max_re = rest
        .iter()
        .filter(|z| z.modulus() > threshold)
        .map(|z| z.re)
        .fold(None, |acc: Option<T>, x| Some(acc.map_or(x, |a| a.max(x))))
        .ok_or(Error::DegenerateNullSpace { dimension: 1 })?;
    Ok(-max_re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{analytic_steady_state, build_reduced, Hamiltonian, PhysicalParams};
    use crate::qops::{sigma_lower, Operator, SpaceLayout};
    use crate::schedules::DetuningSchedule;
    use crate::LindbladModel;

    fn qubit_decay(gamma: f64) -> LindbladModel<f64> {
        let layout = SpaceLayout::single(2).unwrap();
        LindbladModel::new(
            "qubit",
            Hamiltonian::constant(Operator::zeros(&layout)).unwrap(),
            vec![(gamma, sigma_lower(0, &layout).unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn decaying_qubit_relaxes_to_ground() {
        let ss = steady_states(&qubit_decay(3.0), 0.0).unwrap();
        assert_eq!(ss.dimension, 1);
        let rho = ss.unique.unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(rho.matrix()[(1, 1)].norm() < 1e-12);
        let gap = spectral_gap(&qubit_decay(3.0), 0.0).unwrap();
        assert!((gap - 1.5).abs() < 1e-10);
    }

    #[test]
    fn zero_generator_has_no_gap() {
        let layout = SpaceLayout::single(2).unwrap();
        let m = LindbladModel::new(
            "zero",
            Hamiltonian::constant(Operator::<f64>::zeros(&layout)).unwrap(),
            vec![],
        )
        .unwrap();
        assert_eq!(steady_states(&m, 0.0).unwrap().dimension, 4);
        assert_eq!(
            spectral_gap(&m, 0.0),
            Err(Error::DegenerateNullSpace { dimension: 4 })
        );
    }

    #[test]
    fn reduced_model_unique_state() {
        let p = PhysicalParams::standard();
        let m = build_reduced(&p, &DetuningSchedule::constant(5.6), false).unwrap();
        let ss = steady_states(&m, 0.0).unwrap();
        assert_eq!(ss.dimension, 1);
        let psi = analytic_steady_state(5.6, -40.0).unwrap();
        let target = psi.projector();
        assert!((ss.unique.unwrap().matrix() - target).norm() < 1e-7);
        assert!(spectral_gap(&m, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn resonant_reduced_model_is_degenerate() {
        let p = PhysicalParams::standard();
        let m = build_reduced(&p, &DetuningSchedule::constant(0.0), false).unwrap();
        let ss = steady_states(&m, 0.0).unwrap();
        assert!(ss.dimension >= 2, "dimension {}", ss.dimension);
        assert!(ss.unique.is_none());
        for b in &ss.basis {
            assert!((b - b.adjoint()).norm() < 1e-9);
        }
    }
}
