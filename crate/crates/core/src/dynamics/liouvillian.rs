use nalgebra::Schur;

use crate::model::LindbladModel;
use crate::{cplx, lit, to_f64, CMatrix, Complex, Error, Real, Result};

/// Matrix form of a Lindblad generator frozen at one instant.
///
/// Vectorization stacks columns: element `(i, j)` of a `d × d` matrix maps to
/// index `i + j·d`, so `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator<T: Real> {
    matrix: CMatrix<T>,
    dim: usize,
    frozen_time: T,
}

impl<T: Real> Superoperator<T> {
    pub fn from_matrix(matrix: CMatrix<T>, dim: usize, frozen_time: T) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            matrix,
            dim,
            frozen_time,
        })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Hilbert-space dimension `d`; the matrix is `d² × d²`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frozen_time(&self) -> T {
        self.frozen_time
    }

    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        unvec(&(&self.matrix * vec(rho)), self.dim)
    }

    /// `‖vec(I)† L‖_F`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> T {
        let d = self.dim;
        let mut acc = T::zero();
        for col in 0..d * d {
            let mut s = Complex::new(T::zero(), T::zero());
            for i in 0..d {
                s += self.matrix[(i + i * d, col)];
            }
            acc += s.norm_sqr();
        }
        acc.sqrt()
    }

    /// All eigenvalues, from a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>> {
        let eps = T::default_epsilon() * lit(16.0);
        let schur = Schur::try_new(self.matrix.clone(), eps, 10_000).ok_or_else(|| {
            Error::LinearAlgebra(format!(
                "Schur decomposition of the generator at t = {} did not converge",
                to_f64(self.frozen_time)
            ))
        })?;
        let (_, upper) = schur.unpack();
        Ok(upper.diagonal().iter().copied().collect())
    }
}

/// Column-stacked `vec(ρ)`.
pub fn vec<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let d = m.nrows() * m.ncols();
    CMatrix::from_column_slice(d, 1, m.as_slice())
}

pub fn unvec<T: Real>(v: &CMatrix<T>, dim: usize) -> CMatrix<T> {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// `L` with `L·vec(ρ) = vec(−i[H(t), ρ] + Σₖ rateₖ D[Lₖ]ρ)`.
pub fn liouvillian<T: Real>(model: &LindbladModel<T>, t: T) -> Superoperator<T> {
    let d = model.dim();
    let id = CMatrix::<T>::identity(d, d);
    let h = model.hamiltonian().matrix_at(t);
    let minus_i = cplx(T::zero(), -T::one());
    let half = lit::<T>(0.5);

    let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)).map(|z| z * minus_i);
    for (rate, op) in model.jumps() {
        if *rate == T::zero() {
            continue;
        }
        let a = op.matrix();
        let ada = a.adjoint() * a;
        let term = a.conjugate().kronecker(a)
            - (id.kronecker(&ada) + ada.transpose().kronecker(&id)).map(|z| z * half);
        l += term.map(|z| z * *rate);
    }
    Superoperator {
        matrix: l,
        dim: d,
        frozen_time: t,
    }
}
