use std::collections::HashSet;

use crate::qops::SpaceLayout;
use crate::{cplx, lit, CMatrix, CVector, Complex, Error, Real, Result};

/// Square complex matrix acting on a [`SpaceLayout`].
///
/// Operators are not assumed Hermitian; jump operators usually are not.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    layout: SpaceLayout,
    matrix: CMatrix<T>,
}

impl<T: Real> Operator<T> {
    pub fn new(layout: SpaceLayout, matrix: CMatrix<T>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { layout, matrix })
    }

    pub fn zeros(layout: &SpaceLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout: layout.clone(),
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(layout: &SpaceLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout: layout.clone(),
            matrix: CMatrix::identity(d, d),
        }
    }

    /// Operator on a single factor of dimension `matrix.nrows()`.
    pub fn local(matrix: CMatrix<T>) -> Result<Self> {
        let layout = SpaceLayout::single(matrix.nrows())?;
        Self::new(layout, matrix)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn apply(&self, ket: &Ket<T>) -> Result<Ket<T>> {
        self.layout.ensure_same(ket.layout())?;
        Ok(Ket {
            layout: self.layout.clone(),
            amplitudes: &self.matrix * ket.amplitudes(),
        })
    }

    /// Frobenius norm of `A − A†`.
    pub fn hermiticity_defect(&self) -> T {
        (&self.matrix - self.matrix.adjoint()).norm()
    }

    pub fn is_hermitian(&self, tolerance: T) -> bool {
        self.hermiticity_defect() <= tolerance
    }
}

/// State vector on a [`SpaceLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Ket<T: Real> {
    layout: SpaceLayout,
    amplitudes: CVector<T>,
}

impl<T: Real> Ket<T> {
    pub fn new(layout: SpaceLayout, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { layout, amplitudes })
    }

    /// Computational basis state with flat index `index`.
    pub fn basis(layout: &SpaceLayout, index: usize) -> Result<Self> {
        let d = layout.total_dim();
        if index >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: index,
            });
        }
        let mut amplitudes = CVector::zeros(d);
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            layout: layout.clone(),
            amplitudes,
        })
    }

    /// Product state of single-factor kets, factor 0 first.
    pub fn product(kets: &[Ket<T>]) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut dims = Vec::with_capacity(kets.len());
        let mut amplitudes = CVector::from_element(1, Complex::new(T::one(), T::zero()));
        for k in kets {
            dims.extend_from_slice(k.layout.factor_dims());
            amplitudes = amplitudes.kronecker(&k.amplitudes);
        }
        Ok(Self {
            layout: SpaceLayout::new(dims)?,
            amplitudes,
        })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            layout: self.layout.clone(),
            amplitudes: self.amplitudes.map(|z| z / n),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket<T>) -> Result<Complex<T>> {
        self.layout.ensure_same(&other.layout)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|ψ⟩⟨ψ|` as a raw matrix.
    pub fn projector(&self) -> CMatrix<T> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Embeds single-factor operators into `layout`, with identities on every
/// factor not listed.
pub fn tensor<T: Real>(layout: &SpaceLayout, ops: &[(usize, &Operator<T>)]) -> Result<Operator<T>> {
    let mut seen = HashSet::new();
    for &(factor, op) in ops {
        let dim = layout.factor_dim(factor)?;
        if !seen.insert(factor) {
            return Err(Error::DuplicateFactor(factor));
        }
        if op.layout.num_factors() != 1 || op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
    }
    let mut matrix = CMatrix::from_element(1, 1, Complex::new(T::one(), T::zero()));
    for (factor, &dim) in layout.factor_dims().iter().enumerate() {
        let local = ops
            .iter()
            .find(|(f, _)| *f == factor)
            .map(|(_, op)| op.matrix.clone())
            .unwrap_or_else(|| CMatrix::identity(dim, dim));
        matrix = matrix.kronecker(&local);
    }
    Operator::new(layout.clone(), matrix)
}

fn qubit_factor(layout: &SpaceLayout, index: usize) -> Result<()> {
    match layout.factor_dim(index)? {
        2 => Ok(()),
        found => Err(Error::NotAQubit { index, found }),
    }
}

/// Atomic lowering operator `σ` on factor `atom_index`.
///
/// Local basis is `(|↑⟩, |↓⟩)`: `σ|↓⟩ = |↑⟩` and `σ|↑⟩ = 0`, so `|↑⟩` is the
/// ground state and `σ†σ` counts the `|↓⟩` population.
pub fn sigma_lower<T: Real>(atom_index: usize, layout: &SpaceLayout) -> Result<Operator<T>> {
    qubit_factor(layout, atom_index)?;
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = Complex::new(T::one(), T::zero());
    tensor(layout, &[(atom_index, &Operator::local(m)?)])
}

/// `σ†σ` on factor `atom_index`.
pub fn excitation_number<T: Real>(atom_index: usize, layout: &SpaceLayout) -> Result<Operator<T>> {
    let s = sigma_lower::<T>(atom_index, layout)?;
    s.adjoint().compose(&s)
}

/// Truncated bosonic annihilator with `⟨n−1|b|n⟩ = √n`.
pub fn annihilator<T: Real>(fock_dim: usize) -> Result<Operator<T>> {
    if fock_dim < 2 {
        return Err(Error::InvalidFockDim(fock_dim));
    }
    let mut m = CMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        m[(n - 1, n)] = cplx(lit::<T>(n as f64).sqrt(), T::zero());
    }
    Operator::local(m)
}

/// Collective lowering operator `J = (g₁σ₁ + g₂σ₂)/g_ref` on the atomic
/// factors 0 and 1 of `layout`.
pub fn collective_j<T: Real>(g1: T, g2: T, g_ref: T, layout: &SpaceLayout) -> Result<Operator<T>> {
    if !(g_ref > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "g_ref",
            reason: "must be positive".into(),
        });
    }
    let s1 = sigma_lower::<T>(0, layout)?;
    let s2 = sigma_lower::<T>(1, layout)?;
    s1.scale(g1 / g_ref).add(&s2.scale(g2 / g_ref))
}

/// `J + J†`.
pub fn j_x<T: Real>(j: &Operator<T>) -> Operator<T> {
    let matrix = j.matrix() + j.matrix().adjoint();
    Operator {
        layout: j.layout.clone(),
        matrix,
    }
}

/// `σ₁†σ₁ − σ₂†σ₂`.
pub fn j_z<T: Real>(layout: &SpaceLayout) -> Result<Operator<T>> {
    excitation_number::<T>(0, layout)?.sub(&excitation_number(1, layout)?)
}
