use nalgebra::{ComplexField, SymmetricEigen};

use crate::qops::{Ket, Operator, SpaceLayout};
use crate::{lit, tol, to_f64, CMatrix, Complex, Error, Real, Result};

/// Acceptance thresholds used when wrapping a matrix as a [`DensityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTolerances {
    pub trace: f64,
    pub hermiticity: f64,
    pub positivity: f64,
}

impl DensityTolerances {
    /// Thresholds for freshly prepared states.
    pub const STRICT: Self = Self {
        trace: 1e-9,
        hermiticity: 1e-12,
        positivity: 1e-9,
    };

    /// Thresholds for states produced by numerical integration.
    pub const EVOLVED: Self = Self {
        trace: 1e-6,
        hermiticity: 1e-8,
        positivity: 1e-6,
    };
}

/// Unit-trace, Hermitian, positive semidefinite matrix on a [`SpaceLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    layout: SpaceLayout,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(layout: SpaceLayout, matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerances(layout, matrix, DensityTolerances::STRICT)
    }

    pub fn with_tolerances(
        layout: SpaceLayout,
        matrix: CMatrix<T>,
        tolerances: DensityTolerances,
    ) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let rho = Self { layout, matrix };
        rho.check(tolerances)?;
        Ok(rho)
    }

    /// Wraps a matrix already known to be a state up to integration drift.
    pub(crate) fn from_raw(layout: SpaceLayout, matrix: CMatrix<T>) -> Self {
        debug_assert_eq!(layout.total_dim(), matrix.nrows());
        Self { layout, matrix }
    }

    pub fn pure(ket: &Ket<T>) -> Result<Self> {
        Self::new(ket.layout().clone(), ket.normalized().projector())
    }

    /// `I/d`.
    pub fn maximally_mixed(layout: &SpaceLayout) -> Self {
        let d = layout.total_dim();
        let w = T::one() / lit::<T>(d as f64);
        Self {
            layout: layout.clone(),
            matrix: CMatrix::from_diagonal_element(d, d, Complex::new(w, T::zero())),
        }
    }

    /// `ρ_a ⊗ ρ_b`.
    pub fn product(&self, other: &DensityMatrix<T>) -> Result<Self> {
        let mut dims = self.layout.factor_dims().to_vec();
        dims.extend_from_slice(other.layout.factor_dims());
        Ok(Self {
            layout: SpaceLayout::new(dims)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn check(&self, tolerances: DensityTolerances) -> Result<()> {
        let trace = self.trace();
        if (trace.re - T::one()).abs() > tol(tolerances.trace)
            || trace.im.abs() > tol(tolerances.trace)
        {
            return Err(Error::NotADensityMatrix(format!(
                "trace {} + {}i",
                to_f64(trace.re),
                to_f64(trace.im)
            )));
        }
        let defect = max_abs(&(&self.matrix - self.matrix.adjoint()));
        if defect > tol(tolerances.hermiticity) {
            return Err(Error::NotADensityMatrix(format!(
                "hermiticity defect {:e}",
                to_f64(defect)
            )));
        }
        let min_eig = self
            .eigenvalues()
            .into_iter()
            .reduce(|a, b| a.min(b))
            .unwrap_or(T::zero());
        if min_eig < -tol::<T>(tolerances.positivity) {
            return Err(Error::NotADensityMatrix(format!(
                "negative eigenvalue {:e}",
                to_f64(min_eig)
            )));
        }
        Ok(())
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

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.norm_squared()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_ket(&self, ket: &Ket<T>) -> Result<T> {
        self.layout.ensure_same(ket.layout())?;
        let v = ket.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }

    /// `tr(Aρ)`.
    pub fn expectation(&self, op: &Operator<T>) -> Result<Complex<T>> {
        self.layout.ensure_same(op.layout())?;
        Ok((op.matrix() * &self.matrix).trace())
    }
}

fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// Eigenvalues of `(m + m†)/2`, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let half = lit::<T>(0.5);
    let h = (m + m.adjoint()).map(|z| z * half);
    let mut ev: Vec<T> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Hermitian square root of a positive semidefinite matrix. Negative
/// eigenvalues from round-off are clamped to zero.
pub fn hermitian_sqrt<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = lit::<T>(0.5);
    let h = (m + m.adjoint()).map(|z| z * half);
    let eig = SymmetricEigen::new(h);
    let roots = eig
        .eigenvalues
        .map(|l| Complex::new(l.max(T::zero()).sqrt(), T::zero()));
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&roots) * v.adjoint()
}

/// `D[a]ρ = aρa† − ½(a†aρ + ρa†a)` on raw matrices.
pub fn dissipator_matrix<T: Real>(a: &CMatrix<T>, rho: &CMatrix<T>) -> CMatrix<T> {
    let ad = a.adjoint();
    let ada = &ad * a;
    let half = lit::<T>(0.5);
    a * rho * &ad - (&ada * rho + rho * &ada).map(|z| z * half)
}

/// Lindblad dissipator `D[a]ρ`. The result is traceless.
pub fn dissipator<T: Real>(a: &Operator<T>, rho: &DensityMatrix<T>) -> Result<CMatrix<T>> {
    a.layout().ensure_same(rho.layout())?;
    Ok(dissipator_matrix(a.matrix(), rho.matrix()))
}

/// Partial trace over every factor not in `keep`. Kept factors stay in
/// ascending order.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    let (layout, matrix) = partial_trace_matrix(rho.layout(), rho.matrix(), keep)?;
    Ok(DensityMatrix::from_raw(layout, matrix))
}

pub fn partial_trace_matrix<T: Real>(
    layout: &SpaceLayout,
    matrix: &CMatrix<T>,
    keep: &[usize],
) -> Result<(SpaceLayout, CMatrix<T>)> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let reduced = layout.sub_layout(&kept)?;
    let traced: Vec<usize> = (0..layout.num_factors())
        .filter(|f| !kept.contains(f))
        .collect();

    let d = layout.total_dim();
    let digits: Vec<Vec<usize>> = (0..d).map(|i| layout.unflatten(i)).collect();
    let project = |dig: &[usize], factors: &[usize]| -> Vec<usize> {
        factors.iter().map(|&f| dig[f]).collect()
    };
    let kept_index: Vec<usize> = digits
        .iter()
        .map(|dig| reduced.flatten(&project(dig, &kept)))
        .collect();
    let traced_key: Vec<Vec<usize>> = digits.iter().map(|dig| project(dig, &traced)).collect();

    let dr = reduced.total_dim();
    let mut out = CMatrix::zeros(dr, dr);
    for i in 0..d {
        for j in 0..d {
            if traced_key[i] == traced_key[j] {
                out[(kept_index[i], kept_index[j])] += matrix[(i, j)];
            }
        }
    }
    Ok((reduced, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::sigma_lower;
    use crate::CVector;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn bell() -> DensityMatrix<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ket = Ket::new(
            SpaceLayout::atoms(),
            CVector::from_vec(vec![c(0.0), c(h), c(-h), c(0.0)]),
        )
        .unwrap();
        DensityMatrix::pure(&ket).unwrap()
    }

    #[test]
    fn validation() {
        let layout = SpaceLayout::single(2).unwrap();
        let bad_trace = CMatrix::from_diagonal_element(2, 2, c(0.6));
        assert!(DensityMatrix::new(layout.clone(), bad_trace).is_err());
        let mut non_herm = CMatrix::from_diagonal_element(2, 2, c(0.5));
        non_herm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(layout.clone(), non_herm).is_err());
        let negative = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(layout.clone(), negative).is_err());
        assert!(DensityMatrix::new(layout, CMatrix::from_diagonal_element(3, 3, c(1.0 / 3.0))).is_err());
    }

    #[test]
    fn dissipator_zero_operator() {
        let layout = SpaceLayout::single(2).unwrap();
        let zero = Operator::<f64>::zeros(&layout);
        let rho = DensityMatrix::maximally_mixed(&layout);
        assert_eq!(dissipator(&zero, &rho).unwrap(), CMatrix::zeros(2, 2));
    }

    #[test]
    fn dissipator_decay_of_excited_state() {
        let layout = SpaceLayout::single(2).unwrap();
        let s = sigma_lower::<f64>(0, &layout).unwrap();
        let down = DensityMatrix::pure(&Ket::basis(&layout, 1).unwrap()).unwrap();
        let out = dissipator(&s, &down).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        assert_eq!(out, expected);
        let other = SpaceLayout::atoms();
        assert!(dissipator(&s, &DensityMatrix::maximally_mixed(&other)).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let b = bell();
        let vac = DensityMatrix::pure(&Ket::basis(&SpaceLayout::single(3).unwrap(), 0).unwrap()).unwrap();
        let full = b.product(&vac).unwrap();
        assert_eq!(full.layout().factor_dims(), &[2, 2, 3]);
        let atoms = partial_trace(&full, &[0, 1]).unwrap();
        assert!((atoms.matrix() - b.matrix()).norm() < 1e-15);
        let one = partial_trace(&b, &[0]).unwrap();
        let mixed = CMatrix::from_diagonal_element(2, 2, c(0.5));
        assert!((one.matrix() - mixed).norm() < 1e-15);
        assert!((one.trace() - c(1.0)).norm() < 1e-15);
        assert_eq!(partial_trace(&b, &[]), Err(Error::EmptySelection));
    }

    #[test]
    fn partial_trace_keeps_cavity_factor() {
        let up = DensityMatrix::<f64>::pure(&Ket::basis(&SpaceLayout::atoms(), 0).unwrap()).unwrap();
        let cav = DensityMatrix::maximally_mixed(&SpaceLayout::single(3).unwrap());
        let full = up.product(&cav).unwrap();
        let reduced = partial_trace(&full, &[2]).unwrap();
        assert!((reduced.matrix() - cav.matrix()).norm() < 1e-15);
    }

    #[test]
    fn purity_and_sqrt() {
        assert!((bell().purity() - 1.0).abs() < 1e-15);
        let mm = DensityMatrix::<f64>::maximally_mixed(&SpaceLayout::atoms());
        assert!((mm.purity() - 0.25).abs() < 1e-15);
        let r = hermitian_sqrt(bell().matrix());
        assert!((&r * &r - bell().matrix()).norm() < 1e-12);
    }
}
