use std::fmt;

use crate::{Error, Result};

/// Tensor-product structure of a Hilbert space.
///
/// Factor 0 is the most significant index of the flattened basis, so for
/// `[2, 2]` the basis order is `(00, 01, 10, 11)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    factor_dims: Vec<usize>,
}

impl SpaceLayout {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&d) = factor_dims.iter().find(|&&d| d == 0) {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: d,
            });
        }
        Ok(Self { factor_dims })
    }

    /// Two atoms: `[2, 2]`.
    pub fn atoms() -> Self {
        Self {
            factor_dims: vec![2, 2],
        }
    }

    /// Two atoms and a cavity truncated to `fock_dim` levels.
    pub fn atoms_cavity(fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::InvalidFockDim(fock_dim));
        }
        Ok(Self {
            factor_dims: vec![2, 2, fock_dim],
        })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn factor_dim(&self, index: usize) -> Result<usize> {
        self.factor_dims
            .get(index)
            .copied()
            .ok_or(Error::FactorOutOfRange {
                index,
                factors: self.factor_dims.len(),
            })
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Layout made of the listed factors, in the given order.
    pub fn sub_layout(&self, keep: &[usize]) -> Result<Self> {
        let dims = keep
            .iter()
            .map(|&k| self.factor_dim(k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    /// Splits a flat basis index into per-factor indices.
    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factor_dims.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.factor_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    }

    pub fn flatten(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factor_dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub(crate) fn ensure_same(&self, other: &SpaceLayout) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.factor_dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_round_trips() {
        let layout = SpaceLayout::new(vec![2, 2, 3]).unwrap();
        assert_eq!(layout.total_dim(), 12);
        for i in 0..12 {
            assert_eq!(layout.flatten(&layout.unflatten(i)), i);
        }
        assert_eq!(layout.unflatten(5), vec![0, 1, 2]);
        assert_eq!(layout.unflatten(6), vec![1, 0, 0]);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(SpaceLayout::new(vec![]).is_err());
        assert!(SpaceLayout::new(vec![2, 0]).is_err());
        assert_eq!(
            SpaceLayout::atoms_cavity(1),
            Err(Error::InvalidFockDim(1))
        );
        assert!(SpaceLayout::atoms().factor_dim(2).is_err());
    }
}
