//! Finite-dimensional real vectors tagged with the space they belong to.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Which of the two spaces of the composite problem a vector lives in.
///
/// `Primal` is the space of the unknown `x` (and of `z`); `Dual` is the
/// range of `L`, where `r` and the dual variable `v` live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Primal,
    Dual,
}

/// A vector of finite reals together with its space tag.
///
/// Arithmetic between two `VecR` values is only defined when both the tag and
/// the length agree; the checked operations below return an error otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct VecR {
    data: Vec<f64>,
    space: Space,
}

impl VecR {
    pub fn new(space: Space, data: Vec<f64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(alloc::format!("entry {i} is not finite")));
        }
        Ok(Self { data, space })
    }

    pub fn zeros(space: Space, len: usize) -> Self {
        Self {
            data: vec![0.0; len],
            space,
        }
    }

    pub fn primal(data: Vec<f64>) -> Result<Self> {
        Self::new(Space::Primal, data)
    }

    pub fn dual(data: Vec<f64>) -> Result<Self> {
        Self::new(Space::Dual, data)
    }

    /// Builds a vector without the finiteness scan. Used internally on
    /// values that were already checked.
    pub(crate) fn from_raw(space: Space, data: Vec<f64>) -> Self {
        Self { data, space }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        crate::error::check_len(self.len(), other.len())
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.compatible(other)?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            data,
            space: self.space,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            data,
            space: self.space,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            data: self.data.iter().map(|a| a * s).collect(),
            space: self.space,
        }
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.compatible(other)?;
        Ok(dist(&self.data, &other.data))
    }
}

impl AsRef<[f64]> for VecR {
    fn as_ref(&self) -> &[f64] {
        &self.data
    }
}

// Slice kernels shared by the rest of the crate.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sq(x: f64) -> f64 {
    x * x
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(norm_sq(a))
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `y += s * x`
pub(crate) fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub(crate) fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert!(VecR::primal(vec![1.0, f64::NAN]).is_err());
        assert!(VecR::dual(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn arithmetic_requires_matching_space_and_length() {
        let a = VecR::primal(vec![1.0, 2.0]).unwrap();
        let b = VecR::dual(vec![1.0, 2.0]).unwrap();
        let c = VecR::primal(vec![1.0]).unwrap();
        assert_eq!(a.checked_add(&b), Err(Error::SpaceMismatch));
        assert!(matches!(
            a.checked_sub(&c),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = a.checked_add(&a).unwrap();
        assert_eq!(s.as_slice(), &[2.0, 4.0]);
        assert_eq!(a.dot(&a).unwrap(), 5.0);
    }
}
