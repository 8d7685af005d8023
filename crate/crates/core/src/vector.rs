//! Dense parameter vectors.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense vector of `f64` with a dimension fixed at construction.
///
/// Holds iterates, subgradients and momenta alike. Binary operations check
/// dimensions and return [`Error::DimensionMismatch`] instead of panicking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                actual: self.dim(),
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &ParamVector) -> Result<f64> {
        other.check_dim(self.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        vec_norm2(self)
    }

    pub fn norm2_squared(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    /// `‖self - other‖₂`.
    pub fn distance(&self, other: &ParamVector) -> Result<f64> {
        other.check_dim(self.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// In-place `self += a * x`.
    pub fn add_scaled(&mut self, a: f64, x: &ParamVector) -> Result<()> {
        x.check_dim(self.dim())?;
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += a * xi;
        }
        Ok(())
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.0 {
            *s *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> ParamVector {
        ParamVector(self.0.iter().map(|v| a * v).collect())
    }

    pub fn sub(&self, other: &ParamVector) -> Result<ParamVector> {
        vec_axpy(-1.0, other, self)
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for ParamVector {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

impl Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ParamVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Returns `a * x + y`.
pub fn vec_axpy(a: f64, x: &ParamVector, y: &ParamVector) -> Result<ParamVector> {
    y.check_dim(x.dim())?;
    Ok(ParamVector(
        x.0.iter().zip(&y.0).map(|(xi, yi)| a * xi + yi).collect(),
    ))
}

/// Euclidean norm, accumulated left to right without rescaling.
pub fn vec_norm2(x: &ParamVector) -> f64 {
    x.norm2_squared().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::from(v)
    }

    #[test]
    fn axpy_examples() {
        assert_eq!(
            vec_axpy(0.0, &pv(&[1.0, 2.0]), &pv(&[3.0, 4.0])).unwrap(),
            pv(&[3.0, 4.0])
        );
        assert_eq!(
            vec_axpy(1.0, &pv(&[1.0, 2.0]), &pv(&[0.0, 0.0])).unwrap(),
            pv(&[1.0, 2.0])
        );
        assert_eq!(
            vec_axpy(-0.5, &pv(&[2.0, 4.0]), &pv(&[1.0, 1.0])).unwrap(),
            pv(&[0.0, -1.0])
        );
    }

    #[test]
    fn axpy_rejects_mismatched_dims() {
        let err = vec_axpy(1.0, &pv(&[1.0]), &pv(&[1.0, 2.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                actual: 2
            }
        );
    }

    #[test]
    fn norm_examples() {
        assert_eq!(vec_norm2(&pv(&[0.0, 0.0, 0.0])), 0.0);
        assert_eq!(vec_norm2(&pv(&[3.0, 4.0])), 5.0);
        assert_eq!(vec_norm2(&pv(&[1.0, 1.0, 1.0, 1.0])), 2.0);
        assert_eq!(vec_norm2(&ParamVector::zeros(0)), 0.0);
    }

    proptest! {
        #[test]
        fn norm_squared_matches_self_dot(v in proptest::collection::vec(-1e3f64..1e3, 1..16)) {
            let x = ParamVector::new(v);
            let n = vec_norm2(&x);
            let d = x.dot(&x).unwrap();
            // 4 ulp of the larger magnitude
            let ulp = f64::EPSILON * d.max(n * n);
            prop_assert!((n * n - d).abs() <= 4.0 * ulp);
        }
    }
}
