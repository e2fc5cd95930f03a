//! Dense vectors and positive diagonal matrices.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A finite real vector of fixed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("entries", "vector must have length >= 1"));
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "vector dimension must be positive");
        Self(vec![0.0; d])
    }

    pub fn filled(d: usize, value: f64) -> Self {
        assert!(d >= 1 && value.is_finite());
        Self(vec![value; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Callers must keep every entry finite.
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dot(&self, other: &[f64]) -> Result<f64> {
        check_dim(self.len(), other.len())?;
        Ok(dot(&self.0, other))
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.0
    }
}

/// Diagonal matrix with strictly positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMatrix {
    diag: DenseVector,
}

impl DiagonalMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        let diag = DenseVector::new(diag)?;
        if let Some(i) = diag.iter().position(|&h| h <= 0.0) {
            return Err(Error::invalid(
                "diag",
                format!("entry {i} is {} but must be strictly positive", diag[i]),
            ));
        }
        Ok(Self { diag })
    }

    pub fn identity(d: usize) -> Self {
        Self::scaled_identity(d, 1.0)
    }

    pub fn scaled_identity(d: usize, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite());
        Self {
            diag: DenseVector::filled(d, scale),
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `<z, H z>`
    pub fn norm_sq(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.dim(), z.len())?;
        Ok(weighted_norm_sq(&self.diag, z))
    }

    /// Solves `H d = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<DenseVector> {
        check_dim(self.dim(), rhs.len())?;
        DenseVector::new(rhs.iter().zip(self.diag.iter()).map(|(r, h)| r / h).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn weighted_norm_sq(h: &[f64], z: &[f64]) -> f64 {
    h.iter().zip(z).map(|(w, v)| w * v * v).sum()
}
