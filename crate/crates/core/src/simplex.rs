//! Points of the standard simplex.
//!
//! Every strategy weight vector in the crate travels as a [`SimplexVector`],
//! so downstream code can assume non-negative components summing to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the component sum of a simplex vector.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Norms below this are treated as an exact zero by [`make_simplex`].
pub const ZERO_NORM: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates `weights` as a simplex point without renormalizing.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_components(&weights)?;
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() || (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "simplex dimension must be positive");
        Self(vec![1.0 / n as f64; n])
    }

    /// The vertex `e_index` of the simplex in `R^n`.
    pub fn vertex(n: usize, index: usize) -> Self {
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        Self(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `(1 - eps) * self + eps * other`, exact at `eps = 0` and `eps = 1`.
    pub fn mix(&self, other: &SimplexVector, eps: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidStrategy(format!(
                "mixing weight {eps} outside [0, 1]"
            )));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        if eps == 1.0 {
            return Ok(other.clone());
        }
        let w = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (1.0 - eps) * a + eps * b)
            .collect();
        Self::new(w)
    }

    pub fn min_component(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Squared Euclidean distance.
    pub fn dist2(&self, other: &SimplexVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl std::ops::Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<'de> Deserialize<'de> for SimplexVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Vec::<f64>::deserialize(d)?;
        SimplexVector::new(w).map_err(serde::de::Error::custom)
    }
}

fn check_components(raw: &[f64]) -> Result<()> {
    match raw.iter().position(|x| !x.is_finite() || *x < 0.0) {
        Some(index) => Err(Error::InvalidWeight {
            index,
            value: raw[index],
        }),
        None => Ok(()),
    }
}

/// Projects a non-negative vector onto the simplex by l1 normalization.
///
/// A vector with zero norm maps to the uniform point `(1/N, ..., 1/N)`.
pub fn make_simplex(raw: &[f64]) -> Result<SimplexVector> {
    check_components(raw)?;
    if raw.is_empty() {
        return Err(Error::Dimension {
            expected: 1,
            got: 0,
        });
    }
    let norm: f64 = raw.iter().sum();
    if !norm.is_finite() {
        return Err(Error::NonFinite("simplex norm overflowed".into()));
    }
    if norm < ZERO_NORM {
        return Ok(SimplexVector::uniform(raw.len()));
    }
    Ok(SimplexVector(raw.iter().map(|x| x / norm).collect()))
}
