//! Context vector shared by every module.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("feature vector entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("feature vector has dimension {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Real-valued context of one round (one patient-hour or one synthetic draw).
///
/// Entries are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FeatureError> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn check_dim(&self, expected: usize) -> Result<(), FeatureError> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(FeatureError::DimensionMismatch {
                got: self.dim(),
                expected,
            })
        }
    }

    /// Dot product against a coefficient slice of the same dimension.
    pub fn dot(&self, coefs: &[f64]) -> f64 {
        debug_assert_eq!(self.dim(), coefs.len());
        self.0.iter().zip(coefs).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Index<usize> for FeatureVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
