//! Real-valued functions on the points of a space, with optional core masks
//! that zero out values near a truncation boundary.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    values: Vec<f64>,
    mask: Option<Vec<bool>>,
}

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.iter().all(|v| v.is_finite()), "field values must be finite");
        Self { values, mask: None }
    }

    /// Zeroes values outside the mask and remembers the mask.
    pub fn with_mask(mut values: Vec<f64>, mask: &[bool]) -> Self {
        assert_eq!(values.len(), mask.len());
        for (v, &keep) in values.iter_mut().zip(mask) {
            if !keep {
                *v = 0.0;
            }
        }
        Self {
            values,
            mask: Some(mask.to_vec()),
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::new(vec![value; n])
    }

    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut values = vec![0.0; n];
        for &i in set {
            values[i] = 1.0;
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn lp_norm(&self, p: f64, mass: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(mass)
            .map(|(v, m)| v.abs().powf(p) * m)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Essential oscillation; on a finite space just `max - min`.
    pub fn oscillation(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn is_constant(&self, tol: f64) -> bool {
        self.oscillation() <= tol
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            values: self.values.iter().map(|v| c * v).collect(),
            mask: self.mask.clone(),
        }
    }

    pub fn plus(&self, other: &Field) -> Field {
        Field::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn minus(&self, other: &Field) -> Field {
        Field::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn times(&self, other: &Field) -> Field {
        Field::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    pub fn abs(&self) -> Field {
        Field::new(self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn shifted(&self, c: f64) -> Field {
        Field::new(self.values.iter().map(|v| v + c).collect())
    }

    /// Dyadic truncation `(f - 2^k)_+ /\ 2^k`.
    pub fn truncate_dyadic(&self, k: i32) -> Field {
        let level = 2f64.powi(k);
        Field::new(
            self.values
                .iter()
                .map(|v| (v - level).max(0.0).min(level))
                .collect(),
        )
    }

    /// Strict superlevel set `{f > lambda}`.
    pub fn level_set(&self, lambda: f64) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > lambda)
            .map(|(i, _)| i)
            .collect()
    }
}
