//! Label vectors and linear label mixing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};

const SUM_TOL: f64 = 1e-6;

/// A length-K probability vector over classes: one-hot for raw dataset
/// labels, soft after mixing.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVector {
    probs: Vec<f64>,
}

impl LabelVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(CoreError::Empty("label vector has no classes".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(CoreError::Param("label weights must be finite and >= 0".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(CoreError::Param(format!("label weights sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn one_hot(num_classes: usize, class: usize) -> Result<Self> {
        if class >= num_classes {
            return Err(CoreError::Param(format!(
                "class {class} out of range for {num_classes} classes"
            )));
        }
        let mut probs = vec![0.0; num_classes];
        probs[class] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_classes(&self) -> usize {
        self.probs.len()
    }

    /// Index of the largest weight, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = k;
            }
        }
        best
    }
}

/// Linear label interpolation: `lambda * y_i + (1 - lambda) * y_j`.
///
/// `lambda` is the weight of the first label; area-corrected weights from
/// cut-based masks go through this same rule.
pub fn mix_labels_linear(y_i: &LabelVector, y_j: &LabelVector, lambda: f64) -> Result<LabelVector> {
    if y_i.num_classes() != y_j.num_classes() {
        return Err(CoreError::Shape(format!(
            "label lengths differ: {} vs {}",
            y_i.num_classes(),
            y_j.num_classes()
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    let probs = y_i
        .probs
        .iter()
        .zip(&y_j.probs)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    Ok(LabelVector { probs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_labels_are_a_fixed_point() {
        let y = LabelVector::one_hot(5, 3).unwrap();
        let mixed = mix_labels_linear(&y, &y, 0.7).unwrap();
        assert_eq!(mixed, y);
    }

    #[test]
    fn boundary_lambda_returns_first_label() {
        let a = LabelVector::one_hot(4, 0).unwrap();
        let b = LabelVector::one_hot(4, 1).unwrap();
        assert_eq!(mix_labels_linear(&a, &b, 1.0).unwrap(), a);
        assert_eq!(mix_labels_linear(&a, &b, 0.0).unwrap(), b);
    }

    #[test]
    fn quarter_mix_of_onehots() {
        let a = LabelVector::one_hot(4, 0).unwrap();
        let b = LabelVector::one_hot(4, 1).unwrap();
        let mixed = mix_labels_linear(&a, &b, 0.25).unwrap();
        assert_eq!(mixed.probs(), &[0.25, 0.75, 0.0, 0.0]);
    }

    #[test]
    fn rejects_mismatched_lengths_and_bad_values() {
        let a = LabelVector::one_hot(3, 0).unwrap();
        let b = LabelVector::one_hot(4, 0).unwrap();
        assert!(matches!(mix_labels_linear(&a, &b, 0.5), Err(CoreError::Shape(_))));
        assert!(LabelVector::new(vec![0.5, 0.6]).is_err());
        assert!(LabelVector::new(vec![-0.1, 1.1]).is_err());
        assert!(LabelVector::new(vec![]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        let y = LabelVector::new(vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(y.argmax(), 0);
    }
}
