//! Classification losses and evaluation metrics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::label::LabelVector;

/// Probabilities are clamped here before any logarithm, so loss values are
/// finite and stable to reproduce.
pub const PROB_FLOOR: f64 = 1e-12;

/// A softmax output: a probability vector over classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    probs: Vec<f64>,
}

impl Prediction {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(CoreError::Empty("prediction has no classes".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
            return Err(CoreError::Param("probabilities must be finite and in [0, 1]".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(CoreError::Param(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Predicted class: largest probability, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = k;
            }
        }
        best
    }

    /// Confidence: the maximum probability.
    pub fn confidence(&self) -> f64 {
        self.probs[self.argmax()]
    }
}

/// Cross entropy `-sum_k y_k ln p_k` with the probability floor applied.
pub fn cross_entropy(pred: &Prediction, y: &LabelVector) -> Result<f64> {
    if pred.probs.len() != y.num_classes() {
        return Err(CoreError::Shape(format!(
            "prediction has {} classes but label has {}",
            pred.probs.len(),
            y.num_classes()
        )));
    }
    Ok(pred
        .probs
        .iter()
        .zip(y.probs())
        .map(|(p, yk)| -yk * p.max(PROB_FLOOR).ln())
        .sum())
}

/// Mixup cross entropy: the lambda-weighted sum of cross entropies against
/// both source labels. For any labels this equals cross entropy against the
/// linearly mixed label, since the loss is linear in the label.
pub fn mixup_cross_entropy(
    pred: &Prediction,
    y_i: &LabelVector,
    y_j: &LabelVector,
    lambda: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    Ok(lambda * cross_entropy(pred, y_i)? + (1.0 - lambda) * cross_entropy(pred, y_j)?)
}

/// Fraction of samples whose argmax matches the target class.
pub fn top1_accuracy(preds: &[Prediction], targets: &[usize]) -> Result<f64> {
    if preds.is_empty() {
        return Err(CoreError::Empty("no predictions".into()));
    }
    if preds.len() != targets.len() {
        return Err(CoreError::Shape(format!(
            "{} predictions vs {} targets",
            preds.len(),
            targets.len()
        )));
    }
    let correct = preds
        .iter()
        .zip(targets)
        .filter(|(p, t)| p.argmax() == **t)
        .count();
    Ok(correct as f64 / preds.len() as f64)
}

/// Expected calibration error over equal-width confidence bins on `[0, 1]`
/// (intervals closed on the right): the bin-weighted absolute gap between
/// accuracy and mean confidence. Empty bins contribute nothing.
pub fn ece(preds: &[Prediction], targets: &[usize], bins: usize) -> Result<f64> {
    if preds.is_empty() {
        return Err(CoreError::Empty("no predictions".into()));
    }
    if preds.len() != targets.len() {
        return Err(CoreError::Shape(format!(
            "{} predictions vs {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if bins == 0 {
        return Err(CoreError::Param("bins must be >= 1".into()));
    }
    let mut count = vec![0usize; bins];
    let mut conf_sum = vec![0.0; bins];
    let mut hit_sum = vec![0.0; bins];
    for (pred, target) in preds.iter().zip(targets) {
        let conf = pred.confidence();
        let bin = ((conf * bins as f64).ceil() as usize).clamp(1, bins) - 1;
        count[bin] += 1;
        conf_sum[bin] += conf;
        if pred.argmax() == *target {
            hit_sum[bin] += 1.0;
        }
    }
    let n = preds.len() as f64;
    let mut total = 0.0;
    for b in 0..bins {
        if count[b] == 0 {
            continue;
        }
        let weight = count[b] as f64 / n;
        let acc = hit_sum[b] / count[b] as f64;
        let conf = conf_sum[b] / count[b] as f64;
        total += weight * (acc - conf).abs();
    }
    Ok(total)
}
