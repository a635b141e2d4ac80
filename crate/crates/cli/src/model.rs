//! A two-layer perceptron over flattened pixels: the smallest trainable
//! model that can exercise every mixing policy, including latent mixing at
//! its single hidden layer.

use mixforge_core::{cross_entropy, ImageTensor, LabelVector, Prediction, SeedSplit};
use rand::Rng;

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct TinyModel {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub num_classes: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// Gradient accumulator matching the model layout.
#[derive(Debug, Clone)]
pub struct Grads {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl TinyModel {
    /// Uniform `+-1/sqrt(fan_in)` init from the model's own seed substream.
    pub fn new(input_dim: usize, hidden_dim: usize, num_classes: usize, seed: u64) -> Self {
        let mut rng = SeedSplit::new(seed).pair(0);
        let bound1 = 1.0 / (input_dim as f64).sqrt();
        let w1 = (0..hidden_dim * input_dim).map(|_| rng.gen_range(-bound1..bound1)).collect();
        let bound2 = 1.0 / (hidden_dim as f64).sqrt();
        let w2 = (0..num_classes * hidden_dim).map(|_| rng.gen_range(-bound2..bound2)).collect();
        Self {
            input_dim,
            hidden_dim,
            num_classes,
            w1,
            b1: vec![0.0; hidden_dim],
            w2,
            b2: vec![0.0; num_classes],
        }
    }

    /// Hidden pre-activations `W1 x + b1`.
    fn pre_hidden(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.input_dim);
        let mut z = self.b1.clone();
        for (h, zh) in z.iter_mut().enumerate() {
            let row = &self.w1[h * self.input_dim..(h + 1) * self.input_dim];
            *zh += row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        z
    }

    /// ReLU features at the hidden hook point.
    pub fn hidden(&self, x: &[f64]) -> Vec<f64> {
        self.pre_hidden(x).into_iter().map(|z| z.max(0.0)).collect()
    }

    /// Softmax head over hidden features.
    pub fn head(&self, hidden: &[f64]) -> Prediction {
        let mut logits = self.b2.clone();
        for (k, zk) in logits.iter_mut().enumerate() {
            let row = &self.w2[k * self.hidden_dim..(k + 1) * self.hidden_dim];
            *zk += row.iter().zip(hidden).map(|(w, v)| w * v).sum::<f64>();
        }
        softmax(&logits)
    }

    pub fn forward(&self, x: &[f64]) -> Prediction {
        self.head(&self.hidden(x))
    }

    pub fn predict(&self, image: &ImageTensor) -> Prediction {
        self.forward(image.data())
    }

    pub fn zero_grads(&self) -> Grads {
        Grads {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; self.b1.len()],
            w2: vec![0.0; self.w2.len()],
            b2: vec![0.0; self.b2.len()],
        }
    }

    /// Accumulates the gradient of `CE(softmax(f(x)), y)` and returns the
    /// loss. `y` may be soft (a mixed label).
    pub fn accumulate(&self, x: &[f64], y: &LabelVector, grads: &mut Grads) -> Result<f64> {
        let z1 = self.pre_hidden(x);
        let h: Vec<f64> = z1.iter().map(|z| z.max(0.0)).collect();
        let pred = self.head(&h);
        let loss = cross_entropy(&pred, y)?;

        let dz2: Vec<f64> =
            pred.probs().iter().zip(y.probs()).map(|(p, yk)| p - yk).collect();
        for (k, d) in dz2.iter().enumerate() {
            grads.b2[k] += d;
            let row = &mut grads.w2[k * self.hidden_dim..(k + 1) * self.hidden_dim];
            for (slot, hv) in row.iter_mut().zip(&h) {
                *slot += d * hv;
            }
        }
        for (hi, &z) in z1.iter().enumerate() {
            if z <= 0.0 {
                continue;
            }
            let dh: f64 = dz2
                .iter()
                .enumerate()
                .map(|(k, d)| d * self.w2[k * self.hidden_dim + hi])
                .sum();
            grads.b1[hi] += dh;
            let row = &mut grads.w1[hi * self.input_dim..(hi + 1) * self.input_dim];
            for (slot, xv) in row.iter_mut().zip(x) {
                *slot += dh * xv;
            }
        }
        Ok(loss)
    }

    /// Accumulates the gradient of the latent-mix loss: hidden features of
    /// both sources are interpolated before the head, and the gradient
    /// flows back through both ReLU branches with weights `lambda` and
    /// `1 - lambda`.
    pub fn accumulate_latent_mix(
        &self,
        x_i: &[f64],
        x_j: &[f64],
        lambda: f64,
        y_mix: &LabelVector,
        grads: &mut Grads,
    ) -> Result<f64> {
        let z_i = self.pre_hidden(x_i);
        let z_j = self.pre_hidden(x_j);
        let h_mix: Vec<f64> = z_i
            .iter()
            .zip(&z_j)
            .map(|(a, b)| lambda * a.max(0.0) + (1.0 - lambda) * b.max(0.0))
            .collect();
        let pred = self.head(&h_mix);
        let loss = cross_entropy(&pred, y_mix)?;

        let dz2: Vec<f64> =
            pred.probs().iter().zip(y_mix.probs()).map(|(p, yk)| p - yk).collect();
        for (k, d) in dz2.iter().enumerate() {
            grads.b2[k] += d;
            let row = &mut grads.w2[k * self.hidden_dim..(k + 1) * self.hidden_dim];
            for (slot, hv) in row.iter_mut().zip(&h_mix) {
                *slot += d * hv;
            }
        }
        for hi in 0..self.hidden_dim {
            let dh: f64 = dz2
                .iter()
                .enumerate()
                .map(|(k, d)| d * self.w2[k * self.hidden_dim + hi])
                .sum();
            for (z, x, weight) in [(z_i[hi], x_i, lambda), (z_j[hi], x_j, 1.0 - lambda)] {
                if z <= 0.0 || weight == 0.0 {
                    continue;
                }
                let d = dh * weight;
                grads.b1[hi] += d;
                let row = &mut grads.w1[hi * self.input_dim..(hi + 1) * self.input_dim];
                for (slot, xv) in row.iter_mut().zip(x) {
                    *slot += d * xv;
                }
            }
        }
        Ok(loss)
    }

    /// SGD step on gradients accumulated over `count` samples.
    pub fn apply_grads(&mut self, grads: &Grads, learning_rate: f64, count: usize) {
        let scale = learning_rate / count as f64;
        for (w, g) in self.w1.iter_mut().zip(&grads.w1) {
            *w -= scale * g;
        }
        for (w, g) in self.b1.iter_mut().zip(&grads.b1) {
            *w -= scale * g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grads.w2) {
            *w -= scale * g;
        }
        for (w, g) in self.b2.iter_mut().zip(&grads.b2) {
            *w -= scale * g;
        }
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn param(&self, idx: usize) -> f64 {
        let offsets = (self.w1.len(), self.b1.len(), self.w2.len());
        if idx < offsets.0 {
            self.w1[idx]
        } else if idx < offsets.0 + offsets.1 {
            self.b1[idx - offsets.0]
        } else if idx < offsets.0 + offsets.1 + offsets.2 {
            self.w2[idx - offsets.0 - offsets.1]
        } else {
            self.b2[idx - offsets.0 - offsets.1 - offsets.2]
        }
    }

    pub fn set_param(&mut self, idx: usize, value: f64) {
        let offsets = (self.w1.len(), self.b1.len(), self.w2.len());
        let slot = if idx < offsets.0 {
            &mut self.w1[idx]
        } else if idx < offsets.0 + offsets.1 {
            &mut self.b1[idx - offsets.0]
        } else if idx < offsets.0 + offsets.1 + offsets.2 {
            &mut self.w2[idx - offsets.0 - offsets.1]
        } else {
            &mut self.b2[idx - offsets.0 - offsets.1 - offsets.2]
        };
        *slot = value;
    }

    pub fn grad_at(&self, grads: &Grads, idx: usize) -> f64 {
        let offsets = (self.w1.len(), self.b1.len(), self.w2.len());
        if idx < offsets.0 {
            grads.w1[idx]
        } else if idx < offsets.0 + offsets.1 {
            grads.b1[idx - offsets.0]
        } else if idx < offsets.0 + offsets.1 + offsets.2 {
            grads.w2[idx - offsets.0 - offsets.1]
        } else {
            grads.b2[idx - offsets.0 - offsets.1 - offsets.2]
        }
    }

}

fn softmax(logits: &[f64]) -> Prediction {
    let peak = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - peak).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Prediction::new(exps.into_iter().map(|e| e / sum).collect())
        .expect("softmax output is a distribution")
}
