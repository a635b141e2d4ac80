//! Mini-batch SGD on the mixup cross-entropy objective.
//!
//! Determinism contract: everything except wall-clock time is a pure
//! function of the config (seed included). Seeds are split hierarchically --
//! model init, per-epoch shuffling/flips, and one mixing seed per step --
//! so per-pair substreams stay independent of batch iteration order.

use std::path::PathBuf;
use std::time::Instant;

use mixforge_core::{
    derive_seed, ece, make_pairs, mix_labels_linear, sample_lambda, top1_accuracy, ImageTensor,
    LabelVector, PolicyConfig, PolicyKind, Prediction, SeedSplit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{read_cifar, read_image_dir, synth_dataset, CifarVariant, Dataset, Split, SynthSpec};
use crate::error::{DeskError, Result};
use crate::model::TinyModel;

const SEED_TAG_INIT: u64 = 1;
const SEED_TAG_TRAIN_DATA: u64 = 2;
const SEED_TAG_TEST_DATA: u64 = 3;
const SEED_TAG_EPOCH: u64 = 0x10000;
const SEED_TAG_STEP: u64 = 0x2000_0000;

/// Number of bins in the realized-lambda histogram.
pub const LAMBDA_HIST_BINS: usize = 20;

/// Where the training data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetRef {
    Synth(SynthSpec),
    Cifar {
        variant: CifarVariant,
        dir: PathBuf,
        train_limit: Option<usize>,
        test_limit: Option<usize>,
    },
    Dirs { train: PathBuf, test: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dataset: DatasetRef,
    pub policy: PolicyConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Evaluate the test split every this many epochs; 0 means final only.
    pub eval_every: usize,
    pub hidden_dim: usize,
    /// Horizontal flip with probability 1/2 at batch assembly.
    pub flip_augment: bool,
    /// When > 0, the reported accuracy is the median test accuracy over the
    /// last k evaluated epochs instead of the final one.
    pub median_last_k: usize,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.hidden_dim == 0 {
            return Err(DeskError::Config(
                "epochs, batch_size, and hidden_dim must be positive".into(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(DeskError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        self.policy.validate()?;
        Ok(())
    }
}

/// Metrics of one training run. Every field except `wall_seconds` is
/// deterministic given the config.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub train_loss: Vec<f64>,
    pub test_acc_history: Vec<(usize, f64)>,
    pub final_test_acc: f64,
    pub final_train_acc: f64,
    pub final_ece: f64,
    /// Final-epoch accuracy, or the median over the last k evaluations when
    /// the config requests it.
    pub reported_test_acc: f64,
    pub lambda_hist: Vec<u64>,
    pub wall_seconds: f64,
}

impl RunReport {
    /// Equality over the seeded metrics, ignoring wall-clock time.
    pub fn same_metrics(&self, other: &RunReport) -> bool {
        self.train_loss == other.train_loss
            && self.test_acc_history == other.test_acc_history
            && self.final_test_acc == other.final_test_acc
            && self.final_train_acc == other.final_train_acc
            && self.final_ece == other.final_ece
            && self.reported_test_acc == other.reported_test_acc
            && self.lambda_hist == other.lambda_hist
    }
}

/// Loads the train/test pair behind a dataset reference. Synthetic test
/// splits are noise-free and a quarter of the train size.
pub fn load_dataset(cfg: &TrainConfig) -> Result<(Dataset, Dataset)> {
    match &cfg.dataset {
        DatasetRef::Synth(spec) => {
            let train = synth_dataset(spec, derive_seed(cfg.seed, SEED_TAG_TRAIN_DATA))?;
            let test_spec = SynthSpec {
                n: (spec.n / 4).max(spec.k),
                label_noise: 0.0,
                ..*spec
            };
            let mut test = synth_dataset(&test_spec, derive_seed(cfg.seed, SEED_TAG_TEST_DATA))?;
            test.split = Split::Test;
            Ok((train, test))
        }
        DatasetRef::Cifar { variant, dir, train_limit, test_limit } => {
            let mut train = read_cifar(dir, *variant, Split::Train)?;
            let mut test = read_cifar(dir, *variant, Split::Test)?;
            if let Some(limit) = train_limit {
                train.truncate(*limit);
            }
            if let Some(limit) = test_limit {
                test.truncate(*limit);
            }
            Ok((train, test))
        }
        DatasetRef::Dirs { train, test } => {
            Ok((read_image_dir(train, Split::Train)?, read_image_dir(test, Split::Test)?))
        }
    }
}

fn predictions(model: &TinyModel, data: &Dataset) -> Vec<Prediction> {
    data.images.iter().map(|img| model.predict(img)).collect()
}

fn hist_slot(lambda: f64) -> usize {
    ((lambda * LAMBDA_HIST_BINS as f64) as usize).min(LAMBDA_HIST_BINS - 1)
}

/// Trains a fresh model under the configured mixing policy and reports the
/// run metrics.
pub fn train(cfg: &TrainConfig) -> Result<RunReport> {
    cfg.validate()?;
    let started = Instant::now();
    let (train_set, test_set) = load_dataset(cfg)?;
    if train_set.is_empty() || test_set.is_empty() {
        return Err(DeskError::Config("empty dataset".into()));
    }
    let (h, w, c) = train_set.images[0].shape();
    let input_dim = h * w * c;
    let mut model = TinyModel::new(
        input_dim,
        cfg.hidden_dim,
        train_set.num_classes,
        derive_seed(cfg.seed, SEED_TAG_INIT),
    );

    let latent_mixing =
        cfg.policy.kind == PolicyKind::Manifoldmix && cfg.policy.params.layer == 1;
    let mut train_loss = Vec::with_capacity(cfg.epochs);
    let mut test_acc_history = Vec::new();
    let mut lambda_hist = vec![0u64; LAMBDA_HIST_BINS];
    let eval_every = if cfg.eval_every == 0 { cfg.epochs } else { cfg.eval_every };
    let mut global_step = 0u64;

    for epoch in 0..cfg.epochs {
        let mut epoch_rng =
            ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SEED_TAG_EPOCH + epoch as u64));
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        for i in (1..order.len()).rev() {
            let j = epoch_rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let flips: Vec<bool> = (0..order.len())
            .map(|_| cfg.flip_augment && epoch_rng.gen_range(0.0..1.0) < 0.5)
            .collect();

        let mut epoch_loss = 0.0;
        let mut epoch_batches = 0usize;
        for (chunk_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let images: Vec<ImageTensor> = chunk
                .iter()
                .enumerate()
                .map(|(slot, &i)| {
                    let img = &train_set.images[i];
                    if flips[chunk_idx * cfg.batch_size + slot] {
                        img.flip_horizontal()
                    } else {
                        img.clone()
                    }
                })
                .collect();
            let labels: Vec<LabelVector> = chunk.iter().map(|&i| train_set.one_hot(i)).collect();
            let mix_seed = SeedSplit::new(derive_seed(cfg.seed, SEED_TAG_STEP + global_step));

            let mut grads = model.zero_grads();
            let mut batch_loss = 0.0;
            if latent_mixing {
                let pairs = make_pairs(images.len(), &mut mix_seed.batch())?;
                for (ordinal, pair) in pairs.iter().enumerate() {
                    let mut rng = mix_seed.pair(ordinal as u64);
                    let lambda = sample_lambda(cfg.policy.alpha, &mut rng)?.lambda;
                    let y_mix = mix_labels_linear(&labels[pair.i], &labels[pair.j], lambda)?;
                    batch_loss += model.accumulate_latent_mix(
                        images[pair.i].data(),
                        images[pair.j].data(),
                        lambda,
                        &y_mix,
                        &mut grads,
                    )?;
                    lambda_hist[hist_slot(lambda)] += 1;
                }
            } else {
                let results = mixforge_core::apply_policy(&cfg.policy, &images, &labels, mix_seed)?;
                for result in &results {
                    batch_loss +=
                        model.accumulate(result.image.data(), &result.label, &mut grads)?;
                    lambda_hist[hist_slot(result.lambda_effective)] += 1;
                }
            }
            let mean_loss = batch_loss / images.len() as f64;
            if !mean_loss.is_finite() {
                return Err(DeskError::Diverged { step: global_step as usize });
            }
            model.apply_grads(&grads, cfg.learning_rate, images.len());
            epoch_loss += mean_loss;
            epoch_batches += 1;
            global_step += 1;
        }
        train_loss.push(epoch_loss / epoch_batches as f64);

        if (epoch + 1) % eval_every == 0 || epoch + 1 == cfg.epochs {
            let acc = top1_accuracy(&predictions(&model, &test_set), &test_set.labels)?;
            test_acc_history.push((epoch + 1, acc));
        }
    }

    let test_preds = predictions(&model, &test_set);
    let final_test_acc = top1_accuracy(&test_preds, &test_set.labels)?;
    let final_ece = ece(&test_preds, &test_set.labels, 15)?;
    let final_train_acc =
        top1_accuracy(&predictions(&model, &train_set), &train_set.labels)?;
    let reported_test_acc = if cfg.median_last_k > 0 {
        let mut tail: Vec<f64> = test_acc_history
            .iter()
            .rev()
            .take(cfg.median_last_k)
            .map(|&(_, acc)| acc)
            .collect();
        tail.sort_by(|a, b| a.partial_cmp(b).expect("accuracies are finite"));
        tail[tail.len() / 2]
    } else {
        final_test_acc
    };

    Ok(RunReport {
        train_loss,
        test_acc_history,
        final_test_acc,
        final_train_acc,
        final_ece,
        reported_test_acc,
        lambda_hist,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}
