//! Deterministic, seedable mixup augmentation engine.
//!
//! Mixing creates virtual training samples by combining two images and
//! their one-hot labels. This crate implements the shared machinery --
//! Beta-distributed ratio draws, in-batch pairing, and linear label mixing
//! -- together with a catalog of sample-mixing policies: convex
//! interpolation, rectangle/grid/soft/spectral/resize cutting,
//! saliency-guided cutting, and saliency-maximizing block transport.
//! Classification losses and calibration metrics round out the toolkit.
//!
//! The crate is `no_std` (with `alloc`): it performs no IO and every
//! randomized operation is a pure function of its inputs and an explicit
//! seed substream, so batches can be mixed in parallel with reproducible
//! results. File formats, dataset ingestion, and the training harness live
//! in the companion `mixforge` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assignment;
pub mod error;
mod fft;
pub mod image;
pub mod label;
pub mod mask;
pub mod objective;
pub mod policy;
pub mod puzzle;
pub mod rng;
pub mod saliency;
pub mod sampling;

pub use error::{CoreError, Result};
pub use image::ImageTensor;
pub use label::{mix_labels_linear, LabelVector};
pub use mask::{
    apply_mask, corrected_lambda, fourier_mask, grid_mask, rect_mask, resize_paste_mask,
    smooth_mask, MixMask, RectSpec,
};
pub use objective::{cross_entropy, ece, mixup_cross_entropy, top1_accuracy, Prediction};
pub use policy::{
    apply_policy, guided_cut, manifold_mix, mix_pair, mix_pair_at, mixup_pair, resizemix_pair,
    FeatureTensor, MixResult, PolicyConfig, PolicyKind, PolicyParams,
};
pub use puzzle::{optimize_block_mask, puzzle_mix, transport_blocks, BlockGrid, TransportPlan};
pub use rng::{derive_seed, SeedSplit};
pub use saliency::{
    block_reduce, sobel_saliency, spectral_residual_saliency, BlockSaliency, SaliencyDetector,
    SaliencyMap,
};
pub use sampling::{make_pairs, sample_lambda, MixRatio, PairIndex};
