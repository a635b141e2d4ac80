//! The unified mixing-policy interface.
//!
//! Every policy turns a pair `(x_i, x_j)` and a ratio draw into a mixed
//! image plus a mixed label, and they all share one labeling rule: the label
//! weight is the realized fraction of pixels kept from the first sample
//! (`lambda` itself for interpolation, the mask mean for cutting).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{CoreError, Result};
use crate::image::ImageTensor;
use crate::label::{mix_labels_linear, LabelVector};
use crate::mask::{
    apply_mask, corrected_lambda, fourier_mask, grid_mask, rect_mask, resize_paste_mask,
    smooth_mask, MixMask, RectSpec,
};
use crate::puzzle::puzzle_mix;
use crate::rng::SeedSplit;
use crate::saliency::{SaliencyDetector, SaliencyMap};
use crate::sampling::{make_pairs, sample_lambda};

/// All supported mixing policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Vanilla,
    Mixup,
    Cutmix,
    Manifoldmix,
    Smoothmix,
    Gridmix,
    Resizemix,
    Fmix,
    Saliencymix,
    Guidedcut,
    Puzzlemix,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 11] = [
        PolicyKind::Vanilla,
        PolicyKind::Mixup,
        PolicyKind::Cutmix,
        PolicyKind::Manifoldmix,
        PolicyKind::Smoothmix,
        PolicyKind::Gridmix,
        PolicyKind::Resizemix,
        PolicyKind::Fmix,
        PolicyKind::Saliencymix,
        PolicyKind::Guidedcut,
        PolicyKind::Puzzlemix,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| CoreError::Config(format!("unknown policy '{s}'")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Vanilla => "vanilla",
            PolicyKind::Mixup => "mixup",
            PolicyKind::Cutmix => "cutmix",
            PolicyKind::Manifoldmix => "manifoldmix",
            PolicyKind::Smoothmix => "smoothmix",
            PolicyKind::Gridmix => "gridmix",
            PolicyKind::Resizemix => "resizemix",
            PolicyKind::Fmix => "fmix",
            PolicyKind::Saliencymix => "saliencymix",
            PolicyKind::Guidedcut => "guidedcut",
            PolicyKind::Puzzlemix => "puzzlemix",
        }
    }

    /// Parameter keys this policy accepts in `PolicyConfig::from_kv`.
    pub fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            PolicyKind::Fmix => &["decay"],
            PolicyKind::Gridmix => &["n_cells"],
            PolicyKind::Resizemix => &["tau_min", "tau_max"],
            PolicyKind::Saliencymix => &["detector"],
            PolicyKind::Puzzlemix => &["blocks", "max_shift", "detector"],
            PolicyKind::Manifoldmix => &["layer"],
            _ => &[],
        }
    }
}

/// Policy-specific knobs with their defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    /// Spectral decay of the Fourier mask filter.
    pub decay: f64,
    /// Cells per side for grid masks.
    pub n_cells: usize,
    /// Scale range for resize-paste.
    pub tau_min: f64,
    pub tau_max: f64,
    /// Blocks per side for block transport.
    pub blocks: usize,
    /// Chebyshev transport radius in blocks.
    pub max_shift: usize,
    /// Saliency detector for guided policies.
    pub detector: SaliencyDetector,
    /// Feature level for latent mixing: 0 mixes inputs, 1 the hidden layer.
    pub layer: usize,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            decay: 3.0,
            n_cells: 4,
            tau_min: 0.1,
            tau_max: 0.8,
            blocks: 4,
            max_shift: 1,
            detector: SaliencyDetector::Sobel,
            layer: 1,
        }
    }
}

/// A policy identifier plus everything needed to reproduce its behavior
/// from a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub alpha: f64,
    pub params: PolicyParams,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind, alpha: f64) -> Result<Self> {
        let cfg = Self { kind, alpha, params: PolicyParams::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds a config from string key/value pairs (CLI and config files).
    /// Keys not meaningful for the chosen policy are rejected.
    pub fn from_kv(kind: &str, alpha: f64, pairs: &[(String, String)]) -> Result<Self> {
        let kind = PolicyKind::parse(kind)?;
        let mut params = PolicyParams::default();
        for (key, value) in pairs {
            if !kind.allowed_keys().contains(&key.as_str()) {
                return Err(CoreError::Config(format!(
                    "policy '{}' does not accept parameter '{key}'",
                    kind.name()
                )));
            }
            let bad = |what: &str| CoreError::Config(format!("invalid {what} '{value}'"));
            match key.as_str() {
                "decay" => params.decay = value.parse().map_err(|_| bad("decay"))?,
                "n_cells" => params.n_cells = value.parse().map_err(|_| bad("n_cells"))?,
                "tau_min" => params.tau_min = value.parse().map_err(|_| bad("tau_min"))?,
                "tau_max" => params.tau_max = value.parse().map_err(|_| bad("tau_max"))?,
                "blocks" => params.blocks = value.parse().map_err(|_| bad("blocks"))?,
                "max_shift" => params.max_shift = value.parse().map_err(|_| bad("max_shift"))?,
                "detector" => params.detector = SaliencyDetector::parse(value)?,
                "layer" => params.layer = value.parse().map_err(|_| bad("layer"))?,
                _ => unreachable!("key validated against allowed_keys"),
            }
        }
        let cfg = Self { kind, alpha, params };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(CoreError::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        let p = &self.params;
        if p.decay.is_nan() || p.decay <= 0.0 {
            return Err(CoreError::Config(format!("decay must be positive, got {}", p.decay)));
        }
        if p.n_cells == 0 {
            return Err(CoreError::Config("n_cells must be >= 1".into()));
        }
        let tau_ok = 0.0 < p.tau_min && p.tau_min < p.tau_max && p.tau_max < 1.0;
        if !tau_ok {
            return Err(CoreError::Config(format!(
                "need 0 < tau_min < tau_max < 1, got [{}, {}]",
                p.tau_min, p.tau_max
            )));
        }
        if p.blocks == 0 {
            return Err(CoreError::Config("blocks must be >= 1".into()));
        }
        if p.layer > 1 {
            return Err(CoreError::Config(format!("layer must be 0 or 1, got {}", p.layer)));
        }
        Ok(())
    }
}

/// A mixed sample: the image, its soft label, the nominal ratio draw, the
/// realized label weight, and the mask that produced it (mask-based
/// policies only).
#[derive(Debug, Clone, PartialEq)]
pub struct MixResult {
    pub image: ImageTensor,
    pub label: LabelVector,
    pub lambda_nominal: f64,
    pub lambda_effective: f64,
    pub mask: Option<MixMask>,
}

/// An arbitrary-rank feature array with a leading batch-free shape; used for
/// latent-space mixing at a network's hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expect: usize = shape.iter().product();
        if shape.is_empty() || data.len() != expect {
            return Err(CoreError::Shape(format!(
                "feature data length {} != shape {:?}",
                data.len(),
                shape
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::Param("feature entries must be finite".into()));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Convex image interpolation `lambda * x_i + (1 - lambda) * x_j`.
pub fn mixup_pair(x_i: &ImageTensor, x_j: &ImageTensor, lambda: f64) -> Result<ImageTensor> {
    x_i.require_same_shape(x_j)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    let (h, w, c) = x_i.shape();
    let data = x_i
        .data()
        .iter()
        .zip(x_j.data())
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    Ok(ImageTensor::from_parts(h, w, c, data))
}

/// Elementwise interpolation of latent features of any rank.
pub fn manifold_mix(f_i: &FeatureTensor, f_j: &FeatureTensor, lambda: f64) -> Result<FeatureTensor> {
    if f_i.shape != f_j.shape {
        return Err(CoreError::Shape(format!(
            "feature shapes differ: {:?} vs {:?}",
            f_i.shape, f_j.shape
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    let data = f_i
        .data
        .iter()
        .zip(&f_j.data)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    Ok(FeatureTensor { shape: f_i.shape.clone(), data })
}

/// Cuts the CutMix-sized rectangle centered on the weight map's argmax out
/// of the donor `x_j` and pastes it at the identical location in `x_i`.
/// The weight map scores the donor; supplying an external map realizes
/// attention-guided cutting without a pretrained network.
pub fn guided_cut(
    x_i: &ImageTensor,
    x_j: &ImageTensor,
    y_i: &LabelVector,
    y_j: &LabelVector,
    weight: &SaliencyMap,
    lambda: f64,
) -> Result<MixResult> {
    x_i.require_same_shape(x_j)?;
    let (h, w, _) = x_i.shape();
    if weight.height() != h || weight.width() != w {
        return Err(CoreError::Shape(format!(
            "weight map {}x{} does not match image {h}x{w}",
            weight.height(),
            weight.width()
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    let ratio = (1.0 - lambda).sqrt();
    let cut_h = (h as f64 * ratio).round() as usize;
    let cut_w = (w as f64 * ratio).round() as usize;
    let (cy, cx) = weight.argmax();
    let rect = RectSpec { cx, cy, cut_w, cut_h };
    let (y0, y1, x0, x1) = rect.clipped_bounds(h, w);
    let mut weights = alloc::vec![1.0; h * w];
    for y in y0..y1 {
        for x in x0..x1 {
            weights[y * w + x] = 0.0;
        }
    }
    let mask = MixMask::new(h, w, weights)?;
    let image = apply_mask(x_i, x_j, &mask)?;
    let lambda_effective = corrected_lambda(&mask)?;
    let label = mix_labels_linear(y_i, y_j, lambda_effective)?;
    Ok(MixResult { image, label, lambda_nominal: lambda, lambda_effective, mask: Some(mask) })
}

/// Resizes the whole donor image into a random paste rectangle inside the
/// recipient. The paste area comes from the policy's own scale draw, so the
/// Beta ratio is recorded but does not shape the output.
#[allow(clippy::too_many_arguments)]
pub fn resizemix_pair<R: Rng + ?Sized>(
    x_i: &ImageTensor,
    x_j: &ImageTensor,
    y_i: &LabelVector,
    y_j: &LabelVector,
    lambda_nominal: f64,
    rng: &mut R,
    tau_min: f64,
    tau_max: f64,
) -> Result<MixResult> {
    x_i.require_same_shape(x_j)?;
    let tau_ok = 0.0 < tau_min && tau_min < tau_max && tau_max < 1.0;
    if !tau_ok {
        return Err(CoreError::Param(format!(
            "need 0 < tau_min < tau_max < 1, got [{tau_min}, {tau_max}]"
        )));
    }
    let (h, w, c) = x_i.shape();
    let tau = rng.gen_range(tau_min..tau_max);
    let (mask, rect) = resize_paste_mask(h, w, tau, rng)?;
    let mut image = x_i.clone();
    if rect.cut_h > 0 && rect.cut_w > 0 {
        let patch = x_j.bilinear_resize(rect.cut_h, rect.cut_w)?;
        let (y0, _, x0, _) = rect.clipped_bounds(h, w);
        for y in 0..rect.cut_h {
            for x in 0..rect.cut_w {
                for ch in 0..c {
                    image.set(y0 + y, x0 + x, ch, patch.get(y, x, ch));
                }
            }
        }
    }
    let lambda_effective = corrected_lambda(&mask)?;
    let label = mix_labels_linear(y_i, y_j, lambda_effective)?;
    Ok(MixResult { image, label, lambda_nominal, lambda_effective, mask: Some(mask) })
}

fn masked_result(
    x_i: &ImageTensor,
    x_j: &ImageTensor,
    y_i: &LabelVector,
    y_j: &LabelVector,
    lambda_nominal: f64,
    mask: MixMask,
) -> Result<MixResult> {
    let image = apply_mask(x_i, x_j, &mask)?;
    let lambda_effective = corrected_lambda(&mask)?;
    let label = mix_labels_linear(y_i, y_j, lambda_effective)?;
    Ok(MixResult { image, label, lambda_nominal, lambda_effective, mask: Some(mask) })
}

/// Mixes one pair at a fixed ratio. The generator only drives mask
/// geometry (and the resize policy's own scale draw); `weight` supplies the
/// external map required by `guidedcut` and overrides the detector for
/// `saliencymix` when present. `vanilla` returns the first sample.
#[allow(clippy::too_many_arguments)]
pub fn mix_pair_at<R: Rng + ?Sized>(
    cfg: &PolicyConfig,
    x_i: &ImageTensor,
    x_j: &ImageTensor,
    y_i: &LabelVector,
    y_j: &LabelVector,
    lambda: f64,
    weight: Option<&SaliencyMap>,
    rng: &mut R,
) -> Result<MixResult> {
    cfg.validate()?;
    x_i.require_same_shape(x_j)?;
    let (h, w, _) = x_i.shape();
    match cfg.kind {
        PolicyKind::Vanilla => Ok(MixResult {
            image: x_i.clone(),
            label: y_i.clone(),
            lambda_nominal: 1.0,
            lambda_effective: 1.0,
            mask: None,
        }),
        PolicyKind::Mixup | PolicyKind::Manifoldmix => Ok(MixResult {
            image: mixup_pair(x_i, x_j, lambda)?,
            label: mix_labels_linear(y_i, y_j, lambda)?,
            lambda_nominal: lambda,
            lambda_effective: lambda,
            mask: None,
        }),
        PolicyKind::Cutmix => {
            let (mask, _) = rect_mask(h, w, lambda, rng)?;
            masked_result(x_i, x_j, y_i, y_j, lambda, mask)
        }
        PolicyKind::Smoothmix => {
            let mask = smooth_mask(h, w, lambda, rng)?;
            masked_result(x_i, x_j, y_i, y_j, lambda, mask)
        }
        PolicyKind::Gridmix => {
            let mask = grid_mask(h, w, cfg.params.n_cells, lambda, rng)?;
            masked_result(x_i, x_j, y_i, y_j, lambda, mask)
        }
        PolicyKind::Fmix => {
            let mask = fourier_mask(h, w, lambda, cfg.params.decay, rng)?;
            masked_result(x_i, x_j, y_i, y_j, lambda, mask)
        }
        PolicyKind::Resizemix => resizemix_pair(
            x_i,
            x_j,
            y_i,
            y_j,
            lambda,
            rng,
            cfg.params.tau_min,
            cfg.params.tau_max,
        ),
        PolicyKind::Saliencymix => match weight {
            Some(map) => guided_cut(x_i, x_j, y_i, y_j, map, lambda),
            None => {
                let map = cfg.params.detector.compute(x_j);
                guided_cut(x_i, x_j, y_i, y_j, &map, lambda)
            }
        },
        PolicyKind::Guidedcut => {
            let map = weight.ok_or_else(|| {
                CoreError::Config(
                    "guidedcut needs an external weight map per pair; none was supplied".into(),
                )
            })?;
            guided_cut(x_i, x_j, y_i, y_j, map, lambda)
        }
        PolicyKind::Puzzlemix => puzzle_mix(
            x_i,
            x_j,
            y_i,
            y_j,
            lambda,
            cfg.params.blocks,
            cfg.params.max_shift,
            cfg.params.detector,
        ),
    }
}

/// Draws the ratio from the pair's stream, then mixes at it.
pub fn mix_pair<R: Rng + ?Sized>(
    cfg: &PolicyConfig,
    x_i: &ImageTensor,
    x_j: &ImageTensor,
    y_i: &LabelVector,
    y_j: &LabelVector,
    weight: Option<&SaliencyMap>,
    rng: &mut R,
) -> Result<MixResult> {
    let lambda = sample_lambda(cfg.alpha, rng)?.lambda;
    mix_pair_at(cfg, x_i, x_j, y_i, y_j, lambda, weight, rng)
}

/// Applies a policy to a whole batch: pairs samples through a random
/// permutation, draws one ratio per pair from its own seed substream, and
/// dispatches. Results are ordered by pair ordinal, and each pair's draws
/// are independent of batch order and scheduling.
pub fn apply_policy(
    cfg: &PolicyConfig,
    batch: &[ImageTensor],
    labels: &[LabelVector],
    seed: SeedSplit,
) -> Result<Vec<MixResult>> {
    cfg.validate()?;
    if batch.is_empty() {
        return Err(CoreError::Empty("batch must contain at least one sample".into()));
    }
    if batch.len() != labels.len() {
        return Err(CoreError::Shape(format!(
            "batch has {} images but {} labels",
            batch.len(),
            labels.len()
        )));
    }
    for img in &batch[1..] {
        batch[0].require_same_shape(img)?;
    }
    if labels.iter().any(|y| y.num_classes() != labels[0].num_classes()) {
        return Err(CoreError::Shape("labels disagree on class count".into()));
    }

    if cfg.kind == PolicyKind::Vanilla {
        return Ok(batch
            .iter()
            .zip(labels)
            .map(|(x, y)| MixResult {
                image: x.clone(),
                label: y.clone(),
                lambda_nominal: 1.0,
                lambda_effective: 1.0,
                mask: None,
            })
            .collect());
    }
    if cfg.kind == PolicyKind::Guidedcut {
        return Err(CoreError::Config(
            "guidedcut needs an external weight map per pair; call guided_cut directly".into(),
        ));
    }

    let pairs = make_pairs(batch.len(), &mut seed.batch())?;
    let mut results = Vec::with_capacity(pairs.len());
    for (ordinal, pair) in pairs.iter().enumerate() {
        let mut rng = seed.pair(ordinal as u64);
        results.push(mix_pair(
            cfg,
            &batch[pair.i],
            &batch[pair.j],
            &labels[pair.i],
            &labels[pair.j],
            None,
            &mut rng,
        )?);
    }
    Ok(results)
}
