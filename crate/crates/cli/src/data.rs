//! Dataset ingestion: CIFAR binary batches, class-folder image trees, and a
//! synthetic generator for tests and desk-scale experiments.

use std::fs;
use std::path::{Path, PathBuf};

use mixforge_core::{derive_seed, ImageTensor, LabelVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DeskError, Result};
use crate::pnm::read_image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CifarVariant {
    Cifar10,
    Cifar100,
}

impl CifarVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cifar10" => Ok(CifarVariant::Cifar10),
            "cifar100" => Ok(CifarVariant::Cifar100),
            other => Err(DeskError::Config(format!("unknown cifar variant '{other}'"))),
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            CifarVariant::Cifar10 => 10,
            CifarVariant::Cifar100 => 100,
        }
    }

    /// Bytes per record: label byte(s) followed by 32x32x3 channel planes.
    fn record_size(&self) -> usize {
        match self {
            CifarVariant::Cifar10 => 1 + 3072,
            CifarVariant::Cifar100 => 2 + 3072,
        }
    }

    fn files(&self, split: Split) -> Vec<&'static str> {
        match (self, split) {
            (CifarVariant::Cifar10, Split::Train) => vec![
                "data_batch_1.bin",
                "data_batch_2.bin",
                "data_batch_3.bin",
                "data_batch_4.bin",
                "data_batch_5.bin",
            ],
            (CifarVariant::Cifar10, Split::Test) => vec!["test_batch.bin"],
            (CifarVariant::Cifar100, Split::Train) => vec!["train.bin"],
            (CifarVariant::Cifar100, Split::Test) => vec!["test.bin"],
        }
    }
}

/// An immutable labeled image collection with a uniform shape.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub images: Vec<ImageTensor>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub split: Split,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn one_hot(&self, index: usize) -> LabelVector {
        LabelVector::one_hot(self.num_classes, self.labels[index]).expect("label < num_classes")
    }

    /// Keeps only the first `limit` samples.
    pub fn truncate(&mut self, limit: usize) {
        self.images.truncate(limit);
        self.labels.truncate(limit);
    }
}

fn decode_cifar_file(
    path: &Path,
    variant: CifarVariant,
    images: &mut Vec<ImageTensor>,
    labels: &mut Vec<usize>,
) -> Result<()> {
    let bytes = fs::read(path).map_err(DeskError::io(path))?;
    let record = variant.record_size();
    if bytes.is_empty() || bytes.len() % record != 0 {
        let offset = bytes.len() - bytes.len() % record;
        return Err(DeskError::format(
            path,
            format!(
                "file size {} is not a multiple of the {record}-byte record (truncated at byte {offset})",
                bytes.len()
            ),
        ));
    }
    let k = variant.num_classes();
    for (idx, chunk) in bytes.chunks_exact(record).enumerate() {
        let label = match variant {
            CifarVariant::Cifar10 => chunk[0] as usize,
            // Coarse label first; only the fine label is kept.
            CifarVariant::Cifar100 => chunk[1] as usize,
        };
        if label >= k {
            return Err(DeskError::format(
                path,
                format!("record {idx}: label byte {label} >= {k} classes (corrupt file)"),
            ));
        }
        let planes = &chunk[record - 3072..];
        // Channel planes R, G, B of 1024 bytes each -> interleaved rows.
        let mut data = Vec::with_capacity(3072);
        for p in 0..1024 {
            for c in 0..3 {
                data.push(planes[c * 1024 + p] as f64 / 255.0);
            }
        }
        images.push(ImageTensor::new(32, 32, 3, data)?);
        labels.push(label);
    }
    Ok(())
}

/// Reads CIFAR binary batches. `path` may be the dataset directory (the
/// standard per-split file set is loaded) or a single batch file.
pub fn read_cifar(path: &Path, variant: CifarVariant, split: Split) -> Result<Dataset> {
    let mut images = Vec::new();
    let mut labels = Vec::new();
    if path.is_dir() {
        for name in variant.files(split) {
            decode_cifar_file(&path.join(name), variant, &mut images, &mut labels)?;
        }
    } else {
        decode_cifar_file(path, variant, &mut images, &mut labels)?;
    }
    Ok(Dataset { images, labels, num_classes: variant.num_classes(), split })
}

fn is_image_file(path: &Path) -> bool {
    let ok = |e: &str| {
        e.eq_ignore_ascii_case("ppm")
            || e.eq_ignore_ascii_case("pgm")
            || (cfg!(feature = "png") && e.eq_ignore_ascii_case("png"))
    };
    path.extension().and_then(|e| e.to_str()).is_some_and(ok)
}

/// Reads a `class-name/*.{ppm,pgm}` tree. Class indices follow the
/// lexicographic order of the class directory names, and files within a
/// class are read in sorted order, so indexing is stable.
pub fn read_image_dir(path: &Path, split: Split) -> Result<Dataset> {
    let mut class_dirs: Vec<PathBuf> = fs::read_dir(path)
        .map_err(DeskError::io(path))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();
    if class_dirs.is_empty() {
        return Err(DeskError::format(path, "no class directories found"));
    }
    let mut images = Vec::new();
    let mut labels = Vec::new();
    let mut first: Option<(PathBuf, (usize, usize, usize))> = None;
    for (class, dir) in class_dirs.iter().enumerate() {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(DeskError::io(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| is_image_file(p))
            .collect();
        files.sort();
        for file in files {
            let img = read_image(&file)?;
            match &first {
                None => first = Some((file.clone(), img.shape())),
                Some((ref_path, shape)) if *shape != img.shape() => {
                    return Err(DeskError::format(
                        path,
                        format!(
                            "images disagree on shape: {} is {:?} but {} is {:?}",
                            ref_path.display(),
                            shape,
                            file.display(),
                            img.shape()
                        ),
                    ));
                }
                _ => {}
            }
            images.push(img);
            labels.push(class);
        }
    }
    if images.is_empty() {
        return Err(DeskError::format(path, "no images found under class directories"));
    }
    Ok(Dataset { images, labels, num_classes: class_dirs.len(), split })
}

/// Shape of a generated synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub k: usize,
    /// Fraction of labels replaced by a uniformly random class.
    pub label_noise: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self { n: 256, h: 8, w: 8, c: 3, k: 2, label_noise: 0.0 }
    }
}

/// Deterministic class-separable images: each class has a constant base
/// intensity plus a class-frequency stripe pattern and a little per-pixel
/// noise, so a linear model can learn the task. Labels are assigned
/// round-robin before noise.
pub fn synth_dataset(spec: &SynthSpec, seed: u64) -> Result<Dataset> {
    if spec.n == 0 || spec.h == 0 || spec.w == 0 || spec.k == 0 || !(spec.c == 1 || spec.c == 3) {
        return Err(DeskError::Config(format!("invalid synth spec {spec:?}")));
    }
    if !(0.0..=1.0).contains(&spec.label_noise) {
        return Err(DeskError::Config(format!(
            "label_noise {} outside [0, 1]",
            spec.label_noise
        )));
    }
    let mut images = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let class = i % spec.k;
        let base = (2 * class + 1) as f64 / (2 * spec.k) as f64;
        let freq = (class + 1) as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
        let mut data = Vec::with_capacity(spec.h * spec.w * spec.c);
        for _y in 0..spec.h {
            for x in 0..spec.w {
                let stripe = 0.08
                    * (2.0 * std::f64::consts::PI * freq * x as f64 / spec.w as f64).sin();
                for _ch in 0..spec.c {
                    // Noise strong enough to give every sample its own
                    // signature; class means stay > 0.2 apart.
                    let noise = rng.gen_range(-0.15..=0.15);
                    data.push((base + stripe + noise).clamp(0.02, 0.98));
                }
            }
        }
        images.push(ImageTensor::new(spec.h, spec.w, spec.c, data)?);
        labels.push(class);
    }
    if spec.label_noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
        for label in labels.iter_mut() {
            if rng.gen_range(0.0..1.0) < spec.label_noise {
                *label = rng.gen_range(0..spec.k);
            }
        }
    }
    Ok(Dataset { images, labels, num_classes: spec.k, split: Split::Train })
}
