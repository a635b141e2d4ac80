//! Classical saliency maps guiding cut placement and block transport.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::fft::dft2;
use crate::image::ImageTensor;
use crate::mask::axis_cells;

/// Which detector a guided policy uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaliencyDetector {
    Sobel,
    SpectralResidual,
}

impl SaliencyDetector {
    pub fn compute(&self, image: &ImageTensor) -> SaliencyMap {
        match self {
            SaliencyDetector::Sobel => sobel_saliency(image),
            SaliencyDetector::SpectralResidual => spectral_residual_saliency(image),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sobel" => Ok(SaliencyDetector::Sobel),
            "spectral" => Ok(SaliencyDetector::SpectralResidual),
            other => Err(CoreError::Config(format!(
                "unknown saliency detector '{other}' (expected sobel|spectral)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SaliencyDetector::Sobel => "sobel",
            SaliencyDetector::SpectralResidual => "spectral",
        }
    }
}

/// A per-pixel importance distribution: non-negative, sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl SaliencyMap {
    /// Normalizes raw non-negative scores to sum 1. An all-zero input (e.g.
    /// a constant image) degenerates to the uniform map so guided policies
    /// keep working on blank regions.
    pub fn new(height: usize, width: usize, raw: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || raw.len() != height * width {
            return Err(CoreError::Shape(format!(
                "saliency data length {} != {height}x{width}",
                raw.len()
            )));
        }
        if raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CoreError::Param("saliency scores must be finite and >= 0".into()));
        }
        let sum: f64 = raw.iter().sum();
        let values = if sum > 0.0 {
            raw.iter().map(|v| v / sum).collect()
        } else {
            vec![1.0 / (height * width) as f64; height * width]
        };
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Location of the largest value; the first such pixel in row-major
    /// order on ties, so placement is deterministic.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (idx, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = idx;
            }
        }
        (best / self.width, best % self.width)
    }
}

#[inline]
fn clamp_idx(v: i64, max: usize) -> usize {
    v.clamp(0, max as i64 - 1) as usize
}

/// Gradient-magnitude saliency: 3x3 Sobel on luminance with edge
/// replication, normalized to a distribution.
pub fn sobel_saliency(image: &ImageTensor) -> SaliencyMap {
    let (h, w, _) = image.shape();
    let lum = image.luminance();
    let at = |y: i64, x: i64| lum[clamp_idx(y, h) * w + clamp_idx(x, w)];
    let mut raw = Vec::with_capacity(h * w);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let gx = -at(y - 1, x - 1) + at(y - 1, x + 1) - 2.0 * at(y, x - 1)
                + 2.0 * at(y, x + 1)
                - at(y + 1, x - 1)
                + at(y + 1, x + 1);
            let gy = -at(y - 1, x - 1) - 2.0 * at(y - 1, x) - at(y - 1, x + 1)
                + at(y + 1, x - 1)
                + 2.0 * at(y + 1, x)
                + at(y + 1, x + 1);
            raw.push((gx * gx + gy * gy).sqrt());
        }
    }
    SaliencyMap::new(h, w, raw).expect("sobel scores are finite and non-negative")
}

fn box3(values: &[f64], h: usize, w: usize) -> Vec<f64> {
    let at = |y: i64, x: i64| values[clamp_idx(y, h) * w + clamp_idx(x, w)];
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    acc += at(y + dy, x + dx);
                }
            }
            out.push(acc / 9.0);
        }
    }
    out
}

fn gaussian_blur(values: &[f64], h: usize, w: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for d in -radius..=radius {
        kernel.push((-(d * d) as f64 / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= norm;
    }
    let mut tmp = vec![0.0; h * w];
    for y in 0..h {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                acc += k * values[y * w + clamp_idx(x + ki as i64 - radius, w)];
            }
            tmp[y * w + x as usize] = acc;
        }
    }
    let mut out = vec![0.0; h * w];
    for y in 0..h as i64 {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                acc += k * tmp[clamp_idx(y + ki as i64 - radius, h) * w + x];
            }
            out[y as usize * w + x] = acc;
        }
    }
    out
}

/// Spectral-residual saliency: the log-amplitude spectrum minus its 3x3 box
/// average is recombined with the phase, inverse-transformed, squared, and
/// Gaussian-smoothed (sigma 2.5). Constant images short-circuit to the
/// uniform map.
pub fn spectral_residual_saliency(image: &ImageTensor) -> SaliencyMap {
    let (h, w, _) = image.shape();
    let lum = image.luminance();
    let lo = lum.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        return SaliencyMap::new(h, w, vec![0.0; h * w]).expect("uniform fallback");
    }

    let mut spectrum: Vec<Complex64> = lum.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft2(&mut spectrum, h, w, false);
    let log_amp: Vec<f64> = spectrum.iter().map(|c| c.norm().max(1e-12).ln()).collect();
    let smoothed = box3(&log_amp, h, w);
    for (i, c) in spectrum.iter_mut().enumerate() {
        let residual = log_amp[i] - smoothed[i];
        let phase = c.arg();
        *c = Complex64::from_polar(residual.exp(), phase);
    }
    dft2(&mut spectrum, h, w, true);
    let squared: Vec<f64> = spectrum.iter().map(|c| c.norm_sqr()).collect();
    let raw = gaussian_blur(&squared, h, w, 2.5);
    SaliencyMap::new(h, w, raw).expect("spectral scores are finite and non-negative")
}

/// Sums pixel saliency into a `b x b` grid (remainder pixels go to the
/// trailing blocks); the grid keeps total mass 1.
pub fn block_reduce(map: &SaliencyMap, b: usize) -> Result<BlockSaliency> {
    if b == 0 || b > map.height.min(map.width) {
        return Err(CoreError::Param(format!(
            "block count {b} outside [1, min({}, {})]",
            map.height, map.width
        )));
    }
    let rows = axis_cells(map.height, b);
    let cols = axis_cells(map.width, b);
    let mut values = vec![0.0; b * b];
    for (bi, &(y0, bh)) in rows.iter().enumerate() {
        for (bj, &(x0, bw)) in cols.iter().enumerate() {
            let mut acc = 0.0;
            for y in y0..y0 + bh {
                for x in x0..x0 + bw {
                    acc += map.get(y, x);
                }
            }
            values[bi * b + bj] = acc;
        }
    }
    Ok(BlockSaliency { b, values })
}

/// Block-level saliency mass on a `b x b` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSaliency {
    pub b: usize,
    pub values: Vec<f64>,
}
