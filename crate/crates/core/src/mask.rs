//! Mix-mask geometries and mask application.
//!
//! A mask weight of 1 keeps the pixel of the first sample, 0 takes it from
//! the second. Cut-based policies label their output with the realized mask
//! mean (`corrected_lambda`) rather than the nominal draw.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CoreError, Result};
use crate::fft::dft2;
use crate::image::ImageTensor;

/// An `H x W` field of blend weights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixMask {
    height: usize,
    width: usize,
    weights: Vec<f64>,
}

impl MixMask {
    pub fn new(height: usize, width: usize, weights: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(CoreError::Shape(format!("invalid mask dims {height}x{width}")));
        }
        if weights.len() != height * width {
            return Err(CoreError::Shape(format!(
                "mask data length {} != {height}x{width}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
            return Err(CoreError::Param("mask weights must lie in [0, 1]".into()));
        }
        Ok(Self { height, width, weights })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.weights[y * self.width + x]
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|w| *w == 0.0 || *w == 1.0)
    }

    /// Number of weights exactly equal to 1 (mask area for binary masks).
    pub fn count_ones(&self) -> usize {
        self.weights.iter().filter(|w| **w == 1.0).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            height: self.height,
            width: self.width,
            weights: self.weights.iter().map(|w| 1.0 - w).collect(),
        }
    }
}

/// The realized weight of the first sample: the arithmetic mean of the mask.
/// This is the lambda that cut-based policies feed to label mixing.
pub fn corrected_lambda(mask: &MixMask) -> Result<f64> {
    if mask.weights.is_empty() {
        return Err(CoreError::Shape("empty mask".into()));
    }
    Ok(mask.weights.iter().sum::<f64>() / mask.weights.len() as f64)
}

/// A cut/paste rectangle described by its center and nominal side lengths.
/// The rectangle may overhang the image; `clipped_bounds` resolves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectSpec {
    pub cx: usize,
    pub cy: usize,
    pub cut_w: usize,
    pub cut_h: usize,
}

impl RectSpec {
    /// Half-open pixel bounds `(y0, y1, x0, x1)` clipped to an `h x w` image.
    pub fn clipped_bounds(&self, h: usize, w: usize) -> (usize, usize, usize, usize) {
        let x0 = self.cx as i64 - (self.cut_w / 2) as i64;
        let y0 = self.cy as i64 - (self.cut_h / 2) as i64;
        let x1 = x0 + self.cut_w as i64;
        let y1 = y0 + self.cut_h as i64;
        (
            y0.clamp(0, h as i64) as usize,
            y1.clamp(0, h as i64) as usize,
            x0.clamp(0, w as i64) as usize,
            x1.clamp(0, w as i64) as usize,
        )
    }

    /// True when the nominal rectangle lies fully inside the image.
    pub fn fits(&self, h: usize, w: usize) -> bool {
        let (y0, y1, x0, x1) = self.clipped_bounds(h, w);
        (y1 - y0) == self.cut_h && (x1 - x0) == self.cut_w
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    Ok(())
}

fn check_dims(h: usize, w: usize) -> Result<()> {
    if h == 0 || w == 0 {
        return Err(CoreError::Shape(format!("invalid mask dims {h}x{w}")));
    }
    Ok(())
}

fn zero_rect(mask: &mut MixMask, rect: &RectSpec) {
    let (y0, y1, x0, x1) = rect.clipped_bounds(mask.height, mask.width);
    for y in y0..y1 {
        for x in x0..x1 {
            mask.weights[y * mask.width + x] = 0.0;
        }
    }
}

/// Binary mask with a zero rectangle of nominal sides
/// `round(dim * sqrt(1 - lambda))` at a uniformly random center, clipped to
/// the image. Clipping can only shrink the cut, so the realized mean is
/// usually above the nominal lambda; callers correct labels through
/// `corrected_lambda`.
pub fn rect_mask<R: Rng + ?Sized>(
    h: usize,
    w: usize,
    lambda: f64,
    rng: &mut R,
) -> Result<(MixMask, RectSpec)> {
    check_dims(h, w)?;
    check_lambda(lambda)?;
    let ratio = (1.0 - lambda).sqrt();
    let cut_h = (h as f64 * ratio).round() as usize;
    let cut_w = (w as f64 * ratio).round() as usize;
    let cy = rng.gen_range(0..h);
    let cx = rng.gen_range(0..w);
    let rect = RectSpec { cx, cy, cut_w, cut_h };
    let mut mask = MixMask::filled(h, w, 1.0)?;
    zero_rect(&mut mask, &rect);
    Ok((mask, rect))
}

/// Splits `len` into `n` contiguous cells; remainder pixels attach to the
/// last cell so the cells always cover the axis exactly.
pub(crate) fn axis_cells(len: usize, n: usize) -> Vec<(usize, usize)> {
    let base = len / n;
    (0..n)
        .map(|k| {
            let size = if k + 1 == n { base + len % n } else { base };
            (k * base, size)
        })
        .collect()
}

/// Partitions the image into `n_cells x n_cells` cells and keeps exactly
/// `round(lambda * n_cells^2)` of them (uniformly chosen) at weight 1.
pub fn grid_mask<R: Rng + ?Sized>(
    h: usize,
    w: usize,
    n_cells: usize,
    lambda: f64,
    rng: &mut R,
) -> Result<MixMask> {
    check_dims(h, w)?;
    check_lambda(lambda)?;
    if n_cells == 0 || n_cells > h.min(w) {
        return Err(CoreError::Param(format!(
            "n_cells {n_cells} outside [1, min({h}, {w})]"
        )));
    }
    let total = n_cells * n_cells;
    let keep = (lambda * total as f64).round() as usize;
    let mut cells: Vec<usize> = (0..total).collect();
    for i in 0..keep.min(total) {
        let j = rng.gen_range(i..total);
        cells.swap(i, j);
    }
    let mut kept = vec![false; total];
    for &c in cells.iter().take(keep) {
        kept[c] = true;
    }
    let rows = axis_cells(h, n_cells);
    let cols = axis_cells(w, n_cells);
    let mut mask = MixMask::filled(h, w, 0.0)?;
    for (ci, &(y0, ch)) in rows.iter().enumerate() {
        for (cj, &(x0, cw)) in cols.iter().enumerate() {
            if kept[ci * n_cells + cj] {
                for y in y0..y0 + ch {
                    for x in x0..x0 + cw {
                        mask.weights[y * w + x] = 1.0;
                    }
                }
            }
        }
    }
    Ok(mask)
}

fn bump_weights(h: usize, w: usize, cy: usize, cx: usize, sigma: f64) -> Vec<f64> {
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut weights = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let dy = y as f64 - cy as f64;
            let dx = x as f64 - cx as f64;
            weights.push(1.0 - (-(dy * dy + dx * dx) * inv).exp());
        }
    }
    weights
}

/// Soft mask `1 - exp(-|p - c|^2 / (2 sigma^2))` around a random center,
/// with sigma solved by bisection so the mask mean hits `lambda` (tolerance
/// 1e-3). The mean is strictly decreasing in sigma, and the achievable range
/// is `(~0, 1 - 1/(h*w)]`; the endpoints lambda = 0 and 1 return constant
/// masks directly.
pub fn smooth_mask<R: Rng + ?Sized>(
    h: usize,
    w: usize,
    lambda: f64,
    rng: &mut R,
) -> Result<MixMask> {
    check_dims(h, w)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return MixMask::filled(h, w, 0.0);
    }
    if lambda == 1.0 {
        return MixMask::filled(h, w, 1.0);
    }
    let cy = rng.gen_range(0..h);
    let cx = rng.gen_range(0..w);
    let mean_of = |weights: &[f64]| weights.iter().sum::<f64>() / weights.len() as f64;
    let mut lo = 1e-2;
    let mut hi = 10.0 * h.max(w) as f64;
    let mut best = bump_weights(h, w, cy, cx, lo);
    let mut best_err = (mean_of(&best) - lambda).abs();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let weights = bump_weights(h, w, cy, cx, mid);
        let mean = mean_of(&weights);
        let err = (mean - lambda).abs();
        if err < best_err {
            best = weights;
            best_err = err;
        }
        if err <= 1e-3 {
            break;
        }
        if mean > lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    MixMask::new(h, w, best)
}

/// Frequency magnitude used to shape the random spectrum: coordinates are
/// folded so bin `u` and `h - u` share the magnitude of the slower axis.
fn spectral_freq(u: usize, v: usize, h: usize, w: usize) -> f64 {
    let fu = u.min(h - u) as f64 / h as f64;
    let fv = v.min(w - v) as f64 / w as f64;
    (fu * fu + fv * fv).sqrt()
}

/// Low-frequency random binary mask: a complex Gaussian spectrum is scaled
/// by `freq^-decay` (DC dropped), conjugate-symmetrized so its inverse
/// transform is real, and the mask keeps exactly `round(lambda * h * w)`
/// pixels with the largest field values. Ties break toward the earlier
/// pixel in row-major order, which pins the bit pattern for a given seed.
pub fn fourier_mask<R: Rng + ?Sized>(
    h: usize,
    w: usize,
    lambda: f64,
    decay: f64,
    rng: &mut R,
) -> Result<MixMask> {
    check_dims(h, w)?;
    check_lambda(lambda)?;
    if !decay.is_finite() || decay <= 0.0 {
        return Err(CoreError::Param(format!("decay must be positive, got {decay}")));
    }
    let n = h * w;
    let keep = ((lambda * n as f64).round() as usize).min(n);

    let normal = StandardNormal;
    let mut spectrum = Vec::with_capacity(n);
    for u in 0..h {
        for v in 0..w {
            let re: f64 = normal.sample(rng);
            let im: f64 = normal.sample(rng);
            let scale = if u == 0 && v == 0 {
                0.0
            } else {
                spectral_freq(u, v, h, w).powf(-decay)
            };
            spectrum.push(Complex64::new(re, im) * scale);
        }
    }
    // Hermitian symmetry: pair (u, v) with (h-u mod h, w-v mod w).
    for u in 0..h {
        for v in 0..w {
            let u2 = (h - u) % h;
            let v2 = (w - v) % w;
            let a = u * w + v;
            let b = u2 * w + v2;
            if a < b {
                let s = (spectrum[a] + spectrum[b].conj()) * 0.5;
                spectrum[a] = s;
                spectrum[b] = s.conj();
            } else if a == b {
                spectrum[a] = Complex64::new(spectrum[a].re, 0.0);
            }
        }
    }
    dft2(&mut spectrum, h, w, true);
    let field: Vec<f64> = spectrum.iter().map(|c| c.re).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        field[b].partial_cmp(&field[a]).expect("field is finite").then(a.cmp(&b))
    });
    let mut weights = vec![0.0; n];
    for &idx in order.iter().take(keep) {
        weights[idx] = 1.0;
    }
    MixMask::new(h, w, weights)
}

/// Zero rectangle of size `round(tau * h) x round(tau * w)` placed uniformly
/// at random fully inside the image; the returned `RectSpec` records where
/// the resized source will be pasted.
pub fn resize_paste_mask<R: Rng + ?Sized>(
    h: usize,
    w: usize,
    tau: f64,
    rng: &mut R,
) -> Result<(MixMask, RectSpec)> {
    check_dims(h, w)?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(CoreError::Param(format!("tau {tau} outside (0, 1)")));
    }
    let cut_h = (tau * h as f64).round() as usize;
    let cut_w = (tau * w as f64).round() as usize;
    let y0 = rng.gen_range(0..=h - cut_h.min(h));
    let x0 = rng.gen_range(0..=w - cut_w.min(w));
    let rect = RectSpec {
        cx: x0 + cut_w / 2,
        cy: y0 + cut_h / 2,
        cut_w,
        cut_h,
    };
    let mut mask = MixMask::filled(h, w, 1.0)?;
    zero_rect(&mut mask, &rect);
    Ok((mask, rect))
}

/// Per-pixel blend `mask * x_i + (1 - mask) * x_j` across all channels.
pub fn apply_mask(x_i: &ImageTensor, x_j: &ImageTensor, mask: &MixMask) -> Result<ImageTensor> {
    x_i.require_same_shape(x_j)?;
    let (h, w, c) = x_i.shape();
    if mask.height != h || mask.width != w {
        return Err(CoreError::Shape(format!(
            "mask {}x{} does not match image {h}x{w}",
            mask.height, mask.width
        )));
    }
    let mut data = Vec::with_capacity(h * w * c);
    for p in 0..h * w {
        let m = mask.weights[p];
        for ch in 0..c {
            let idx = p * c + ch;
            data.push(m * x_i.data()[idx] + (1.0 - m) * x_j.data()[idx]);
        }
    }
    Ok(ImageTensor::from_parts(h, w, c, data))
}
