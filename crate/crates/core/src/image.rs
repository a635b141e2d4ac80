//! Image tensors: the unit of sample mixing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{CoreError, Result};

/// A rank-3 image of shape height x width x channels, row-major, with
/// intensities in `[0, 1]`. Byte-valued inputs are divided by 255 at
/// ingestion so that mixing stays plain linear arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageTensor {
    /// Builds an image from row-major `[y][x][c]` intensities, validating
    /// length and that every value is finite and in `[0, 1]`.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || !(channels == 1 || channels == 3) {
            return Err(CoreError::Shape(format!(
                "invalid image dims {height}x{width}x{channels}"
            )));
        }
        let expect = height * width * channels;
        if data.len() != expect {
            return Err(CoreError::Shape(format!(
                "data length {} != {}x{}x{} = {expect}",
                data.len(),
                height,
                width,
                channels
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(CoreError::Param(format!(
                "intensity {bad} outside [0, 1]"
            )));
        }
        Ok(Self { height, width, channels, data })
    }

    pub fn constant(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    /// Ingests byte intensities as `byte / 255`.
    pub fn from_bytes(height: usize, width: usize, channels: usize, bytes: &[u8]) -> Result<Self> {
        let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        Self::new(height, width, channels, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    pub(crate) fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(CoreError::Shape(format!(
                "image shapes differ: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )))
        }
    }

    /// Per-pixel luminance: `0.299 R + 0.587 G + 0.114 B` for 3-channel
    /// images, the raw channel for 1-channel images.
    pub fn luminance(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.height * self.width);
        for p in 0..self.height * self.width {
            let base = p * self.channels;
            let v = if self.channels == 3 {
                0.299 * self.data[base] + 0.587 * self.data[base + 1] + 0.114 * self.data[base + 2]
            } else {
                self.data[base]
            };
            out.push(v);
        }
        out
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                for c in 0..self.channels {
                    out.set(y, x, c, self.get(y, self.width - 1 - x, c));
                }
            }
        }
        out
    }

    /// Bilinear resample with half-pixel centers: destination pixel `(dy, dx)`
    /// samples the source at `((dy + 0.5) * sh / dh - 0.5, ...)` with edge
    /// clamping.
    pub fn bilinear_resize(&self, new_height: usize, new_width: usize) -> Result<Self> {
        if new_height == 0 || new_width == 0 {
            return Err(CoreError::Shape(format!(
                "cannot resize to {new_height}x{new_width}"
            )));
        }
        let sy = self.height as f64 / new_height as f64;
        let sx = self.width as f64 / new_width as f64;
        let mut data = Vec::with_capacity(new_height * new_width * self.channels);
        for dy in 0..new_height {
            let fy = ((dy as f64 + 0.5) * sy - 0.5).max(0.0).min(self.height as f64 - 1.0);
            let y0 = fy.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let wy = fy - y0 as f64;
            for dx in 0..new_width {
                let fx = ((dx as f64 + 0.5) * sx - 0.5).max(0.0).min(self.width as f64 - 1.0);
                let x0 = fx.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let wx = fx - x0 as f64;
                for c in 0..self.channels {
                    let top = self.get(y0, x0, c) * (1.0 - wx) + self.get(y0, x1, c) * wx;
                    let bot = self.get(y1, x0, c) * (1.0 - wx) + self.get(y1, x1, c) * wx;
                    data.push(top * (1.0 - wy) + bot * wy);
                }
            }
        }
        Ok(Self { height: new_height, width: new_width, channels: self.channels, data })
    }

    /// Copies the `crop_h x crop_w` region whose top-left corner is
    /// `(y0, x0)`.
    pub fn crop(&self, y0: usize, x0: usize, crop_h: usize, crop_w: usize) -> Result<Self> {
        if y0 + crop_h > self.height || x0 + crop_w > self.width || crop_h == 0 || crop_w == 0 {
            return Err(CoreError::Shape(format!(
                "crop {crop_h}x{crop_w}@({y0},{x0}) outside {}x{}",
                self.height, self.width
            )));
        }
        let mut data = Vec::with_capacity(crop_h * crop_w * self.channels);
        for y in y0..y0 + crop_h {
            for x in x0..x0 + crop_w {
                for c in 0..self.channels {
                    data.push(self.get(y, x, c));
                }
            }
        }
        Ok(Self { height: crop_h, width: crop_w, channels: self.channels, data })
    }

    pub(crate) fn from_parts(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), height * width * channels);
        Self { height, width, channels, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths_and_ranges() {
        assert!(ImageTensor::new(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(ImageTensor::new(2, 2, 1, vec![1.5, 0.0, 0.0, 0.0]).is_err());
        assert!(ImageTensor::new(2, 2, 1, vec![f64::NAN, 0.0, 0.0, 0.0]).is_err());
        assert!(ImageTensor::new(2, 2, 2, vec![0.0; 8]).is_err());
        assert!(ImageTensor::new(2, 2, 1, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn luminance_weights() {
        let img = ImageTensor::new(1, 1, 3, vec![1.0, 0.5, 0.25]).unwrap();
        let lum = img.luminance();
        assert!((lum[0] - (0.299 + 0.587 * 0.5 + 0.114 * 0.25)).abs() < 1e-12);
        let gray = ImageTensor::new(1, 2, 1, vec![0.3, 0.7]).unwrap();
        assert_eq!(gray.luminance(), vec![0.3, 0.7]);
    }

    #[test]
    fn flip_round_trips() {
        let img = ImageTensor::new(1, 3, 1, vec![0.1, 0.2, 0.3]).unwrap();
        let flipped = img.flip_horizontal();
        assert_eq!(flipped.data(), &[0.3, 0.2, 0.1]);
        assert_eq!(flipped.flip_horizontal(), img);
    }

    #[test]
    fn identity_resize_is_exact() {
        let img = ImageTensor::new(2, 3, 1, vec![0.0, 0.25, 0.5, 0.75, 1.0, 0.125]).unwrap();
        let same = img.bilinear_resize(2, 3).unwrap();
        assert_eq!(same, img);
    }

    #[test]
    fn downsample_of_constant_is_constant() {
        let img = ImageTensor::constant(8, 8, 3, 0.4).unwrap();
        let small = img.bilinear_resize(3, 5).unwrap();
        assert!(small.data().iter().all(|v| (v - 0.4).abs() < 1e-12));
    }
}
