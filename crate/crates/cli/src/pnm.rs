//! Binary PPM (P6) and PGM (P5) with maxval 255, bit-exact.

use std::fs;
use std::io::Write;
use std::path::Path;

use mixforge_core::{ImageTensor, MixMask, SaliencyMap};

use crate::error::{DeskError, Result};

fn byte_of(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Writes an image as P6 (3 channels) or P5 (1 channel).
pub fn write_image(path: &Path, image: &ImageTensor) -> Result<()> {
    let (h, w, c) = image.shape();
    let magic = if c == 3 { "P6" } else { "P5" };
    let mut out = Vec::with_capacity(h * w * c + 32);
    write!(out, "{magic}\n{w} {h}\n255\n").expect("write to vec");
    out.extend(image.data().iter().map(|&v| byte_of(v)));
    fs::write(path, out).map_err(DeskError::io(path))
}

/// Writes a mask as an 8-bit PGM (weight 1 is white).
pub fn write_mask(path: &Path, mask: &MixMask) -> Result<()> {
    let (h, w) = (mask.height(), mask.width());
    let mut out = Vec::with_capacity(h * w + 32);
    write!(out, "P5\n{w} {h}\n255\n").expect("write to vec");
    out.extend(mask.weights().iter().map(|&v| byte_of(v)));
    fs::write(path, out).map_err(DeskError::io(path))
}

/// Writes a saliency map as PGM, rescaled so its maximum is white.
pub fn write_saliency(path: &Path, map: &SaliencyMap) -> Result<()> {
    let (h, w) = (map.height(), map.width());
    let peak = map.values().iter().cloned().fold(0.0_f64, f64::max);
    let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
    let mut out = Vec::with_capacity(h * w + 32);
    write!(out, "P5\n{w} {h}\n255\n").expect("write to vec");
    out.extend(map.values().iter().map(|&v| byte_of(v * scale)));
    fs::write(path, out).map_err(DeskError::io(path))
}

struct HeaderParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderParser<'a> {
    /// Advances past whitespace and `#` comments, then reads one token.
    fn token(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Option<usize> {
        std::str::from_utf8(self.token()?).ok()?.parse().ok()
    }
}

/// Reads a binary P5/P6 file into intensities `byte / 255`. With the `png`
/// feature, `.png` files are decoded as well.
pub fn read_image(path: &Path) -> Result<ImageTensor> {
    #[cfg(feature = "png")]
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")) {
        return read_png(path);
    }
    let bytes = fs::read(path).map_err(DeskError::io(path))?;
    let mut parser = HeaderParser { bytes: &bytes, pos: 0 };
    let magic = parser.token().ok_or_else(|| DeskError::format(path, "missing magic"))?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        other => {
            return Err(DeskError::format(
                path,
                format!("unsupported magic {:?}", String::from_utf8_lossy(other)),
            ))
        }
    };
    let w = parser.number().ok_or_else(|| DeskError::format(path, "bad width"))?;
    let h = parser.number().ok_or_else(|| DeskError::format(path, "bad height"))?;
    let maxval = parser.number().ok_or_else(|| DeskError::format(path, "bad maxval"))?;
    if maxval != 255 {
        return Err(DeskError::format(path, format!("maxval {maxval}, only 255 supported")));
    }
    // Exactly one whitespace byte separates the header from raster data.
    let data_start = parser.pos + 1;
    let expect = h * w * channels;
    let raster = bytes
        .get(data_start..data_start + expect)
        .ok_or_else(|| DeskError::format(path, format!("raster truncated, need {expect} bytes")))?;
    ImageTensor::from_bytes(h, w, channels, raster).map_err(Into::into)
}

/// Loads a grayscale weight map: pixel bytes become non-negative scores and
/// are normalized to a distribution.
pub fn read_weight_map(path: &Path) -> Result<SaliencyMap> {
    let image = read_image(path)?;
    let (h, w, _) = image.shape();
    SaliencyMap::new(h, w, image.luminance()).map_err(Into::into)
}

#[cfg(feature = "png")]
fn read_png(path: &Path) -> Result<ImageTensor> {
    let img = image::open(path)
        .map_err(|e| DeskError::format(path, format!("png decode failed: {e}")))?
        .into_rgb8();
    let (w, h) = img.dimensions();
    ImageTensor::from_bytes(h as usize, w as usize, 3, img.as_raw()).map_err(Into::into)
}
