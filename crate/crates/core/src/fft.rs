//! Minimal separable 2-D discrete Fourier transform.
//!
//! Desk-scale images are small, so a direct O(n^2)-per-axis transform with a
//! precomputed twiddle table is all the spectral masks and saliency need.
//! Forward uses `exp(-2 pi i k n / N)`; inverse conjugates and scales by
//! `1/N` per axis, so forward-then-inverse round-trips.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

fn twiddles(n: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|m| {
            let angle = sign * 2.0 * PI * m as f64 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect()
}

fn dft_line(src: &[Complex64], stride: usize, out: &mut [Complex64], tw: &[Complex64], inverse: bool) {
    let n = out.len();
    let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += src[i * stride] * tw[(k * i) % n];
        }
        *slot = acc * scale;
    }
}

/// In-place 2-D DFT of a row-major `h x w` complex field.
pub(crate) fn dft2(field: &mut [Complex64], h: usize, w: usize, inverse: bool) {
    debug_assert_eq!(field.len(), h * w);
    let tw_w = twiddles(w, inverse);
    let mut line = vec![Complex64::new(0.0, 0.0); w];
    for row in field.chunks_exact_mut(w) {
        dft_line(row, 1, &mut line, &tw_w, inverse);
        row.copy_from_slice(&line);
    }
    let tw_h = twiddles(h, inverse);
    let mut col = vec![Complex64::new(0.0, 0.0); h];
    for x in 0..w {
        dft_line(&field[x..], w, &mut col, &tw_h, inverse);
        for (y, v) in col.iter().enumerate() {
            field[y * w + x] = *v;
        }
    }
}
