//! Grayscale conversion and separable Gaussian smoothing.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::raster::RasterImage;
use crate::{Error, Result};

/// ITU-R BT.601 luma weights.
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

pub fn to_grayscale(img: &RasterImage) -> Result<RasterImage> {
    match img.channels() {
        1 => Ok(img.clone()),
        3 => {
            let data = img
                .data()
                .chunks_exact(3)
                .map(|px| (LUMA[0] * px[0] + LUMA[1] * px[1] + LUMA[2] * px[2]).clamp(0.0, 1.0))
                .collect();
            Ok(RasterImage::from_parts(img.width(), img.height(), 1, data))
        }
        c => Err(Error::UnsupportedChannels(c)),
    }
}

/// Sampled Gaussian truncated at `ceil(3 sigma)` and normalized to sum 1.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![1.0];
    }
    let radius = math::ceil(3.0 * sigma) as usize;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            math::exp(-d * d / denom)
        })
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Half-sample symmetric reflection: `-1 -> 0`, `n -> n - 1`.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m >= n { period - 1 - m } else { m }) as usize
}

/// Separable convolution of one plane with reflect-at-border handling.
pub(crate) fn convolve_plane(plane: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    let radius = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0; plane.len()];
    for y in 0..height {
        let row = &plane[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let sx = reflect(x as isize + k as isize - radius, width);
                acc += w * row[sx];
            }
            tmp[y * width + x] = acc;
        }
    }
    let mut out = vec![0.0; plane.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let sy = reflect(y as isize + k as isize - radius, height);
                acc += w * tmp[sy * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Per-channel separable Gaussian smoothing. `sigma = 0` is the identity.
pub fn gaussian_smooth(img: &RasterImage, sigma: f64) -> Result<RasterImage> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::param("sigma", "must be finite and >= 0"));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let (w, h) = (img.width(), img.height());
    let planes: Vec<Vec<f64>> = (0..img.channels())
        .map(|c| {
            let mut p = convolve_plane(&img.channel(c), w, h, &kernel);
            p.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
            p
        })
        .collect();
    Ok(RasterImage::from_planes(w, h, &planes))
}
