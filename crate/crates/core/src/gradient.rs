//! Image gradients: central differences after Gaussian smoothing, and the
//! structure-tensor gradient for three-channel images.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::filter::gaussian_smooth;
use crate::math;
use crate::raster::{bilinear, Point, RasterImage};
use crate::{Error, Result};

/// Per-pixel gradient components, magnitude and orientation in `[0, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub orientation: Vec<f64>,
}

impl GradientField {
    /// Field from raw components; magnitude and orientation are derived.
    pub fn from_components(width: usize, height: usize, gx: Vec<f64>, gy: Vec<f64>) -> Result<Self> {
        if gx.len() != width * height || gy.len() != width * height {
            return Err(Error::DataLength {
                expected: width * height,
                actual: gx.len().min(gy.len()),
            });
        }
        let magnitude = gx.iter().zip(&gy).map(|(&x, &y)| math::sqrt(x * x + y * y)).collect();
        let orientation = gx.iter().zip(&gy).map(|(&x, &y)| orientation_mod_pi(x, y)).collect();
        Ok(Self {
            width,
            height,
            gx,
            gy,
            magnitude,
            orientation,
        })
    }

    pub fn magnitude_at(&self, p: Point) -> f64 {
        bilinear(&self.magnitude, self.width, self.height, p)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

/// Angle of `(x, y)` folded into `[0, pi)`.
pub(crate) fn orientation_mod_pi(x: f64, y: f64) -> f64 {
    let mut a = math::atan2(y, x);
    if a < 0.0 {
        a += PI;
    }
    if a >= PI {
        a -= PI;
    }
    a
}

/// Central differences with replicated borders.
pub(crate) fn central_diff(plane: &[f64], width: usize, height: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; plane.len()];
    let mut gy = vec![0.0; plane.len()];
    for y in 0..height {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(height - 1);
        for x in 0..width {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(width - 1);
            let i = y * width + x;
            gx[i] = (plane[y * width + right] - plane[y * width + left]) / 2.0;
            gy[i] = (plane[down * width + x] - plane[up * width + x]) / 2.0;
        }
    }
    (gx, gy)
}

pub fn gradient_gray(img: &RasterImage, sigma: f64) -> Result<GradientField> {
    if img.channels() != 1 {
        return Err(Error::UnsupportedChannels(img.channels()));
    }
    let smooth = gaussian_smooth(img, sigma)?;
    let (gx, gy) = central_diff(smooth.data(), img.width(), img.height());
    GradientField::from_components(img.width(), img.height(), gx, gy)
}

/// Multi-channel gradient from the per-pixel 2x2 structure tensor summed
/// over channels. The magnitude is the square root of the largest
/// eigenvalue and the orientation is that of its eigenvector.
pub fn gradient_color(img: &RasterImage, sigma: f64) -> Result<GradientField> {
    if img.channels() != 3 {
        return Err(Error::UnsupportedChannels(img.channels()));
    }
    let (w, h) = (img.width(), img.height());
    let smooth = gaussian_smooth(img, sigma)?;
    let n = w * h;
    let (mut txx, mut txy, mut tyy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for c in 0..3 {
        let (cx, cy) = central_diff(&smooth.channel(c), w, h);
        for i in 0..n {
            txx[i] += cx[i] * cx[i];
            txy[i] += cx[i] * cy[i];
            tyy[i] += cy[i] * cy[i];
        }
    }
    let mut field = GradientField {
        width: w,
        height: h,
        gx: vec![0.0; n],
        gy: vec![0.0; n],
        magnitude: vec![0.0; n],
        orientation: vec![0.0; n],
    };
    for i in 0..n {
        let (a, b, c) = (txx[i], txy[i], tyy[i]);
        let half_diff = (a - c) / 2.0;
        let lambda = ((a + c) / 2.0 + math::hypot(half_diff, b)).max(0.0);
        let mag = math::sqrt(lambda);
        let theta = if mag == 0.0 {
            0.0
        } else {
            let t = 0.5 * math::atan2(2.0 * b, a - c);
            if t < 0.0 { t + PI } else if t >= PI { t - PI } else { t }
        };
        field.magnitude[i] = mag;
        field.orientation[i] = theta;
        field.gx[i] = mag * math::cos(theta);
        field.gy[i] = mag * math::sin(theta);
    }
    Ok(field)
}

/// Gray or color gradient depending on the channel count.
pub fn gradient_of(img: &RasterImage, sigma: f64) -> Result<GradientField> {
    match img.channels() {
        1 => gradient_gray(img, sigma),
        3 => gradient_color(img, sigma),
        c => Err(Error::UnsupportedChannels(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn angular_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(PI);
        d.min(PI - d)
    }

    #[test]
    fn flat_field() {
        let img = RasterImage::filled(6, 5, 0.3).unwrap();
        let g = gradient_gray(&img, 1.0).unwrap();
        assert!(g.gx.iter().chain(&g.gy).chain(&g.magnitude).all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_has_exact_central_difference() {
        let w = 8;
        let img = RasterImage::from_fn(w, 4, |x, _| x as f64 / (w - 1) as f64).unwrap();
        let g = gradient_gray(&img, 0.0).unwrap();
        for y in 0..4 {
            for x in 1..w - 1 {
                assert_abs_diff_eq!(g.gx[y * w + x], 1.0 / (w - 1) as f64, epsilon = 1e-12);
                assert_eq!(g.gy[y * w + x], 0.0);
            }
        }
    }

    #[test]
    fn vertical_step_peaks_at_step_column() {
        // Oracle: direct 2-D convolution with the truncated kernel, then
        // differences, computed independently of the separable path.
        let (w, h) = (16, 9);
        let step = 8;
        let img = RasterImage::from_fn(w, h, |x, _| if x >= step { 1.0 } else { 0.0 }).unwrap();
        let g = gradient_gray(&img, 1.0).unwrap();
        let row = 4;
        let best = (0..w)
            .max_by(|&a, &b| {
                g.magnitude[row * w + a]
                    .partial_cmp(&g.magnitude[row * w + b])
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        // the boundary lies between columns step-1 and step; both tie
        assert!(best == step - 1 || best == step);
        assert_abs_diff_eq!(
            g.magnitude[row * w + step - 1],
            g.magnitude[row * w + step],
            epsilon = 1e-12
        );
        let oracle = |x: isize| -> f64 {
            let k: Vec<f64> = (-3..=3).map(|d: isize| libm::exp(-(d * d) as f64 / 2.0)).collect();
            let s: f64 = k.iter().sum();
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                let sx = x + j as isize - 3;
                let sx = if sx < 0 { -sx - 1 } else if sx >= w as isize { 2 * w as isize - 1 - sx } else { sx };
                acc += kv / s * if sx >= step as isize { 1.0 } else { 0.0 };
            }
            acc
        };
        let expect = (oracle(step as isize + 1) - oracle(step as isize - 1)) / 2.0;
        assert_abs_diff_eq!(g.gx[row * w + step], expect, epsilon = 1e-12);
    }

    #[test]
    fn color_requires_three_channels() {
        let gray = RasterImage::filled(3, 3, 0.0).unwrap();
        assert!(gradient_color(&gray, 1.0).is_err());
        let rgb = RasterImage::new(1, 1, 3, vec![0.0; 3]).unwrap();
        assert!(gradient_gray(&rgb, 1.0).is_err());
    }

    #[test]
    fn identical_channels_scale_by_sqrt3() {
        let (w, h) = (12, 10);
        let gray = RasterImage::from_fn(w, h, |x, y| {
            (0.5 + 0.4 * libm::sin(x as f64 * 0.7) * libm::cos(y as f64 * 0.4)).clamp(0.0, 1.0)
        })
        .unwrap();
        let rgb = RasterImage::from_planes(w, h, &[gray.data().to_vec(), gray.data().to_vec(), gray.data().to_vec()]);
        let g = gradient_gray(&gray, 0.8).unwrap();
        let c = gradient_color(&rgb, 0.8).unwrap();
        for i in 0..w * h {
            assert_abs_diff_eq!(c.magnitude[i], libm::sqrt(3.0) * g.magnitude[i], epsilon = 1e-9);
            if g.magnitude[i] > 1e-6 {
                assert!(angular_gap(c.orientation[i], g.orientation[i]) < 1e-6);
            }
        }
    }

    #[test]
    fn isoluminant_step_visible_in_color() {
        // red on the left, blue on the right with equal luma
        let (w, h) = (10, 4);
        let r = 0.114 / 0.299 * 0.9;
        let b = 0.9;
        let planes = [
            (0..w * h).map(|i| if i % w < 5 { r } else { 0.0 }).collect::<Vec<_>>(),
            vec![0.0; w * h],
            (0..w * h).map(|i| if i % w < 5 { 0.0 } else { b }).collect::<Vec<_>>(),
        ];
        let rgb = RasterImage::from_planes(w, h, &planes);
        let gray = crate::filter::to_grayscale(&rgb).unwrap();
        let gg = gradient_gray(&gray, 1.0).unwrap();
        let gc = gradient_color(&rgb, 1.0).unwrap();
        let i = w + 5;
        assert!(gg.magnitude[i] < 1e-9);
        assert!(gc.magnitude[i] > 0.05);
    }
}
