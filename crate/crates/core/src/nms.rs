//! Non-maximum suppression along the quantized gradient direction.

use alloc::vec;

use crate::gradient::GradientField;
use crate::raster::RasterImage;

/// Neighbor offset along the gradient for an orientation in `[0, pi)`,
/// quantized to 0, 45, 90 or 135 degrees. Image rows grow downwards, so a
/// 45 degree gradient points to `(+1, +1)`.
pub(crate) fn quantized_offset(theta: f64) -> (isize, isize) {
    let deg = theta.to_degrees();
    if !(22.5..157.5).contains(&deg) {
        (1, 0)
    } else if deg < 67.5 {
        (1, 1)
    } else if deg < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Keeps a pixel's magnitude iff it is `>=` both in-bounds neighbors along
/// the quantized gradient direction and strictly `>` at least one of them.
///
/// Magnitudes above 1 (possible for saturated color gradients) are clamped
/// so the output stays a valid [`RasterImage`].
pub fn nonmax_suppress(grad: &GradientField) -> RasterImage {
    let (w, h) = (grad.width, grad.height);
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = grad.magnitude[i];
            if m <= 0.0 {
                continue;
            }
            let (dx, dy) = quantized_offset(grad.orientation[i]);
            let mut keep_ge = true;
            let mut any_gt = false;
            for sign in [-1isize, 1] {
                let nx = x as isize + sign * dx;
                let ny = y as isize + sign * dy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let n = grad.magnitude[ny as usize * w + nx as usize];
                keep_ge &= m >= n;
                any_gt |= m > n;
            }
            if keep_ge && any_gt {
                out[i] = m.min(1.0);
            }
        }
    }
    RasterImage::from_parts(w, h, 1, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradient::gradient_gray;
    use alloc::vec::Vec;
    use core::f64::consts::PI;

    fn field(w: usize, h: usize, mag: Vec<f64>, theta: f64) -> GradientField {
        GradientField {
            width: w,
            height: h,
            gx: mag.iter().map(|m| m * libm::cos(theta)).collect(),
            gy: mag.iter().map(|m| m * libm::sin(theta)).collect(),
            orientation: vec![theta; w * h],
            magnitude: mag,
        }
    }

    #[test]
    fn quantization_bins() {
        assert_eq!(quantized_offset(0.0), (1, 0));
        assert_eq!(quantized_offset(PI / 4.0), (1, 1));
        assert_eq!(quantized_offset(PI / 2.0), (0, 1));
        assert_eq!(quantized_offset(3.0 * PI / 4.0), (-1, 1));
        assert_eq!(quantized_offset(170f64.to_radians()), (1, 0));
    }

    #[test]
    fn zero_field_gives_zero_image() {
        let f = field(4, 4, vec![0.0; 16], 0.0);
        assert!(nonmax_suppress(&f).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn plateau_is_fully_suppressed_in_interior() {
        // Tie-rule oracle on a 5x5 grid: every interior pixel has two equal
        // neighbors along the direction, so none is strictly greater.
        for theta in [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            let f = field(5, 5, vec![0.6; 25], theta);
            let out = nonmax_suppress(&f);
            for y in 1..4 {
                for x in 1..4 {
                    assert_eq!(out.get(x, y, 0), 0.0);
                }
            }
        }
    }

    #[test]
    fn border_compares_only_in_bounds_neighbors() {
        // 1-D ridge at the left border: x=0 has only the right neighbor.
        let f = field(3, 1, vec![0.9, 0.5, 0.1], 0.0);
        let out = nonmax_suppress(&f);
        assert_eq!(out.data(), &[0.9, 0.0, 0.0]);
    }

    #[test]
    fn antialiased_step_gives_single_pixel_ridge() {
        // Half-plane whose boundary passes through the centers of column 6:
        // area sampling puts 0.5 there, so the profile is symmetric about a
        // pixel and the maximum is unique.
        let (w, h) = (13, 7);
        let img = crate::RasterImage::from_fn(w, h, |x, _| match x {
            0..=5 => 0.0,
            6 => 0.5,
            _ => 1.0,
        })
        .unwrap();
        for sigma in [0.0, 1.0] {
            let g = gradient_gray(&img, sigma).unwrap();
            let out = nonmax_suppress(&g);
            // exhaustive oracle: count survivors per row
            for y in 0..h {
                let alive: Vec<usize> = (0..w).filter(|&x| out.get(x, y, 0) > 0.0).collect();
                assert_eq!(alive, [6], "row {y}, sigma {sigma}");
            }
        }
    }

    #[test]
    fn output_is_zero_or_magnitude() {
        let img = crate::RasterImage::from_fn(9, 9, |x, y| ((x * 7 + y * 3) % 5) as f64 / 4.0).unwrap();
        let g = gradient_gray(&img, 0.7).unwrap();
        let out = nonmax_suppress(&g);
        for (o, m) in out.data().iter().zip(&g.magnitude) {
            assert!(*o == 0.0 || *o == *m);
        }
    }
}
