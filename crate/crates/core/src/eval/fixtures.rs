//! Synthetic shapes: thin contours as edge maps and antialiased images.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::math;
use crate::raster::{BinaryEdgeMap, Pixel, Point, RasterImage};

/// Rasterizes a densely sampled curve into an ordered, thin 8-connected
/// pixel chain. Pixels whose chain neighbors already touch are dropped, so
/// the result has no staircase corners.
pub fn curve_pixels(samples: impl IntoIterator<Item = Point>, closed: bool, width: usize, height: usize) -> Vec<Pixel> {
    let mut chain: Vec<Pixel> = Vec::new();
    for p in samples {
        let Some(px) = p.nearest_pixel(width, height) else { continue };
        if chain.last() != Some(&px) {
            chain.push(px);
        }
    }
    if closed && chain.len() > 1 && chain.first() == chain.last() {
        chain.pop();
    }
    let touch = |a: Pixel, b: Pixel| a.x.abs_diff(b.x) <= 1 && a.y.abs_diff(b.y) <= 1;
    loop {
        let n = chain.len();
        if n < 3 {
            return chain;
        }
        let mut keep = Vec::with_capacity(n);
        let mut removed = false;
        let mut i = 0;
        while i < n {
            let interior = closed || (i > 0 && i + 1 < n);
            if interior && !removed {
                let prev = if i == 0 { chain[n - 1] } else { chain[i - 1] };
                let next = chain[(i + 1) % n];
                if touch(prev, next) {
                    removed = true;
                    i += 1;
                    continue;
                }
            }
            keep.push(chain[i]);
            i += 1;
        }
        if !removed {
            return chain;
        }
        chain = keep;
    }
}

fn ellipse_samples(cx: f64, cy: f64, a: f64, b: f64) -> impl Iterator<Item = Point> {
    let n = (8.0 * TAU * a.max(b)) as usize + 8;
    (0..=n).map(move |k| {
        let t = TAU * k as f64 / n as f64;
        Point::new(cx + a * math::cos(t), cy + b * math::sin(t))
    })
}

/// Closed thin ellipse contour, ordered counter-clockwise in image
/// coordinates starting at angle 0.
pub fn ellipse_contour(width: usize, height: usize, cx: f64, cy: f64, a: f64, b: f64) -> Vec<Pixel> {
    curve_pixels(ellipse_samples(cx, cy, a, b), true, width, height)
}

pub fn ellipse_ring(width: usize, height: usize, cx: f64, cy: f64, a: f64, b: f64) -> BinaryEdgeMap {
    BinaryEdgeMap::from_pixels(width, height, ellipse_contour(width, height, cx, cy, a, b))
}

/// Open U: two vertical arms of length `arm` joined at the bottom by a
/// half circle of radius `r` centered at `(cx, cy)`.
pub fn u_contour(width: usize, height: usize, cx: f64, cy: f64, r: f64, arm: f64) -> Vec<Pixel> {
    let mut samples = Vec::new();
    let steps = (8.0 * arm) as usize + 1;
    for k in 0..=steps {
        samples.push(Point::new(cx - r, cy - arm + arm * k as f64 / steps as f64));
    }
    let arc = (8.0 * PI * r) as usize + 1;
    for k in 0..=arc {
        let t = PI - PI * k as f64 / arc as f64;
        samples.push(Point::new(cx + r * math::cos(t), cy + r * math::sin(t)));
    }
    for k in 0..=steps {
        samples.push(Point::new(cx + r, cy - arm * k as f64 / steps as f64));
    }
    curve_pixels(samples, false, width, height)
}

pub fn u_shape(width: usize, height: usize, cx: f64, cy: f64, r: f64, arm: f64) -> BinaryEdgeMap {
    BinaryEdgeMap::from_pixels(width, height, u_contour(width, height, cx, cy, r, arm))
}

/// Area-sampled image: each pixel is the mean of `f` over an
/// `ss x ss` grid of subsamples within its unit square.
pub fn render(width: usize, height: usize, ss: usize, f: impl Fn(f64, f64) -> f64) -> RasterImage {
    let ss = ss.max(1);
    let inv = 1.0 / (ss * ss) as f64;
    RasterImage::from_fn(width, height, |x, y| {
        let mut acc = 0.0;
        for j in 0..ss {
            for i in 0..ss {
                let sx = x as f64 - 0.5 + (i as f64 + 0.5) / ss as f64;
                let sy = y as f64 - 0.5 + (j as f64 + 0.5) / ss as f64;
                acc += f(sx, sy);
            }
        }
        (acc * inv).clamp(0.0, 1.0)
    })
    .expect("fixture dimensions are nonzero")
}

/// Black left half, white right half, boundary at `x = x0`. Pixel values
/// are exact area fractions.
pub fn half_plane(width: usize, height: usize, x0: f64) -> RasterImage {
    RasterImage::from_fn(width, height, |x, _| (x as f64 + 0.5 - x0).clamp(0.0, 1.0)).expect("fixture dimensions are nonzero")
}

/// Antialiased filled disk: `inside` within radius `r`, `outside` beyond.
pub fn disk_image(width: usize, height: usize, cx: f64, cy: f64, r: f64, inside: f64, outside: f64) -> RasterImage {
    render(width, height, 4, |x, y| {
        if math::hypot(x - cx, y - cy) <= r {
            inside
        } else {
            outside
        }
    })
}

/// Disk whose contrast against the background fades along part of its
/// rim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDisk {
    pub width: usize,
    pub height: usize,
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    /// Angle (radians, image coordinates) at the middle of the faded arc.
    pub fade_angle: f64,
    /// Arc length, in pixels along the rim, held at `min_contrast`.
    pub fade_len: f64,
    /// Arc length of the cosine ramp on each side of the faded arc.
    pub ramp_len: f64,
    pub min_contrast: f64,
}

impl FadingDisk {
    /// Contrast at polar angle `phi`.
    pub fn contrast(&self, phi: f64) -> f64 {
        let mut d = libm::fmod(phi - self.fade_angle, TAU);
        if d < 0.0 {
            d += TAU;
        }
        if d > PI {
            d = TAU - d;
        }
        let arc = d * self.radius - self.fade_len / 2.0;
        if arc <= 0.0 {
            self.min_contrast
        } else if arc >= self.ramp_len {
            1.0
        } else {
            let t = 0.5 - 0.5 * math::cos(PI * arc / self.ramp_len);
            self.min_contrast + (1.0 - self.min_contrast) * t
        }
    }

    pub fn image(&self) -> RasterImage {
        render(self.width, self.height, 4, |x, y| {
            let (dx, dy) = (x - self.cx, y - self.cy);
            let c = self.contrast(math::atan2(dy, dx));
            if math::hypot(dx, dy) <= self.radius {
                0.5 + c / 2.0
            } else {
                0.5 - c / 2.0
            }
        })
    }

    /// The true rim as a thin closed contour.
    pub fn contour(&self) -> BinaryEdgeMap {
        ellipse_ring(self.width, self.height, self.cx, self.cy, self.radius, self.radius)
    }

    /// Rim pixels inside the faded arc (contrast at `min_contrast`).
    pub fn faded_pixels(&self) -> Vec<Pixel> {
        self.contour()
            .pixels()
            .filter(|p| {
                let phi = math::atan2(p.y as f64 - self.cy, p.x as f64 - self.cx);
                self.contrast(phi) <= self.min_contrast + 1e-12
            })
            .collect()
    }
}
