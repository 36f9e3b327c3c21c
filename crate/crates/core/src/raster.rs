//! Pixel grids shared by every stage.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Integer pixel coordinates (column, row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pixel {
    pub x: usize,
    pub y: usize,
}

impl Pixel {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn center(self) -> Point {
        Point::new(self.x as f64, self.y as f64)
    }
}

/// Subpixel position. Pixel centers sit on integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    /// Nearest pixel, or `None` when the point lies outside the grid.
    pub fn nearest_pixel(self, width: usize, height: usize) -> Option<Pixel> {
        let x = math::round(self.x);
        let y = math::round(self.y);
        if x < 0.0 || y < 0.0 || x >= width as f64 || y >= height as f64 {
            return None;
        }
        Some(Pixel::new(x as usize, y as usize))
    }

    pub fn clamp_to(self, width: usize, height: usize) -> Point {
        Point::new(
            self.x.clamp(0.0, (width - 1) as f64),
            self.y.clamp(0.0, (height - 1) as f64),
        )
    }
}

impl core::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl core::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl core::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Bilinear interpolation of a row-major scalar grid, clamping the sample
/// position to the grid.
pub fn bilinear(data: &[f64], width: usize, height: usize, p: Point) -> f64 {
    let x = p.x.clamp(0.0, (width - 1) as f64);
    let y = p.y.clamp(0.0, (height - 1) as f64);
    let x0 = math::floor(x) as usize;
    let y0 = math::floor(y) as usize;
    let x1 = (x0 + 1).min(width - 1);
    let y1 = (y0 + 1).min(height - 1);
    let tx = x - x0 as f64;
    let ty = y - y0 as f64;
    let top = data[y0 * width + x0] * (1.0 - tx) + data[y0 * width + x1] * tx;
    let bottom = data[y1 * width + x0] * (1.0 - tx) + data[y1 * width + x1] * tx;
    top * (1.0 - ty) + bottom * ty
}

/// A 2-D grid of samples in `[0, 1]`, one or three channels, row-major and
/// channel-interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::DataLength {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::SampleRange { index, value });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Single-channel image filled with `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, 1, vec![value; width * height])
    }

    /// Single-channel image from a per-pixel function.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, 1, data)
    }

    /// Builds an image without range checks; callers guarantee the
    /// invariants.
    pub(crate) fn from_parts(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Samples of one channel as a contiguous plane.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(c)
            .step_by(self.channels)
            .copied()
            .collect()
    }

    pub(crate) fn from_planes(width: usize, height: usize, planes: &[Vec<f64>]) -> Self {
        let channels = planes.len();
        let mut data = vec![0.0; width * height * channels];
        for (c, plane) in planes.iter().enumerate() {
            for (i, &v) in plane.iter().enumerate() {
                data[i * channels + c] = v;
            }
        }
        Self::from_parts(width, height, channels, data)
    }

    /// Bilinear sample of channel 0.
    pub fn sample(&self, p: Point) -> f64 {
        if self.channels == 1 {
            bilinear(&self.data, self.width, self.height, p)
        } else {
            bilinear(&self.channel(0), self.width, self.height, p)
        }
    }
}

/// Boolean edge membership per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryEdgeMap {
    width: usize,
    height: usize,
    membership: Vec<bool>,
}

impl BinaryEdgeMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            membership: vec![false; width * height],
        }
    }

    pub fn from_membership(width: usize, height: usize, membership: Vec<bool>) -> Result<Self> {
        if membership.len() != width * height {
            return Err(Error::DataLength {
                expected: width * height,
                actual: membership.len(),
            });
        }
        Ok(Self {
            width,
            height,
            membership,
        })
    }

    /// Pixels of a single-channel image strictly above `threshold`.
    pub fn from_threshold(img: &RasterImage, threshold: f64) -> Self {
        let gray = if img.channels() == 1 {
            img.data().to_vec()
        } else {
            img.channel(0)
        };
        Self {
            width: img.width(),
            height: img.height(),
            membership: gray.iter().map(|&v| v > threshold).collect(),
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: impl IntoIterator<Item = Pixel>) -> Self {
        let mut map = Self::new(width, height);
        for p in pixels {
            map.set(p.x, p.y, true);
        }
        map
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.membership[y * self.width + x]
    }

    /// Like [`get`](Self::get) but `false` outside the grid.
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.membership[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.membership[y * self.width + x] = on;
    }

    pub fn count(&self) -> usize {
        self.membership.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.membership.iter().any(|&b| b)
    }

    /// Edge pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        let w = self.width;
        self.membership
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Pixel::new(i % w, i / w))
    }

    pub fn union(&self, other: &BinaryEdgeMap) -> Result<BinaryEdgeMap> {
        self.check_same_dims(other.width, other.height)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            membership: self
                .membership
                .iter()
                .zip(&other.membership)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    /// 0/1 single-channel image of the map.
    pub fn to_image(&self) -> RasterImage {
        RasterImage::from_parts(
            self.width,
            self.height,
            1,
            self.membership
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    pub(crate) fn check_same_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: width,
                right_h: height,
            });
        }
        Ok(())
    }
}
