//! Classic Canny baseline: hysteresis thresholding with 8-connected
//! linking on non-maximum-suppressed magnitudes.

use alloc::vec::Vec;

use crate::gradient::gradient_of;
use crate::nms::nonmax_suppress;
use crate::raster::{BinaryEdgeMap, RasterImage};
use crate::topology::NEIGHBORS_8;
use crate::{Error, Result};

/// High (`TH`) and low (`TL`) hysteresis thresholds on `[0, 1]`
/// magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub high: f64,
    pub low: f64,
}

impl Thresholds {
    pub fn new(high: f64, low: f64) -> Result<Self> {
        let t = Self { high, low };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.high) || !(0.0..=1.0).contains(&self.low) {
            return Err(Error::param("thresholds", "must lie in [0, 1]"));
        }
        if self.low > self.high {
            return Err(Error::param("thresholds", "low threshold exceeds high threshold"));
        }
        Ok(())
    }

    /// Absolute thresholds from fractiles of the nonzero magnitudes of
    /// `nms`. A fractile of 0.9 puts the threshold at the value below which
    /// 90% of the nonzero pixels fall.
    pub fn from_fractiles(nms: &RasterImage, high_fractile: f64, low_fractile: f64) -> Result<Self> {
        for f in [high_fractile, low_fractile] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::param("fractile", "must lie in [0, 1]"));
            }
        }
        let mut values: Vec<f64> = nms.data().iter().copied().filter(|&v| v > 0.0).collect();
        if values.is_empty() {
            return Self::new(1.0, 1.0);
        }
        values.sort_by(f64::total_cmp);
        let pick = |f: f64| {
            let i = ((f * values.len() as f64) as usize).min(values.len() - 1);
            values[i]
        };
        let high = pick(high_fractile);
        let low = pick(low_fractile).min(high);
        Self::new(high, low)
    }
}

/// A pixel is an edge iff its value is `> TL` and it is 8-connected through
/// pixels `> TL` to a pixel `>= TH`.
pub fn hysteresis(nms: &RasterImage, th: Thresholds) -> Result<BinaryEdgeMap> {
    th.validate()?;
    if nms.channels() != 1 {
        return Err(Error::UnsupportedChannels(nms.channels()));
    }
    let (w, h) = (nms.width(), nms.height());
    let data = nms.data();
    let mut edges = BinaryEdgeMap::new(w, h);
    let mut stack = Vec::new();
    for (i, &v) in data.iter().enumerate() {
        if v >= th.high && v > th.low && !edges.membership()[i] {
            edges.set(i % w, i / w, true);
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (x, y) = ((j % w) as isize, (j / w) as isize);
                for (dx, dy) in NEIGHBORS_8 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if !edges.get(nx, ny) && data[ny * w + nx] > th.low {
                        edges.set(nx, ny, true);
                        stack.push(ny * w + nx);
                    }
                }
            }
        }
    }
    Ok(edges)
}

/// Gradient (gray or color), non-maximum suppression, hysteresis.
pub fn canny_detect(img: &RasterImage, sigma: f64, th: Thresholds) -> Result<BinaryEdgeMap> {
    th.validate()?;
    let grad = gradient_of(img, sigma)?;
    hysteresis(&nonmax_suppress(&grad), th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_inverted_thresholds() {
        assert!(Thresholds::new(0.2, 0.3).is_err());
        assert!(Thresholds::new(1.2, 0.3).is_err());
        let img = RasterImage::filled(2, 2, 0.0).unwrap();
        assert!(hysteresis(&img, Thresholds { high: 0.1, low: 0.5 }).is_err());
    }

    #[test]
    fn empty_and_single_seed() {
        let zero = RasterImage::filled(4, 4, 0.0).unwrap();
        assert!(hysteresis(&zero, Thresholds::new(0.5, 0.1).unwrap()).unwrap().is_empty());
        let one = RasterImage::from_fn(4, 4, |x, y| if (x, y) == (2, 1) { 0.9 } else { 0.0 }).unwrap();
        let e = hysteresis(&one, Thresholds::new(0.5, 0.1).unwrap()).unwrap();
        assert_eq!(e.pixels().collect::<Vec<_>>(), [crate::Pixel::new(2, 1)]);
    }

    #[test]
    fn row_example() {
        let img = RasterImage::new(5, 1, 1, vec![0.9, 0.3, 0.3, 0.3, 0.05]).unwrap();
        let e = hysteresis(&img, Thresholds::new(0.8, 0.2).unwrap()).unwrap();
        assert_eq!(e.membership(), &[true, true, true, true, false]);
    }

    #[test]
    fn zero_low_threshold_excludes_zero_pixels() {
        let img = RasterImage::new(3, 1, 1, vec![0.5, 0.0, 0.5]).unwrap();
        let e = hysteresis(&img, Thresholds::new(0.5, 0.0).unwrap()).unwrap();
        assert_eq!(e.membership(), &[true, false, true]);
    }

    #[test]
    fn fractile_thresholds() {
        let img = RasterImage::new(5, 1, 1, vec![0.0, 0.1, 0.2, 0.3, 0.4]).unwrap();
        let t = Thresholds::from_fractiles(&img, 0.75, 0.25).unwrap();
        assert_eq!((t.high, t.low), (0.4, 0.2));
    }
}
