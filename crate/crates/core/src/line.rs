//! Supercover rasterization: every pixel whose closed unit square touches
//! the segment. Pixel `(i, j)` covers `[i - 0.5, i + 0.5] x [j - 0.5, j + 0.5]`.

use crate::math;
use crate::raster::{Pixel, Point};

/// Calls `visit` for each in-bounds pixel of the supercover of `a..b`.
/// Pixels are produced column by column and may repeat at column seams.
pub fn supercover(a: Point, b: Point, width: usize, height: usize, mut visit: impl FnMut(Pixel)) {
    let (xmin, xmax) = if a.x <= b.x { (a.x, b.x) } else { (b.x, a.x) };
    let col_lo = math::ceil(xmin - 0.5).max(0.0);
    let col_hi = math::floor(xmax + 0.5).min(width as f64 - 1.0);
    if col_lo > col_hi {
        return;
    }
    let dx = b.x - a.x;
    for col in col_lo as usize..=col_hi as usize {
        let (ylo, yhi) = if dx == 0.0 {
            (a.y.min(b.y), a.y.max(b.y))
        } else {
            let x_lo = (col as f64 - 0.5).max(xmin);
            let x_hi = (col as f64 + 0.5).min(xmax);
            let y_at = |x: f64| a.y + (b.y - a.y) * ((x - a.x) / dx);
            let (p, q) = (y_at(x_lo), y_at(x_hi));
            (p.min(q), p.max(q))
        };
        let row_lo = math::ceil(ylo - 0.5).max(0.0);
        let row_hi = math::floor(yhi + 0.5).min(height as f64 - 1.0);
        if row_lo > row_hi {
            continue;
        }
        for row in row_lo as usize..=row_hi as usize {
            visit(Pixel::new(col, row));
        }
    }
}

/// Supercover of every segment of a polyline.
pub fn supercover_polyline(points: &[Point], width: usize, height: usize, mut visit: impl FnMut(Pixel)) {
    match points {
        [] => {}
        [p] => supercover(*p, *p, width, height, &mut visit),
        _ => {
            for seg in points.windows(2) {
                supercover(seg[0], seg[1], width, height, &mut visit);
            }
        }
    }
}
