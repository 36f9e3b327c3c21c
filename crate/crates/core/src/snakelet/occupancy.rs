use alloc::vec;
use alloc::vec::Vec;

use crate::line::supercover_polyline;
use crate::raster::Pixel;
use crate::snakelet::Snakelet;

/// Dilated rasterization of registered snakelets. Each occupied pixel
/// remembers the first snakelet that claimed it, so a growing snakelet can
/// ignore its own lineage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyMask {
    width: usize,
    height: usize,
    radius: usize,
    owner: Vec<Option<u32>>,
}

impl OccupancyMask {
    pub fn new(width: usize, height: usize, radius: usize) -> Self {
        Self {
            width,
            height,
            radius,
            owner: vec![None; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn is_occupied(&self, p: Pixel) -> bool {
        self.owner[p.y * self.width + p.x].is_some()
    }

    pub fn owner(&self, p: Pixel) -> Option<u32> {
        self.owner[p.y * self.width + p.x]
    }

    pub fn occupied_count(&self) -> usize {
        self.owner.iter().filter(|o| o.is_some()).count()
    }

    /// Marks every pixel within `radius` of the supercover of `s`'s
    /// polyline. Already-claimed pixels keep their owner.
    pub fn register(&mut self, s: &Snakelet) {
        let (w, h) = (self.width, self.height);
        let r = self.radius as isize;
        let mut swept = Vec::new();
        supercover_polyline(&s.points, w, h, |p| swept.push(p));
        swept.sort_unstable();
        swept.dedup();
        for p in swept {
            for dy in -r..=r {
                for dx in -r..=r {
                    if dx * dx + dy * dy > r * r {
                        continue;
                    }
                    let (x, y) = (p.x as isize + dx, p.y as isize + dy);
                    if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
                        continue;
                    }
                    let slot = &mut self.owner[y as usize * w + x as usize];
                    if slot.is_none() {
                        *slot = Some(s.id);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Point;
    use alloc::collections::BTreeSet;

    fn snake(points: &[(f64, f64)]) -> Snakelet {
        Snakelet::new(7, 1, points.iter().map(|&(x, y)| Point::new(x, y)).collect(), false, true).unwrap()
    }

    fn occupied(m: &OccupancyMask) -> BTreeSet<(usize, usize)> {
        let mut s = BTreeSet::new();
        for y in 0..m.height() {
            for x in 0..m.width() {
                if m.is_occupied(Pixel::new(x, y)) {
                    s.insert((x, y));
                }
            }
        }
        s
    }

    #[test]
    fn radius_zero_is_the_supercover() {
        let mut m = OccupancyMask::new(12, 8, 0);
        m.register(&snake(&[(2.0, 4.0), (7.0, 4.0)]));
        let expect: BTreeSet<_> = (2..=7).map(|x| (x, 4)).collect();
        assert_eq!(occupied(&m), expect);
        assert_eq!(m.owner(Pixel::new(3, 4)), Some(7));
    }

    #[test]
    fn registration_is_idempotent() {
        let s = snake(&[(1.3, 1.0), (6.2, 5.5), (9.0, 2.0)]);
        let mut m = OccupancyMask::new(12, 8, 1);
        m.register(&s);
        let once = m.clone();
        m.register(&s);
        assert_eq!(m, once);
    }

    #[test]
    fn radius_two_is_disc_dilation() {
        let s = snake(&[(3.2, 3.0), (14.6, 9.4)]);
        let mut thin = OccupancyMask::new(20, 14, 0);
        thin.register(&s);
        let mut fat = OccupancyMask::new(20, 14, 2);
        fat.register(&s);
        let base = occupied(&thin);
        // brute force: every pixel within Euclidean distance 2 of a base pixel
        let mut expect = BTreeSet::new();
        for y in 0..14usize {
            for x in 0..20usize {
                if base.iter().any(|&(bx, by)| {
                    let (dx, dy) = (bx as isize - x as isize, by as isize - y as isize);
                    dx * dx + dy * dy <= 4
                }) {
                    expect.insert((x, y));
                }
            }
        }
        assert_eq!(occupied(&fat), expect);
    }
}
