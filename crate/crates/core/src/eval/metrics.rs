//! Tolerance-based matching of edge maps.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::raster::{BinaryEdgeMap, Pixel, Point};
use crate::Result;

/// Share of a gap's pixels that must be matched for the gap to count as
/// closed.
pub const GAP_COVERAGE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gap_closure_rate: f64,
    pub mean_contour_distance: f64,
}

/// Exact Euclidean distance from every pixel to the nearest set pixel of
/// a map. Infinite everywhere for an empty map.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    width: usize,
    height: usize,
    dist: Vec<f64>,
}

impl DistanceMap {
    pub fn new(map: &BinaryEdgeMap) -> Self {
        let (w, h) = (map.width(), map.height());
        let mut sq: Vec<f64> = map.membership().iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();
        let mut line = vec![0.0; w.max(h)];
        let mut out = vec![0.0; w.max(h)];
        for x in 0..w {
            for y in 0..h {
                line[y] = sq[y * w + x];
            }
            squared_dt_1d(&line[..h], &mut out[..h]);
            for y in 0..h {
                sq[y * w + x] = out[y];
            }
        }
        for y in 0..h {
            line[..w].copy_from_slice(&sq[y * w..(y + 1) * w]);
            squared_dt_1d(&line[..w], &mut out[..w]);
            sq[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
        }
        Self {
            width: w,
            height: h,
            dist: sq.into_iter().map(math::sqrt).collect(),
        }
    }

    pub fn get(&self, p: Pixel) -> f64 {
        self.dist[p.y * self.width + p.x]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// One-dimensional squared distance transform by lower envelope of
/// parabolas.
fn squared_dt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&i| f[i].is_finite()).collect();
    if sites.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    let inter = |q: usize, p: usize| {
        let (qf, pf) = (q as f64, p as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
    };
    for &q in &sites {
        while let Some(&p) = v.last() {
            let s = inter(q, p);
            if s <= z[z.len() - 1] {
                v.pop();
                z.pop();
            } else {
                break;
            }
        }
        if v.is_empty() {
            v.push(q);
            z.clear();
            z.push(f64::NEG_INFINITY);
        } else {
            let s = inter(q, *v.last().unwrap());
            v.push(q);
            z.push(s);
        }
    }
    z.push(f64::INFINITY);
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        while z[k + 1] < i as f64 {
            k += 1;
        }
        let d = i as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Compares `result` against `truth` at `tolerance` pixels.
///
/// Precision of an empty result and recall of an empty truth are 1; with
/// no gaps the gap-closure rate is 1.
pub fn score(result: &BinaryEdgeMap, truth: &BinaryEdgeMap, tolerance: f64, gaps: &[Vec<Pixel>]) -> Result<Metrics> {
    result.check_same_dims(truth.width(), truth.height())?;
    let to_truth = DistanceMap::new(truth);
    let to_result = DistanceMap::new(result);
    let matched = |d: f64| d <= tolerance;

    let mut n_res = 0usize;
    let mut hit_res = 0usize;
    let mut dist_sum = 0.0;
    for p in result.pixels() {
        let d = to_truth.get(p);
        n_res += 1;
        hit_res += matched(d) as usize;
        dist_sum += d;
    }
    let n_truth = truth.count();
    let hit_truth = truth.pixels().filter(|&p| matched(to_result.get(p))).count();

    let precision = if n_res == 0 { 1.0 } else { hit_res as f64 / n_res as f64 };
    let recall = if n_truth == 0 { 1.0 } else { hit_truth as f64 / n_truth as f64 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let mean_contour_distance = if n_res == 0 { 0.0 } else { dist_sum / n_res as f64 };
    let gap_closure_rate = if gaps.is_empty() {
        1.0
    } else {
        let closed = gaps
            .iter()
            .filter(|g| {
                let hit = g.iter().filter(|&&p| matched(to_result.get(p))).count();
                !g.is_empty() && hit as f64 >= GAP_COVERAGE * g.len() as f64
            })
            .count();
        closed as f64 / gaps.len() as f64
    };
    Ok(Metrics {
        precision,
        recall,
        f1,
        gap_closure_rate,
        mean_contour_distance,
    })
}

/// Mean distance from subpixel points to the nearest set pixel of `truth`.
pub fn mean_point_distance(points: &[Point], truth: &BinaryEdgeMap) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let pixels: Vec<Point> = truth.pixels().map(Pixel::center).collect();
    let sum: f64 = points
        .iter()
        .map(|p| pixels.iter().map(|q| p.distance(*q)).fold(f64::INFINITY, f64::min))
        .sum();
    sum / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(map: &BinaryEdgeMap) -> Vec<f64> {
        let set: Vec<Pixel> = map.pixels().collect();
        (0..map.width() * map.height())
            .map(|i| {
                let p = Pixel::new(i % map.width(), i / map.width()).center();
                set.iter().map(|q| p.distance(q.center())).fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    fn row(w: usize, h: usize, y: usize) -> BinaryEdgeMap {
        BinaryEdgeMap::from_pixels(w, h, (0..w).map(|x| Pixel::new(x, y)))
    }

    #[test]
    fn perfect_match() {
        let t = row(12, 10, 5);
        let m = score(&t, &t, 0.0, &[]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1, m.mean_contour_distance), (1.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn empty_result() {
        let m = score(&BinaryEdgeMap::new(12, 10), &row(12, 10, 5), 2.0, &[]).unwrap();
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.precision, 1.0);
    }

    #[test]
    fn shifted_line() {
        let (t, r) = (row(12, 10, 5), row(12, 10, 7));
        let m = score(&r, &t, 2.0, &[]).unwrap();
        assert_eq!((m.precision, m.recall), (1.0, 1.0));
        assert_eq!(m.mean_contour_distance, 2.0);
        let m = score(&r, &t, 1.0, &[]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gap_closure_counts_covered_gaps() {
        let t = row(20, 5, 2);
        let r = BinaryEdgeMap::from_pixels(20, 5, (0..10).map(|x| Pixel::new(x, 2)));
        let gaps = vec![(2..7).map(|x| Pixel::new(x, 2)).collect(), (12..17).map(|x| Pixel::new(x, 2)).collect()];
        let m = score(&r, &t, 1.0, &gaps).unwrap();
        assert_eq!(m.gap_closure_rate, 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(score(&BinaryEdgeMap::new(3, 3), &BinaryEdgeMap::new(3, 4), 1.0, &[]).is_err());
    }

    proptest! {
        #[test]
        fn edt_matches_brute_force(w in 1usize..14, h in 1usize..14, bits in proptest::collection::vec(any::<bool>(), 196), density in 1u8..8) {
            let mut map = BinaryEdgeMap::new(w, h);
            for i in 0..w * h {
                if bits[i] && (i as u8 % 8) < density {
                    map.set(i % w, i / w, true);
                }
            }
            let dt = DistanceMap::new(&map);
            let oracle = brute(&map);
            for i in 0..w * h {
                let got = dt.get(Pixel::new(i % w, i / w));
                prop_assert!(got == oracle[i] || (got - oracle[i]).abs() < 1e-9, "{} vs {}", got, oracle[i]);
            }
        }

        #[test]
        fn self_score_is_perfect(bits in proptest::collection::vec(any::<bool>(), 100), t in 0.0f64..3.0) {
            let map = BinaryEdgeMap::from_membership(10, 10, bits).unwrap();
            let m = score(&map, &map, t, &[]).unwrap();
            prop_assert_eq!((m.precision, m.recall, m.mean_contour_distance), (1.0, 1.0, 0.0));
            prop_assert!((m.f1 - 2.0 * m.precision * m.recall / (m.precision + m.recall)).abs() < 1e-9);
        }

        #[test]
        fn shift_recall_iff_within_tolerance(d in 0usize..6, t in 0usize..5) {
            let m = score(&row(16, 12, 2 + d), &row(16, 12, 2), t as f64, &[]).unwrap();
            prop_assert_eq!(m.recall == 1.0, d <= t);
        }
    }
}
