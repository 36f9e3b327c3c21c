//! Seeded edge detection with snakelets.
//!
//! Hysteresis linking is replaced by growth: strong NMS pixels seed pairs
//! of snakelets that grow in opposite directions along the edge while the
//! NMS magnitude under the growing end stays above the low threshold. Long
//! snakelets hand over to a fresh continuation at their end, and every
//! finished snakelet is registered in an occupancy mask that suppresses
//! later seeds and stops other snakelets. A recovery pass on the result
//! closes the remaining breaks.

use alloc::vec::Vec;

use crate::canny::Thresholds;
use crate::gradient::{gradient_of, GradientField};
use crate::gvf::{GvfState, VectorField, DEFAULT_MU};
use crate::line::supercover_polyline;
use crate::math;
use crate::nms::nonmax_suppress;
use crate::raster::{BinaryEdgeMap, Pixel, Point, RasterImage};
use crate::recovery::{recover, RecoveryParams, GRADIENT_ZERO_FRACTILE};
use crate::snakelet::{InternalSolver, OccupancyMask, Snakelet, SnakeletParams, SnakeletState};
use crate::{Error, Result};

/// Snakelets shorter than this are dropped from the output.
pub const MIN_SNAKELET_LENGTH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectParams {
    pub sigma: f64,
    pub th: Thresholds,
    /// Length a seed snakelet grows before it can be stopped by other
    /// snakelets.
    pub seed_init_length: f64,
    /// Length at which a snakelet hands over to a continuation.
    pub chain_max_grow: f64,
    pub gvf_iters: usize,
    pub coverage_radius: usize,
    pub snap: f64,
    pub snake: SnakeletParams,
    /// Parameters of the closing recovery pass; `None` skips it.
    pub recovery: Option<RecoveryParams>,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            th: Thresholds { high: 0.2, low: 0.05 },
            seed_init_length: 12.0,
            chain_max_grow: 40.0,
            gvf_iters: 4,
            coverage_radius: 2,
            snap: 1.5,
            snake: SnakeletParams::default(),
            recovery: Some(RecoveryParams::default()),
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        self.th.validate()?;
        self.snake.validate()?;
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::param("sigma", "must be >= 0"));
        }
        if !(self.seed_init_length > 0.0) || !self.seed_init_length.is_finite() {
            return Err(Error::param("seed_init_length", "must be > 0"));
        }
        if !(self.chain_max_grow > 0.0) || !self.chain_max_grow.is_finite() {
            return Err(Error::param("chain_max_grow", "must be > 0"));
        }
        if !(self.snap > 0.0) || !self.snap.is_finite() {
            return Err(Error::param("snap", "must be > 0"));
        }
        if let Some(r) = &self.recovery {
            r.validate(&self.snake)?;
        }
        Ok(())
    }
}

/// Snakelets in creation order, with the image size they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct SnakeletSet {
    pub width: usize,
    pub height: usize,
    pub snakelets: Vec<Snakelet>,
    /// How many trailing snakelets were added by a closing recovery pass.
    pub recovered: usize,
}

impl SnakeletSet {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            snakelets: Vec::new(),
            recovered: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.snakelets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snakelets.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Snakelet> {
        self.snakelets.iter().find(|s| s.id == id)
    }

    /// Chains of snakelets joined through their `parent` links, each as
    /// one polyline from the oldest ancestor to the last continuation.
    pub fn merged_chains(&self) -> Vec<Vec<Point>> {
        let mut has_child = alloc::collections::BTreeSet::new();
        for s in &self.snakelets {
            if let Some(p) = s.parent {
                has_child.insert(p);
            }
        }
        let mut chains = Vec::new();
        for s in &self.snakelets {
            if has_child.contains(&s.id) {
                continue;
            }
            let mut links = alloc::vec![s];
            while let Some(p) = links.last().and_then(|l| l.parent).and_then(|p| self.get(p)) {
                links.push(p);
            }
            let mut points: Vec<Point> = Vec::new();
            for link in links.iter().rev() {
                let skip = usize::from(points.last().is_some_and(|&q| q.distance(link.points[0]) < 1e-9));
                points.extend(link.points.iter().skip(skip));
            }
            chains.push(points);
        }
        chains
    }
}

/// Pixels with NMS value at least `th.high`, strongest first, ties in
/// row-major order.
pub fn select_seeds(nms: &RasterImage, th: Thresholds) -> Vec<Pixel> {
    let w = nms.width();
    let data = nms.data();
    let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data[i] >= th.high).collect();
    idx.sort_by(|&a, &b| data[b].total_cmp(&data[a]).then(a.cmp(&b)));
    idx.into_iter().map(|i| Pixel::new(i % w, i / w)).collect()
}

/// Supercover union of all snakelet polylines.
pub fn rasterize(set: &SnakeletSet) -> BinaryEdgeMap {
    let mut map = BinaryEdgeMap::new(set.width, set.height);
    for s in &set.snakelets {
        supercover_polyline(&s.points, set.width, set.height, |p| map.set(p.x, p.y, true));
    }
    map
}

struct Stage<'a> {
    nms: &'a RasterImage,
    grad: &'a GradientField,
    field: &'a VectorField,
    params: &'a DetectParams,
}

/// Full detection pipeline.
pub fn detect(img: &RasterImage, params: &DetectParams) -> Result<SnakeletSet> {
    params.validate()?;
    let grad = gradient_of(img, params.sigma)?;
    let nms = nonmax_suppress(&grad);
    detect_from(&grad, &nms, params)
}

/// Detection on a precomputed gradient field and its NMS image.
pub fn detect_from(grad: &GradientField, nms: &RasterImage, params: &DetectParams) -> Result<SnakeletSet> {
    params.validate()?;
    let (w, h) = (nms.width(), nms.height());
    let field = GvfState::init(nms, DEFAULT_MU)?
        .iterate(params.gvf_iters)
        .normalized(GRADIENT_ZERO_FRACTILE)?;
    let stage = Stage {
        nms,
        grad,
        field: &field,
        params,
    };

    let mut mask = OccupancyMask::new(w, h, params.coverage_radius);
    let mut out: Vec<Snakelet> = Vec::new();
    let mut next_id = 0u32;
    let mut solver = InternalSolver::new();
    for (seed_no, seed) in select_seeds(nms, params.th).into_iter().enumerate() {
        if mask.is_occupied(seed) {
            continue;
        }
        let theta = grad.orientation[seed.y * w + seed.x];
        let tangent = Point::new(-math::sin(theta), math::cos(theta));
        let first = next_id;
        next_id += 2;
        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
            let id = first + k as u32;
            let sibling = first + 1 - k as u32;
            let start = seed.center();
            let second = (start + tangent * (sign * params.snake.spacing)).clamp_to(w, h);
            if second.distance(start) < 1e-9 || !(nms.sample(second) > params.th.low) {
                continue;
            }
            let mut s = Snakelet::new(id, seed_no as u32, alloc::vec![start, second], false, true)?;
            let mut exclude = [id, sibling];
            loop {
                let (done, handover) = stage.grow_link(s, &exclude, &mask, &mut solver);
                if done.arc_length() >= MIN_SNAKELET_LENGTH {
                    mask.register(&done);
                }
                let parent_end = done.tail();
                let parent_id = done.id;
                let tangent = done.end_tangent(true);
                if done.arc_length() >= MIN_SNAKELET_LENGTH {
                    out.push(done);
                }
                let Some(t) = tangent.filter(|_| handover) else { break };
                let second = (parent_end + t * params.snake.spacing).clamp_to(w, h);
                if second.distance(parent_end) < 1e-9 || !(nms.sample(second) > params.th.low) {
                    break;
                }
                let mut c = Snakelet::new(next_id, seed_no as u32, alloc::vec![parent_end, second], false, true)?;
                c.parent = Some(parent_id);
                exclude = [c.id, parent_id];
                next_id += 1;
                s = c;
            }
        }
    }
    out.sort_by_key(|s| s.id);

    let mut set = SnakeletSet {
        width: w,
        height: h,
        snakelets: out,
        recovered: 0,
    };
    if let Some(rp) = &params.recovery {
        let outcome = recover(&rasterize(&set), rp, &params.snake, Some(grad))?;
        for mut s in outcome.set.snakelets {
            if s.state == SnakeletState::Reached {
                s.id = next_id;
                next_id += 1;
                set.snakelets.push(s);
                set.recovered += 1;
            }
        }
    }
    Ok(set)
}

impl Stage<'_> {
    /// Deform-grows one link of a chain. Returns the finished snakelet and
    /// whether a continuation should start at its tail.
    fn grow_link(
        &self,
        mut s: Snakelet,
        exclude: &[u32; 2],
        mask: &OccupancyMask,
        solver: &mut InternalSolver,
    ) -> (Snakelet, bool) {
        let p = self.params;
        let (w, h) = (mask.width(), mask.height());
        let anchor = s.points[0];
        let mut is_target = |q: Pixel| mask.owner(q).is_some_and(|o| !exclude.contains(&o));
        let seeded = s.parent.is_none();
        // generous cap: every cycle either grows or stops the snakelet
        let max_cycles = 8 * (math::ceil(p.chain_max_grow / MIN_GROWTH_PER_CYCLE) as usize) + 16;
        // growth balanced by contraction: stop once the length stalls
        let mut best = s.arc_length();
        let mut stalled = 0;
        for _ in 0..max_cycles {
            s = s.deform_step(self.field, &p.snake, solver);
            s.points[0] = anchor;
            let checking = !seeded || s.arc_length() >= p.seed_init_length;
            if checking && s.reached_ends(p.snap, w, h, &mut is_target).1 {
                s.state = SnakeletState::Reached;
                s.grow_tail = false;
                return (s, false);
            }
            s = s.grow_until(Some(self.grad), &p.snake, w, h, |c| self.nms.sample(c) > p.th.low);
            if s.state == SnakeletState::Stopped {
                return (s, false);
            }
            if checking && s.reached_ends(p.snap, w, h, &mut is_target).1 {
                s.state = SnakeletState::Reached;
                s.grow_tail = false;
                return (s, false);
            }
            if s.arc_length() >= p.chain_max_grow {
                s.state = SnakeletState::Stopped;
                s.grow_tail = false;
                return (s, true);
            }
            let len = s.arc_length();
            if len >= best + STALL_PROGRESS {
                best = len;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_CYCLES {
                    break;
                }
            }
            if s.needs_resample(&p.snake) && s.points.len() > 2 {
                if let Ok(r) = s.resample(&p.snake) {
                    s = r;
                }
            }
        }
        s.state = SnakeletState::Stopped;
        s.grow_tail = false;
        (s, false)
    }
}

/// Smallest growth per cycle the cycle cap budgets for.
const MIN_GROWTH_PER_CYCLE: f64 = 0.05;

/// A link whose arc length gains less than `STALL_PROGRESS` pixels over
/// `STALL_CYCLES` consecutive cycles is stopped.
const STALL_CYCLES: usize = 25;
const STALL_PROGRESS: f64 = 0.5;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeds_of_zero_image() {
        let nms = RasterImage::filled(8, 8, 0.0).unwrap();
        assert!(select_seeds(&nms, Thresholds { high: 0.5, low: 0.1 }).is_empty());
    }

    #[test]
    fn seeds_sorted_by_strength() {
        let mut data = vec![0.0; 16];
        data[3] = 0.7;
        data[9] = 0.9;
        let nms = RasterImage::new(4, 4, 1, data).unwrap();
        let s = select_seeds(&nms, Thresholds { high: 0.5, low: 0.1 });
        assert_eq!(s, [Pixel::new(1, 2), Pixel::new(3, 0)]);
    }

    #[test]
    fn seeds_match_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut data: Vec<f64> = (0..100).map(|_| rng.random::<f64>()).collect();
        data[17] = data[42].max(0.61);
        data[42] = data[17];
        let nms = RasterImage::new(10, 10, 1, data.clone()).unwrap();
        let got = select_seeds(&nms, Thresholds { high: 0.6, low: 0.1 });
        let mut expect: Vec<(f64, usize)> = data.iter().copied().enumerate().filter(|&(_, v)| v >= 0.6).map(|(i, v)| (-v, i)).collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect: Vec<Pixel> = expect.into_iter().map(|(_, i)| Pixel::new(i % 10, i / 10)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn rasterize_empty_and_single() {
        assert!(rasterize(&SnakeletSet::new(6, 6)).is_empty());
        let s = Snakelet::new(0, 0, vec![Point::new(0.0, 3.0), Point::new(5.0, 3.0)], false, true).unwrap();
        let set = SnakeletSet { snakelets: vec![s], ..SnakeletSet::new(8, 6) };
        let m = rasterize(&set);
        let px: Vec<Pixel> = m.pixels().collect();
        assert_eq!(px, (0..=5).map(|x| Pixel::new(x, 3)).collect::<Vec<_>>());
    }

    #[test]
    fn rasterize_is_a_union() {
        let a = Snakelet::new(0, 0, vec![Point::new(1.0, 1.0), Point::new(9.0, 6.0)], false, true).unwrap();
        let b = Snakelet::new(1, 0, vec![Point::new(2.0, 7.0), Point::new(8.0, 0.0)], false, true).unwrap();
        let one = |s: &Snakelet| rasterize(&SnakeletSet { snakelets: vec![s.clone()], ..SnakeletSet::new(12, 9) });
        let both = rasterize(&SnakeletSet { snakelets: vec![a.clone(), b.clone(), a.clone()], ..SnakeletSet::new(12, 9) });
        assert_eq!(both, one(&a).union(&one(&b)).unwrap());
    }

    #[test]
    fn constant_image_detects_nothing() {
        let img = RasterImage::filled(24, 24, 0.4).unwrap();
        assert!(detect(&img, &DetectParams::default()).unwrap().is_empty());
    }

    #[test]
    fn half_plane_boundary_is_covered() {
        let (w, h) = (64, 48);
        let img = crate::eval::half_plane(w, h, 31.0);
        let set = detect(&img, &DetectParams::default()).unwrap();
        assert!(!set.is_empty());
        let truth = BinaryEdgeMap::from_pixels(w, h, (0..h).map(|y| Pixel::new(31, y)));
        let m = crate::eval::score(&rasterize(&set), &truth, 2.0, &[]).unwrap();
        assert!(m.recall >= 0.95, "{m:?}");
    }

    #[test]
    fn chain_links_start_at_parent_end() {
        let (w, h) = (160, 40);
        let img = crate::eval::half_plane(h, w, 19.0);
        // transpose so the boundary is a long horizontal line
        let img = RasterImage::from_fn(w, h, |x, y| img.get(y, x, 0)).unwrap();
        let params = DetectParams { chain_max_grow: 20.0, recovery: None, ..Default::default() };
        let set = detect(&img, &params).unwrap();
        let mut links = 0;
        for s in &set.snakelets {
            if let Some(p) = s.parent {
                let parent = set.get(p).unwrap();
                assert!(parent.tail().distance(s.head()) < 1e-6);
                links += 1;
            }
        }
        assert!(links > 0);
    }

    #[test]
    fn merged_chain_is_continuous() {
        let a = Snakelet::new(0, 0, vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)], false, true).unwrap();
        let mut b = Snakelet::new(1, 0, vec![Point::new(2.0, 0.0), Point::new(4.0, 0.0)], false, true).unwrap();
        b.parent = Some(0);
        let set = SnakeletSet { snakelets: vec![a, b], ..SnakeletSet::new(10, 10) };
        let chains = set.merged_chains();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0], vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(4.0, 0.0)]);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = DetectParams { th: Thresholds { high: 0.1, low: 0.3 }, ..Default::default() };
        assert!(p.validate().is_err());
        let p = DetectParams { chain_max_grow: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
