//! Recovery of breaks in binary edge maps.
//!
//! Every curve end of the (thinned) edge map gets a unidirectional
//! snakelet traced back along its fragment. The snakelets alternate
//! deformation in a GVF field and growth at the free end until they land
//! on another part of the edge map. A snakelet that grows past `max_grow`
//! is restarted from its initial shape in a wider GVF field; once the GVF
//! budget is spent it is discarded.

use alloc::vec;
use alloc::vec::Vec;

use crate::detect::{rasterize, SnakeletSet};
use crate::gradient::GradientField;
use crate::gvf::{GvfState, VectorField, DEFAULT_MU};
use crate::nms::nonmax_suppress;
use crate::raster::{BinaryEdgeMap, Pixel, Point};
use crate::snakelet::{polyline_length, InternalSolver, Snakelet, SnakeletParams, SnakeletState};
use crate::topology::{curve_ends, geodesic_ball, label_components, thin, walk_fragment};
use crate::{Error, Result};

/// Fraction of the weakest positive GVF vectors zeroed when the field is
/// built from gradient magnitudes.
pub const GRADIENT_ZERO_FRACTILE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndPoint {
    pub position: Pixel,
    /// Connected-component label of the fragment the endpoint terminates.
    pub fragment_id: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryParams {
    /// Pixels traced back from each endpoint to initialize its snakelet.
    pub init_length: usize,
    /// Longest growth allowed per attempt, in pixels.
    pub max_grow: f64,
    pub gvf_init_iters: usize,
    pub gvf_expand_step: usize,
    pub gvf_max_iters: usize,
    /// Distance at which a growing end counts as touching an edge.
    pub snap: f64,
    pub mu: f64,
}

impl Default for RecoveryParams {
    fn default() -> Self {
        Self {
            init_length: 25,
            max_grow: 70.0,
            gvf_init_iters: 5,
            gvf_expand_step: 5,
            gvf_max_iters: 50,
            snap: 1.5,
            mu: DEFAULT_MU,
        }
    }
}

impl RecoveryParams {
    pub fn validate(&self, snake: &SnakeletParams) -> Result<()> {
        if (self.init_length as f64) < 2.0 * snake.spacing {
            return Err(Error::param("init_length", "must be at least twice the point spacing"));
        }
        if !(self.max_grow > 0.0) || !self.max_grow.is_finite() {
            return Err(Error::param("max_grow", "must be > 0"));
        }
        if self.gvf_init_iters > self.gvf_max_iters {
            return Err(Error::param("gvf_init_iters", "must not exceed gvf_max_iters"));
        }
        if self.gvf_expand_step == 0 {
            return Err(Error::param("gvf_expand_step", "must be > 0"));
        }
        if !(self.snap > 0.0) || !self.snap.is_finite() {
            return Err(Error::param("snap", "must be > 0"));
        }
        if !(self.mu > 0.0 && self.mu <= 0.25) {
            return Err(Error::param("mu", "must lie in (0, 0.25]"));
        }
        Ok(())
    }
}

/// Result of [`recover`].
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOutcome {
    pub set: SnakeletSet,
    /// Number of times the GVF field had to be widened.
    pub expansion_rounds: usize,
    /// GVF iterations of the widest field used.
    pub gvf_iterations: usize,
    /// Per snakelet, the expansion round in which it reached an edge.
    pub reached_in_round: Vec<Option<usize>>,
    /// Input edges together with every reached snakelet.
    pub recovered: BinaryEdgeMap,
}

impl RecoveryOutcome {
    pub fn reached(&self) -> impl Iterator<Item = &Snakelet> {
        self.set.snakelets.iter().filter(|s| s.state == SnakeletState::Reached)
    }
}

/// Curve ends of the thinned edge map, row-major, with their fragment
/// labels.
pub fn find_endpoints(edges: &BinaryEdgeMap) -> Vec<EndPoint> {
    endpoints_of_thin(&thin(edges))
}

fn endpoints_of_thin(thinned: &BinaryEdgeMap) -> Vec<EndPoint> {
    let (labels, _) = label_components(thinned);
    curve_ends(thinned)
        .into_iter()
        .map(|p| EndPoint {
            position: p,
            fragment_id: labels[p.y * thinned.width() + p.x],
        })
        .collect()
}

/// Up to `length` pixels of the fragment behind `ep`, ordered so the last
/// point is `ep` itself.
pub fn trace_back(edges: &BinaryEdgeMap, ep: EndPoint, length: usize) -> Result<Vec<Point>> {
    let mut visited = vec![false; edges.width() * edges.height()];
    let mut path = walk_fragment(edges, ep.position, length, &mut visited);
    if path.len() < 2 {
        return Err(Error::FragmentTooShort(path.len()));
    }
    path.reverse();
    Ok(path.into_iter().map(Pixel::center).collect())
}

/// Keeps the last `length` of arc length of a polyline, cutting the first
/// segment by interpolation.
fn keep_tail_length(points: &[Point], length: f64) -> Vec<Point> {
    let mut acc = 0.0;
    for i in (1..points.len()).rev() {
        let seg = points[i - 1].distance(points[i]);
        if acc + seg > length {
            let t = (length - acc) / seg;
            let mut out = vec![points[i] + (points[i - 1] - points[i]) * t];
            out.extend_from_slice(&points[i..]);
            return out;
        }
        acc += seg;
    }
    points.to_vec()
}

struct Candidate {
    initial: Snakelet,
    /// Own-fragment pixels near the endpoint, never counted as a target.
    excluded: Vec<usize>,
}

/// Runs the recovery loop on every endpoint of `edges`.
///
/// With `grad`, the GVF source is the non-maximum-suppressed gradient
/// magnitude and the weakest [`GRADIENT_ZERO_FRACTILE`] of the field is
/// dropped; otherwise the thinned edge map itself is the source.
pub fn recover(
    edges: &BinaryEdgeMap,
    params: &RecoveryParams,
    snake: &SnakeletParams,
    grad: Option<&GradientField>,
) -> Result<RecoveryOutcome> {
    snake.validate()?;
    params.validate(snake)?;
    let (w, h) = (edges.width(), edges.height());
    if let Some(g) = grad {
        edges.check_same_dims(g.width, g.height)?;
    }

    let thinned = thin(edges);
    let endpoints = endpoints_of_thin(&thinned);
    let exclusion_depth = params.init_length + 2 * libm::ceil(params.snap) as usize;

    let mut candidates = Vec::new();
    for ep in &endpoints {
        let traced = match trace_back(&thinned, *ep, params.init_length) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let traced = keep_tail_length(&traced, params.init_length as f64);
        let id = candidates.len() as u32;
        let s = Snakelet::new(id, ep.fragment_id, traced, false, true)?;
        let s = s.resample(snake)?;
        let mut excluded = geodesic_ball(&thinned, ep.position, exclusion_depth);
        excluded.sort_unstable();
        candidates.push(Candidate { initial: s, excluded });
    }

    let (source, fractile) = match grad {
        Some(g) => (nonmax_suppress(g), GRADIENT_ZERO_FRACTILE),
        None => (thinned.to_image(), 0.0),
    };
    let mut gvf = GvfState::init(&source, params.mu)?.iterate(params.gvf_init_iters);

    let mut finals: Vec<Option<Snakelet>> = vec![None; candidates.len()];
    let mut reached_in_round = vec![None; candidates.len()];
    let mut pending: Vec<usize> = (0..candidates.len()).collect();
    let mut expansion_rounds = 0;
    let mut solver = InternalSolver::new();
    loop {
        let field = gvf.normalized(fractile)?;
        let mut still = Vec::new();
        for &i in &pending {
            let c = &candidates[i];
            let mut is_target = |p: Pixel| thinned.get(p.x, p.y) && c.excluded.binary_search(&(p.y * w + p.x)).is_err();
            match run_attempt(&c.initial, &field, params, snake, &mut solver, &mut is_target, w, h) {
                Some(done) => {
                    finals[i] = Some(done);
                    reached_in_round[i] = Some(expansion_rounds);
                }
                None => still.push(i),
            }
        }
        pending = still;
        let next = gvf.iterations_done + params.gvf_expand_step;
        if pending.is_empty() || next > params.gvf_max_iters {
            break;
        }
        gvf.iterate_in_place(params.gvf_expand_step);
        expansion_rounds += 1;
    }

    let snakelets: Vec<Snakelet> = candidates
        .into_iter()
        .zip(finals)
        .map(|(c, f)| {
            f.unwrap_or(Snakelet {
                state: SnakeletState::Discarded,
                grow_tail: false,
                ..c.initial
            })
        })
        .collect();
    let set = SnakeletSet {
        snakelets,
        ..SnakeletSet::new(w, h)
    };
    let reached = SnakeletSet {
        snakelets: set.snakelets.iter().filter(|s| s.state == SnakeletState::Reached).cloned().collect(),
        ..SnakeletSet::new(w, h)
    };
    let recovered = edges.union(&rasterize(&reached))?;
    Ok(RecoveryOutcome {
        set,
        expansion_rounds,
        gvf_iterations: gvf.iterations_done,
        reached_in_round,
        recovered,
    })
}

/// One deform-and-grow attempt from the initial snakelet. Returns the
/// reached snakelet, or `None` if it outgrew `max_grow` or stalled.
#[allow(clippy::too_many_arguments)]
fn run_attempt(
    initial: &Snakelet,
    field: &VectorField,
    params: &RecoveryParams,
    snake: &SnakeletParams,
    solver: &mut InternalSolver,
    is_target: &mut impl FnMut(Pixel) -> bool,
    w: usize,
    h: usize,
) -> Option<Snakelet> {
    let cap = params.init_length as f64 + params.max_grow;
    let mut s = initial.clone();
    let mut grown = 0.0;
    let max_cycles = 4 * (libm::ceil(params.max_grow / snake.step) as usize) + 8;
    for _ in 0..max_cycles {
        s = s.deform_step(field, snake, solver);
        if s.reached_ends(params.snap, w, h, &mut *is_target).1 {
            break;
        }
        if grown + snake.step > params.max_grow {
            return None;
        }
        let before = s.tail();
        s = s.grow(None, snake, w, h);
        if s.state != SnakeletState::Growing {
            return None;
        }
        grown += s.tail().distance(before);
        if s.reached_ends(params.snap, w, h, &mut *is_target).1 {
            break;
        }
        if s.needs_resample(snake) {
            s = s.resample(snake).ok()?;
        }
    }
    if !s.reached_ends(params.snap, w, h, &mut *is_target).1 || polyline_length(&s.points) > cap + snake.step {
        return None;
    }
    s.state = SnakeletState::Reached;
    s.grow_tail = false;
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::neighbor_count;

    fn segment(w: usize, h: usize, y: usize, xs: core::ops::Range<usize>) -> BinaryEdgeMap {
        BinaryEdgeMap::from_pixels(w, h, xs.map(|x| Pixel::new(x, y)))
    }

    fn ring(w: usize, h: usize, cx: f64, cy: f64, a: f64, b: f64) -> BinaryEdgeMap {
        crate::eval::ellipse_ring(w, h, cx, cy, a, b)
    }

    #[test]
    fn closed_ring_has_no_endpoints() {
        assert!(find_endpoints(&ring(60, 50, 30.0, 25.0, 20.0, 14.0)).is_empty());
    }

    #[test]
    fn straight_segment_endpoints() {
        let m = segment(20, 5, 2, 4..14);
        let eps = find_endpoints(&m);
        let pos: Vec<Pixel> = eps.iter().map(|e| e.position).collect();
        assert_eq!(pos, [Pixel::new(4, 2), Pixel::new(13, 2)]);
        assert_eq!(eps[0].fragment_id, eps[1].fragment_id);
    }

    #[test]
    fn single_break_gives_two_endpoints() {
        let mut m = ring(80, 60, 40.0, 30.0, 30.0, 20.0);
        for p in m.clone().pixels() {
            if p.x >= 38 && p.x <= 42 && p.y < 30 {
                m.set(p.x, p.y, false);
            }
        }
        let eps = find_endpoints(&m);
        assert_eq!(eps.len(), 2);
        assert!(eps.iter().all(|e| neighbor_count(&m, e.position) == 1));
        assert!(eps[0].position.x < 38 && eps[1].position.x > 42);
    }

    #[test]
    fn trace_straight_segment() {
        let m = segment(40, 5, 2, 0..30);
        let ep = EndPoint { position: Pixel::new(29, 2), fragment_id: 1 };
        let t = trace_back(&m, ep, 10).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(*t.last().unwrap(), Point::new(29.0, 2.0));
        for (i, p) in t.iter().enumerate() {
            assert_eq!(*p, Point::new(20.0 + i as f64, 2.0));
        }
    }

    #[test]
    fn trace_limited_by_fragment() {
        let m = segment(20, 5, 2, 3..9);
        let ep = EndPoint { position: Pixel::new(3, 2), fragment_id: 1 };
        assert_eq!(trace_back(&m, ep, 25).unwrap().len(), 6);
        let lone = segment(20, 5, 2, 3..4);
        let ep = EndPoint { position: Pixel::new(3, 2), fragment_id: 1 };
        assert_eq!(trace_back(&lone, ep, 25), Err(Error::FragmentTooShort(1)));
    }

    #[test]
    fn trace_arc_follows_pixels_in_reverse_walk_order() {
        // Graph-walk oracle: on a thin simple arc every pixel has at most
        // two neighbors, so the walk is the unique path from the endpoint.
        let full = ring(60, 60, 30.0, 30.0, 20.0, 20.0);
        let arc = BinaryEdgeMap::from_pixels(60, 60, full.pixels().filter(|p| p.y < 30));
        let arc = thin(&arc);
        let ep = find_endpoints(&arc)[0];
        // order arc pixels by BFS distance from the endpoint; a thin simple
        // arc has exactly one pixel per distance
        let mut dist = vec![usize::MAX; 60 * 60];
        let mut queue = alloc::collections::VecDeque::from([ep.position]);
        dist[ep.position.y * 60 + ep.position.x] = 0;
        while let Some(p) = queue.pop_front() {
            for q in crate::topology::edge_neighbors(&arc, p) {
                if dist[q.y * 60 + q.x] == usize::MAX {
                    dist[q.y * 60 + q.x] = dist[p.y * 60 + p.x] + 1;
                    queue.push_back(q);
                }
            }
        }
        let mut oracle: Vec<Pixel> = arc.pixels().collect();
        oracle.sort_by_key(|p| dist[p.y * 60 + p.x]);
        for (i, p) in oracle.iter().enumerate() {
            assert_eq!(dist[p.y * 60 + p.x], i);
        }
        oracle.truncate(20);
        let traced = trace_back(&arc, ep, oracle.len()).unwrap();
        let expect: Vec<Point> = oracle.iter().rev().map(|p| p.center()).collect();
        assert_eq!(traced, expect);
    }

    #[test]
    fn tail_length_cut() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 0.0)).collect();
        let cut = keep_tail_length(&pts, 3.5);
        assert_eq!(cut[0], Point::new(5.5, 0.0));
        assert_eq!(*cut.last().unwrap(), Point::new(9.0, 0.0));
        assert!((polyline_length(&cut) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn unbroken_ring_recovers_nothing() {
        let m = ring(60, 50, 30.0, 25.0, 20.0, 14.0);
        let out = recover(&m, &RecoveryParams::default(), &SnakeletParams::default(), None).unwrap();
        assert!(out.set.snakelets.is_empty());
        assert_eq!(out.recovered, m);
    }

    #[test]
    fn far_apart_segments_are_discarded() {
        let mut m = segment(300, 40, 20, 0..40);
        for x in 240..280 {
            m.set(x, 20, true);
        }
        let out = recover(&m, &RecoveryParams::default(), &SnakeletParams::default(), None).unwrap();
        assert_eq!(out.set.snakelets.len(), 4);
        assert!(out.set.snakelets.iter().all(|s| s.state == SnakeletState::Discarded));
        assert_eq!(out.recovered, m);
    }

    #[test]
    fn aligned_gap_is_bridged() {
        let mut m = segment(80, 20, 10, 5..30);
        for x in 42..75 {
            m.set(x, 10, true);
        }
        let out = recover(&m, &RecoveryParams::default(), &SnakeletParams::default(), None).unwrap();
        // the two outer ends grow into empty space and are discarded
        let states: Vec<SnakeletState> = out.set.snakelets.iter().map(|s| s.state).collect();
        assert_eq!(
            states,
            [SnakeletState::Discarded, SnakeletState::Reached, SnakeletState::Reached, SnakeletState::Discarded]
        );
        assert_eq!(out.reached_in_round[1..3], [Some(0), Some(0)]);
        for x in 30..42 {
            assert!(out.recovered.get(x, 10), "x={x}");
        }
    }

    #[test]
    fn invalid_params() {
        let s = SnakeletParams::default();
        let bad = [
            RecoveryParams { init_length: 3, ..Default::default() },
            RecoveryParams { max_grow: 0.0, ..Default::default() },
            RecoveryParams { gvf_init_iters: 60, ..Default::default() },
            RecoveryParams { snap: 0.0, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate(&s).is_err());
        }
    }
}
