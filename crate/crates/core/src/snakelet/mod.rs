//! The snakelet: an open active contour that deforms under internal forces
//! and a GVF field, and grows along its end tangents.
//!
//! Deformation uses the classic semi-implicit update
//!
//! ```text
//! (I + A) x' = x + kappa Fx(x)      (same for y)
//! ```
//!
//! where `A = alpha D1'D1 + beta D2'D2` is the pentadiagonal internal-force
//! matrix of an open chain (tension from first differences, rigidity from
//! second differences at interior points only) and `F` is the external
//! field sampled bilinearly at the current points.

pub mod banded;
mod occupancy;

use alloc::vec::Vec;

pub use banded::{PentaFactor, Pentadiagonal};
pub use occupancy::OccupancyMask;

use crate::gradient::GradientField;
use crate::gvf::VectorField;
use crate::math;
use crate::raster::{Pixel, Point};
use crate::{Error, Result};

/// Growth shorter than this (in pixels) counts as no growth and stops the
/// end.
pub const MIN_GROWTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnakeletParams {
    /// Tension weight.
    pub alpha: f64,
    /// Rigidity weight.
    pub beta: f64,
    /// Growing-force weight.
    pub gamma: f64,
    /// Target distance between consecutive points.
    pub spacing: f64,
    /// Step scale applied to the external force.
    pub kappa: f64,
    /// Length of one growth step.
    pub step: f64,
}

impl Default for SnakeletParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            beta: 0.5,
            gamma: 2.0,
            spacing: 2.0,
            kappa: 1.0,
            step: 2.0,
        }
    }
}

impl SnakeletParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.beta, self.gamma, self.spacing, self.kappa, self.step]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("snakelet", "parameters must be finite"));
        }
        if self.alpha < 0.0 {
            return Err(Error::param("alpha", "must be >= 0"));
        }
        if self.beta < 0.0 {
            return Err(Error::param("beta", "must be >= 0"));
        }
        if self.gamma <= 0.0 {
            return Err(Error::param("gamma", "must be > 0"));
        }
        if self.spacing < 1.0 {
            return Err(Error::param("spacing", "must be >= 1"));
        }
        if self.step < 1.0 {
            return Err(Error::param("step", "must be >= 1"));
        }
        if self.kappa < 0.0 {
            return Err(Error::param("kappa", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SnakeletState {
    Growing,
    Reached,
    Discarded,
    Stopped,
}

impl SnakeletState {
    pub fn as_str(self) -> &'static str {
        match self {
            SnakeletState::Growing => "growing",
            SnakeletState::Reached => "reached",
            SnakeletState::Discarded => "discarded",
            SnakeletState::Stopped => "stopped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "growing" => SnakeletState::Growing,
            "reached" => SnakeletState::Reached,
            "discarded" => SnakeletState::Discarded,
            "stopped" => SnakeletState::Stopped,
            _ => return None,
        })
    }
}

/// Ordered point chain. `points[0]` is the head, the last point the tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Snakelet {
    pub id: u32,
    /// Edge fragment or seed this snakelet was spawned from.
    pub source_id: u32,
    /// Chain predecessor in detection, if any.
    pub parent: Option<u32>,
    pub points: Vec<Point>,
    pub grow_head: bool,
    pub grow_tail: bool,
    pub state: SnakeletState,
}

impl Snakelet {
    pub fn new(id: u32, source_id: u32, points: Vec<Point>, grow_head: bool, grow_tail: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::FragmentTooShort(points.len()));
        }
        Ok(Self {
            id,
            source_id,
            parent: None,
            points,
            grow_head,
            grow_tail,
            state: SnakeletState::Growing,
        })
    }

    pub fn head(&self) -> Point {
        self.points[0]
    }

    pub fn tail(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    pub fn arc_length(&self) -> f64 {
        polyline_length(&self.points)
    }

    /// Redistributes points at (nearly) `spacing` arc-length intervals.
    ///
    /// The polyline is cut into `round(L / spacing)` equal pieces so both
    /// endpoints stay exactly where they are.
    pub fn resample(&self, params: &SnakeletParams) -> Result<Snakelet> {
        let total = self.arc_length();
        if !(total > 0.0) {
            return Err(Error::DegenerateSnakelet);
        }
        let pieces = (math::round(total / params.spacing) as usize).max(1);
        let interval = total / pieces as f64;
        let mut out = Vec::with_capacity(pieces + 1);
        out.push(self.head());
        let mut seg = 0;
        let mut seg_start = 0.0;
        for k in 1..pieces {
            let target = interval * k as f64;
            loop {
                let len = self.points[seg].distance(self.points[seg + 1]);
                if seg_start + len >= target || seg + 2 == self.points.len() {
                    let t = if len > 0.0 { ((target - seg_start) / len).clamp(0.0, 1.0) } else { 0.0 };
                    let (a, b) = (self.points[seg], self.points[seg + 1]);
                    out.push(a + (b - a) * t);
                    break;
                }
                seg_start += len;
                seg += 1;
            }
        }
        out.push(self.tail());
        Ok(Snakelet {
            points: out,
            ..self.clone()
        })
    }

    /// Whether consecutive spacing has drifted far enough from `spacing`
    /// that the difference stencils need a resample.
    pub fn needs_resample(&self, params: &SnakeletParams) -> bool {
        self.points.windows(2).any(|w| {
            let d = w[0].distance(w[1]);
            d > 1.5 * params.spacing || d < 0.5 * params.spacing
        })
    }

    /// One semi-implicit deformation step.
    ///
    /// Panics if the internal system is not positive definite, which
    /// cannot happen for `alpha, beta >= 0`.
    pub fn deform_step(&self, field: &VectorField, params: &SnakeletParams, solver: &mut InternalSolver) -> Snakelet {
        let n = self.points.len();
        let (w, h) = (field.width, field.height);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for &p in &self.points {
            let f = field.sample(p);
            xs.push(p.x + params.kappa * f.x);
            ys.push(p.y + params.kappa * f.y);
        }
        let factor = solver.factor_for(n, params.alpha, params.beta);
        factor.solve(&mut xs);
        factor.solve(&mut ys);
        let points = xs
            .into_iter()
            .zip(ys)
            .map(|(x, y)| Point::new(x, y).clamp_to(w, h))
            .collect();
        Snakelet {
            points,
            ..self.clone()
        }
    }

    /// Unit tangent pointing outwards at the tail (`at_tail`) or head.
    pub fn end_tangent(&self, at_tail: bool) -> Option<Point> {
        let n = self.points.len();
        let end = if at_tail { self.points[n - 1] } else { self.points[0] };
        // skip coincident points so a clamped end still has a direction
        let inner = (1..n).map(|k| if at_tail { self.points[n - 1 - k] } else { self.points[k] });
        for q in inner {
            let d = end - q;
            let len = d.norm();
            if len > 1e-12 {
                return Some(d * (1.0 / len));
            }
        }
        None
    }

    /// Appends one point at each growing end; see [`grow_until`](Self::grow_until).
    pub fn grow(&self, grad: Option<&GradientField>, params: &SnakeletParams, width: usize, height: usize) -> Snakelet {
        self.grow_until(grad, params, width, height, |_| true)
    }

    /// Appends one point at each growing end, `step * min(1, gamma * m)`
    /// along the end tangent, where `m` is the bilinear gradient magnitude
    /// at the end point (1 without a gradient field). New points are
    /// clamped to the image.
    ///
    /// An end stops growing when its growth falls below [`MIN_GROWTH`] or
    /// `accept` rejects the candidate point; with both ends stopped the
    /// state becomes [`SnakeletState::Stopped`].
    pub fn grow_until(
        &self,
        grad: Option<&GradientField>,
        params: &SnakeletParams,
        width: usize,
        height: usize,
        mut accept: impl FnMut(Point) -> bool,
    ) -> Snakelet {
        let mut out = self.clone();
        if self.state != SnakeletState::Growing {
            return out;
        }
        for at_tail in [false, true] {
            let growing = if at_tail { out.grow_tail } else { out.grow_head };
            if !growing {
                continue;
            }
            let end = if at_tail { out.tail() } else { out.head() };
            let strength = grad.map_or(1.0, |g| g.magnitude_at(end));
            let length = params.step * (params.gamma * strength).min(1.0);
            let candidate = out.end_tangent(at_tail).map(|t| (end + t * length).clamp_to(width, height));
            match candidate {
                Some(c) if length >= MIN_GROWTH && accept(c) => {
                    if at_tail {
                        out.points.push(c);
                    } else {
                        out.points.insert(0, c);
                    }
                }
                _ => {
                    if at_tail {
                        out.grow_tail = false;
                    } else {
                        out.grow_head = false;
                    }
                }
            }
        }
        if !out.grow_head && !out.grow_tail {
            out.state = SnakeletState::Stopped;
        }
        out
    }

    /// [`reached_edge`] for the growing ends, as `(head, tail)`.
    pub fn reached_ends(
        &self,
        snap: f64,
        width: usize,
        height: usize,
        mut is_target: impl FnMut(Pixel) -> bool,
    ) -> (bool, bool) {
        let head = self.grow_head && reached_edge(self.head(), snap, width, height, &mut is_target);
        let tail = self.grow_tail && reached_edge(self.tail(), snap, width, height, &mut is_target);
        (head, tail)
    }
}

/// True iff some pixel accepted by `is_target` lies within Euclidean
/// distance `snap` of `end`. The predicate carries the source exclusion.
pub fn reached_edge(
    end: Point,
    snap: f64,
    width: usize,
    height: usize,
    mut is_target: impl FnMut(Pixel) -> bool,
) -> bool {
    let x_lo = math::ceil(end.x - snap).max(0.0) as usize;
    let y_lo = math::ceil(end.y - snap).max(0.0) as usize;
    let x_hi = math::floor(end.x + snap).min(width as f64 - 1.0);
    let y_hi = math::floor(end.y + snap).min(height as f64 - 1.0);
    if x_hi < 0.0 || y_hi < 0.0 {
        return false;
    }
    for y in y_lo..=y_hi as usize {
        for x in x_lo..=x_hi as usize {
            let p = Pixel::new(x, y);
            if p.center().distance(end) <= snap && is_target(p) {
                return true;
            }
        }
    }
    false
}

pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Caches the factorization of the internal-force system for the last
/// point count, so steps of equal size reuse it.
#[derive(Debug, Default)]
pub struct InternalSolver {
    key: Option<(usize, u64, u64)>,
    factor: Option<PentaFactor>,
}

impl InternalSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factor_for(&mut self, n: usize, alpha: f64, beta: f64) -> &PentaFactor {
        let key = (n, alpha.to_bits(), beta.to_bits());
        if self.key != Some(key) {
            let factor = Pentadiagonal::snake_system(n, alpha, beta)
                .factor()
                .expect("internal-force system is positive definite for alpha, beta >= 0");
            self.factor = Some(factor);
            self.key = Some(key);
        }
        self.factor.as_ref().unwrap()
    }
}
