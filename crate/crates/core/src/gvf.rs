//! Gradient vector flow over gray or binary edge maps.
//!
//! The field `(u, v)` starts at the source gradient `(fx, fy)` and is
//! relaxed towards the minimizer of
//! `mu |grad u|^2 + |grad f|^2 |u - fx|^2` (same for `v`). Each sweep is a
//! Jacobi update on a 5-point Laplacian with replicated borders. The data
//! term is taken at the new iterate, which keeps the update a convex
//! combination of neighbors and source for any `mu <= 0.25`.

use alloc::vec;
use alloc::vec::Vec;

use crate::gradient::central_diff;
use crate::math;
use crate::raster::{bilinear, Point, RasterImage};
use crate::{Error, Result};

/// Default smoothness weight.
pub const DEFAULT_MU: f64 = 0.2;

/// Guard against dividing by a vanishing magnitude when normalizing.
const NORM_EPS: f64 = 1e-12;

/// Dense 2-D force field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub width: usize,
    pub height: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl VectorField {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            u: vec![0.0; width * height],
            v: vec![0.0; width * height],
        }
    }

    /// Bilinear sample, clamped to the grid.
    pub fn sample(&self, p: Point) -> Point {
        Point::new(
            bilinear(&self.u, self.width, self.height, p),
            bilinear(&self.v, self.width, self.height, p),
        )
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).map(|(&u, &v)| math::hypot(u, v)).collect()
    }
}

/// GVF iteration state. Keeps the source gradient so the field can be
/// expanded without recomputing it.
#[derive(Debug, Clone, PartialEq)]
pub struct GvfState {
    pub field: VectorField,
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
    pub b: Vec<f64>,
    pub iterations_done: usize,
    pub mu: f64,
}

impl GvfState {
    pub fn init(edge_source: &RasterImage, mu: f64) -> Result<Self> {
        if edge_source.channels() != 1 {
            return Err(Error::UnsupportedChannels(edge_source.channels()));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::param("mu", "must be > 0"));
        }
        let (w, h) = (edge_source.width(), edge_source.height());
        let (fx, fy) = central_diff(edge_source.data(), w, h);
        let b = fx.iter().zip(&fy).map(|(x, y)| x * x + y * y).collect();
        Ok(Self {
            field: VectorField {
                width: w,
                height: h,
                u: fx.clone(),
                v: fy.clone(),
            },
            fx,
            fy,
            b,
            iterations_done: 0,
            mu,
        })
    }

    /// Runs `n` more sweeps.
    pub fn iterate(mut self, n: usize) -> Self {
        self.iterate_in_place(n);
        self
    }

    pub fn iterate_in_place(&mut self, n: usize) {
        let (w, h) = (self.field.width, self.field.height);
        let mut next_u = vec![0.0; w * h];
        let mut next_v = vec![0.0; w * h];
        for _ in 0..n {
            sweep(&self.field.u, &self.fx, &self.b, self.mu, w, h, &mut next_u);
            sweep(&self.field.v, &self.fy, &self.b, self.mu, w, h, &mut next_v);
            core::mem::swap(&mut self.field.u, &mut next_u);
            core::mem::swap(&mut self.field.v, &mut next_v);
        }
        self.iterations_done += n;
    }

    /// Unit-length field with weak vectors removed.
    ///
    /// Pixels whose magnitude falls below the `zero_fractile` quantile of
    /// the strictly positive magnitudes are zeroed; the rest are scaled to
    /// unit length. `zero_fractile = 0` is plain normalization.
    pub fn normalized(&self, zero_fractile: f64) -> Result<VectorField> {
        if !(0.0..1.0).contains(&zero_fractile) {
            return Err(Error::param("zero_fractile", "must lie in [0, 1)"));
        }
        let mags = self.field.magnitudes();
        let mut positive: Vec<f64> = mags.iter().copied().filter(|&m| m > 0.0).collect();
        let cutoff = if positive.is_empty() {
            0.0
        } else {
            positive.sort_by(f64::total_cmp);
            let i = (math::floor(zero_fractile * positive.len() as f64) as usize).min(positive.len() - 1);
            positive[i]
        };
        let mut out = VectorField::zeros(self.field.width, self.field.height);
        for (i, &m) in mags.iter().enumerate() {
            if m <= 0.0 || m < cutoff {
                continue;
            }
            let s = 1.0 / m.max(NORM_EPS);
            out.u[i] = self.field.u[i] * s;
            out.v[i] = self.field.v[i] * s;
        }
        Ok(out)
    }
}

fn sweep(cur: &[f64], src: &[f64], b: &[f64], mu: f64, w: usize, h: usize, out: &mut [f64]) {
    for y in 0..h {
        let up = y.saturating_sub(1) * w;
        let down = (y + 1).min(h - 1) * w;
        let row = y * w;
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let c = cur[row + x];
            let lap = cur[row + left] + cur[row + right] + cur[up + x] + cur[down + x] - 4.0 * c;
            let bi = b[row + x];
            out[row + x] = (c + mu * lap + bi * src[row + x]) / (1.0 + bi);
        }
    }
}

/// Free-function form of [`GvfState::init`].
pub fn gvf_init(edge_source: &RasterImage, mu: f64) -> Result<GvfState> {
    GvfState::init(edge_source, mu)
}

pub fn gvf_iterate(state: GvfState, n: usize) -> GvfState {
    state.iterate(n)
}

pub fn gvf_normalize(state: &GvfState, zero_fractile: f64) -> Result<VectorField> {
    state.normalized(zero_fractile)
}
