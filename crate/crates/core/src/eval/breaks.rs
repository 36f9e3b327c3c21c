//! Deterministic break generation on edge maps.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::{BinaryEdgeMap, Pixel};
use crate::topology::{geodesic_ball, label_components, neighbor_count, walk_fragment};
use crate::{Error, Result};

/// Attempts per requested break before giving up.
const TRIES_PER_BREAK: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BreakSpec {
    pub count: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub rng_seed: u64,
    /// Minimum number of edge pixels kept between two breaks, and between
    /// a break and a curve end, measured along the curve.
    pub separation: usize,
}

impl BreakSpec {
    /// Breaks separated by at least twice `max_len`.
    pub fn new(count: usize, min_len: usize, max_len: usize, rng_seed: u64) -> Self {
        Self {
            count,
            min_len,
            max_len,
            rng_seed,
            separation: 2 * max_len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::param("break length", "need 0 < min_len <= max_len"));
        }
        Ok(())
    }
}

/// Removes `spec.count` disjoint runs of contiguous edge pixels. Returns
/// the broken map and the removed runs, in placement order.
///
/// Runs stay `spec.separation` pixels away from each other and from curve
/// ends, so every gap has edge pixels on both sides.
pub fn make_breaks(edges: &BinaryEdgeMap, spec: &BreakSpec) -> Result<(BinaryEdgeMap, Vec<Vec<Pixel>>)> {
    spec.validate()?;
    if spec.count == 0 {
        return Ok((edges.clone(), Vec::new()));
    }
    let all: Vec<Pixel> = edges.pixels().collect();
    if all.is_empty() {
        return Err(Error::BreakPlacement {
            requested: spec.count,
            reason: "edge map is empty",
        });
    }
    let (w, h) = (edges.width(), edges.height());
    let (labels, n_labels) = label_components(edges);
    let mut sizes = vec![0usize; n_labels as usize + 1];
    for p in &all {
        sizes[labels[p.y * w + p.x] as usize] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut broken = edges.clone();
    let mut blocked = vec![false; w * h];
    for p in &all {
        if neighbor_count(edges, *p) <= 1 {
            for i in geodesic_ball(edges, *p, spec.separation) {
                blocked[i] = true;
            }
        }
    }
    let mut gaps = Vec::with_capacity(spec.count);
    let mut tries = 0;
    while gaps.len() < spec.count {
        tries += 1;
        if tries > TRIES_PER_BREAK * spec.count {
            return Err(Error::BreakPlacement {
                requested: spec.count,
                reason: "not enough edge length for disjoint, separated breaks",
            });
        }
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let start = all[rng.random_range(0..all.len())];
        if blocked[start.y * w + start.x] || sizes[labels[start.y * w + start.x] as usize] <= len {
            continue;
        }
        let mut visited = vec![false; w * h];
        let run = walk_fragment(edges, start, len, &mut visited);
        if run.len() < len || run.iter().any(|p| blocked[p.y * w + p.x]) {
            continue;
        }
        for p in &run {
            broken.set(p.x, p.y, false);
            for i in geodesic_ball(edges, *p, spec.separation) {
                blocked[i] = true;
            }
        }
        gaps.push(run);
    }
    Ok((broken, gaps))
}
