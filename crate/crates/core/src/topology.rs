//! Pixel topology on binary edge maps: 8-neighborhoods, connected
//! components, connectivity-preserving thinning and fragment walking.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::raster::{BinaryEdgeMap, Pixel};

/// 8-neighborhood offsets in row-major order.
pub const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// In-bounds edge neighbors of `p`, row-major.
pub fn edge_neighbors(edges: &BinaryEdgeMap, p: Pixel) -> impl Iterator<Item = Pixel> + '_ {
    NEIGHBORS_8.iter().filter_map(move |&(dx, dy)| {
        let (x, y) = (p.x as isize + dx, p.y as isize + dy);
        edges.get_signed(x, y).then(|| Pixel::new(x as usize, y as usize))
    })
}

pub fn neighbor_count(edges: &BinaryEdgeMap, p: Pixel) -> usize {
    edge_neighbors(edges, p).count()
}

/// 8-connected component labels, `0` for background, `1..` in row-major
/// order of discovery.
pub fn label_components(edges: &BinaryEdgeMap) -> (Vec<u32>, u32) {
    let w = edges.width();
    let mut labels = vec![0u32; w * edges.height()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in edges.pixels() {
        if labels[start.y * w + start.x] != 0 {
            continue;
        }
        next += 1;
        labels[start.y * w + start.x] = next;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for q in edge_neighbors(edges, p) {
                let i = q.y * w + q.x;
                if labels[i] == 0 {
                    labels[i] = next;
                    queue.push_back(q);
                }
            }
        }
    }
    (labels, next)
}

/// Guo-Hall parallel thinning. Preserves 8-connectivity and curve
/// endpoints; a no-op on curves that are already one pixel wide.
pub fn thin(edges: &BinaryEdgeMap) -> BinaryEdgeMap {
    let mut map = edges.clone();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            let mut remove = Vec::new();
            for p in map.pixels() {
                let at = |dx: isize, dy: isize| map.get_signed(p.x as isize + dx, p.y as isize + dy) as u8;
                let p2 = at(0, -1);
                let p3 = at(1, -1);
                let p4 = at(1, 0);
                let p5 = at(1, 1);
                let p6 = at(0, 1);
                let p7 = at(-1, 1);
                let p8 = at(-1, 0);
                let p9 = at(-1, -1);
                let c = ((p2 == 0) & ((p3 | p4) == 1)) as u8
                    + ((p4 == 0) & ((p5 | p6) == 1)) as u8
                    + ((p6 == 0) & ((p7 | p8) == 1)) as u8
                    + ((p8 == 0) & ((p9 | p2) == 1)) as u8;
                let n1 = (p9 | p2) + (p3 | p4) + (p5 | p6) + (p7 | p8);
                let n2 = (p2 | p3) + (p4 | p5) + (p6 | p7) + (p8 | p9);
                let n = n1.min(n2);
                let m = if pass == 0 {
                    (p6 | p7 | (1 - p9)) & p8
                } else {
                    (p2 | p3 | (1 - p5)) & p4
                };
                if c == 1 && (2..=3).contains(&n) && m == 0 {
                    remove.push(p);
                }
            }
            changed |= !remove.is_empty();
            for p in remove {
                map.set(p.x, p.y, false);
            }
        }
        if !changed {
            return map;
        }
    }
}

/// Edge pixels with exactly one 8-neighbor, row-major.
pub fn curve_ends(edges: &BinaryEdgeMap) -> Vec<Pixel> {
    edges.pixels().filter(|&p| neighbor_count(edges, p) == 1).collect()
}

/// Walks a fragment from `start`, never revisiting a pixel, and returns at
/// most `max_len` pixels beginning with `start`.
///
/// Each step takes the unvisited neighbor that changes direction least
/// (ties go to the first neighbor in row-major order). Neighbors of the
/// current pixel that also touch the chosen one are bypassed corner pixels
/// and are marked visited so the walk cannot double back through them.
pub fn walk_fragment(
    edges: &BinaryEdgeMap,
    start: Pixel,
    max_len: usize,
    visited: &mut [bool],
) -> Vec<Pixel> {
    let w = edges.width();
    let mut path = Vec::new();
    if max_len == 0 || !edges.get(start.x, start.y) {
        return path;
    }
    visited[start.y * w + start.x] = true;
    path.push(start);
    let mut dir: Option<(isize, isize)> = None;
    let mut cur = start;
    while path.len() < max_len {
        let mut best: Option<(Pixel, f64)> = None;
        for q in edge_neighbors(edges, cur) {
            if visited[q.y * w + q.x] {
                continue;
            }
            let step = (q.x as isize - cur.x as isize, q.y as isize - cur.y as isize);
            let score = match dir {
                Some(d) => {
                    let dot = (d.0 * step.0 + d.1 * step.1) as f64;
                    let norm = libm::sqrt(((d.0 * d.0 + d.1 * d.1) * (step.0 * step.0 + step.1 * step.1)) as f64);
                    dot / norm
                }
                // no history yet: prefer axis-aligned steps
                None => {
                    if step.0 == 0 || step.1 == 0 {
                        1.0
                    } else {
                        0.5
                    }
                }
            };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((q, score));
            }
        }
        let Some((next, _)) = best else { break };
        for q in edge_neighbors(edges, cur) {
            if q != next && (q.x as isize - next.x as isize).abs() <= 1 && (q.y as isize - next.y as isize).abs() <= 1 {
                visited[q.y * w + q.x] = true;
            }
        }
        visited[next.y * w + next.x] = true;
        dir = Some((next.x as isize - cur.x as isize, next.y as isize - cur.y as isize));
        path.push(next);
        cur = next;
    }
    path
}

/// Pixels of `start`'s component within `depth` 8-connected steps, as
/// sorted row-major indices.
pub fn geodesic_ball(edges: &BinaryEdgeMap, start: Pixel, depth: usize) -> Vec<usize> {
    let w = edges.width();
    let mut seen = alloc::collections::BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start.y * w + start.x, 0usize);
    queue.push_back((start, 0usize));
    while let Some((p, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for q in edge_neighbors(edges, p) {
            let i = q.y * w + q.x;
            if let alloc::collections::btree_map::Entry::Vacant(e) = seen.entry(i) {
                e.insert(d + 1);
                queue.push_back((q, d + 1));
            }
        }
    }
    seen.into_keys().collect()
}
