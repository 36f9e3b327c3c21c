//! Synthetic fixtures, break generation and tolerance-based metrics.

mod breaks;
pub mod fixtures;
mod metrics;

pub use breaks::{make_breaks, BreakSpec};
pub use fixtures::{
    curve_pixels, disk_image, ellipse_contour, ellipse_ring, half_plane, render, u_contour, u_shape, FadingDisk,
};
pub use metrics::{mean_point_distance, score, DistanceMap, Metrics, GAP_COVERAGE};
