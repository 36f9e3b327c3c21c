//! Edge detection and broken-edge recovery with snakelets.
//!
//! A snakelet is a short open active contour: an ordered chain of points
//! that deforms under tension, rigidity and a gradient vector flow (GVF)
//! field, and grows at one or both ends along its tangent. This crate
//! provides
//!
//! - raster types, Gaussian smoothing, gray and multi-channel gradients and
//!   non-maximum suppression,
//! - a classic Canny baseline (hysteresis thresholding with 8-connected
//!   linking),
//! - GVF with incremental expansion and fractile-clipped normalization,
//! - the snakelet model (semi-implicit deformation, growth, occupancy),
//! - recovery of breaks in binary edge maps,
//! - seeded edge detection that grows snakelets instead of linking pixels,
//! - synthetic fixtures and tolerance-based metrics.
//!
//! The crate is `no_std` and only needs `alloc`. Image and text I/O live in
//! the `snakelet-cli` companion crate.

#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod canny;
pub mod detect;
mod error;
pub mod eval;
pub mod filter;
pub mod gradient;
pub mod gvf;
pub mod line;
pub(crate) mod math;
pub mod nms;
pub mod raster;
pub mod recovery;
pub mod snakelet;
pub mod topology;

pub use canny::{canny_detect, hysteresis, Thresholds};
pub use detect::{detect, rasterize, select_seeds, DetectParams, SnakeletSet};
pub use error::Error;
pub use filter::{gaussian_smooth, to_grayscale};
pub use gradient::{gradient_color, gradient_gray, gradient_of, GradientField};
pub use gvf::{GvfState, VectorField};
pub use nms::nonmax_suppress;
pub use raster::{BinaryEdgeMap, Pixel, Point, RasterImage};
pub use recovery::{recover, RecoveryOutcome, RecoveryParams};
pub use snakelet::{OccupancyMask, Snakelet, SnakeletParams, SnakeletState};

pub type Result<T, E = Error> = core::result::Result<T, E>;
