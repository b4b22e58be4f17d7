//! Deterministic 2D autonomous exploration.
//!
//! The crate couples an occupancy-grid world model with:
//!
//! - [`rrt`]: multi-RRT frontier search with adaptive expansion steps,
//!   traversability-gated edges, coverage-based termination and global
//!   tree pruning on map updates,
//! - [`select`]: frontier scoring and selection,
//! - [`polyline`]: a Dijkstra frontend with rotation-maximising BI and DP
//!   backends that emit polylines of near-uniform segment length,
//! - [`sim`]: a ray-cast LiDAR and kinematic executor that drives straight
//!   or rotates in place, never both,
//! - [`controller`]: the serialized select-then-navigate mission loop with
//!   waypoint retracing,
//! - [`harness`]: scenario configs, batch runs, metrics and exports.
//!
//! See `examples/` for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controller;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod harness;
mod kv;
pub mod polyline;
pub mod rrt;
pub mod scenarios;
pub mod select;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::Point;
pub use grid::{CellState, DistanceField, MapSnapshot, OccupancyGrid};
