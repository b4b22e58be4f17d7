//! Polyline path planning.
//!
//! A grid Dijkstra search produces a dense cell-center chain, then a backend
//! picks a subsequence of it as segment junctions. Both backends score a
//! junction by the turn the robot makes there minus the deviation of the
//! outgoing segment from the nominal length `d`:
//!
//! `S(prev, x, next) = k_rot * |turn| - k_uni * | |next - x| - d |`
//!
//! [`Backend::Dp`] maximises the summed score exactly; [`Backend::Bi`] runs a
//! greedy pass in each direction and keeps the better one.

mod backend;
mod dijkstra;

use std::fmt;
use std::str::FromStr;

pub use backend::{bi_backend, dp_backend};
pub use dijkstra::{dijkstra_costs, dijkstra_path, DensePath};

use crate::geometry::{dir_diff, Point};
use crate::grid::MapSnapshot;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Bi,
    Dp,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bi" => Ok(Backend::Bi),
            "dp" => Ok(Backend::Dp),
            _ => Err(Error::Param(format!(
                "unknown backend '{s}' (expected bi or dp)"
            ))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Bi => "bi",
            Backend::Dp => "dp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolylineParams {
    /// Maximum segment length in meters.
    pub d: f64,
    pub k_rot: f64,
    pub k_uni: f64,
    pub backend: Backend,
    /// Dense paths longer than this are thinned before the backend runs.
    pub max_dense: usize,
}

impl Default for PolylineParams {
    fn default() -> Self {
        Self {
            d: 1.25,
            k_rot: 1.0,
            k_uni: 1.0,
            backend: Backend::Dp,
            max_dense: 4000,
        }
    }
}

impl PolylineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::Param(format!("d must be > 0, got {}", self.d)));
        }
        if !(self.k_rot.is_finite()
            && self.k_rot >= 0.0
            && self.k_uni.is_finite()
            && self.k_uni >= 0.0)
        {
            return Err(Error::Param(format!(
                "k_rot and k_uni must be >= 0, got {} and {}",
                self.k_rot, self.k_uni
            )));
        }
        if self.max_dense < 2 {
            return Err(Error::Param("max_dense must be at least 2".into()));
        }
        Ok(())
    }
}

/// Junction score of the turn at `x` followed by the segment `x -> next`.
pub fn segment_score(prev: Point, x: Point, next: Point, params: &PolylineParams) -> f64 {
    params.k_rot * dir_diff(prev, x, next).abs() - params.k_uni * (x.dist(next) - params.d).abs()
}

/// Uniformity-only score of a first segment, which has no incoming direction.
pub(crate) fn first_hop_score(a: Point, next: Point, params: &PolylineParams) -> f64 {
    -params.k_uni * (a.dist(next) - params.d).abs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolylinePath {
    pub junctions: Vec<Point>,
    /// Index of each junction in the dense path it was taken from.
    pub indices: Vec<usize>,
}

impl PolylinePath {
    pub fn start(&self) -> Point {
        self.junctions[0]
    }

    pub fn goal(&self) -> Point {
        *self.junctions.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.junctions.len().saturating_sub(1)
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.junctions.windows(2).map(|w| w[0].dist(w[1])).collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Signed turn at each interior junction.
    pub fn rotations(&self) -> Vec<f64> {
        self.junctions
            .windows(3)
            .map(|w| dir_diff(w[0], w[1], w[2]))
            .collect()
    }

    pub fn cumulative_rotation(&self) -> f64 {
        self.rotations().iter().map(|r| r.abs()).sum()
    }

    /// Sample standard deviation of segment lengths, 0 with fewer than two.
    pub fn length_std(&self) -> f64 {
        sample_std(&self.segment_lengths())
    }

    /// Summed junction score over the interior junctions.
    pub fn total_score(&self, params: &PolylineParams) -> f64 {
        path_score(&self.junctions, params)
    }
}

pub fn path_score(junctions: &[Point], params: &PolylineParams) -> f64 {
    junctions
        .windows(3)
        .map(|w| segment_score(w[0], w[1], w[2], params))
        .sum()
}

pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// First problem found by [`validate_polyline`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Empty,
    StartMismatch {
        expected: Point,
        found: Point,
    },
    GoalMismatch {
        expected: Point,
        found: Point,
    },
    SegmentTooLong {
        segment: usize,
        length: f64,
        limit: f64,
    },
    Traversability {
        segment: usize,
        from: Point,
        to: Point,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty path"),
            Violation::StartMismatch { expected, found } => {
                write!(f, "start mismatch: expected {expected}, found {found}")
            }
            Violation::GoalMismatch { expected, found } => {
                write!(f, "goal mismatch: expected {expected}, found {found}")
            }
            Violation::SegmentTooLong {
                segment,
                length,
                limit,
            } => {
                write!(
                    f,
                    "segment too long: segment {segment} is {length:.4} m, limit {limit:.4} m"
                )
            }
            Violation::Traversability { segment, from, to } => {
                write!(
                    f,
                    "traversability: segment {segment} from {from} to {to} is blocked"
                )
            }
        }
    }
}

/// Checks segment lengths (with half a cell of slack), traversability of every
/// segment and the endpoints. Returns the first violation found.
pub fn validate_polyline(
    path: &PolylinePath,
    start: Point,
    goal: Point,
    map: &MapSnapshot,
    params: &PolylineParams,
    r_robot: f64,
) -> std::result::Result<(), Violation> {
    const TOL: f64 = 1e-9;
    let Some(&first) = path.junctions.first() else {
        return Err(Violation::Empty);
    };
    if first.dist(start) > TOL {
        return Err(Violation::StartMismatch {
            expected: start,
            found: first,
        });
    }
    let last = path.goal();
    if last.dist(goal) > TOL {
        return Err(Violation::GoalMismatch {
            expected: goal,
            found: last,
        });
    }
    let limit = params.d + map.resolution() / 2.0;
    for (i, w) in path.junctions.windows(2).enumerate() {
        let length = w[0].dist(w[1]);
        if length > limit {
            return Err(Violation::SegmentTooLong {
                segment: i,
                length,
                limit,
            });
        }
        if !map.traversable(w[0], w[1], r_robot) {
            return Err(Violation::Traversability {
                segment: i,
                from: w[0],
                to: w[1],
            });
        }
    }
    Ok(())
}

/// Runs the configured backend over an already computed dense path, thinning
/// it first when it is longer than `params.max_dense`. If the thinned path has
/// no feasible chain the full path is tried.
pub fn simplify(
    dense: &DensePath,
    map: &MapSnapshot,
    params: &PolylineParams,
    r_robot: f64,
) -> Option<PolylinePath> {
    let run = |x: &DensePath| match params.backend {
        Backend::Dp => dp_backend(x, map, params, r_robot),
        Backend::Bi => bi_backend(x, map, params, r_robot),
    };
    if dense.len() > params.max_dense {
        let thin = dense.thinned(params.max_dense);
        if let Some(p) = run(&thin) {
            return Some(p);
        }
    }
    run(dense)
}

/// Dijkstra frontend followed by the configured backend.
pub fn plan_polyline(
    start: Point,
    goal: Point,
    map: &MapSnapshot,
    params: &PolylineParams,
    r_robot: f64,
) -> Result<Option<PolylinePath>> {
    params.validate()?;
    let Some(dense) = dijkstra_path(start, goal, map, r_robot)? else {
        return Ok(None);
    };
    Ok(simplify(&dense, map, params, r_robot))
}
