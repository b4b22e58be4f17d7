//! Frontier scoring and selection.
//!
//! A frontier's score adds four weighted terms: unknown area within sensing
//! range of it, how well it keeps the current direction of travel, its
//! distance from the robot and its obstacle clearance. Area, distance and
//! clearance are normalised by the sensing disc and radius so the default
//! weights are commensurate.

use std::f64::consts::PI;

pub use crate::geometry::dir_diff;
use crate::geometry::Point;
use crate::grid::MapSnapshot;
use crate::rrt::FrontierPoint;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionWeights {
    pub w_info: f64,
    pub w_dir: f64,
    pub w_dist: f64,
    pub w_free: f64,
}

impl Default for SelectionWeights {
    fn default() -> Self {
        Self {
            w_info: 1.0,
            w_dir: 1.0,
            w_dist: 0.5,
            w_free: 2.0,
        }
    }
}

impl SelectionWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.w_info, self.w_dir, self.w_dist, self.w_free];
        if all.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(Error::Param(format!(
                "selection weights must be finite and >= 0: {self:?}"
            )))
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            w_info: self.w_info * k,
            w_dir: self.w_dir * k,
            w_dist: self.w_dist * k,
            w_free: self.w_free * k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionContext {
    /// Last visited segment junction.
    pub p_last: Point,
    pub p_robot: Point,
    pub r_sensing: f64,
}

impl SelectionContext {
    /// Context before any junction was visited: `p_last` sits 1 m behind the
    /// robot along its heading, so the direction term favours going straight.
    pub fn at_start(p_robot: Point, heading: f64, r_sensing: f64) -> Self {
        Self {
            p_last: p_robot - Point::from_polar(1.0, heading),
            p_robot,
            r_sensing,
        }
    }
}

/// Unknown area (m²) within `r_sensing` of `f`.
pub fn info_gain(f: Point, map: &MapSnapshot, r_sensing: f64) -> f64 {
    map.unknown_area_in_disc(f, r_sensing)
}

/// The four unweighted, normalised score terms of a frontier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreTerms {
    pub info: f64,
    pub dir: f64,
    pub dist: f64,
    pub free: f64,
}

impl ScoreTerms {
    pub fn weighted(&self, w: &SelectionWeights) -> f64 {
        w.w_info * self.info + w.w_dir * self.dir + w.w_dist * self.dist + w.w_free * self.free
    }
}

pub fn score_terms(f: Point, ctx: &SelectionContext, map: &MapSnapshot) -> ScoreTerms {
    let r = ctx.r_sensing;
    // +inf clearance (no obstacle on the map) clamps to the sensing radius.
    let clearance = map.min_dist(f).min(r);
    ScoreTerms {
        info: info_gain(f, map, r) / (PI * r * r),
        dir: PI - dir_diff(ctx.p_last, ctx.p_robot, f).abs(),
        dist: ctx.p_robot.dist(f) / r,
        free: clearance / r,
    }
}

pub fn frontier_score(
    f: Point,
    ctx: &SelectionContext,
    map: &MapSnapshot,
    w: &SelectionWeights,
) -> f64 {
    score_terms(f, ctx, map).weighted(w)
}

/// Highest-scoring frontier; ties go to the lowest node id.
pub fn select_best_frontier(
    frontiers: &[FrontierPoint],
    ctx: &SelectionContext,
    map: &MapSnapshot,
    w: &SelectionWeights,
) -> Result<FrontierPoint> {
    let mut best: Option<(f64, FrontierPoint)> = None;
    for f in frontiers {
        let s = frontier_score(f.position, ctx, map, w);
        let better = match best {
            None => true,
            Some((bs, bf)) => s > bs || (s == bs && f.node < bf.node),
        };
        if better {
            best = Some((s, *f));
        }
    }
    best.map(|(_, f)| f)
        .ok_or_else(|| Error::State("no frontier to select from".into()))
}
