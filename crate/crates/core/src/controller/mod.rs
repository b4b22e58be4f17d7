//! Closed-loop exploration process.
//!
//! Each cycle turns the robot a full circle, searches for frontiers with a
//! local tree around it and drives to the best one. When no local frontier
//! exists the best frontier of the persistent global tree is chosen instead,
//! and the robot first revisits recently recorded junctions in an order
//! picked by simulated annealing. With both sets empty the robot drives home.

mod mission;
mod navigate;
mod sa;
#[cfg(test)]
mod tests;

use std::fmt;

pub use mission::{run_mission, time_budget_for};
pub use navigate::{standoff_goal, NavMode, NavOutcome, Navigator};
pub use sa::{sa_order, sa_order_waypoints, LegCosts, SaSchedule};

use crate::geometry::Point;
use crate::grid::OccupancyGrid;
use crate::polyline::PolylineParams;
use crate::rrt::{FrontierPoint, RrtTree, SearchParams};
use crate::select::SelectionWeights;
use crate::sim::{ExtensionLog, LidarConfig, RobotParams, TrajectorySample};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExplorationPhase {
    PreScanRotation,
    LocalSearch,
    LocalNavigate,
    GlobalSelect,
    RetraceNavigate,
    GlobalNavigate,
    ReturnHome,
    Done,
}

impl fmt::Display for ExplorationPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExplorationPhase::PreScanRotation => "pre-scan",
            ExplorationPhase::LocalSearch => "local-search",
            ExplorationPhase::LocalNavigate => "local-navigate",
            ExplorationPhase::GlobalSelect => "global-select",
            ExplorationPhase::RetraceNavigate => "retrace-navigate",
            ExplorationPhase::GlobalNavigate => "global-navigate",
            ExplorationPhase::ReturnHome => "return-home",
            ExplorationPhase::Done => "done",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MissionOutcome {
    Finished,
    Collision,
    Stall,
    Timeout,
}

impl fmt::Display for MissionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissionOutcome::Finished => "finished",
            MissionOutcome::Collision => "collision",
            MissionOutcome::Stall => "stall",
            MissionOutcome::Timeout => "timeout",
        })
    }
}

impl std::str::FromStr for MissionOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finished" => Ok(MissionOutcome::Finished),
            "collision" => Ok(MissionOutcome::Collision),
            "stall" => Ok(MissionOutcome::Stall),
            "timeout" => Ok(MissionOutcome::Timeout),
            _ => Err(Error::Input(format!("unknown outcome '{s}'"))),
        }
    }
}

/// One line of the mission event log.
#[derive(Clone, Debug, PartialEq)]
pub struct LogEvent {
    pub t: f64,
    pub phase: ExplorationPhase,
    pub kind: String,
    pub detail: String,
}

impl fmt::Display for LogEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={:.2} phase={} event={}",
            self.t, self.phase, self.kind
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

/// Junctions the robot has reached, in order, with arrival times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VisitedJunctions {
    entries: Vec<(Point, f64)>,
    retraced_upto: usize,
}

impl VisitedJunctions {
    pub fn push(&mut self, p: Point, t: f64) {
        self.entries.push((p, t));
    }

    pub fn entries(&self) -> &[(Point, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<Point> {
        self.entries.last().map(|e| e.0)
    }

    /// Junctions recorded since the previous call, in arrival order.
    pub fn take_pending(&mut self) -> Vec<Point> {
        let out = self.entries[self.retraced_upto..]
            .iter()
            .map(|e| e.0)
            .collect();
        self.retraced_upto = self.entries.len();
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissionConfig {
    pub robot: RobotParams,
    pub lidar: LidarConfig,
    pub dt: f64,
    pub search: SearchParams,
    pub planner: PolylineParams,
    pub weights: SelectionWeights,
    /// Global tree samples drawn at each decision point.
    pub global_samples: u64,
    /// Lattice pitch for thinning recorded junctions before retracing, m.
    pub visited_cell: f64,
    pub stall_window: f64,
    pub stall_displacement: f64,
    pub stall_area: f64,
    /// Simulated-time budget in seconds; `None` derives one from the map.
    pub time_budget: Option<f64>,
    /// Replans allowed within one navigation before giving up on the goal.
    pub max_replans: usize,
    pub retrace: bool,
    /// Records frontier parents and post-prune checks in the report.
    pub audit: bool,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            robot: RobotParams::default(),
            lidar: LidarConfig::default(),
            dt: 0.05,
            search: SearchParams::default(),
            planner: PolylineParams::default(),
            weights: SelectionWeights::default(),
            global_samples: 200,
            visited_cell: 2.0,
            stall_window: 30.0,
            stall_displacement: 0.05,
            stall_area: 0.01,
            time_budget: None,
            max_replans: 20,
            retrace: true,
            audit: false,
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<()> {
        self.robot.validate()?;
        self.lidar.validate()?;
        self.search.validate()?;
        self.planner.validate()?;
        self.weights.validate()?;
        if (self.search.r_robot - self.robot.r_robot).abs() > 1e-12 {
            return Err(Error::Param(
                "search r_robot must equal the robot radius".into(),
            ));
        }
        if !(self.dt > 0.0 && self.visited_cell > 0.0 && self.stall_window > 0.0) {
            return Err(Error::Param(
                "dt, visited_cell and stall_window must be > 0".into(),
            ));
        }
        if let Some(b) = self.time_budget {
            if !(b > 0.0) {
                return Err(Error::Param(format!("time budget must be > 0, got {b}")));
            }
        }
        Ok(())
    }
}

/// Frontier-safety evidence gathered when [`MissionConfig::audit`] is set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditLog {
    /// (frontier, parent) for every distinct frontier any search produced.
    pub frontier_parents: Vec<(Point, Point)>,
    pub prune_checks: usize,
    /// Descriptions of post-prune invariant violations.
    pub prune_failures: Vec<String>,
}

/// Wall-clock measurements. Kept apart from the deterministic report content.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timing {
    /// Seconds per polyline planning query.
    pub planner_secs: Vec<f64>,
    pub mission_secs: f64,
}

#[derive(Clone, Debug)]
pub struct MissionReport {
    pub seed: u64,
    pub outcome: MissionOutcome,
    pub total_time: f64,
    pub distance: f64,
    /// Sum of all in-place rotation magnitudes, radians.
    pub cumulative_rotation: f64,
    /// Rotation at interior polyline junctions only, radians.
    pub junction_rotation: f64,
    /// Length of every executed straight segment, m.
    pub segments: Vec<f64>,
    pub replans: usize,
    pub plan_queries: usize,
    pub start: Point,
    pub final_position: Point,
    pub events: Vec<LogEvent>,
    pub trajectory: Vec<TrajectorySample>,
    pub extension: ExtensionLog,
    pub visited: Vec<(Point, f64)>,
    pub belief: OccupancyGrid,
    pub global_tree: RrtTree,
    pub global_frontiers: Vec<FrontierPoint>,
    pub audit: Option<AuditLog>,
    pub timing: Timing,
}

impl MissionReport {
    pub fn known_area(&self) -> f64 {
        self.belief.known_area()
    }

    /// (t, known area) pairs.
    pub fn known_area_series(&self) -> Vec<(f64, f64)> {
        self.trajectory
            .iter()
            .map(|s| (s.t, s.known_area))
            .collect()
    }

    pub fn event_log(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}
