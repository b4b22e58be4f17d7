//! Ground-truth world simulation with a known pose.
//!
//! [`World`] owns the binary truth map, the robot's belief map and a fixed-step
//! clock. Motion is either a straight segment at full speed or an in-place
//! rotation at full turn rate, never both. A lidar scan is taken and merged
//! into the belief every `1 / scan_rate` seconds of simulated time.

mod lidar;

use std::fmt;
use std::sync::Arc;

pub(crate) use lidar::scan_into;
pub use lidar::{integrate_scan, lidar_scan, LidarConfig, Pose, ScanDelta};

use crate::geometry::{normalize_angle, Point};
use crate::grid::{rebuild_distance_field, CellState, DistanceField, MapSnapshot, OccupancyGrid};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotParams {
    pub r_robot: f64,
    pub v_max: f64,
    pub omega_max: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            r_robot: 0.24,
            v_max: 1.25,
            omega_max: 1.57,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_robot", self.r_robot),
            ("v_max", self.v_max),
            ("omega_max", self.omega_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Param(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState {
    pub pose: Pose,
    pub params: RobotParams,
}

/// Fixed-step clock counting whole ticks so time never accumulates rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimClock {
    ticks: u64,
    dt: f64,
    scan_every: u64,
}

impl SimClock {
    pub fn new(dt: f64, scan_rate_hz: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Param(format!("dt must be > 0, got {dt}")));
        }
        let scan_every = (1.0 / (scan_rate_hz * dt)).round().max(1.0) as u64;
        Ok(Self {
            ticks: 0,
            dt,
            scan_every,
        })
    }

    pub fn t(&self) -> f64 {
        self.ticks as f64 * self.dt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    /// Advances one step and reports whether a scan is due.
    fn tick(&mut self) -> bool {
        self.ticks += 1;
        self.ticks.is_multiple_of(self.scan_every)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MotionMode {
    Idle,
    Rotate,
    Straight,
}

impl fmt::Display for MotionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MotionMode::Idle => "idle",
            MotionMode::Rotate => "rotate",
            MotionMode::Straight => "straight",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MotionEventKind {
    SegmentDone,
    RotationDone,
    Collision,
    Stall,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionEvent {
    pub kind: MotionEventKind,
    pub time: f64,
    pub pose: Pose,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose: Pose,
    pub mode: MotionMode,
    pub known_area: f64,
}

/// Time spent and area newly mapped in each motion mode.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExtensionLog {
    pub rotation_time: f64,
    pub rotation_area: f64,
    pub straight_time: f64,
    pub straight_area: f64,
}

impl ExtensionLog {
    pub fn merge(&mut self, o: &ExtensionLog) {
        self.rotation_time += o.rotation_time;
        self.rotation_area += o.rotation_area;
        self.straight_time += o.straight_time;
        self.straight_area += o.straight_area;
    }
}

/// Newly mapped area per second while rotating and while driving straight.
/// A mode with no time spent in it has no rate.
pub fn map_extension_rate(log: &ExtensionLog) -> (Option<f64>, Option<f64>) {
    let rate = |a: f64, t: f64| (t > 0.0).then(|| a / t);
    (
        rate(log.rotation_area, log.rotation_time),
        rate(log.straight_area, log.straight_time),
    )
}

pub struct World {
    truth: Arc<OccupancyGrid>,
    truth_field: DistanceField,
    belief: OccupancyGrid,
    snapshot: MapSnapshot,
    robot: RobotState,
    lidar: LidarConfig,
    clock: SimClock,
    trajectory: Vec<TrajectorySample>,
    extension: ExtensionLog,
    min_clearance: f64,
}

impl World {
    /// A world with an all-Unknown belief. No scan is taken yet.
    pub fn new(
        truth: OccupancyGrid,
        start: Pose,
        robot: RobotParams,
        lidar: LidarConfig,
        dt: f64,
    ) -> Result<Self> {
        robot.validate()?;
        lidar.validate()?;
        if truth.known_cells() != truth.width() * truth.height() {
            return Err(Error::Input(
                "truth map must not contain Unknown cells".into(),
            ));
        }
        let truth_field = rebuild_distance_field(&truth);
        let clearance = truth
            .world_to_cell(start.position)
            .map(|(ix, iy)| truth_field.at(ix, iy))
            .ok_or_else(|| {
                Error::Input(format!("start {} lies outside the map", start.position))
            })?;
        if clearance < robot.r_robot {
            return Err(Error::Input(format!(
                "start {} has clearance {clearance:.3} < r_robot {}",
                start.position, robot.r_robot
            )));
        }
        let clock = SimClock::new(dt, lidar.scan_rate_hz)?;
        let belief = OccupancyGrid::new(
            truth.width(),
            truth.height(),
            truth.resolution(),
            truth.origin(),
            CellState::Unknown,
        )?;
        let snapshot = MapSnapshot::new(belief.clone());
        let mut w = Self {
            truth: Arc::new(truth),
            truth_field,
            belief,
            snapshot,
            robot: RobotState {
                pose: start,
                params: robot,
            },
            lidar,
            clock,
            trajectory: Vec::new(),
            extension: ExtensionLog::default(),
            min_clearance: clearance,
        };
        w.record(MotionMode::Idle);
        Ok(w)
    }

    /// Replaces the belief with a prior map of the same geometry. Used to
    /// script scenarios where the robot starts with stale knowledge.
    pub fn with_belief(mut self, belief: OccupancyGrid) -> Result<Self> {
        let t = &self.truth;
        if belief.width() != t.width()
            || belief.height() != t.height()
            || belief.resolution() != t.resolution()
        {
            return Err(Error::Input(format!(
                "prior belief is {}x{} at {}, truth is {}x{} at {}",
                belief.width(),
                belief.height(),
                belief.resolution(),
                t.width(),
                t.height(),
                t.resolution()
            )));
        }
        self.snapshot = MapSnapshot::new(belief.clone());
        self.belief = belief;
        self.trajectory.clear();
        self.record(MotionMode::Idle);
        Ok(self)
    }

    pub fn truth(&self) -> &OccupancyGrid {
        &self.truth
    }

    pub fn belief(&self) -> &OccupancyGrid {
        &self.belief
    }

    /// Snapshot of the current belief, refreshed only when it changed.
    pub fn snapshot(&mut self) -> MapSnapshot {
        if self.snapshot.revision() != self.belief.revision() {
            self.snapshot = self.snapshot.advance(Arc::new(self.belief.clone()));
        }
        self.snapshot.clone()
    }

    pub fn robot(&self) -> &RobotState {
        &self.robot
    }

    pub fn pose(&self) -> Pose {
        self.robot.pose
    }

    pub fn lidar(&self) -> &LidarConfig {
        &self.lidar
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    pub fn time(&self) -> f64 {
        self.clock.t()
    }

    pub fn trajectory(&self) -> &[TrajectorySample] {
        &self.trajectory
    }

    pub fn extension(&self) -> &ExtensionLog {
        &self.extension
    }

    /// Smallest truth clearance seen at any simulation step.
    pub fn min_clearance(&self) -> f64 {
        self.min_clearance
    }

    /// Distance from the cell containing `p` to the nearest truth obstacle.
    pub fn truth_clearance(&self, p: Point) -> f64 {
        match self.truth.world_to_cell(p) {
            Some((ix, iy)) => self.truth_field.at(ix, iy),
            None => f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, mode: MotionMode) {
        self.trajectory.push(TrajectorySample {
            t: self.clock.t(),
            pose: self.robot.pose,
            mode,
            known_area: self.belief.known_area(),
        });
    }

    /// Scans and integrates from the current pose without advancing time.
    pub fn scan_now(&mut self) -> ScanDelta {
        lidar::scan_into(&self.truth, &mut self.belief, self.robot.pose, &self.lidar)
    }

    /// Advances one step in `mode` after the pose was updated. Returns false
    /// on collision.
    fn step(&mut self, mode: MotionMode) -> bool {
        let scan_due = self.clock.tick();
        let dt = self.clock.dt();
        match mode {
            MotionMode::Rotate => self.extension.rotation_time += dt,
            MotionMode::Straight => self.extension.straight_time += dt,
            MotionMode::Idle => {}
        }
        let clearance = self.truth_clearance(self.robot.pose.position);
        self.min_clearance = self.min_clearance.min(clearance);
        if clearance < self.robot.params.r_robot {
            self.record(mode);
            return false;
        }
        if scan_due {
            let area = self.scan_now().newly_known as f64 * self.belief.resolution().powi(2);
            match mode {
                MotionMode::Rotate => self.extension.rotation_area += area,
                MotionMode::Straight => self.extension.straight_area += area,
                MotionMode::Idle => {}
            }
            self.record(mode);
        }
        true
    }

    fn event(&self, kind: MotionEventKind) -> MotionEvent {
        MotionEvent {
            kind,
            time: self.clock.t(),
            pose: self.robot.pose,
        }
    }

    /// Drives straight from the current position to `to` at `v_max`. The
    /// heading must already point at `to`.
    pub fn execute_segment(&mut self, to: Point) -> Result<MotionEvent> {
        let from = self.robot.pose.position;
        let length = from.dist(to);
        if length == 0.0 {
            return Ok(self.event(MotionEventKind::SegmentDone));
        }
        let bearing = (to - from).angle();
        let misalign = normalize_angle(bearing - self.robot.pose.theta).abs();
        if misalign > 1e-6 {
            return Err(Error::State(format!(
                "heading {:.6} is {misalign:.2e} rad off segment bearing {bearing:.6}",
                self.robot.pose.theta
            )));
        }
        let v_step = self.robot.params.v_max * self.clock.dt();
        let n = (length / v_step - 1e-9).ceil().max(1.0) as u64;
        let dir = (to - from) * (1.0 / length);
        for k in 1..=n {
            self.robot.pose.position = if k == n {
                to
            } else {
                from + dir * (k as f64 * v_step)
            };
            if !self.step(MotionMode::Straight) {
                return Ok(self.event(MotionEventKind::Collision));
            }
        }
        self.record(MotionMode::Straight);
        Ok(self.event(MotionEventKind::SegmentDone))
    }

    /// Turns in place by `delta` radians at `omega_max`, positive counter-clockwise.
    pub fn rotate_in_place(&mut self, delta: f64) -> Result<MotionEvent> {
        let full = 2.0 * std::f64::consts::PI;
        if !delta.is_finite() || delta.abs() > full + 1e-12 {
            return Err(Error::Param(format!(
                "rotation {delta} exceeds a full turn"
            )));
        }
        if delta == 0.0 {
            return Ok(self.event(MotionEventKind::RotationDone));
        }
        let theta0 = self.robot.pose.theta;
        let w_step = self.robot.params.omega_max * self.clock.dt();
        let n = (delta.abs() / w_step - 1e-9).ceil().max(1.0) as u64;
        for k in 1..=n {
            let turned = if k == n {
                delta
            } else {
                delta.signum() * k as f64 * w_step
            };
            self.robot.pose.theta = normalize_angle(theta0 + turned);
            if !self.step(MotionMode::Rotate) {
                return Ok(self.event(MotionEventKind::Collision));
            }
        }
        self.record(MotionMode::Rotate);
        Ok(self.event(MotionEventKind::RotationDone))
    }

    /// Turns the shortest way to face `heading`.
    pub fn rotate_to(&mut self, heading: f64) -> Result<MotionEvent> {
        self.rotate_in_place(normalize_angle(heading - self.robot.pose.theta))
    }

    /// Faces `target` exactly, turning the shortest way.
    pub fn face(&mut self, target: Point) -> Result<MotionEvent> {
        let bearing = (target - self.robot.pose.position).angle();
        let ev = self.rotate_to(bearing)?;
        if ev.kind == MotionEventKind::RotationDone {
            self.robot.pose.theta = normalize_angle(bearing);
        }
        Ok(ev)
    }
}
