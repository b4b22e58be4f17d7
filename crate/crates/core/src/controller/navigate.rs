use std::time::Instant;

use super::{ExplorationPhase, LogEvent, MissionConfig, VisitedJunctions};
use crate::geometry::{normalize_angle, Point};
use crate::grid::MapSnapshot;
use crate::polyline::{plan_polyline, PolylinePath};
use crate::sim::{MotionEventKind, World};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NavMode {
    Local,
    Global,
    Retrace,
    Home,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NavOutcome {
    Reached,
    Unreachable,
    Collision,
}

/// Closest point to `frontier` the robot can stand on: the frontier itself
/// when its clearance allows, else the nearest admissible cell center within
/// `2 * r_robot`.
pub fn standoff_goal(frontier: Point, map: &MapSnapshot, r_robot: f64) -> Option<Point> {
    if map.min_dist(frontier) >= r_robot && map.grid().world_to_cell(frontier).is_some() {
        return Some(frontier);
    }
    let g = map.grid();
    let reach = 2.0 * r_robot;
    let span = (reach / g.resolution()).ceil() as i64;
    let (cx, cy) = g.cell_coords(frontier);
    let mut best: Option<(f64, Point)> = None;
    for iy in cy - span..=cy + span {
        for ix in cx - span..=cx + span {
            if !g.in_bounds(ix, iy) {
                continue;
            }
            let c = g.cell_center(ix, iy);
            let d = c.dist(frontier);
            if d <= reach
                && map.field().at(ix as usize, iy as usize) >= r_robot
                && best.is_none_or(|(bd, _)| d < bd)
            {
                best = Some((d, c));
            }
        }
    }
    best.map(|b| b.1)
}

/// Drives the simulated robot along planned polylines and keeps the motion
/// bookkeeping a mission report needs.
pub struct Navigator {
    pub(crate) world: World,
    pub(crate) cfg: MissionConfig,
    pub(crate) phase: ExplorationPhase,
    pub(crate) events: Vec<LogEvent>,
    pub(crate) visited: VisitedJunctions,
    pub(crate) segments: Vec<f64>,
    pub(crate) distance: f64,
    pub(crate) cumulative_rotation: f64,
    pub(crate) junction_rotation: f64,
    pub(crate) replans: usize,
    pub(crate) plan_queries: usize,
    pub(crate) planner_secs: Vec<f64>,
    pub(crate) last_path: Option<PolylinePath>,
}

impl Navigator {
    pub fn new(world: World, cfg: MissionConfig) -> Self {
        Self {
            world,
            cfg,
            phase: ExplorationPhase::PreScanRotation,
            events: Vec::new(),
            visited: VisitedJunctions::default(),
            segments: Vec::new(),
            distance: 0.0,
            cumulative_rotation: 0.0,
            junction_rotation: 0.0,
            replans: 0,
            plan_queries: 0,
            planner_secs: Vec::new(),
            last_path: None,
        }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn visited(&self) -> &VisitedJunctions {
        &self.visited
    }

    pub fn replans(&self) -> usize {
        self.replans
    }

    pub fn segments(&self) -> &[f64] {
        &self.segments
    }

    /// The most recent polyline planned.
    pub fn last_path(&self) -> Option<&PolylinePath> {
        self.last_path.as_ref()
    }

    pub(crate) fn set_phase(&mut self, phase: ExplorationPhase) {
        if self.phase != phase {
            self.phase = phase;
            self.log("phase", String::new());
        }
    }

    pub(crate) fn log(&mut self, kind: &str, detail: String) {
        self.events.push(LogEvent {
            t: self.world.time(),
            phase: self.phase,
            kind: kind.to_string(),
            detail,
        });
    }

    /// Rotates in place by `delta`, tracking the total turned. Returns false on collision.
    pub(crate) fn rotate(&mut self, delta: f64) -> Result<bool> {
        let ev = self.world.rotate_in_place(delta)?;
        self.cumulative_rotation += delta.abs();
        Ok(ev.kind != MotionEventKind::Collision)
    }

    /// Turns to face `target`. Returns the magnitude turned, `None` on collision.
    fn face(&mut self, target: Point) -> Result<Option<f64>> {
        let pose = self.world.pose();
        let delta = normalize_angle((target - pose.position).angle() - pose.theta).abs();
        let ev = self.world.face(target)?;
        self.cumulative_rotation += delta;
        Ok((ev.kind != MotionEventKind::Collision).then_some(delta))
    }

    fn plan(&mut self, goal: Point) -> Result<Option<PolylinePath>> {
        let map = self.world.snapshot();
        let start = self.world.pose().position;
        let clock = Instant::now();
        let path = match plan_polyline(start, goal, &map, &self.cfg.planner, self.cfg.robot.r_robot)
        {
            Ok(p) => p,
            Err(crate::Error::Input(msg)) => {
                self.log("plan-error", format!("msg=\"{msg}\""));
                None
            }
            Err(e) => return Err(e),
        };
        self.planner_secs.push(clock.elapsed().as_secs_f64());
        self.plan_queries += 1;
        if let Some(p) = &path {
            self.last_path = Some(p.clone());
        }
        Ok(path)
    }

    /// Navigates to `goal` along polylines, re-checking each segment against
    /// the latest belief after turning toward it and replanning when blocked.
    /// The goal itself never changes during the call.
    pub fn navigate_to(&mut self, goal: Point, mode: NavMode) -> Result<NavOutcome> {
        let tol = 2.0 * self.world.belief().resolution();
        if self.world.pose().position.dist(goal) <= tol {
            return Ok(NavOutcome::Reached);
        }
        let mode_name = format!("{mode:?}").to_lowercase();
        self.log(
            "nav-start",
            format!("mode={mode_name} goal={:.3},{:.3}", goal.x, goal.y),
        );
        let outcome = self.drive(goal, mode)?;
        let p = self.world.pose().position;
        self.log(
            "nav-end",
            format!(
                "mode={mode_name} outcome={outcome:?} pos={:.3},{:.3}",
                p.x, p.y
            )
            .to_lowercase(),
        );
        Ok(outcome)
    }

    fn drive(&mut self, goal: Point, mode: NavMode) -> Result<NavOutcome> {
        let mut path = self.plan(goal)?;
        if path.is_none() && mode == NavMode::Home {
            // One retry after a fresh look around.
            if !self.rotate(2.0 * std::f64::consts::PI)? {
                return Ok(NavOutcome::Collision);
            }
            path = self.plan(goal)?;
        }
        let Some(mut path) = path else {
            return Ok(NavOutcome::Unreachable);
        };
        let mut replans = 0;
        let mut k = 0;
        while k + 1 < path.junctions.len() {
            let next = path.junctions[k + 1];
            let Some(turned) = self.face(next)? else {
                return Ok(NavOutcome::Collision);
            };
            if k > 0 {
                self.junction_rotation += turned;
            }
            let here = self.world.pose().position;
            let map = self.world.snapshot();
            if !map.traversable(here, next, self.cfg.robot.r_robot) {
                replans += 1;
                self.replans += 1;
                self.log(
                    "replan",
                    format!(
                        "at={:.3},{:.3} blocked={:.3},{:.3}",
                        here.x, here.y, next.x, next.y
                    ),
                );
                if replans > self.cfg.max_replans {
                    return Ok(NavOutcome::Unreachable);
                }
                match self.plan(goal)? {
                    Some(p) => {
                        path = p;
                        k = 0;
                        continue;
                    }
                    None => return Ok(NavOutcome::Unreachable),
                }
            }
            let ev = self.world.execute_segment(next)?;
            let moved = here.dist(self.world.pose().position);
            self.distance += moved;
            if ev.kind == MotionEventKind::Collision {
                self.log(
                    "collision",
                    format!("pos={:.3},{:.3}", ev.pose.position.x, ev.pose.position.y),
                );
                return Ok(NavOutcome::Collision);
            }
            self.segments.push(moved);
            self.visited.push(next, self.world.time());
            k += 1;
        }
        Ok(NavOutcome::Reached)
    }
}
