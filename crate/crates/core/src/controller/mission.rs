use std::collections::HashSet;
use std::f64::consts::PI;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::navigate::{standoff_goal, NavMode, NavOutcome, Navigator};
use super::sa::sa_order_waypoints;
use super::{AuditLog, ExplorationPhase, MissionConfig, MissionOutcome, MissionReport, Timing};
use crate::geometry::Point;
use crate::grid::{Boundary, CellState, MapSnapshot, OccupancyGrid};
use crate::rrt::{uniform_downsample, FrontierPoint, FrontierSearch, RrtTree, SearchMode};
use crate::select::{select_best_frontier, SelectionContext};
use crate::sim::{Pose, RobotParams, World};
use crate::Result;

/// Twenty times the time needed to sweep the map's free area with a
/// robot-wide stripe at full speed.
pub fn time_budget_for(truth: &OccupancyGrid, robot: &RobotParams) -> f64 {
    let free = truth.count(CellState::Free) as f64 * truth.resolution().powi(2);
    20.0 * free / (2.0 * robot.r_robot) / robot.v_max
}

const MAX_CYCLES: usize = 100_000;

struct Mission {
    nav: Navigator,
    start: Pose,
    seed: u64,
    budget: f64,
    local_rng: ChaCha8Rng,
    global_rng: ChaCha8Rng,
    global: Option<FrontierSearch>,
    pruned_at: Option<u64>,
    excluded: Vec<Point>,
    audit: Option<AuditLog>,
    audit_seen: HashSet<[u64; 4]>,
    episodes: u64,
}

/// Runs one exploration mission to a terminal outcome.
pub fn run_mission(
    truth: OccupancyGrid,
    start: Pose,
    cfg: &MissionConfig,
    seed: u64,
) -> Result<MissionReport> {
    cfg.validate()?;
    let clock = Instant::now();
    let budget = cfg
        .time_budget
        .unwrap_or_else(|| time_budget_for(&truth, &cfg.robot));
    let world = World::new(truth, start, cfg.robot, cfg.lidar, cfg.dt)?;
    let mut global_rng = ChaCha8Rng::seed_from_u64(seed);
    global_rng.set_stream(1);
    let mut m = Mission {
        nav: Navigator::new(world, cfg.clone()),
        start,
        seed,
        budget,
        local_rng: ChaCha8Rng::seed_from_u64(seed),
        global_rng,
        global: None,
        pruned_at: None,
        excluded: Vec::new(),
        audit: cfg.audit.then(AuditLog::default),
        audit_seen: HashSet::new(),
        episodes: 0,
    };
    let outcome = m.run()?;
    let mission_secs = clock.elapsed().as_secs_f64();
    Ok(m.into_report(outcome, mission_secs))
}

impl Mission {
    fn cfg(&self) -> &MissionConfig {
        &self.nav.cfg
    }

    fn run(&mut self) -> Result<MissionOutcome> {
        let p = self.start.position;
        self.nav.log(
            "start",
            format!(
                "seed={} pos={:.3},{:.3} budget={:.1}",
                self.seed, p.x, p.y, self.budget
            ),
        );
        self.nav.world.scan_now();
        for _ in 0..MAX_CYCLES {
            if let Some(o) = self.check_limits() {
                return Ok(o);
            }
            self.nav.set_phase(ExplorationPhase::PreScanRotation);
            if !self.nav.rotate(2.0 * PI)? {
                return Ok(self.collision());
            }
            self.global_step(self.cfg().global_samples)?;

            self.nav.set_phase(ExplorationPhase::LocalSearch);
            let local = self.local_search()?;
            if !local.is_empty() {
                match self.go_to_frontier(&local, NavMode::Local)? {
                    Some(NavOutcome::Collision) => return Ok(self.collision()),
                    _ => continue,
                }
            }

            self.nav.set_phase(ExplorationPhase::GlobalSelect);
            let mut global = self.global_frontiers();
            if global.is_empty() {
                self.global_step(self.cfg().search.max_samples)?;
                global = self.global_frontiers();
            }
            if global.is_empty() {
                return self.return_home();
            }
            if self.go_to_frontier(&global, NavMode::Global)? == Some(NavOutcome::Collision) {
                return Ok(self.collision());
            }
        }
        self.nav.log("timeout", "reason=cycle-cap".into());
        Ok(MissionOutcome::Timeout)
    }

    fn collision(&mut self) -> MissionOutcome {
        self.nav.log("outcome", "result=collision".into());
        MissionOutcome::Collision
    }

    fn check_limits(&mut self) -> Option<MissionOutcome> {
        let now = self.nav.world.time();
        if now > self.budget {
            self.nav
                .log("timeout", format!("budget={:.1}", self.budget));
            return Some(MissionOutcome::Timeout);
        }
        let window = self.cfg().stall_window;
        let traj = self.nav.world.trajectory();
        let idx = traj.partition_point(|s| s.t <= now - window);
        if idx == 0 {
            return None;
        }
        let then = traj[idx - 1];
        let moved = then.pose.position.dist(self.nav.world.pose().position);
        let gained = self.nav.world.belief().known_area() - then.known_area;
        if moved < self.cfg().stall_displacement && gained < self.cfg().stall_area {
            self.nav.log(
                "stall",
                format!("window={window:.1} moved={moved:.3} gained={gained:.4}"),
            );
            return Some(MissionOutcome::Stall);
        }
        None
    }

    fn selection_context(&self) -> SelectionContext {
        let pose = self.nav.world.pose();
        let r = self.cfg().lidar.r_sensing;
        let prev = self
            .nav
            .visited
            .entries()
            .iter()
            .rev()
            .map(|e| e.0)
            .find(|p| p.dist(pose.position) > 1e-6);
        match prev {
            Some(p_last) => SelectionContext {
                p_last,
                p_robot: pose.position,
                r_sensing: r,
            },
            None => SelectionContext::at_start(pose.position, pose.theta, r),
        }
    }

    fn record_frontiers(&mut self, frontiers: &[FrontierPoint]) {
        let Some(audit) = self.audit.as_mut() else {
            return;
        };
        for f in frontiers {
            let key = [
                f.position.x.to_bits(),
                f.position.y.to_bits(),
                f.parent.x.to_bits(),
                f.parent.y.to_bits(),
            ];
            if self.audit_seen.insert(key) {
                audit.frontier_parents.push((f.position, f.parent));
            }
        }
    }

    fn local_search(&mut self) -> Result<Vec<FrontierPoint>> {
        let map = self.nav.world.snapshot();
        let pos = self.nav.world.pose().position;
        let cfg = self.cfg().clone();
        let boundary = Boundary::disc(pos, cfg.lidar.r_sensing)?;
        let mut search = FrontierSearch::new(pos, boundary, SearchMode::Local, cfg.search, &map)?;
        for &p in &self.excluded {
            search.exclude(p, cfg.search.downsample_cell);
        }
        let status = search.run(&map, cfg.search.max_samples, &mut self.local_rng);
        let frontiers = search.frontiers();
        self.nav.log(
            "local-search",
            format!(
                "samples={} nodes={} frontiers={} status={status:?}",
                search.samples_drawn(),
                search.tree().len(),
                frontiers.len()
            )
            .to_lowercase(),
        );
        self.record_frontiers(&frontiers);
        Ok(frontiers)
    }

    fn global_frontiers(&self) -> Vec<FrontierPoint> {
        self.global
            .as_ref()
            .map(|g| g.frontiers())
            .unwrap_or_default()
    }

    /// Prunes the global tree if the belief changed, then expands it.
    fn global_step(&mut self, samples: u64) -> Result<()> {
        let map = self.nav.world.snapshot();
        if self.global.is_none() {
            let boundary = map.grid().bounding_rect();
            let search = FrontierSearch::new(
                self.start.position,
                boundary,
                SearchMode::Global,
                self.cfg().search,
                &map,
            )?;
            self.global = Some(search);
        }
        let g = self.global.as_mut().unwrap();
        if self.pruned_at != Some(map.revision()) {
            let stats = g.prune(&map)?;
            self.pruned_at = Some(map.revision());
            if stats.nodes_removed > 0 || stats.explored + stats.blocked + stats.orphaned > 0 {
                let detail = format!(
                    "explored={} blocked={} orphaned={} nodes_removed={}",
                    stats.explored, stats.blocked, stats.orphaned, stats.nodes_removed
                );
                self.nav.log("prune", detail);
            }
            if let Some(audit) = self.audit.as_mut() {
                audit.prune_checks += 1;
                audit_prune(g, &map, self.nav.cfg.robot.r_robot, audit);
            }
        }
        let g = self.global.as_mut().unwrap();
        g.run(&map, samples, &mut self.global_rng);
        let frontiers = g.frontiers();
        self.record_frontiers(&frontiers);
        Ok(())
    }

    fn exclude(&mut self, p: Point) {
        let radius = self.cfg().search.downsample_cell;
        self.excluded.push(p);
        if let Some(g) = self.global.as_mut() {
            g.exclude(p, radius);
        }
        self.nav
            .log("exclude", format!("frontier={:.3},{:.3}", p.x, p.y));
    }

    /// Selects from `candidates` and navigates there, retracing first for
    /// global frontiers. `None` when no goal could be derived.
    fn go_to_frontier(
        &mut self,
        candidates: &[FrontierPoint],
        mode: NavMode,
    ) -> Result<Option<NavOutcome>> {
        let map = self.nav.world.snapshot();
        let ctx = self.selection_context();
        let best = select_best_frontier(candidates, &ctx, &map, &self.cfg().weights)?;
        let f = best.position;
        self.nav.log(
            "select",
            format!(
                "origin={:?} frontier={:.3},{:.3} candidates={}",
                best.origin,
                f.x,
                f.y,
                candidates.len()
            )
            .to_lowercase(),
        );
        let Some(goal) = standoff_goal(f, &map, self.cfg().robot.r_robot) else {
            self.exclude(f);
            return Ok(None);
        };
        if mode == NavMode::Global {
            if let Some(NavOutcome::Collision) = self.retrace(goal, &map)? {
                return Ok(Some(NavOutcome::Collision));
            }
            self.nav.set_phase(ExplorationPhase::GlobalNavigate);
        } else {
            self.nav.set_phase(ExplorationPhase::LocalNavigate);
        }
        let out = self.nav.navigate_to(goal, mode)?;
        if out == NavOutcome::Unreachable {
            self.exclude(f);
        }
        Ok(Some(out))
    }

    fn retrace(&mut self, goal: Point, map: &MapSnapshot) -> Result<Option<NavOutcome>> {
        self.nav.set_phase(ExplorationPhase::RetraceNavigate);
        let pending = self.nav.visited.take_pending();
        if !self.cfg().retrace || pending.is_empty() {
            return Ok(None);
        }
        let points = uniform_downsample(&pending, self.cfg().visited_cell);
        let here = self.nav.world.pose().position;
        self.episodes += 1;
        let sa_seed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(self.episodes);
        let order =
            sa_order_waypoints(&points, here, goal, map, self.cfg().robot.r_robot, sa_seed)?;
        self.nav.log(
            "retrace",
            format!("pending={} waypoints={}", pending.len(), order.len()),
        );
        for wp in order {
            if self.nav.world.time() > self.budget {
                break;
            }
            match self.nav.navigate_to(wp, NavMode::Retrace)? {
                NavOutcome::Collision => return Ok(Some(NavOutcome::Collision)),
                NavOutcome::Unreachable => self
                    .nav
                    .log("retrace-skip", format!("waypoint={:.3},{:.3}", wp.x, wp.y)),
                NavOutcome::Reached => {}
            }
        }
        Ok(None)
    }

    fn return_home(&mut self) -> Result<MissionOutcome> {
        self.nav.set_phase(ExplorationPhase::ReturnHome);
        match self.nav.navigate_to(self.start.position, NavMode::Home)? {
            NavOutcome::Collision => Ok(self.collision()),
            NavOutcome::Unreachable => {
                self.nav
                    .log("outcome", "result=stall reason=home-unreachable".into());
                Ok(MissionOutcome::Stall)
            }
            NavOutcome::Reached => {
                let theta = self.nav.world.pose().theta;
                let delta = crate::geometry::normalize_angle(self.start.theta - theta);
                if !self.nav.rotate(delta)? {
                    return Ok(self.collision());
                }
                self.nav.set_phase(ExplorationPhase::Done);
                self.nav.log("outcome", "result=finished".into());
                Ok(MissionOutcome::Finished)
            }
        }
    }

    fn into_report(self, outcome: MissionOutcome, mission_secs: f64) -> MissionReport {
        let Mission {
            nav,
            start,
            seed,
            global,
            audit,
            ..
        } = self;
        let (global_tree, global_frontiers) = match global {
            Some(g) => g.into_parts(),
            None => (RrtTree::new(1.0), Vec::new()),
        };
        let world = &nav.world;
        MissionReport {
            seed,
            outcome,
            total_time: world.time(),
            distance: nav.distance,
            cumulative_rotation: nav.cumulative_rotation,
            junction_rotation: nav.junction_rotation,
            segments: nav.segments.clone(),
            replans: nav.replans,
            plan_queries: nav.plan_queries,
            start: start.position,
            final_position: world.pose().position,
            events: nav.events.clone(),
            trajectory: world.trajectory().to_vec(),
            extension: *world.extension(),
            visited: nav.visited.entries().to_vec(),
            belief: world.belief().clone(),
            global_tree,
            global_frontiers,
            audit,
            timing: Timing {
                planner_secs: nav.planner_secs.clone(),
                mission_secs,
            },
        }
    }
}

fn audit_prune(g: &FrontierSearch, map: &MapSnapshot, r_robot: f64, audit: &mut AuditLog) {
    let tree = g.tree();
    for f in g.frontiers() {
        if !map.is_unknown(f.position) {
            audit
                .prune_failures
                .push(format!("frontier {} in known cell", f.position));
        }
        if !tree.contains(f.node) {
            audit
                .prune_failures
                .push(format!("frontier {} has no tree node", f.position));
        }
    }
    if !tree.is_connected() {
        audit.prune_failures.push("global tree disconnected".into());
    }
    for (parent, child) in tree.edges() {
        if !map.traversable(parent.position, child.position, r_robot) {
            audit.prune_failures.push(format!(
                "edge {} -> {} not traversable",
                parent.position, child.position
            ));
        }
    }
}
