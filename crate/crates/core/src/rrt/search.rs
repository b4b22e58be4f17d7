use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;

use super::tree::{NodeId, RrtTree};
use crate::geometry::Point;
use crate::grid::{Boundary, MapSnapshot};
use crate::{Error, Result};

/// Sampling boundary of a search: the map rectangle (global) or a sensing
/// disc around the robot (local).
pub type SamplingBoundary = Boundary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchMode {
    Local,
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontierPoint {
    pub position: Point,
    pub origin: SearchMode,
    /// Node carrying this frontier in the tree that produced it.
    pub node: NodeId,
    /// Parent position at creation time.
    pub parent: Point,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams {
    /// Maximum expansion distance η_max, m.
    pub eta_max: f64,
    pub r_robot: f64,
    /// Coverage threshold θ_cov.
    pub theta_cov: f64,
    /// Local frontier count threshold θ_FL.
    pub theta_fl: usize,
    /// Frontier downsampling lattice pitch, m.
    pub downsample_cell: f64,
    /// Sample cap per search invocation.
    pub max_samples: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            eta_max: 0.5,
            r_robot: 0.24,
            theta_cov: 0.95,
            theta_fl: 5,
            downsample_cell: 0.48,
            max_samples: 50_000,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_robot > 0.0
            && self.eta_max >= self.r_robot
            && self.theta_cov > 0.0
            && self.theta_cov <= 1.0
            && self.theta_fl >= 1
            && self.downsample_cell > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Param(format!("search params violate eta_max >= r_robot > 0, 0 < theta_cov <= 1, theta_fl >= 1: {self:?}")))
        }
    }
}

/// Expansion step for a parent at `p`: η_max with at least 2·r_robot of
/// clearance, r_robot at or below r_robot, linear in between.
pub fn adaptive_expand_dist(p: Point, map: &MapSnapshot, params: &SearchParams) -> f64 {
    expand_dist_for_clearance(map.min_dist(p), params)
}

pub fn expand_dist_for_clearance(d_obs: f64, params: &SearchParams) -> f64 {
    let r = params.r_robot;
    if d_obs >= 2.0 * r {
        params.eta_max
    } else if d_obs <= r {
        r
    } else {
        r + (params.eta_max - r) * (d_obs - r) / r
    }
}

/// Steps from `p_nearest` toward `p_rand` by at most `eta`.
pub fn extend_point(p_rand: Point, p_nearest: Point, eta: f64) -> Point {
    let d = p_rand.dist(p_nearest);
    if d <= eta {
        return p_rand;
    }
    p_nearest + (p_rand - p_nearest) * (eta / d)
}

fn coverage_ratio(nodes: usize, resolution: f64, s_free: f64) -> f64 {
    if nodes == 0 {
        0.0
    } else if s_free <= 0.0 {
        f64::INFINITY
    } else {
        nodes as f64 * resolution * resolution / s_free
    }
}

/// c_RRT = N_RRT·r_M² / S_free, with S_free the Free area of the map inside `b`.
pub fn rrt_coverage(tree: &RrtTree, b: &SamplingBoundary, map: &MapSnapshot) -> f64 {
    coverage_ratio(tree.len(), map.resolution(), map.free_area_in_boundary(b))
}

pub fn exploration_completed(
    tree: &RrtTree,
    b: &SamplingBoundary,
    map: &MapSnapshot,
    n_frontiers: usize,
    mode: SearchMode,
    params: &SearchParams,
) -> bool {
    completed(rrt_coverage(tree, b, map), n_frontiers, mode, params)
}

fn completed(coverage: f64, n_frontiers: usize, mode: SearchMode, params: &SearchParams) -> bool {
    coverage > params.theta_cov || (mode == SearchMode::Local && n_frontiers > params.theta_fl)
}

/// Keeps the earliest point of each `cell`-pitch lattice bucket. Output is in
/// bucket row-major order.
pub fn uniform_downsample(points: &[Point], cell: f64) -> Vec<Point> {
    let mut kept: BTreeMap<(i64, i64), Point> = BTreeMap::new();
    for &p in points {
        kept.entry(bucket_key(p, cell)).or_insert(p);
    }
    kept.into_values().collect()
}

fn bucket_key(p: Point, cell: f64) -> (i64, i64) {
    // (row, column) so BTreeMap order is row-major.
    ((p.y / cell).floor() as i64, (p.x / cell).floor() as i64)
}

fn sample_in(b: &SamplingBoundary, rng: &mut impl Rng) -> Point {
    match *b {
        Boundary::Rect { min, max } => {
            Point::new(rng.gen_range(min.x..=max.x), rng.gen_range(min.y..=max.y))
        }
        Boundary::Disc { center, radius } => {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = rng.gen::<f64>() * 2.0 * PI;
            center + Point::from_polar(r, th)
        }
    }
}

/// Why a sample did not grow the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    Degenerate,
    OutsideBoundary,
    BothUnknown,
    NotTraversable,
    /// A node in known space whose robot footprint still overlaps Unknown cells.
    FootprintUnknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Rejected(Rejection),
    Added(NodeId),
    AddedFrontier(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// Termination test fired.
    Completed,
    /// Sample budget of this call ran out first.
    Budget,
}

/// Incremental RRT expansion and frontier search over one sampling boundary.
///
/// Local searches run to completion once; the global search keeps one
/// instance for the whole mission and is advanced a few samples at a time.
#[derive(Clone, Debug)]
pub struct FrontierSearch {
    tree: RrtTree,
    frontiers: BTreeMap<(i64, i64), FrontierPoint>,
    boundary: SamplingBoundary,
    mode: SearchMode,
    params: SearchParams,
    samples: u64,
    // S_free cache keyed by grid revision.
    s_free: Option<(u64, f64)>,
    excluded: Vec<(Point, f64)>,
}

impl FrontierSearch {
    pub fn new(
        root: Point,
        boundary: SamplingBoundary,
        mode: SearchMode,
        params: SearchParams,
        map: &MapSnapshot,
    ) -> Result<Self> {
        params.validate()?;
        if !boundary.contains(root) {
            return Err(Error::Input(format!(
                "root {root} outside sampling boundary"
            )));
        }
        let clearance = map.min_dist(root);
        if clearance < params.r_robot {
            return Err(Error::Input(format!(
                "root {root} in collision: clearance {clearance:.3} < r_robot {}",
                params.r_robot
            )));
        }
        let bucket = (params.eta_max / 2.0).max(map.resolution());
        Ok(Self {
            tree: RrtTree::with_root(root, bucket),
            frontiers: BTreeMap::new(),
            boundary,
            mode,
            params,
            samples: 0,
            s_free: None,
            excluded: Vec::new(),
        })
    }

    /// Drops frontiers within `radius` of `p` and rejects any found there later.
    pub fn exclude(&mut self, p: Point, radius: f64) {
        self.excluded.push((p, radius));
        self.frontiers.retain(|_, f| f.position.dist(p) > radius);
    }

    fn is_excluded(&self, p: Point) -> bool {
        self.excluded.iter().any(|&(q, r)| p.dist(q) <= r)
    }

    pub fn tree(&self) -> &RrtTree {
        &self.tree
    }

    pub fn boundary(&self) -> &SamplingBoundary {
        &self.boundary
    }

    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    /// Frontiers in bucket row-major order.
    pub fn frontiers(&self) -> Vec<FrontierPoint> {
        self.frontiers.values().copied().collect()
    }

    pub fn frontier_count(&self) -> usize {
        self.frontiers.len()
    }

    pub fn samples_drawn(&self) -> u64 {
        self.samples
    }

    pub fn into_parts(self) -> (RrtTree, Vec<FrontierPoint>) {
        let f = self.frontiers.into_values().collect();
        (self.tree, f)
    }

    fn s_free(&mut self, map: &MapSnapshot) -> f64 {
        match self.s_free {
            Some((rev, s)) if rev == map.revision() => s,
            _ => {
                let s = map.free_area_in_boundary(&self.boundary);
                self.s_free = Some((map.revision(), s));
                s
            }
        }
    }

    pub fn coverage(&mut self, map: &MapSnapshot) -> f64 {
        let s = self.s_free(map);
        coverage_ratio(self.tree.len(), map.resolution(), s)
    }

    pub fn is_complete(&mut self, map: &MapSnapshot) -> bool {
        let c = self.coverage(map);
        completed(c, self.frontiers.len(), self.mode, &self.params)
    }

    /// Draws one sample and tries to grow the tree toward it.
    pub fn step(&mut self, map: &MapSnapshot, rng: &mut impl Rng) -> StepOutcome {
        self.samples += 1;
        let p_rand = sample_in(&self.boundary, rng);
        let nearest = *self
            .tree
            .nearest(p_rand)
            .expect("search tree always has a root");
        let eta = adaptive_expand_dist(nearest.position, map, &self.params);
        let p_new = extend_point(p_rand, nearest.position, eta);
        if p_new == nearest.position {
            return StepOutcome::Rejected(Rejection::Degenerate);
        }
        if !self.boundary.contains(p_new) || map.grid().world_to_cell(p_new).is_none() {
            return StepOutcome::Rejected(Rejection::OutsideBoundary);
        }
        let near_unknown = map.is_unknown(nearest.position);
        let new_unknown = map.is_unknown(p_new);
        if near_unknown && new_unknown {
            return StepOutcome::Rejected(Rejection::BothUnknown);
        }
        if !map.traversable(nearest.position, p_new, self.params.r_robot) {
            return StepOutcome::Rejected(Rejection::NotTraversable);
        }
        if !new_unknown && !map.grid().footprint_known(p_new, self.params.r_robot) {
            return StepOutcome::Rejected(Rejection::FootprintUnknown);
        }
        let id = self
            .tree
            .add(p_new, Some(nearest.id))
            .expect("parent is live");
        if !near_unknown && new_unknown && !self.is_excluded(p_new) {
            let f = FrontierPoint {
                position: p_new,
                origin: self.mode,
                node: id,
                parent: nearest.position,
            };
            // Existing entries were inserted earlier, so they win their bucket.
            self.frontiers
                .entry(bucket_key(p_new, self.params.downsample_cell))
                .or_insert(f);
            return StepOutcome::AddedFrontier(id);
        }
        StepOutcome::Added(id)
    }

    /// Expands until the termination test fires or `budget` samples are drawn.
    pub fn run(&mut self, map: &MapSnapshot, budget: u64, rng: &mut impl Rng) -> SearchStatus {
        for _ in 0..budget {
            if self.is_complete(map) {
                return SearchStatus::Completed;
            }
            self.step(map, rng);
        }
        if self.is_complete(map) {
            SearchStatus::Completed
        } else {
            SearchStatus::Budget
        }
    }

    /// Applies global frontier and tree pruning against `map`.
    pub fn prune(&mut self, map: &MapSnapshot) -> Result<super::PruneStats> {
        let mut list: Vec<FrontierPoint> = self.frontiers.values().copied().collect();
        let stats = super::prune_global(&mut list, &mut self.tree, map, self.params.r_robot)?;
        let cell = self.params.downsample_cell;
        self.frontiers = list
            .into_iter()
            .map(|f| (bucket_key(f.position, cell), f))
            .collect();
        Ok(stats)
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub tree: RrtTree,
    pub frontiers: Vec<FrontierPoint>,
    pub samples: u64,
    /// The sample cap was hit before the termination test fired.
    pub timed_out: bool,
}

/// Runs one complete RRT expansion and frontier search from `root`.
pub fn expand_and_search(
    root: Point,
    boundary: SamplingBoundary,
    map: &MapSnapshot,
    params: &SearchParams,
    mode: SearchMode,
    rng: &mut impl Rng,
) -> Result<SearchResult> {
    let mut search = FrontierSearch::new(root, boundary, mode, *params, map)?;
    let status = search.run(map, params.max_samples, rng);
    let samples = search.samples_drawn();
    let (tree, frontiers) = search.into_parts();
    Ok(SearchResult {
        tree,
        frontiers,
        samples,
        timed_out: status == SearchStatus::Budget,
    })
}
