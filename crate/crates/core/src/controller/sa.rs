use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;
use crate::grid::MapSnapshot;
use crate::polyline::dijkstra_costs;
use crate::{Error, Result};

/// Geometric cooling schedule for waypoint ordering.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaSchedule {
    pub t_initial: f64,
    pub t_final: f64,
    /// Temperature multiplier per cooling level.
    pub cooling: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl SaSchedule {
    /// Starts at the mean leg cost, ends 100 times cooler, 200 moves per point.
    pub fn for_costs(costs: &LegCosts, seed: u64) -> Self {
        let t0 = costs.mean_leg().max(1e-6);
        Self {
            t_initial: t0,
            t_final: t0 / 100.0,
            cooling: 0.95,
            iterations: 200 * costs.points(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_initial > self.t_final && self.t_initial.is_finite()) {
            return Err(Error::Param(format!(
                "SA temperatures must satisfy t_initial > t_final > 0, got {} and {}",
                self.t_initial, self.t_final
            )));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Param(format!(
                "SA cooling must be in (0, 1), got {}",
                self.cooling
            )));
        }
        Ok(())
    }
}

/// Leg cost matrix over `start`, the waypoints and `end`. Node 0 is the
/// start, nodes `1..=n` the waypoints and node `n + 1` the end.
#[derive(Clone, Debug, PartialEq)]
pub struct LegCosts {
    n: usize,
    m: Vec<f64>,
}

impl LegCosts {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let k = n + 2;
        let mut m = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    m[a * k + b] = f(a, b);
                }
            }
        }
        Self { n, m }
    }

    pub fn euclidean(points: &[Point], start: Point, end: Point) -> Self {
        let node = |i: usize| node_point(points, start, end, i);
        Self::from_fn(points.len(), |a, b| node(a).dist(node(b)))
    }

    /// Grid path lengths on `map`; legs whose query fails fall back to the
    /// straight-line distance.
    pub fn on_map(
        points: &[Point],
        start: Point,
        end: Point,
        map: &MapSnapshot,
        r_robot: f64,
    ) -> Self {
        let n = points.len();
        let node = |i: usize| node_point(points, start, end, i);
        let targets: Vec<Point> = (1..n + 2).map(node).collect();
        let mut rows: Vec<Vec<Option<f64>>> = Vec::with_capacity(n + 1);
        for src in 0..=n {
            rows.push(
                dijkstra_costs(node(src), &targets, map, r_robot)
                    .unwrap_or_else(|_| vec![None; n + 1]),
            );
        }
        Self::from_fn(n, |a, b| {
            if a > n || b == 0 {
                return node(a).dist(node(b));
            }
            rows[a][b - 1].unwrap_or_else(|| node(a).dist(node(b)))
        })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[a * (self.n + 2) + b]
    }

    /// Cost of start -> order... -> end, with `order` indexing waypoints from 0.
    pub fn tour(&self, order: &[usize]) -> f64 {
        let mut prev = 0;
        let mut c = 0.0;
        for &i in order {
            c += self.get(prev, i + 1);
            prev = i + 1;
        }
        c + self.get(prev, self.n + 1)
    }

    fn mean_leg(&self) -> f64 {
        let k = self.n + 2;
        let mut sum = 0.0;
        let mut count = 0;
        for a in 0..k {
            for b in 0..k {
                if a != b && b != 0 && a != k - 1 {
                    sum += self.get(a, b);
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

fn node_point(points: &[Point], start: Point, end: Point, i: usize) -> Point {
    if i == 0 {
        start
    } else if i <= points.len() {
        points[i - 1]
    } else {
        end
    }
}

/// Simulated annealing over 2-opt reversals, starting from insertion order
/// and returning the best tour seen.
pub fn sa_order(costs: &LegCosts, schedule: &SaSchedule) -> Result<Vec<usize>> {
    let n = costs.points();
    let mut current: Vec<usize> = (0..n).collect();
    if n < 2 {
        return Ok(current);
    }
    schedule.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut cost = costs.tour(&current);
    let mut best = (cost, current.clone());
    let levels = ((schedule.t_initial / schedule.t_final).ln() / (1.0 / schedule.cooling).ln())
        .ceil()
        .max(1.0);
    let per_level = (schedule.iterations as f64 / levels).ceil().max(1.0) as usize;
    let mut t = schedule.t_initial;
    let mut candidate = current.clone();
    for it in 0..schedule.iterations {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        candidate.copy_from_slice(&current);
        candidate[lo..=hi].reverse();
        let c = costs.tour(&candidate);
        let delta = c - cost;
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
            std::mem::swap(&mut current, &mut candidate);
            cost = c;
            if cost < best.0 {
                best = (cost, current.clone());
            }
        }
        if (it + 1) % per_level == 0 {
            t = (t * schedule.cooling).max(schedule.t_final);
        }
    }
    Ok(best.1)
}

/// Orders `points` for a tour from `start` to `end` using grid path costs.
pub fn sa_order_waypoints(
    points: &[Point],
    start: Point,
    end: Point,
    map: &MapSnapshot,
    r_robot: f64,
    seed: u64,
) -> Result<Vec<Point>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let costs = LegCosts::on_map(points, start, end, map, r_robot);
    let order = sa_order(&costs, &SaSchedule::for_costs(&costs, seed))?;
    Ok(order.into_iter().map(|i| points[i]).collect())
}
