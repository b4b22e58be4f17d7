use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::Point;
use crate::grid::MapSnapshot;
use crate::{Error, Result};

/// Cell-center chain produced by the grid search. The first and last entries
/// are the exact requested start and goal rather than their cell centers.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePath {
    pub waypoints: Vec<Point>,
}

impl DensePath {
    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    /// Every `stride`-th waypoint, always keeping both ends.
    pub fn thinned(&self, max_len: usize) -> DensePath {
        let n = self.waypoints.len();
        if max_len < 2 || n <= max_len {
            return self.clone();
        }
        let stride = n.div_ceil(max_len);
        let mut out: Vec<Point> = self.waypoints.iter().step_by(stride).copied().collect();
        if !(n - 1).is_multiple_of(stride) {
            out.push(self.waypoints[n - 1]);
        }
        DensePath { waypoints: out }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    cell: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed so the max-heap pops the cheapest entry, then the lowest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NEIGHBORS: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// 8-connected clearance graph over the grid. A cell is admissible when its
/// distance-field value is at least `r_robot`; diagonal moves also need both
/// side cells admissible so no step clips a corner.
struct ClearanceGraph<'a> {
    map: &'a MapSnapshot,
    r_robot: f64,
    w: i64,
    h: i64,
}

impl<'a> ClearanceGraph<'a> {
    fn new(map: &'a MapSnapshot, r_robot: f64) -> Self {
        let g = map.grid();
        Self {
            map,
            r_robot,
            w: g.width() as i64,
            h: g.height() as i64,
        }
    }

    fn admissible(&self, ix: i64, iy: i64) -> bool {
        ix >= 0
            && iy >= 0
            && ix < self.w
            && iy < self.h
            && self.map.field().at(ix as usize, iy as usize) >= self.r_robot
    }

    fn cell_of(&self, p: Point) -> Option<usize> {
        self.map
            .grid()
            .world_to_cell(p)
            .map(|(ix, iy)| self.map.grid().index(ix, iy))
    }

    fn run(&self, source: usize, mut stop: impl FnMut(usize) -> bool) -> (Vec<f64>, Vec<u32>) {
        let n = (self.w * self.h) as usize;
        let res = self.map.resolution();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![u32::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry {
            cost: 0.0,
            cell: source,
        });
        while let Some(Entry { cost, cell }) = heap.pop() {
            if done[cell] {
                continue;
            }
            done[cell] = true;
            if stop(cell) {
                break;
            }
            let (cx, cy) = ((cell as i64) % self.w, (cell as i64) / self.w);
            for (dx, dy) in NEIGHBORS {
                let (nx, ny) = (cx + dx, cy + dy);
                if !self.admissible(nx, ny) {
                    continue;
                }
                let step = if dx != 0 && dy != 0 {
                    if !self.admissible(cx + dx, cy) || !self.admissible(cx, cy + dy) {
                        continue;
                    }
                    res * std::f64::consts::SQRT_2
                } else {
                    res
                };
                let ni = (ny * self.w + nx) as usize;
                let nc = cost + step;
                if nc < dist[ni] {
                    dist[ni] = nc;
                    prev[ni] = cell as u32;
                    heap.push(Entry { cost: nc, cell: ni });
                }
            }
        }
        (dist, prev)
    }
}

fn check_start(map: &MapSnapshot, start: Point, r_robot: f64) -> Result<usize> {
    let graph = ClearanceGraph::new(map, r_robot);
    let cell = graph
        .cell_of(start)
        .ok_or_else(|| Error::Input(format!("start {start} lies outside the map")))?;
    let clearance = map.min_dist(start);
    if clearance < r_robot {
        return Err(Error::Input(format!(
            "start {start} has clearance {clearance:.3} < r_robot {r_robot}"
        )));
    }
    Ok(cell)
}

/// Shortest 8-connected path from `start` to `goal` over cells with clearance
/// at least `r_robot`. Unknown cells count as free. `Ok(None)` when the goal is
/// unreachable.
pub fn dijkstra_path(
    start: Point,
    goal: Point,
    map: &MapSnapshot,
    r_robot: f64,
) -> Result<Option<DensePath>> {
    let source = check_start(map, start, r_robot)?;
    if start == goal {
        return Ok(Some(DensePath {
            waypoints: vec![start],
        }));
    }
    let graph = ClearanceGraph::new(map, r_robot);
    let Some(target) = graph.cell_of(goal) else {
        return Ok(None);
    };
    if map.min_dist(goal) < r_robot {
        return Ok(None);
    }
    let (dist, prev) = graph.run(source, |c| c == target);
    if !dist[target].is_finite() {
        return Ok(None);
    }
    let mut cells = vec![target];
    let mut c = target;
    while c != source {
        c = prev[c] as usize;
        cells.push(c);
    }
    cells.reverse();
    let g = map.grid();
    let mut waypoints: Vec<Point> = cells
        .iter()
        .map(|&c| {
            let (ix, iy) = (c % g.width(), c / g.width());
            g.cell_center(ix as i64, iy as i64)
        })
        .collect();
    waypoints[0] = start;
    if cells.len() == 1 {
        waypoints.push(goal);
    } else {
        *waypoints.last_mut().unwrap() = goal;
    }
    Ok(Some(DensePath { waypoints }))
}

/// Grid path cost from `start` to each target cell center, `None` for targets
/// that are unreachable or sit on inadmissible cells. Stops once every target
/// is settled.
pub fn dijkstra_costs(
    start: Point,
    targets: &[Point],
    map: &MapSnapshot,
    r_robot: f64,
) -> Result<Vec<Option<f64>>> {
    let source = check_start(map, start, r_robot)?;
    let graph = ClearanceGraph::new(map, r_robot);
    let cells: Vec<Option<usize>> = targets.iter().map(|&t| graph.cell_of(t)).collect();
    let mut pending: std::collections::HashSet<usize> = cells.iter().flatten().copied().collect();
    let (dist, _) = graph.run(source, |c| {
        pending.remove(&c);
        pending.is_empty()
    });
    Ok(cells
        .iter()
        .map(|c| c.and_then(|c| dist[c].is_finite().then_some(dist[c])))
        .collect())
}
