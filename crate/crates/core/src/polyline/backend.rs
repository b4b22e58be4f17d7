use super::{first_hop_score, path_score, segment_score, DensePath, PolylineParams, PolylinePath};
use crate::geometry::Point;
use crate::grid::MapSnapshot;

/// Feasible forward segments `i -> j` (j > i): no longer than `d` and traversable.
fn successors(x: &[Point], map: &MapSnapshot, d: f64, r_robot: f64) -> Vec<Vec<usize>> {
    let d2 = max_len_sq(d);
    (0..x.len())
        .map(|i| {
            (i + 1..x.len())
                .filter(|&j| x[i].dist_sq(x[j]) <= d2 && map.traversable(x[i], x[j], r_robot))
                .collect()
        })
        .collect()
}

/// Squared length limit with a little slack for cell-center rounding.
fn max_len_sq(d: f64) -> f64 {
    let d = d * (1.0 + 1e-9);
    d * d
}

#[derive(Clone, Copy)]
struct Cell {
    /// Start of the last segment.
    from: usize,
    value: f64,
    /// Start of the segment before it, `usize::MAX` for the first segment.
    parent: usize,
}

/// Exact maximiser of the summed junction score over feasible subsequences
/// that start at the first and end at the last dense waypoint.
pub fn dp_backend(
    dense: &DensePath,
    map: &MapSnapshot,
    params: &PolylineParams,
    r_robot: f64,
) -> Option<PolylinePath> {
    let x = &dense.waypoints;
    let n = x.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(PolylinePath {
            junctions: vec![x[0]],
            indices: vec![0],
        });
    }
    let succ = successors(x, map, params.d, r_robot);
    // incoming[j]: one cell per reachable segment i -> j, in increasing i.
    let mut incoming: Vec<Vec<Cell>> = vec![Vec::new(); n];
    for i in 0..n - 1 {
        if i > 0 && incoming[i].is_empty() {
            continue;
        }
        for &j in &succ[i] {
            let cell = if i == 0 {
                Cell {
                    from: 0,
                    value: 0.0,
                    parent: usize::MAX,
                }
            } else {
                let mut best = Cell {
                    from: i,
                    value: f64::NEG_INFINITY,
                    parent: usize::MAX,
                };
                for c in &incoming[i] {
                    let v = c.value + segment_score(x[c.from], x[i], x[j], params);
                    if v > best.value {
                        best.value = v;
                        best.parent = c.from;
                    }
                }
                best
            };
            incoming[j].push(cell);
        }
    }
    let mut end: Option<Cell> = None;
    for c in &incoming[n - 1] {
        if end.is_none_or(|b| c.value > b.value) {
            end = Some(*c);
        }
    }
    let mut cell = end?;
    let mut idx = vec![n - 1];
    loop {
        idx.push(cell.from);
        if cell.parent == usize::MAX {
            break;
        }
        let to = cell.from;
        cell = *incoming[to]
            .iter()
            .find(|c| c.from == cell.parent)
            .expect("parent cell recorded");
    }
    idx.reverse();
    Some(PolylinePath {
        junctions: idx.iter().map(|&i| x[i]).collect(),
        indices: idx,
    })
}

/// One greedy pass from `x[0]` to `x[n-1]`. Returns dense indices.
fn greedy_pass(
    x: &[Point],
    map: &MapSnapshot,
    params: &PolylineParams,
    r_robot: f64,
) -> Option<Vec<usize>> {
    let n = x.len();
    let d2 = max_len_sq(params.d);
    let mut idx = vec![0usize];
    let mut a = 0usize;
    while a != n - 1 {
        let prev = (idx.len() >= 2).then(|| x[idx[idx.len() - 2]]);
        let mut best: Option<(f64, usize)> = None;
        for j in a + 1..n {
            if x[a].dist_sq(x[j]) > d2 || !map.traversable(x[a], x[j], r_robot) {
                continue;
            }
            let s = match prev {
                Some(p) => segment_score(p, x[a], x[j], params),
                None => first_hop_score(x[a], x[j], params),
            };
            if best.is_none_or(|(bs, _)| s > bs) {
                best = Some((s, j));
            }
        }
        let (_, j) = best?;
        idx.push(j);
        a = j;
    }
    Some(idx)
}

/// Greedy anchor selection run forward and backward; the direction with the
/// larger summed score wins, forward on ties.
pub fn bi_backend(
    dense: &DensePath,
    map: &MapSnapshot,
    params: &PolylineParams,
    r_robot: f64,
) -> Option<PolylinePath> {
    let x = &dense.waypoints;
    let n = x.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(PolylinePath {
            junctions: vec![x[0]],
            indices: vec![0],
        });
    }
    let make = |idx: Vec<usize>| PolylinePath {
        junctions: idx.iter().map(|&i| x[i]).collect(),
        indices: idx,
    };
    let forward = greedy_pass(x, map, params, r_robot).map(make);
    let reversed: Vec<Point> = x.iter().rev().copied().collect();
    let backward = greedy_pass(&reversed, map, params, r_robot)
        .map(|idx| make(idx.into_iter().rev().map(|i| n - 1 - i).collect()));
    match (forward, backward) {
        (Some(f), Some(b)) => {
            if path_score(&b.junctions, params) > path_score(&f.junctions, params) {
                Some(b)
            } else {
                Some(f)
            }
        }
        (f, b) => f.or(b),
    }
}
