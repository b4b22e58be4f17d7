use std::collections::VecDeque;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::Point;
use crate::grid::{Boundary, CellState, MapSnapshot, OccupancyGrid};

const RES: f64 = 0.05;

fn params() -> SearchParams {
    SearchParams::default()
}

fn fill_rect(g: &mut OccupancyGrid, x0: f64, y0: f64, x1: f64, y1: f64, s: CellState) {
    for iy in 0..g.height() {
        for ix in 0..g.width() {
            let c = g.cell_center(ix as i64, iy as i64);
            if c.x >= x0 && c.x < x1 && c.y >= y0 && c.y < y1 {
                g.set(ix, iy, s);
            }
        }
    }
}

fn boxed(w_m: f64, h_m: f64, interior: CellState) -> OccupancyGrid {
    let (w, h) = ((w_m / RES).round() as usize, (h_m / RES).round() as usize);
    let mut g = OccupancyGrid::new(w, h, RES, Point::default(), interior).unwrap();
    for ix in 0..w {
        g.set(ix, 0, CellState::Occupied);
        g.set(ix, h - 1, CellState::Occupied);
    }
    for iy in 0..h {
        g.set(0, iy, CellState::Occupied);
        g.set(w - 1, iy, CellState::Occupied);
    }
    g
}

/// Cells reachable from `start` through cells with clearance ≥ r (8-connected).
fn eroded_component(m: &MapSnapshot, start: Point, r: f64) -> Vec<bool> {
    let g = m.grid();
    let (w, h) = (g.width(), g.height());
    let mut seen = vec![false; w * h];
    let Some((sx, sy)) = g.world_to_cell(start) else {
        return seen;
    };
    let mut q = VecDeque::from([(sx, sy)]);
    seen[sy * w + sx] = true;
    while let Some((x, y)) = q.pop_front() {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if !g.in_bounds(nx, ny) {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if !seen[ny * w + nx] && m.field().at(nx, ny) >= r {
                    seen[ny * w + nx] = true;
                    q.push_back((nx, ny));
                }
            }
        }
    }
    seen
}

#[test]
fn nearest_single_and_coincident() {
    let mut t = RrtTree::with_root(Point::new(1.0, 1.0), 0.25);
    assert_eq!(
        nearest_node(&t, Point::new(5.0, -3.0)).unwrap().id,
        NodeId(0)
    );
    let id = t.add(Point::new(2.0, 2.0), Some(NodeId(0))).unwrap();
    let n = nearest_node(&t, Point::new(2.0, 2.0)).unwrap();
    assert_eq!(n.id, id);
    assert_eq!(n.position.dist(Point::new(2.0, 2.0)), 0.0);
}

#[test]
fn nearest_empty_tree_is_state_error() {
    let t = RrtTree::new(0.25);
    assert!(matches!(
        nearest_node(&t, Point::default()),
        Err(crate::Error::State(_))
    ));
}

#[test]
fn nearest_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..20 {
        let mut t = RrtTree::with_root(Point::new(0.0, 0.0), 0.3);
        for _ in 0..49 {
            let parent = NodeId(rng.gen_range(0..t.len() as u32));
            t.add(
                Point::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
                Some(parent),
            )
            .unwrap();
        }
        if trial % 2 == 1 {
            // Exercise removal bookkeeping too.
            t.remove_subtree(NodeId(rng.gen_range(1..50)));
        }
        for _ in 0..100 {
            let p = Point::new(rng.gen_range(-12.0..12.0), rng.gen_range(-12.0..12.0));
            let oracle = t
                .nodes()
                .min_by(|a, b| {
                    a.position
                        .dist_sq(p)
                        .partial_cmp(&b.position.dist_sq(p))
                        .unwrap()
                        .then(a.id.cmp(&b.id))
                })
                .unwrap();
            assert_eq!(nearest_node(&t, p).unwrap().id, oracle.id);
        }
    }
}

#[test]
fn nearest_ties_go_to_lowest_id() {
    let mut t = RrtTree::with_root(Point::new(0.0, 0.0), 0.5);
    t.add(Point::new(2.0, 0.0), Some(NodeId(0))).unwrap();
    t.add(Point::new(0.0, 2.0), Some(NodeId(0))).unwrap();
    assert_eq!(
        nearest_node(&t, Point::new(1.0, 1.0)).unwrap().id,
        NodeId(0)
    );
    t.add(Point::new(1.0, 1.0 - 2f64.sqrt()), Some(NodeId(0)))
        .unwrap();
    assert_eq!(
        nearest_node(&t, Point::new(1.0, 1.0)).unwrap().id,
        NodeId(0)
    );
}

#[test]
fn adaptive_expand_examples() {
    let p = params();
    let r = p.r_robot;
    assert_eq!(expand_dist_for_clearance(2.0 * r, &p), 0.5);
    assert_eq!(expand_dist_for_clearance(r, &p), 0.24);
    assert!((expand_dist_for_clearance(1.5 * r, &p) - 0.37).abs() < 1e-12);
    assert_eq!(expand_dist_for_clearance(f64::INFINITY, &p), 0.5);
    assert_eq!(expand_dist_for_clearance(0.0, &p), 0.24);
}

#[test]
fn adaptive_expand_on_map() {
    let mut g = OccupancyGrid::new(40, 40, RES, Point::default(), CellState::Free).unwrap();
    g.set(0, 0, CellState::Occupied);
    let m = MapSnapshot::new(g.clone());
    // Far corner: clearance well above 2 r_robot.
    assert_eq!(
        adaptive_expand_dist(Point::new(1.9, 1.9), &m, &params()),
        0.5
    );
    assert_eq!(
        adaptive_expand_dist(Point::new(0.01, 0.01), &m, &params()),
        0.24
    );
}

#[test]
fn extend_examples() {
    let o = Point::new(0.0, 0.0);
    assert_eq!(
        extend_point(Point::new(0.25, 0.0), o, 0.5),
        Point::new(0.25, 0.0)
    );
    assert_eq!(
        extend_point(Point::new(2.0, 0.0), o, 0.5),
        Point::new(0.5, 0.0)
    );
    let p = extend_point(Point::new(3.0, 4.0), o, 1.0);
    assert!((p.x - 0.6).abs() < 1e-15 && (p.y - 0.8).abs() < 1e-15);
    assert_eq!(extend_point(o, o, 1.0), o);
}

#[test]
fn coverage_examples() {
    let g = OccupancyGrid::new(20, 20, RES, Point::default(), CellState::Free).unwrap();
    let m = MapSnapshot::new(g);
    let b = m.grid().bounding_rect();
    assert_eq!(rrt_coverage(&RrtTree::new(0.25), &b, &m), 0.0);
    // 400 free cells of 0.0025 m² = 1.0 m²; 200 nodes → 0.5.
    let mut t = RrtTree::with_root(Point::new(0.5, 0.5), 0.25);
    for i in 1..200 {
        t.add(Point::new(0.5, 0.5 + i as f64 * 1e-3), Some(NodeId(0)))
            .unwrap();
    }
    assert!((rrt_coverage(&t, &b, &m) - 0.5).abs() < 1e-12);
    let unknown = MapSnapshot::new(
        OccupancyGrid::new(20, 20, RES, Point::default(), CellState::Unknown).unwrap(),
    );
    assert_eq!(rrt_coverage(&t, &b, &unknown), f64::INFINITY);
}

#[test]
fn coverage_matches_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut g = OccupancyGrid::new(30, 30, 0.1, Point::default(), CellState::Unknown).unwrap();
    for iy in 0..30 {
        for ix in 0..30 {
            if rng.gen_bool(0.6) {
                g.set(ix, iy, CellState::Free);
            }
        }
    }
    let m = MapSnapshot::new(g.clone());
    let mut t = RrtTree::with_root(Point::new(1.5, 1.5), 0.25);
    for _ in 0..73 {
        t.add(
            Point::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)),
            Some(NodeId(0)),
        )
        .unwrap();
    }
    let c = Point::new(1.4, 1.6);
    let b = Boundary::disc(c, 1.1).unwrap();
    let free = (0..30)
        .flat_map(|iy| (0..30).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| {
            g.get(ix, iy) == CellState::Free && g.cell_center(ix as i64, iy as i64).dist(c) <= 1.1
        })
        .count();
    let expect = 74.0 * 0.01 / (free as f64 * 0.01);
    assert!((rrt_coverage(&t, &b, &m) - expect).abs() < 1e-12);
}

#[test]
fn completion_rules() {
    let p = params();
    let g = OccupancyGrid::new(20, 20, RES, Point::default(), CellState::Free).unwrap();
    let m = MapSnapshot::new(g);
    let b = m.grid().bounding_rect();
    // 400 free cells; 384 nodes → c = 0.96.
    let mut t = RrtTree::with_root(Point::new(0.5, 0.5), 0.25);
    for i in 1..384 {
        t.add(Point::new(0.5, 0.5 + i as f64 * 1e-4), Some(NodeId(0)))
            .unwrap();
    }
    assert!(exploration_completed(&t, &b, &m, 0, SearchMode::Global, &p));
    let small = RrtTree::with_root(Point::new(0.5, 0.5), 0.25);
    assert!(exploration_completed(
        &small,
        &b,
        &m,
        6,
        SearchMode::Local,
        &p
    ));
    assert!(!exploration_completed(
        &small,
        &b,
        &m,
        6,
        SearchMode::Global,
        &p
    ));
    assert!(!exploration_completed(
        &RrtTree::new(0.25),
        &b,
        &m,
        0,
        SearchMode::Local,
        &p
    ));
}

#[test]
fn downsample_examples() {
    let pts = [
        Point::new(0.1, 0.1),
        Point::new(0.2, 0.3),
        Point::new(0.4, 0.05),
    ];
    assert_eq!(uniform_downsample(&pts, 0.5), vec![Point::new(0.1, 0.1)]);
    let spread = [
        Point::new(3.0, 0.2),
        Point::new(0.2, 0.2),
        Point::new(1.7, 2.9),
    ];
    let out = uniform_downsample(&spread, 0.5);
    assert_eq!(out.len(), 3);
    // Row-major bucket order.
    assert_eq!(
        out,
        vec![
            Point::new(0.2, 0.2),
            Point::new(3.0, 0.2),
            Point::new(1.7, 2.9)
        ]
    );
}

#[test]
fn downsample_bucket_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<Point> = (0..100)
        .map(|_| Point::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)))
        .collect();
    let out = uniform_downsample(&pts, 0.5);
    let key = |p: &Point| ((p.y / 0.5).floor() as i64, (p.x / 0.5).floor() as i64);
    let keys: Vec<_> = out.iter().map(key).collect();
    let mut sorted = keys.clone();
    sorted.dedup();
    assert_eq!(keys, sorted, "one output per bucket, row-major");
    for p in &out {
        let first = pts.iter().find(|q| key(q) == key(p)).unwrap();
        assert_eq!(first, p, "earliest point kept");
    }
    let all_keys: std::collections::BTreeSet<_> = pts.iter().map(key).collect();
    assert_eq!(all_keys.len(), out.len());
}

#[test]
fn search_in_known_free_disc_finds_nothing() {
    let m = MapSnapshot::new(boxed(4.0, 4.0, CellState::Free));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = Boundary::disc(Point::new(2.0, 2.0), 0.5).unwrap();
    let r = expand_and_search(
        Point::new(2.0, 2.0),
        b,
        &m,
        &params(),
        SearchMode::Local,
        &mut rng,
    )
    .unwrap();
    assert!(r.frontiers.is_empty());
    assert!(!r.timed_out);
}

#[test]
fn search_rejects_root_in_collision() {
    let m = MapSnapshot::new(boxed(4.0, 4.0, CellState::Free));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = m.grid().bounding_rect();
    let r = expand_and_search(
        Point::new(0.1, 2.0),
        b,
        &m,
        &params(),
        SearchMode::Global,
        &mut rng,
    );
    assert!(matches!(r, Err(crate::Error::Input(_))));
}

/// Known left part, an unreachable room on the right behind a 0.3 m gap,
/// partially visible through the gap.
fn leakage_map() -> MapSnapshot {
    let mut g = boxed(6.0, 4.0, CellState::Unknown);
    fill_rect(&mut g, 0.05, 0.05, 3.95, 3.95, CellState::Free);
    fill_rect(&mut g, 3.95, 0.0, 4.05, 4.0, CellState::Occupied);
    fill_rect(&mut g, 3.95, 1.85, 4.05, 2.15, CellState::Free);
    // Cone seen through the gap.
    fill_rect(&mut g, 4.05, 1.6, 5.0, 2.4, CellState::Free);
    MapSnapshot::new(g)
}

#[test]
fn no_frontier_behind_ray_leakage_gap() {
    let m = leakage_map();
    let root = Point::new(1.0, 2.0);
    let reach = eroded_component(&m, root, params().r_robot);
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = m.grid().bounding_rect();
        let r = expand_and_search(root, b, &m, &params(), SearchMode::Local, &mut rng).unwrap();
        for f in &r.frontiers {
            assert!(
                f.position.x < 4.0,
                "frontier inside trap room: {}",
                f.position
            );
            let (ix, iy) = m.grid().world_to_cell(f.parent).unwrap();
            assert!(
                reach[iy * m.grid().width() + ix],
                "parent outside eroded component"
            );
        }
        for n in r.tree.nodes() {
            assert!(
                n.position.x < 4.0,
                "tree leaked through gap at {}",
                n.position
            );
        }
    }
}

fn known_island_map() -> MapSnapshot {
    let mut g = OccupancyGrid::new(160, 160, RES, Point::default(), CellState::Unknown).unwrap();
    let c = Point::new(4.0, 4.0);
    for iy in 0..160 {
        for ix in 0..160 {
            if g.cell_center(ix, iy).dist(c) <= 1.0 {
                g.set(ix as usize, iy as usize, CellState::Free);
            }
        }
    }
    MapSnapshot::new(g)
}

#[test]
fn frontier_edges_cross_known_unknown_boundary() {
    let m = known_island_map();
    let root = Point::new(4.0, 4.0);
    let b = Boundary::disc(root, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let r = expand_and_search(root, b, &m, &params(), SearchMode::Local, &mut rng).unwrap();
    assert!(
        r.frontiers.len() > params().theta_fl,
        "{} frontiers, {} nodes",
        r.frontiers.len(),
        r.tree.len()
    );
    for f in &r.frontiers {
        // Walk the edge at fine steps and collect visited states.
        let n = 200;
        let states: Vec<_> = (0..=n)
            .map(|i| m.state_at(f.parent.lerp(f.position, i as f64 / n as f64)))
            .collect();
        assert!(states.iter().any(|s| s.is_known()));
        assert!(states.iter().any(|s| !s.is_known()));
        assert!(m.state_at(f.parent).is_known());
        assert!(!m.state_at(f.position).is_known());
    }
}

#[test]
fn search_invariants_hold() {
    let m = leakage_map();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let b = m.grid().bounding_rect();
    let r = expand_and_search(
        Point::new(1.0, 1.0),
        b,
        &m,
        &params(),
        SearchMode::Global,
        &mut rng,
    )
    .unwrap();
    assert!(r.tree.is_connected());
    for (p, c) in r.tree.edges() {
        assert!(m.traversable(p.position, c.position, params().r_robot));
        assert!(!(m.is_unknown(p.position) && m.is_unknown(c.position)));
    }
    let n_edges = r.tree.edges().count();
    assert_eq!(n_edges + 1, r.tree.len());
}

#[test]
fn search_is_deterministic_per_seed() {
    let m = known_island_map();
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = Boundary::disc(Point::new(4.0, 4.0), 3.0).unwrap();
        let r = expand_and_search(
            Point::new(4.0, 4.0),
            b,
            &m,
            &params(),
            SearchMode::Local,
            &mut rng,
        )
        .unwrap();
        (r.tree.dump(), r.frontiers)
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).0, run(6).0);
}

#[test]
fn search_cap_reports_timeout() {
    let m = known_island_map();
    let p = SearchParams {
        max_samples: 10,
        theta_fl: 1000,
        ..params()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = Boundary::disc(Point::new(4.0, 4.0), 3.0).unwrap();
    let r =
        expand_and_search(Point::new(4.0, 4.0), b, &m, &p, SearchMode::Local, &mut rng).unwrap();
    assert!(r.timed_out);
    assert_eq!(r.samples, 10);
}

#[test]
fn tree_dump_format() {
    let mut t = RrtTree::with_root(Point::new(1.0, 2.0), 0.5);
    t.add(Point::new(1.5, 2.0), Some(NodeId(0))).unwrap();
    assert_eq!(t.dump(), "0 -1 1.000000 2.000000\n1 0 1.500000 2.000000\n");
}

fn global_search_on(m: &MapSnapshot, seed: u64, samples: u64) -> FrontierSearch {
    let mut s = FrontierSearch::new(
        Point::new(4.0, 4.0),
        m.grid().bounding_rect(),
        SearchMode::Global,
        params(),
        m,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    s.run(m, samples, &mut rng);
    s
}

#[test]
fn prune_noop_when_nothing_changed() {
    let m = known_island_map();
    let s = global_search_on(&m, 3, 3000);
    let mut f = s.frontiers();
    let mut t = s.tree().clone();
    assert!(!f.is_empty());
    let stats = prune_global(&mut f, &mut t, &m, params().r_robot).unwrap();
    assert_eq!(stats, PruneStats::default());
    assert_eq!(f, s.frontiers());
    assert_eq!(t.dump(), s.tree().dump());
}

#[test]
fn prune_removes_explored_frontiers() {
    let m = known_island_map();
    let s = global_search_on(&m, 3, 3000);
    let mut grid = m.grid().clone();
    let target = s.frontiers()[0];
    let (ix, iy) = grid.world_to_cell(target.position).unwrap();
    grid.set(ix, iy, CellState::Free);
    let m2 = m.advance(std::sync::Arc::new(grid));
    let mut f = s.frontiers();
    let mut t = s.tree().clone();
    let stats = prune_global(&mut f, &mut t, &m2, params().r_robot).unwrap();
    assert_eq!(stats.explored, 1);
    assert!(!f.iter().any(|x| x.node == target.node));
    assert!(!t.contains(target.node));
    assert!(t.is_connected());
}

/// Chain root → node 11 along y = 1.5 with 0.45 m spacing, a side branch off
/// node 2, and the last node as a frontier in the unknown strip x ≥ 5.2.
fn chain_setup() -> (
    OccupancyGrid,
    RrtTree,
    Vec<NodeId>,
    NodeId,
    Vec<FrontierPoint>,
) {
    let mut grid = OccupancyGrid::new(120, 60, RES, Point::default(), CellState::Free).unwrap();
    for ix in 104..120 {
        for iy in 0..60 {
            grid.set(ix, iy, CellState::Unknown);
        }
    }
    let mut t = RrtTree::with_root(Point::new(0.5, 1.5), 0.25);
    let mut chain = vec![NodeId(0)];
    for i in 1..=11 {
        let id = t
            .add(Point::new(0.5 + 0.45 * i as f64, 1.5), Some(chain[i - 1]))
            .unwrap();
        chain.push(id);
    }
    let side = t.add(Point::new(1.4, 2.0), Some(chain[2])).unwrap();
    let last = *t.get(chain[11]).unwrap();
    assert_eq!(grid.state_at(last.position), CellState::Unknown);
    let parent = t.parent(chain[11]).unwrap().position;
    let f = vec![FrontierPoint {
        position: last.position,
        origin: SearchMode::Global,
        node: chain[11],
        parent,
    }];
    (grid, t, chain, side, f)
}

#[test]
fn prune_wall_across_frontier_edge_walks_up_the_chain() {
    let (mut grid, mut t, chain, side, mut f) = chain_setup();
    // Wall at x ∈ [5.2, 5.25): node 10 (x = 5.0) loses clearance.
    for iy in 0..60 {
        grid.set(104, iy, CellState::Occupied);
    }
    let m = MapSnapshot::new(grid);
    let stats = prune_global(&mut f, &mut t, &m, params().r_robot).unwrap();
    assert!(f.is_empty());
    assert_eq!(stats.blocked, 1);
    assert!(!t.contains(chain[11]) && !t.contains(chain[10]));
    for id in &chain[..10] {
        assert!(t.contains(*id));
    }
    assert!(t.contains(side));
    assert!(t.is_connected());
}

#[test]
fn prune_wall_bisecting_branch_removes_distal_part() {
    let (mut grid, mut t, chain, side, mut f) = chain_setup();
    // Wall at x ∈ [3.0, 3.05) cuts the edge 5 → 6 far from the frontier.
    for iy in 0..60 {
        grid.set(60, iy, CellState::Occupied);
    }
    let m = MapSnapshot::new(grid);
    prune_global(&mut f, &mut t, &m, params().r_robot).unwrap();
    assert!(f.is_empty());
    for (i, id) in chain.iter().enumerate() {
        assert_eq!(t.contains(*id), i <= 5, "node {i}");
    }
    assert!(t.contains(side));
    assert!(t.is_connected());
    for (p, c) in t.edges() {
        assert!(m.traversable(p.position, c.position, params().r_robot));
    }
}

#[test]
fn prune_rejects_dangling_ids() {
    let m = known_island_map();
    let mut t = RrtTree::with_root(Point::new(4.0, 4.0), 0.25);
    let mut f = vec![FrontierPoint {
        position: Point::new(5.5, 4.0),
        origin: SearchMode::Global,
        node: NodeId(42),
        parent: Point::new(4.0, 4.0),
    }];
    assert!(matches!(
        prune_global(&mut f, &mut t, &m, 0.24),
        Err(crate::Error::Consistency(_))
    ));
}

proptest! {
    #[test]
    fn adaptive_expand_is_monotone_and_bounded(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let p = params();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (ea, eb) = (expand_dist_for_clearance(lo, &p), expand_dist_for_clearance(hi, &p));
        prop_assert!(ea <= eb);
        prop_assert!(ea >= p.r_robot && eb <= p.eta_max);
        // Lipschitz with slope (η_max − r)/r.
        prop_assert!(eb - ea <= (p.eta_max - p.r_robot) / p.r_robot * (hi - lo) + 1e-12);
    }

    #[test]
    fn prune_leaves_clean_tree(seed in 0u64..20, wall_x in 70usize..140) {
        let m = known_island_map();
        let s = global_search_on(&m, seed, 1500);
        let mut grid = m.grid().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for iy in 40..120 {
            grid.set(wall_x, iy, CellState::Occupied);
        }
        for _ in 0..200 {
            let (ix, iy) = (rng.gen_range(40..120), rng.gen_range(40..120));
            if grid.get(ix, iy) == CellState::Unknown {
                grid.set(ix, iy, CellState::Free);
            }
        }
        let m2 = m.advance(std::sync::Arc::new(grid));
        let mut f = s.frontiers();
        let mut t = s.tree().clone();
        prune_global(&mut f, &mut t, &m2, params().r_robot).unwrap();
        prop_assert!(t.is_connected());
        for fp in &f {
            prop_assert!(!m2.state_at(fp.position).is_known());
            prop_assert!(t.contains(fp.node));
        }
        for (p, c) in t.edges() {
            prop_assert!(m2.traversable(p.position, c.position, params().r_robot));
        }
    }
}

#[test]
fn known_nodes_keep_their_footprint_in_known_space() {
    let m = known_island_map();
    let root = Point::new(4.0, 4.0);
    let b = Boundary::disc(root, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = expand_and_search(root, b, &m, &params(), SearchMode::Global, &mut rng).unwrap();
    let r_robot = params().r_robot;
    for n in r.tree.nodes() {
        if m.state_at(n.position).is_known() {
            // Brute force over the island: no Unknown cell center within r_robot of the node's cell.
            let (cx, cy) = m.grid().world_to_cell(n.position).unwrap();
            let c = m.grid().cell_center(cx as i64, cy as i64);
            let exposed = (0..160)
                .flat_map(|y| (0..160).map(move |x| (x, y)))
                .any(|(x, y)| {
                    m.grid().get(x, y) == CellState::Unknown
                        && m.grid().cell_center(x as i64, y as i64).dist(c) < r_robot
                });
            assert!(
                !exposed,
                "known node {} sits within r_robot of Unknown",
                n.position
            );
        }
    }
}

#[test]
fn footprint_known_counts_off_grid_as_unknown() {
    let g = OccupancyGrid::new(20, 20, RES, Point::default(), CellState::Free).unwrap();
    assert!(g.footprint_known(Point::new(0.5, 0.5), 0.24));
    assert!(!g.footprint_known(Point::new(0.1, 0.5), 0.24));
}
