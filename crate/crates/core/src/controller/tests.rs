use super::*;
use crate::geometry::Point;
use crate::grid::{CellState, MapSnapshot, OccupancyGrid};
use crate::scenarios::{self, MapBuilder};
use crate::sim::{LidarConfig, Pose, RobotParams, World};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn sa_single_point_is_identity() {
    let costs = LegCosts::euclidean(
        &[Point::new(1.0, 1.0)],
        Point::new(0.0, 0.0),
        Point::new(0.0, 0.0),
    );
    let order = sa_order(&costs, &SaSchedule::for_costs(&costs, 3)).unwrap();
    assert_eq!(order, vec![0]);
}

#[test]
fn sa_matches_brute_force_on_small_sets() {
    let sets: Vec<Vec<Point>> = vec![
        vec![Point::new(4.0, 0.0), Point::new(1.0, 0.0)],
        vec![
            Point::new(3.0, 3.0),
            Point::new(0.0, 3.0),
            Point::new(3.0, 0.0),
        ],
        vec![
            Point::new(5.0, 1.0),
            Point::new(-2.0, 4.0),
            Point::new(1.0, -3.0),
        ],
    ];
    for pts in sets {
        let costs = LegCosts::euclidean(&pts, Point::new(0.0, 0.0), Point::new(6.0, 0.0));
        let best = permutations(pts.len())
            .iter()
            .map(|p| costs.tour(p))
            .fold(f64::INFINITY, f64::min);
        let order = sa_order(&costs, &SaSchedule::for_costs(&costs, 11)).unwrap();
        assert!((costs.tour(&order) - best).abs() < 1e-9, "{pts:?}");
    }
}

#[test]
fn sa_sorts_shuffled_collinear_points() {
    let xs = [5.0, 2.0, 8.0, 1.0, 7.0, 3.0, 6.0, 4.0];
    let pts: Vec<Point> = xs.iter().map(|&x| Point::new(x, 0.0)).collect();
    let costs = LegCosts::euclidean(&pts, Point::new(0.0, 0.0), Point::new(9.0, 0.0));
    let order = sa_order(&costs, &SaSchedule::for_costs(&costs, 5)).unwrap();
    let visited: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    assert_eq!(visited, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
}

#[test]
fn sa_never_worse_than_insertion_order() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for seed in 0..20 {
        let n = rng.gen_range(2..12);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let costs = LegCosts::euclidean(&pts, Point::new(0.0, 0.0), Point::new(10.0, 10.0));
        let identity: Vec<usize> = (0..n).collect();
        let order = sa_order(&costs, &SaSchedule::for_costs(&costs, seed)).unwrap();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, identity);
        assert!(costs.tour(&order) <= costs.tour(&identity) + 1e-12);
    }
}

#[test]
fn sa_rejects_bad_schedule() {
    let costs = LegCosts::euclidean(
        &[Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
        Point::default(),
        Point::default(),
    );
    let bad = SaSchedule {
        t_initial: 1.0,
        t_final: 2.0,
        cooling: 0.95,
        iterations: 10,
        seed: 0,
    };
    assert!(sa_order(&costs, &bad).is_err());
}

#[test]
fn visited_junctions_pending_window() {
    let mut v = VisitedJunctions::default();
    v.push(Point::new(1.0, 0.0), 1.0);
    v.push(Point::new(2.0, 0.0), 2.0);
    assert_eq!(
        v.take_pending(),
        vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0)]
    );
    assert!(v.take_pending().is_empty());
    v.push(Point::new(3.0, 0.0), 3.0);
    assert_eq!(v.take_pending(), vec![Point::new(3.0, 0.0)]);
    assert_eq!(v.len(), 3);
    assert_eq!(v.last(), Some(Point::new(3.0, 0.0)));
}

#[test]
fn outcome_round_trips_through_text() {
    for o in [
        MissionOutcome::Finished,
        MissionOutcome::Collision,
        MissionOutcome::Stall,
        MissionOutcome::Timeout,
    ] {
        assert_eq!(o.to_string().parse::<MissionOutcome>().unwrap(), o);
    }
    assert!("crashed".parse::<MissionOutcome>().is_err());
}

fn two_rooms(door: (f64, f64), gap: Option<(f64, f64)>) -> OccupancyGrid {
    let mut b = MapBuilder::new(10.0, 6.0, 0.05).unwrap();
    b.wall(5.0, 0.0, 5.2, 6.0);
    if door.1 > door.0 {
        b.clear(5.0, door.0, 5.2, door.1);
    }
    if let Some((lo, hi)) = gap {
        b.clear(5.0, lo, 5.2, hi);
    }
    b.build()
}

fn navigator(truth: OccupancyGrid, belief: OccupancyGrid, start: Pose) -> Navigator {
    let cfg = MissionConfig::default();
    let world = World::new(truth, start, cfg.robot, cfg.lidar, cfg.dt)
        .unwrap()
        .with_belief(belief)
        .unwrap();
    Navigator::new(world, cfg)
}

#[test]
fn standoff_prefers_frontier_then_nearest_admissible() {
    let g = two_rooms((0.0, 0.0), None);
    let map = MapSnapshot::new(g);
    let open = Point::new(2.0, 3.0);
    assert_eq!(standoff_goal(open, &map, 0.24), Some(open));
    let near_wall = Point::new(4.9, 3.0);
    let s = standoff_goal(near_wall, &map, 0.24).unwrap();
    assert!(map.min_dist(s) >= 0.24);
    assert!(s.dist(near_wall) <= 0.48 + 1e-9);
    assert_eq!(standoff_goal(Point::new(5.1, 3.0), &map, 3.0), None);
}

#[test]
fn navigate_to_current_position_is_immediate() {
    let g = two_rooms((2.5, 3.7), None);
    let mut nav = navigator(g.clone(), g, Pose::new(2.0, 3.0, 0.0));
    let out = nav
        .navigate_to(Point::new(2.0, 3.0), NavMode::Local)
        .unwrap();
    assert_eq!(out, NavOutcome::Reached);
    assert_eq!(nav.world().time(), 0.0);
}

#[test]
fn navigate_through_open_door() {
    let g = two_rooms((2.5, 3.7), None);
    let mut nav = navigator(g.clone(), g, Pose::new(2.0, 3.1, 0.0));
    let goal = Point::new(8.0, 3.1);
    assert_eq!(
        nav.navigate_to(goal, NavMode::Global).unwrap(),
        NavOutcome::Reached
    );
    assert!(nav.world().pose().position.dist(goal) < 1e-9);
    assert!(nav.world().min_clearance() >= 0.24);
    assert!(nav.segments().iter().all(|&s| s <= 1.25 + 1e-6));
    assert_eq!(nav.replans(), 0);
}

#[test]
fn gap_narrower_than_robot_is_unreachable_without_collision() {
    let g = two_rooms((2.9, 3.2), None);
    let mut nav = navigator(g.clone(), g, Pose::new(2.0, 3.0, 0.0));
    let out = nav
        .navigate_to(Point::new(8.0, 3.0), NavMode::Local)
        .unwrap();
    assert_eq!(out, NavOutcome::Unreachable);
    assert_eq!(nav.world().pose().position, Point::new(2.0, 3.0));
}

#[test]
fn closed_door_triggers_one_replan_and_detour() {
    // The prior belief shows the lower door open; in truth only the upper gap is.
    let truth = two_rooms((0.0, 0.0), Some((4.4, 5.6)));
    let belief = two_rooms((2.5, 3.7), Some((4.4, 5.6)));
    let mut nav = navigator(truth, belief, Pose::new(2.0, 3.1, 0.0));
    let goal = Point::new(8.0, 3.1);
    let out = nav.navigate_to(goal, NavMode::Global).unwrap();
    assert_eq!(out, NavOutcome::Reached);
    assert_eq!(nav.replans(), 1);
    assert!(nav.world().min_clearance() >= 0.24);
    let through_gap = nav.visited().entries().iter().any(|(p, _)| p.y > 4.0);
    assert!(through_gap, "path should detour through the upper gap");
    assert!(nav.events().iter().filter(|e| e.kind == "replan").count() == 1);
}

#[test]
fn empty_room_mission_finishes_at_home() {
    let sc = scenarios::empty_room(0.05).unwrap();
    let cfg = MissionConfig::default();
    let r = run_mission(sc.truth.clone(), sc.start, &cfg, 7).unwrap();
    assert_eq!(r.outcome, MissionOutcome::Finished);
    assert!(r.final_position.dist(sc.start.position) <= 0.1 + 1e-9);
    let free = sc.truth.count(CellState::Free) as f64 * 0.05 * 0.05;
    assert!(r.known_area() >= free);
    let series = r.known_area_series();
    assert!(series
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 && w[1].0 >= w[0].0));
}

#[test]
fn mission_is_deterministic() {
    let sc = scenarios::office(0.05).unwrap();
    let cfg = MissionConfig {
        lidar: LidarConfig::with_fov(270.0),
        ..Default::default()
    };
    let a = run_mission(sc.truth.clone(), sc.start, &cfg, 3).unwrap();
    let b = run_mission(sc.truth.clone(), sc.start, &cfg, 3).unwrap();
    assert_eq!(a.event_log(), b.event_log());
    assert_eq!(a.belief.cells(), b.belief.cells());
    assert_eq!(a.total_time, b.total_time);
}

#[test]
fn mission_rejects_bad_start() {
    let sc = scenarios::empty_room(0.05).unwrap();
    let cfg = MissionConfig::default();
    assert!(run_mission(sc.truth.clone(), Pose::new(0.05, 0.05, 0.0), &cfg, 1).is_err());
    let mut bad = cfg.clone();
    bad.robot = RobotParams {
        r_robot: -1.0,
        ..RobotParams::default()
    };
    assert!(run_mission(sc.truth, sc.start, &bad, 1).is_err());
}

#[test]
fn with_belief_rejects_mismatched_geometry() {
    let sc = scenarios::empty_room(0.05).unwrap();
    let cfg = MissionConfig::default();
    let w = World::new(sc.truth, sc.start, cfg.robot, cfg.lidar, cfg.dt).unwrap();
    let other = OccupancyGrid::new(3, 3, 0.05, Point::default(), CellState::Free).unwrap();
    assert!(w.with_belief(other).is_err());
}
