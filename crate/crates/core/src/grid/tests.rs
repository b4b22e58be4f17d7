use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn random_grid(w: usize, h: usize, res: f64, p_occ: f64, seed: u64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..w * h)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < p_occ {
                CellState::Occupied
            } else if u < p_occ + (1.0 - p_occ) / 2.0 {
                CellState::Free
            } else {
                CellState::Unknown
            }
        })
        .collect();
    OccupancyGrid::from_cells(w, h, res, Point::new(-1.0, 2.0), cells).unwrap()
}

/// O(n²) nearest-occupied oracle.
fn brute_force_field(g: &OccupancyGrid) -> Vec<f64> {
    let occ: Vec<(i64, i64)> = (0..g.height())
        .flat_map(|iy| (0..g.width()).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| g.get(ix, iy) == CellState::Occupied)
        .map(|(ix, iy)| (ix as i64, iy as i64))
        .collect();
    let mut out = Vec::with_capacity(g.width() * g.height());
    for iy in 0..g.height() as i64 {
        for ix in 0..g.width() as i64 {
            let best = occ
                .iter()
                .map(|&(ox, oy)| ((ox - ix) * (ox - ix) + (oy - iy) * (oy - iy)) as f64)
                .fold(f64::INFINITY, f64::min);
            out.push(best.sqrt() * g.resolution());
        }
    }
    out
}

#[test]
fn ternarize_thresholds() {
    let g = ternarize(
        &[Some(0.1), Some(0.5), Some(0.9), None, Some(0.0)],
        5,
        1,
        1.0,
        Point::default(),
        DEFAULT_FREE_THRESH,
        DEFAULT_OCC_THRESH,
    )
    .unwrap();
    let oracle = |p: Option<f64>| match p {
        Some(p) if p < 0.25 => CellState::Free,
        Some(p) if p > 0.65 => CellState::Occupied,
        _ => CellState::Unknown,
    };
    let expect: Vec<_> = [Some(0.1), Some(0.5), Some(0.9), None, Some(0.0)]
        .map(oracle)
        .to_vec();
    assert_eq!(g.cells(), &expect[..]);
    assert_eq!(
        &g.cells()[..3],
        &[CellState::Free, CellState::Unknown, CellState::Occupied]
    );
}

#[test]
fn ternarize_rejects_bad_thresholds() {
    let r = ternarize(&[Some(0.5)], 1, 1, 1.0, Point::default(), 0.7, 0.3);
    assert!(matches!(r, Err(Error::Param(_))));
    let r = ternarize(&[Some(0.5)], 1, 1, 1.0, Point::default(), 0.5, 0.5);
    assert!(r.is_err());
}

#[test]
fn ternarize_idempotent_on_own_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let probs: Vec<Option<f64>> = (0..400)
        .map(|_| {
            if rng.gen_bool(0.2) {
                None
            } else {
                Some(rng.gen())
            }
        })
        .collect();
    let g1 = ternarize(&probs, 20, 20, 0.1, Point::default(), 0.25, 0.65).unwrap();
    let back: Vec<Option<f64>> = g1
        .cells()
        .iter()
        .map(|c| match c {
            CellState::Free => Some(0.0),
            CellState::Occupied => Some(1.0),
            CellState::Unknown => None,
        })
        .collect();
    let g2 = ternarize(&back, 20, 20, 0.1, Point::default(), 0.25, 0.65).unwrap();
    assert_eq!(g1, g2);
}

#[test]
fn grid_rejects_degenerate_geometry() {
    assert!(OccupancyGrid::new(0, 3, 0.1, Point::default(), CellState::Free).is_err());
    assert!(OccupancyGrid::new(3, 3, 0.0, Point::default(), CellState::Free).is_err());
}

#[test]
fn world_cell_round_trip() {
    let g = OccupancyGrid::new(30, 20, 0.05, Point::new(-0.7, 0.3), CellState::Free).unwrap();
    for iy in 0..20 {
        for ix in 0..30 {
            let c = g.cell_center(ix, iy);
            assert_eq!(g.world_to_cell(c), Some((ix as usize, iy as usize)));
        }
    }
    assert_eq!(g.state_at(Point::new(-10.0, 0.0)), CellState::Unknown);
    assert_eq!(g.world_to_cell(Point::new(100.0, 0.5)), None);
}

#[test]
fn distance_field_obstacle_free_is_sentinel() {
    let g = OccupancyGrid::new(10, 10, 1.0, Point::default(), CellState::Free).unwrap();
    let f = rebuild_distance_field(&g);
    assert!(f.values().iter().all(|&d| d == DistanceField::NO_OBSTACLE));
}

#[test]
fn distance_field_three_four_five() {
    let mut g = OccupancyGrid::new(10, 10, 1.0, Point::default(), CellState::Free).unwrap();
    g.set(0, 0, CellState::Occupied);
    let f = rebuild_distance_field(&g);
    assert_eq!(f.at(3, 4), 5.0);
    assert_eq!(f.at(0, 0), 0.0);
}

#[test]
fn distance_field_matches_brute_force_32() {
    for seed in 0..8 {
        let g = random_grid(32, 32, 0.05, 0.05, seed);
        let f = rebuild_distance_field(&g);
        assert_eq!(f.values(), &brute_force_field(&g)[..], "seed {seed}");
    }
}

#[test]
fn distance_field_non_square() {
    let g = random_grid(41, 13, 0.1, 0.02, 77);
    assert_eq!(
        rebuild_distance_field(&g).values(),
        &brute_force_field(&g)[..]
    );
    let g = random_grid(7, 50, 0.1, 0.01, 78);
    assert_eq!(
        rebuild_distance_field(&g).values(),
        &brute_force_field(&g)[..]
    );
}

#[test]
fn distance_field_lipschitz_adjacent() {
    let g = random_grid(48, 48, 0.05, 0.03, 11);
    let f = rebuild_distance_field(&g);
    let bound = g.resolution() * 2f64.sqrt() + 1e-12;
    for iy in 0..47 {
        for ix in 0..47 {
            let d = f.at(ix, iy);
            for (jx, jy) in [(ix + 1, iy), (ix, iy + 1), (ix + 1, iy + 1)] {
                assert!((d - f.at(jx, jy)).abs() <= bound);
            }
        }
    }
}

#[test]
fn min_dist_examples() {
    let mut g = OccupancyGrid::new(10, 10, 0.05, Point::default(), CellState::Free).unwrap();
    let f = rebuild_distance_field(&g);
    assert_eq!(
        min_dist_to_obstacle(Point::new(0.2, 0.2), &g, &f).unwrap(),
        f64::INFINITY
    );
    g.set(0, 0, CellState::Occupied);
    // Stale field is refused.
    assert!(matches!(
        min_dist_to_obstacle(Point::new(0.2, 0.2), &g, &f),
        Err(Error::Consistency(_))
    ));
    let f = rebuild_distance_field(&g);
    let c = g.cell_center(3, 4);
    let d = min_dist_to_obstacle(c, &g, &f).unwrap();
    assert!((d - 0.25).abs() < 1e-12, "{d}");
    assert_eq!(
        min_dist_to_obstacle(Point::new(0.01, 0.01), &g, &f).unwrap(),
        0.0
    );
    assert_eq!(
        min_dist_to_obstacle(Point::new(-5.0, 0.0), &g, &f).unwrap(),
        f64::INFINITY
    );
}

#[test]
fn field_survives_free_only_edits() {
    let mut g = OccupancyGrid::new(10, 10, 0.1, Point::default(), CellState::Unknown).unwrap();
    g.set(2, 2, CellState::Occupied);
    let f = rebuild_distance_field(&g);
    g.set(5, 5, CellState::Free);
    assert!(f.is_current_for(&g));
    g.set(6, 6, CellState::Occupied);
    assert!(!f.is_current_for(&g));
}

/// Dense reference: sample at r_M/10 and test every sample.
fn dense_traversable(p0: Point, p1: Point, m: &MapSnapshot, r: f64) -> bool {
    let step = m.resolution() / 10.0;
    let n = (p0.dist(p1) / step).ceil().max(1.0) as usize;
    (0..=n).all(|i| m.min_dist(p0.lerp(p1, i as f64 / n as f64)) >= r)
}

fn wall_map() -> MapSnapshot {
    // 4 m x 2 m, a horizontal wall along row 10 (y in [0.5, 0.55)).
    let mut g = OccupancyGrid::new(80, 40, 0.05, Point::default(), CellState::Free).unwrap();
    for ix in 0..80 {
        g.set(ix, 10, CellState::Occupied);
    }
    MapSnapshot::new(g)
}

#[test]
fn traversability_point_segment() {
    let m = wall_map();
    let p = Point::new(1.0, 1.5);
    assert!(traversability_check(p, p, &m, 0.24));
}

#[test]
fn traversability_midpoint_near_wall_fails() {
    let m = wall_map();
    let r_robot = 0.24;
    // Wall cell centers at y = 0.525; the midpoint sits r_robot/2 above them.
    let y_mid = 0.525 + r_robot / 2.0;
    let p0 = Point::new(0.5, 1.4);
    let p1 = Point::new(1.5, 2.0 * y_mid - 1.4);
    let mid = p0.lerp(p1, 0.5);
    assert!((mid.y - y_mid).abs() < 1e-9);
    assert!(!traversability_check(p0, p1, &m, r_robot));
    assert!(!dense_traversable(p0, p1, &m, r_robot));
}

#[test]
fn traversability_corridor_centerline() {
    let r_robot: f64 = 0.24;
    let res: f64 = 0.05;
    // Corridor free width 2 r_robot + 4 r_M between wall cell rows.
    let gap_cells = ((2.0 * r_robot + 4.0 * res) / res).round() as usize;
    let h = gap_cells + 2;
    let mut g = OccupancyGrid::new(100, h, res, Point::default(), CellState::Free).unwrap();
    for ix in 0..100 {
        g.set(ix, 0, CellState::Occupied);
        g.set(ix, h - 1, CellState::Occupied);
    }
    let m = MapSnapshot::new(g);
    // Centerline halfway between the wall cell centers.
    let y = (0.5 * res + (h as f64 - 0.5) * res) / 2.0;
    let (p0, p1) = (Point::new(0.3, y), Point::new(4.7, y));
    assert!(traversability_check(p0, p1, &m, r_robot));
    assert!(m.min_dist(p0) >= r_robot + 2.0 * res - res / 2.0 - 1e-9);
}

#[test]
fn traversability_agrees_with_dense_sampling() {
    let g = random_grid(40, 40, 0.05, 0.004, 5);
    let m = MapSnapshot::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagreements = 0;
    for _ in 0..300 {
        let p0 = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(2.0..4.0));
        let p1 = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(2.0..4.0));
        if traversability_check(p0, p1, &m, 0.1) != dense_traversable(p0, p1, &m, 0.1) {
            disagreements += 1;
        }
    }
    // Half-cell sampling can only miss corner clips; with this density none occur.
    assert!(disagreements <= 3, "{disagreements}");
}

#[test]
fn unknown_area_known_disc_is_zero() {
    let g = OccupancyGrid::new(100, 100, 0.05, Point::default(), CellState::Free).unwrap();
    assert_eq!(g.unknown_area_in_disc(Point::new(2.5, 2.5), 1.0), 0.0);
}

#[test]
fn unknown_area_converges_to_disc_area() {
    let g = OccupancyGrid::new(400, 400, 0.05, Point::default(), CellState::Unknown).unwrap();
    for radius in [1.0, 2.5, 7.0] {
        let a = g.unknown_area_in_disc(Point::new(10.013, 9.987), radius);
        let exact = std::f64::consts::PI * radius * radius;
        assert!(
            (a - exact).abs() / exact <= 2.0 * 0.05 / radius,
            "{radius}: {a} vs {exact}"
        );
    }
    // Far outside the raster everything counts as Unknown.
    let a = g.unknown_area_in_disc(Point::new(100.0, 100.0), 2.0);
    assert!((a - std::f64::consts::PI * 4.0).abs() / (std::f64::consts::PI * 4.0) <= 0.05);
}

#[test]
fn unknown_area_half_plane() {
    let mut g = OccupancyGrid::new(200, 200, 0.05, Point::default(), CellState::Unknown).unwrap();
    for iy in 0..200 {
        for ix in 100..200 {
            g.set(ix, iy, CellState::Free);
        }
    }
    let r = 3.0;
    let c = Point::new(5.0, 5.0);
    let half = g.unknown_area_in_disc(c, r);
    let full = std::f64::consts::PI * r * r;
    assert!(
        (half - full / 2.0).abs() / (full / 2.0) <= 2.0 * 0.05 / r,
        "{half}"
    );
}

fn brute_unknown(g: &OccupancyGrid, c: Point, r: f64) -> f64 {
    let (x0, y0) = g.cell_coords(Point::new(c.x - r, c.y - r));
    let (x1, y1) = g.cell_coords(Point::new(c.x + r, c.y + r));
    let mut n = 0;
    for iy in y0 - 1..=y1 + 1 {
        for ix in x0 - 1..=x1 + 1 {
            if g.cell_center(ix, iy).dist_sq(c) <= r * r
                && g.get_signed(ix, iy) == CellState::Unknown
            {
                n += 1;
            }
        }
    }
    n as f64 * g.resolution() * g.resolution()
}

fn brute_free(g: &OccupancyGrid, b: &Boundary) -> f64 {
    let mut n = 0;
    for iy in 0..g.height() {
        for ix in 0..g.width() {
            if g.get(ix, iy) == CellState::Free && b.contains(g.cell_center(ix as i64, iy as i64)) {
                n += 1;
            }
        }
    }
    n as f64 * g.resolution() * g.resolution()
}

#[test]
fn area_queries_match_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for seed in 0..10 {
        let g = random_grid(37, 29, 0.1, 0.1, seed);
        for _ in 0..10 {
            let c = Point::new(rng.gen_range(-2.0..4.0), rng.gen_range(1.0..6.0));
            let r = rng.gen_range(0.05..2.5);
            assert_eq!(g.unknown_area_in_disc(c, r), brute_unknown(&g, c, r));
            let disc = Boundary::disc(c, r).unwrap();
            assert_eq!(g.free_area_in_boundary(&disc), brute_free(&g, &disc));
            let rect = Boundary::rect(c, Point::new(c.x + r, c.y + 0.7 * r)).unwrap();
            assert_eq!(g.free_area_in_boundary(&rect), brute_free(&g, &rect));
        }
    }
}

#[test]
fn free_area_examples() {
    let g = OccupancyGrid::new(10, 10, 0.1, Point::default(), CellState::Free).unwrap();
    assert!((g.free_area_in_boundary(&g.bounding_rect()) - 1.0).abs() < 1e-12);
    let g = OccupancyGrid::new(10, 10, 0.1, Point::default(), CellState::Unknown).unwrap();
    assert_eq!(g.free_area_in_boundary(&g.bounding_rect()), 0.0);
}

#[test]
fn boundary_constructors_validate() {
    assert!(Boundary::disc(Point::default(), 0.0).is_err());
    assert!(Boundary::rect(Point::new(1.0, 0.0), Point::new(0.0, 1.0)).is_err());
}

#[test]
fn pgm_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = random_grid(23, 17, 0.05, 0.2, 4);
    for format in [PgmFormat::Binary, PgmFormat::Ascii] {
        let meta = MapMeta {
            format,
            ..MapMeta::default()
        };
        let p = dir.path().join(format!("m_{format:?}.pgm"));
        write_map(&p, &g, &meta).unwrap();
        let bytes1 = std::fs::read(&p).unwrap();
        let hdr1 = std::fs::read(header_path(&p)).unwrap();
        let (g2, meta2) = read_map(&p).unwrap();
        assert_eq!(g2, g);
        assert_eq!(meta2, meta);
        write_map(&p, &g2, &meta2).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes1);
        assert_eq!(std::fs::read(header_path(&p)).unwrap(), hdr1);
    }
}

#[test]
fn pgm_reads_foreign_levels_and_comments() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.pgm");
    std::fs::write(&p, "P2\n# made by hand\n3 2\n255\n0 100 200\n63 64 192\n").unwrap();
    std::fs::write(header_path(&p), "resolution = 0.5\norigin_x = 1\n").unwrap();
    let (g, meta) = read_map(&p).unwrap();
    assert_eq!(meta.format, PgmFormat::Ascii);
    // Bottom image row is grid row 0.
    assert_eq!(g.get(0, 0), CellState::Occupied);
    assert_eq!(g.get(1, 0), CellState::Unknown);
    assert_eq!(g.get(2, 0), CellState::Free);
    assert_eq!(g.get(0, 1), CellState::Occupied);
    assert_eq!(g.get(1, 1), CellState::Unknown);
    assert_eq!(g.get(2, 1), CellState::Free);
    assert_eq!(g.origin(), Point::new(1.0, 0.0));
}

#[test]
fn pgm_missing_resolution_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.pgm");
    std::fs::write(&p, "P2\n1 1\n255\n0\n").unwrap();
    std::fs::write(header_path(&p), "origin_x = 1\n").unwrap();
    assert!(matches!(read_map(&p), Err(Error::Format { .. })));
}

proptest! {
    #[test]
    fn traversability_is_symmetric(x0 in -1.0f64..1.0, y0 in 2.0f64..4.0, x1 in -1.0f64..1.0, y1 in 2.0f64..4.0, seed in 0u64..4) {
        let m = MapSnapshot::new(random_grid(40, 40, 0.05, 0.01, seed));
        let (p0, p1) = (Point::new(x0, y0), Point::new(x1, y1));
        prop_assert_eq!(traversability_check(p0, p1, &m, 0.12), traversability_check(p1, p0, &m, 0.12));
    }

    #[test]
    fn revealing_never_increases_unknown_area(seed in 0u64..50, cx in -1.0f64..3.0, cy in 2.0f64..5.0, r in 0.1f64..2.0) {
        let mut g = random_grid(30, 30, 0.1, 0.1, seed);
        let before = g.unknown_area_in_disc(Point::new(cx, cy), r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        for iy in 0..30 {
            for ix in 0..30 {
                if g.get(ix, iy) == CellState::Unknown && rng.gen_bool(0.3) {
                    let s = if rng.gen_bool(0.5) { CellState::Free } else { CellState::Occupied };
                    g.set(ix, iy, s);
                }
            }
        }
        prop_assert!(g.unknown_area_in_disc(Point::new(cx, cy), r) <= before);
    }
}
