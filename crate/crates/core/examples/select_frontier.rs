//! Scores the global frontiers found after the first scan and picks the best.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use explora::grid::{CellState, MapSnapshot, OccupancyGrid};
use explora::rrt::{expand_and_search, SearchMode, SearchParams};
use explora::scenarios::{by_name, BUNDLED_RESOLUTION};
use explora::select::{score_terms, select_best_frontier, SelectionContext, SelectionWeights};
use explora::sim::{integrate_scan, lidar_scan, LidarConfig};

fn main() -> explora::Result<()> {
    let sc = by_name("loop-rooms", BUNDLED_RESOLUTION)?;
    let truth = &sc.truth;
    let lidar = LidarConfig::with_fov(270.0);
    let mut belief = OccupancyGrid::new(
        truth.width(),
        truth.height(),
        truth.resolution(),
        truth.origin(),
        CellState::Unknown,
    )?;
    integrate_scan(
        &mut belief,
        sc.start,
        &lidar_scan(sc.start, &lidar, truth)?,
        &lidar,
    );
    let map = MapSnapshot::new(belief);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let search = expand_and_search(
        sc.start.position,
        truth.bounding_rect(),
        &map,
        &SearchParams::default(),
        SearchMode::Global,
        &mut rng,
    )?;

    let ctx = SelectionContext::at_start(sc.start.position, sc.start.theta, 4.0);
    let w = SelectionWeights::default();
    println!(
        "{:>16} {:>6} {:>6} {:>6} {:>6} {:>7}",
        "frontier", "info", "dir", "dist", "free", "score"
    );
    for f in &search.frontiers {
        let t = score_terms(f.position, &ctx, &map);
        println!(
            "{:>16} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>7.3}",
            f.position.to_string(),
            t.info,
            t.dir,
            t.dist,
            t.free,
            t.weighted(&w)
        );
    }
    let best = select_best_frontier(&search.frontiers, &ctx, &map, &w)?;
    println!("selected {}", best.position);
    Ok(())
}
