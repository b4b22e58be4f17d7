//! Local RRT frontier search after the first scan, then a global search and
//! a global prune once a second scan has revealed more of the map.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use explora::grid::{Boundary, CellState, MapSnapshot, OccupancyGrid};
use explora::rrt::{expand_and_search, prune_global, SearchMode, SearchParams};
use explora::scenarios::{by_name, BUNDLED_RESOLUTION};
use explora::sim::{integrate_scan, lidar_scan, LidarConfig, Pose};

fn main() -> explora::Result<()> {
    let sc = by_name("office", BUNDLED_RESOLUTION)?;
    let truth = &sc.truth;
    let lidar = LidarConfig::default();
    let params = SearchParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

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
    let map = MapSnapshot::new(belief.clone());

    let root = sc.start.position;
    let local = expand_and_search(
        root,
        Boundary::disc(root, 4.0)?,
        &map,
        &params,
        SearchMode::Local,
        &mut rng,
    )?;
    println!(
        "local: {} nodes, {} frontiers, {} samples",
        local.tree.len(),
        local.frontiers.len(),
        local.samples
    );

    let global = expand_and_search(
        root,
        truth.bounding_rect(),
        &map,
        &params,
        SearchMode::Global,
        &mut rng,
    )?;
    println!(
        "global: {} nodes, {} frontiers",
        global.tree.len(),
        global.frontiers.len()
    );

    // Scan from a second pose, then prune the global tree against the update.
    let second = Pose::new(8.0, 2.0, 0.0);
    integrate_scan(
        &mut belief,
        second,
        &lidar_scan(second, &lidar, truth)?,
        &lidar,
    );
    let updated = MapSnapshot::new(belief);
    let (mut tree, mut frontiers) = (global.tree, global.frontiers);
    let stats = prune_global(&mut frontiers, &mut tree, &updated, params.r_robot)?;
    println!(
        "after prune: {} frontiers kept ({} explored, {} blocked, {} orphaned), {} nodes removed",
        frontiers.len(),
        stats.explored,
        stats.blocked,
        stats.orphaned,
        stats.nodes_removed
    );
    Ok(())
}
