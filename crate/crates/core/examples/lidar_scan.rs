//! One simulated 2D LiDAR scan integrated into an all-unknown belief map,
//! exported as a PGM with its header.

use std::path::PathBuf;

use explora::grid::{write_map, CellState, MapMeta, OccupancyGrid};
use explora::scenarios::{by_name, BUNDLED_RESOLUTION};
use explora::sim::{integrate_scan, lidar_scan, LidarConfig};

fn main() -> explora::Result<()> {
    let sc = by_name("warehouse", BUNDLED_RESOLUTION)?;
    let truth = &sc.truth;
    let mut belief = OccupancyGrid::new(
        truth.width(),
        truth.height(),
        truth.resolution(),
        truth.origin(),
        CellState::Unknown,
    )?;

    for fov in [360.0, 180.0] {
        let cfg = LidarConfig::with_fov(fov);
        let ranges = lidar_scan(sc.start, &cfg, truth)?;
        let hits = ranges.iter().filter(|r| **r < cfg.r_sensing).count();
        let delta = integrate_scan(&mut belief, sc.start, &ranges, &cfg);
        println!(
            "fov {fov:>5}: {} beams, {hits} returns, {} newly known cells, known area {:.2} m^2",
            cfg.beams,
            delta.newly_known,
            belief.known_area()
        );
    }

    let out = PathBuf::from(std::env::var("EXPLORA_OUT").unwrap_or_else(|_| "explora-out".into()))
        .join("examples");
    std::fs::create_dir_all(&out)?;
    let path = out.join("lidar_scan.pgm");
    write_map(&path, &belief, &MapMeta::default())?;
    println!("belief written to {}", path.display());
    Ok(())
}
