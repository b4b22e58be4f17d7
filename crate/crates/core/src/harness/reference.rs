use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::ScenarioConfig;
use crate::geometry::Point;
use crate::grid::{rebuild_distance_field, CellState, OccupancyGrid};
use crate::sim::scan_into;
use crate::sim::{LidarConfig, Pose};
use crate::{Error, Result};

/// Upper bound on the coverage lattice pitch, m.
pub const MAX_REFERENCE_PITCH: f64 = 0.5;

/// Cells reachable from `start` through cells with clearance >= `r_robot`,
/// 8-connected without corner cutting.
pub fn reachable_cells(truth: &OccupancyGrid, start: Point, r_robot: f64) -> Result<Vec<bool>> {
    let field = rebuild_distance_field(truth);
    let (w, h) = (truth.width(), truth.height());
    let ok = |ix: i64, iy: i64| {
        ix >= 0
            && iy >= 0
            && (ix as usize) < w
            && (iy as usize) < h
            && field.at(ix as usize, iy as usize) >= r_robot
    };
    let (sx, sy) = truth
        .world_to_cell(start)
        .ok_or_else(|| Error::Input(format!("start {start} lies outside the map")))?;
    if !ok(sx as i64, sy as i64) {
        return Err(Error::Input(format!(
            "start {start} has clearance below r_robot {r_robot}"
        )));
    }
    let mut seen = vec![false; w * h];
    seen[sy * w + sx] = true;
    let mut queue = VecDeque::from([(sx as i64, sy as i64)]);
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ] {
            let (nx, ny) = (x + dx, y + dy);
            if !ok(nx, ny) || (dx != 0 && dy != 0 && !(ok(x + dx, y) && ok(x, y + dy))) {
                continue;
            }
            let i = ny as usize * w + nx as usize;
            if !seen[i] {
                seen[i] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    Ok(seen)
}

/// Known area after a full-circle scan from every reachable lattice point.
///
/// The lattice pitch is `min(r_sensing / 2, MAX_REFERENCE_PITCH)`; the scan
/// uses the same range as `lidar` with 720 beams over 360°.
pub fn reference_known_area(
    truth: &OccupancyGrid,
    start: Point,
    r_robot: f64,
    lidar: &LidarConfig,
) -> Result<f64> {
    let reach = reachable_cells(truth, start, r_robot)?;
    let pitch = (lidar.r_sensing / 2.0).min(MAX_REFERENCE_PITCH);
    let full = LidarConfig {
        r_sensing: lidar.r_sensing,
        ..LidarConfig::with_fov(360.0)
    };
    let (lo, hi) = truth.bounds();
    let mut belief = OccupancyGrid::new(
        truth.width(),
        truth.height(),
        truth.resolution(),
        truth.origin(),
        CellState::Unknown,
    )?;
    scan_into(truth, &mut belief, Pose::new(start.x, start.y, 0.0), &full);
    let nx = ((hi.x - lo.x) / pitch).floor() as usize;
    let ny = ((hi.y - lo.y) / pitch).floor() as usize;
    for j in 0..ny {
        for i in 0..nx {
            let p = Point::new(
                lo.x + (i as f64 + 0.5) * pitch,
                lo.y + (j as f64 + 0.5) * pitch,
            );
            let Some((cx, cy)) = truth.world_to_cell(p) else {
                continue;
            };
            if reach[truth.index(cx, cy)] {
                scan_into(truth, &mut belief, Pose::new(p.x, p.y, 0.0), &full);
            }
        }
    }
    Ok(belief.known_area())
}

/// `<map>.ref` next to the map file.
pub fn reference_cache_path(map: &Path) -> PathBuf {
    map.with_extension("ref")
}

fn cache_key(cfg: &ScenarioConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(std::fs::read(&cfg.map_path)?);
    h.update(std::fs::read(crate::grid::header_path(&cfg.map_path)).unwrap_or_default());
    let p = cfg.start.position;
    for v in [
        p.x,
        p.y,
        cfg.mission.robot.r_robot,
        cfg.mission.lidar.r_sensing,
        MAX_REFERENCE_PITCH,
    ] {
        h.update(v.to_le_bytes());
    }
    let mut hex = String::new();
    for b in h.finalize().iter() {
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

/// Reference known area for a scenario, read from the cache when its hash
/// matches and recomputed (and rewritten) otherwise. A cache that cannot be
/// written is not an error.
pub fn reference_area(cfg: &ScenarioConfig) -> Result<f64> {
    let key = cache_key(cfg)?;
    let cache = reference_cache_path(&cfg.map_path);
    if let Ok(text) = std::fs::read_to_string(&cache) {
        if let Some(area) = parse_cache(&text, &key) {
            return Ok(area);
        }
    }
    let truth = cfg.load_truth()?;
    let area = reference_known_area(
        &truth,
        cfg.start.position,
        cfg.mission.robot.r_robot,
        &cfg.mission.lidar,
    )?;
    let _ = std::fs::write(&cache, format!("hash = {key}\narea = {area}\n"));
    Ok(area)
}

fn parse_cache(text: &str, key: &str) -> Option<f64> {
    let mut hash = None;
    let mut area = None;
    for line in text.lines() {
        let (k, v) = line.split_once('=')?;
        match k.trim() {
            "hash" => hash = Some(v.trim().to_string()),
            "area" => area = v.trim().parse::<f64>().ok(),
            _ => {}
        }
    }
    (hash.as_deref() == Some(key)).then_some(area).flatten()
}
