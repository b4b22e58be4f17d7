//! Bundled truth maps.
//!
//! The three challenge maps each contain a closet reachable only through a
//! 0.3 m gap (the lidar sees into it, the robot cannot enter) and a 0.4 m wide
//! dead-end slot next to open floor. Doors are at least 1 m wide.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use crate::controller::MissionConfig;
use crate::geometry::Point;
use crate::grid::{write_map, CellState, MapMeta, OccupancyGrid};
use crate::harness::ScenarioConfig;
use crate::sim::Pose;
use crate::{Error, Result};

/// Resolution of the bundled maps, m per cell.
pub const BUNDLED_RESOLUTION: f64 = 0.05;

const WALL: f64 = 0.2;

/// Draws a binary map in metric coordinates.
pub struct MapBuilder {
    grid: OccupancyGrid,
}

impl MapBuilder {
    /// Free floor of `width` x `height` meters enclosed by 0.2 m walls.
    pub fn new(width: f64, height: f64, resolution: f64) -> Result<Self> {
        let w = (width / resolution).round() as usize;
        let h = (height / resolution).round() as usize;
        let grid = OccupancyGrid::new(w, h, resolution, Point::default(), CellState::Free)?;
        let mut b = Self { grid };
        b.wall(0.0, 0.0, width, WALL);
        b.wall(0.0, height - WALL, width, height);
        b.wall(0.0, 0.0, WALL, height);
        b.wall(width - WALL, 0.0, width, height);
        Ok(b)
    }

    fn fill(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, state: CellState) -> &mut Self {
        let g = &self.grid;
        let res = g.resolution();
        let ix0 = ((x0 / res).round() as i64).max(0);
        let iy0 = ((y0 / res).round() as i64).max(0);
        let ix1 = ((x1 / res).round() as i64).min(g.width() as i64);
        let iy1 = ((y1 / res).round() as i64).min(g.height() as i64);
        for iy in iy0..iy1 {
            for ix in ix0..ix1 {
                self.grid.set(ix as usize, iy as usize, state);
            }
        }
        self
    }

    /// Marks the rectangle `[x0, x1) x [y0, y1)` Occupied.
    pub fn wall(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) -> &mut Self {
        self.fill(x0, y0, x1, y1, CellState::Occupied)
    }

    /// Marks the rectangle `[x0, x1) x [y0, y1)` Free.
    pub fn clear(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) -> &mut Self {
        self.fill(x0, y0, x1, y1, CellState::Free)
    }

    pub fn build(self) -> OccupancyGrid {
        self.grid
    }
}

/// A truth map with a start pose.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub truth: OccupancyGrid,
    pub start: Pose,
}

/// Closed 6 m x 5 m room, nothing inside.
pub fn empty_room(resolution: f64) -> Result<Scenario> {
    let b = MapBuilder::new(6.0, 5.0, resolution)?;
    Ok(Scenario {
        name: "empty-room",
        truth: b.build(),
        start: Pose::new(2.0, 2.0, 0.0),
    })
}

/// Two lower rooms and an upper hall joined by doors.
pub fn office(resolution: f64) -> Result<Scenario> {
    let mut b = MapBuilder::new(18.0, 12.0, resolution)?;
    // Hall separator with two doors.
    b.wall(0.0, 6.0, 18.0, 6.2)
        .clear(3.0, 6.0, 4.2, 6.2)
        .clear(12.0, 6.0, 13.2, 6.2);
    // Lower rooms split, with a door.
    b.wall(9.0, 0.0, 9.2, 6.0).clear(9.0, 2.0, 9.2, 3.2);
    b.wall(13.5, 0.2, 13.7, 4.0);
    // Closet in the hall's top-right corner, seen through a 0.3 m gap.
    b.wall(15.0, 9.5, 15.2, 12.0)
        .wall(15.0, 9.5, 18.0, 9.7)
        .clear(16.2, 9.5, 16.5, 9.7);
    // Block on the hall's left with a 0.4 m dead-end slot.
    b.wall(0.0, 8.0, 2.5, 12.0).clear(0.5, 9.6, 2.5, 10.0);
    // Furniture.
    b.wall(6.0, 8.5, 7.5, 9.5);
    b.wall(4.0, 1.5, 5.0, 2.5);
    Ok(Scenario {
        name: "office",
        truth: b.build(),
        start: Pose::new(2.0, 2.0, 0.0),
    })
}

/// Open floor with shelf rows.
pub fn warehouse(resolution: f64) -> Result<Scenario> {
    let mut b = MapBuilder::new(20.0, 14.0, resolution)?;
    for y in [3.0, 6.5, 10.0] {
        b.wall(3.0, y, 8.0, y + 0.6).wall(10.0, y, 15.0, y + 0.6);
    }
    // Closet in the bottom-right corner behind a 0.3 m gap.
    b.wall(17.0, 0.0, 17.2, 3.2)
        .wall(17.0, 3.0, 20.0, 3.2)
        .clear(17.0, 1.4, 17.2, 1.7);
    // Top-left block with a 0.4 m dead-end slot opening downward.
    b.wall(0.0, 12.0, 6.0, 14.0).clear(3.0, 12.0, 3.4, 13.4);
    Ok(Scenario {
        name: "warehouse",
        truth: b.build(),
        start: Pose::new(1.5, 1.5, FRAC_PI_2),
    })
}

/// Ring of rooms around a central room.
pub fn loop_rooms(resolution: f64) -> Result<Scenario> {
    let mut b = MapBuilder::new(16.0, 16.0, resolution)?;
    // Central room with a north door.
    b.wall(5.0, 5.0, 11.0, 5.2)
        .wall(5.0, 10.8, 11.0, 11.0)
        .wall(5.0, 5.0, 5.2, 11.0)
        .wall(10.8, 5.0, 11.0, 11.0);
    b.clear(7.5, 10.8, 8.5, 11.0);
    // Closet inside the central room behind a 0.3 m gap.
    b.wall(7.0, 5.0, 7.2, 7.2)
        .wall(5.0, 7.0, 7.2, 7.2)
        .clear(6.0, 7.0, 6.3, 7.2);
    // Ring partitions with doors.
    b.wall(0.0, 8.0, 5.0, 8.2).clear(2.0, 8.0, 3.0, 8.2);
    b.wall(11.0, 8.0, 16.0, 8.2).clear(13.0, 8.0, 14.0, 8.2);
    // Block on the south side with a 0.4 m dead-end slot opening upward.
    b.wall(9.0, 0.0, 12.0, 2.0).clear(10.3, 0.5, 10.7, 2.0);
    Ok(Scenario {
        name: "loop-rooms",
        truth: b.build(),
        start: Pose::new(2.5, 2.5, 0.0),
    })
}

/// Serpentine corridor: four 2.6 m wide legs joined by U-turns at alternating ends.
pub fn corridor(resolution: f64) -> Result<Scenario> {
    let (width, leg) = (24.0, 2.6);
    let height = 2.0 * WALL + 4.0 * leg + 3.0 * WALL;
    let mut b = MapBuilder::new(width, height, resolution)?;
    for k in 1..4 {
        let y = WALL + k as f64 * leg + (k - 1) as f64 * WALL;
        if k % 2 == 1 {
            b.wall(0.0, y, width - WALL - leg, y + WALL);
        } else {
            b.wall(WALL + leg, y, width, y + WALL);
        }
    }
    Ok(Scenario {
        name: "corridor",
        truth: b.build(),
        start: Pose::new(1.5, WALL + leg / 2.0, 0.0),
    })
}

/// The three challenge maps.
pub fn challenge_maps(resolution: f64) -> Result<Vec<Scenario>> {
    Ok(vec![
        office(resolution)?,
        warehouse(resolution)?,
        loop_rooms(resolution)?,
    ])
}

pub const BUNDLED_NAMES: [&str; 5] = [
    "empty-room",
    "office",
    "warehouse",
    "loop-rooms",
    "corridor",
];

pub fn by_name(name: &str, resolution: f64) -> Result<Scenario> {
    match name {
        "empty-room" => empty_room(resolution),
        "office" => office(resolution),
        "warehouse" => warehouse(resolution),
        "loop-rooms" => loop_rooms(resolution),
        "corridor" => corridor(resolution),
        _ => Err(Error::Input(format!("unknown bundled map '{name}'"))),
    }
}

/// Writes `<name>.pgm`, `<name>.hdr` and `<name>.cfg` for every bundled map
/// into `dir` and returns the config paths.
pub fn write_bundled(dir: &Path, resolution: f64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for name in BUNDLED_NAMES {
        let sc = by_name(name, resolution)?;
        let pgm = dir.join(format!("{name}.pgm"));
        write_map(&pgm, &sc.truth, &MapMeta::default())?;
        let cfg = ScenarioConfig {
            name: name.to_string(),
            map_path: pgm,
            start: sc.start,
            mission: MissionConfig::default(),
            seed: 1,
            runs: 20,
        };
        let cfg_path = dir.join(format!("{name}.cfg"));
        std::fs::write(&cfg_path, cfg.to_text(&format!("{name}.pgm")))?;
        out.push(cfg_path);
    }
    Ok(out)
}

/// Directory holding the bundled maps and configs in this source tree.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("maps")
}
