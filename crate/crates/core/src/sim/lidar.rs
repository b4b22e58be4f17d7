use crate::geometry::Point;
use crate::grid::{CellState, OccupancyGrid};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LidarConfig {
    /// Field of view in degrees, centered on the robot heading.
    pub fov_deg: f64,
    pub beams: usize,
    pub r_sensing: f64,
    pub scan_rate_hz: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self::with_fov(360.0)
    }
}

impl LidarConfig {
    /// 720 beams per full turn, scaled to the field of view, 20 m range, 10 Hz.
    pub fn with_fov(fov_deg: f64) -> Self {
        let beams = ((720.0 * fov_deg / 360.0).round() as usize).max(2);
        Self {
            fov_deg,
            beams,
            r_sensing: 20.0,
            scan_rate_hz: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fov_deg > 0.0 && self.fov_deg <= 360.0) {
            return Err(Error::Param(format!(
                "fov must be in (0, 360], got {}",
                self.fov_deg
            )));
        }
        if self.beams < 2 {
            return Err(Error::Param("lidar needs at least 2 beams".into()));
        }
        if !(self.r_sensing > 0.0 && self.r_sensing.is_finite()) {
            return Err(Error::Param(format!(
                "r_sensing must be > 0, got {}",
                self.r_sensing
            )));
        }
        if !(self.scan_rate_hz > 0.0 && self.scan_rate_hz.is_finite()) {
            return Err(Error::Param(format!(
                "scan rate must be > 0, got {}",
                self.scan_rate_hz
            )));
        }
        Ok(())
    }

    /// Beam offset from the heading. Beams sit at the centers of `beams`
    /// equal slices of the field of view, so they are symmetric about the
    /// heading and never reach the edges.
    pub fn beam_offset(&self, k: usize) -> f64 {
        let fov = self.fov_deg.to_radians();
        -fov / 2.0 + (k as f64 + 0.5) * fov / self.beams as f64
    }

    pub fn beam_offsets(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.beams).map(|k| self.beam_offset(k))
    }
}

/// Walks the cells a ray crosses, in order, calling `visit(ix, iy, t_enter)`
/// until it returns false, the ray leaves the grid, or `t_enter >= max_range`.
/// Returns true when stopped by `visit`.
pub(crate) fn march(
    grid: &OccupancyGrid,
    origin: Point,
    angle: f64,
    max_range: f64,
    mut visit: impl FnMut(usize, usize, f64) -> bool,
) -> bool {
    let res = grid.resolution();
    let (dx, dy) = (angle.cos(), angle.sin());
    let (mut ix, mut iy) = grid.cell_coords(origin);
    let o = grid.origin();
    let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
    let boundary =
        |i: i64, step: i64, org: f64| org + (i + if step > 0 { 1 } else { 0 }) as f64 * res;
    let mut t_max_x = if dx != 0.0 {
        (boundary(ix, step_x, o.x) - origin.x) / dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy != 0.0 {
        (boundary(iy, step_y, o.y) - origin.y) / dy
    } else {
        f64::INFINITY
    };
    let t_dx = if dx != 0.0 {
        res / dx.abs()
    } else {
        f64::INFINITY
    };
    let t_dy = if dy != 0.0 {
        res / dy.abs()
    } else {
        f64::INFINITY
    };
    let mut t_enter = 0.0;
    while t_enter < max_range && grid.in_bounds(ix, iy) {
        if !visit(ix as usize, iy as usize, t_enter) {
            return true;
        }
        if t_max_x < t_max_y {
            t_enter = t_max_x;
            t_max_x += t_dx;
            ix += step_x;
        } else {
            t_enter = t_max_y;
            t_max_y += t_dy;
            iy += step_y;
        }
    }
    false
}

/// Pose with heading, radians in (-pi, pi].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose {
    pub position: Point,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            position: Point::new(x, y),
            theta: crate::geometry::normalize_angle(theta),
        }
    }
}

/// Range to the first Occupied cell along each beam, capped at `r_sensing`.
/// Rays leaving the raster see nothing.
pub fn lidar_scan(pose: Pose, cfg: &LidarConfig, truth: &OccupancyGrid) -> Result<Vec<f64>> {
    if truth.known_cells() != truth.width() * truth.height() {
        return Err(Error::Input(
            "truth map must not contain Unknown cells".into(),
        ));
    }
    if truth.world_to_cell(pose.position).is_none() {
        return Err(Error::Input(format!(
            "pose {} lies outside the map",
            pose.position
        )));
    }
    Ok(scan_unchecked(pose, cfg, truth))
}

pub(crate) fn scan_unchecked(pose: Pose, cfg: &LidarConfig, truth: &OccupancyGrid) -> Vec<f64> {
    cfg.beam_offsets()
        .map(|off| {
            let mut range = cfg.r_sensing;
            march(
                truth,
                pose.position,
                pose.theta + off,
                cfg.r_sensing,
                |ix, iy, t| {
                    if truth.get(ix, iy) == CellState::Occupied {
                        range = t.min(cfg.r_sensing);
                        false
                    } else {
                        true
                    }
                },
            );
            range
        })
        .collect()
}

/// Cells changed by one scan integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanDelta {
    /// Unknown cells that became Free or Occupied.
    pub newly_known: usize,
    /// Cells that became Occupied.
    pub newly_occupied: usize,
}

/// Marks cells a beam passed through before its return as Free and the cell
/// where it returned as Occupied. Occupied cells are never cleared.
pub fn integrate_scan(
    belief: &mut OccupancyGrid,
    pose: Pose,
    ranges: &[f64],
    cfg: &LidarConfig,
) -> ScanDelta {
    let mut delta = ScanDelta::default();
    let mut writes: Vec<(usize, usize, CellState)> = Vec::new();
    for (k, &range) in ranges.iter().enumerate().take(cfg.beams) {
        let hit = range < cfg.r_sensing;
        writes.clear();
        march(
            belief,
            pose.position,
            pose.theta + cfg.beam_offset(k),
            cfg.r_sensing,
            |ix, iy, t| {
                if t >= range {
                    if hit {
                        writes.push((ix, iy, CellState::Occupied));
                    }
                    return false;
                }
                writes.push((ix, iy, CellState::Free));
                true
            },
        );
        for &(ix, iy, s) in &writes {
            let old = belief.get(ix, iy);
            if old == CellState::Occupied || old == s {
                continue;
            }
            belief.set(ix, iy, s);
            if old == CellState::Unknown {
                delta.newly_known += 1;
            }
            if s == CellState::Occupied {
                delta.newly_occupied += 1;
            }
        }
    }
    delta
}

/// [`lidar_scan`] followed by [`integrate_scan`] in a single march per beam.
/// `truth` and `belief` must share geometry.
pub(crate) fn scan_into(
    truth: &OccupancyGrid,
    belief: &mut OccupancyGrid,
    pose: Pose,
    cfg: &LidarConfig,
) -> ScanDelta {
    let mut delta = ScanDelta::default();
    for off in cfg.beam_offsets() {
        march(
            truth,
            pose.position,
            pose.theta + off,
            cfg.r_sensing,
            |ix, iy, _| {
                let hit = truth.get(ix, iy) == CellState::Occupied;
                let s = if hit {
                    CellState::Occupied
                } else {
                    CellState::Free
                };
                let old = belief.get(ix, iy);
                if old != CellState::Occupied && old != s {
                    belief.set(ix, iy, s);
                    delta.newly_known += usize::from(old == CellState::Unknown);
                    delta.newly_occupied += usize::from(hit);
                }
                !hit
            },
        );
    }
    delta
}
