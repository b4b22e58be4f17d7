use std::sync::Arc;

use super::{rebuild_distance_field, Boundary, CellState, DistanceField, OccupancyGrid};
use crate::geometry::Point;
use crate::{Error, Result};

/// An immutable grid revision paired with its distance field.
///
/// Cheap to clone; safe to share between threads.
#[derive(Clone, Debug)]
pub struct MapSnapshot {
    grid: Arc<OccupancyGrid>,
    field: Arc<DistanceField>,
}

impl MapSnapshot {
    pub fn new(grid: OccupancyGrid) -> Self {
        let field = rebuild_distance_field(&grid);
        Self {
            grid: Arc::new(grid),
            field: Arc::new(field),
        }
    }

    pub fn from_parts(grid: Arc<OccupancyGrid>, field: Arc<DistanceField>) -> Result<Self> {
        if !field.is_current_for(&grid) {
            return Err(Error::Consistency(
                "distance field is stale for this grid".into(),
            ));
        }
        Ok(Self { grid, field })
    }

    /// Next revision: reuses the distance field when the Occupied set did not change.
    pub fn advance(&self, grid: Arc<OccupancyGrid>) -> Self {
        let field = if self.field.is_current_for(&grid) {
            Arc::clone(&self.field)
        } else {
            Arc::new(rebuild_distance_field(&grid))
        };
        Self { grid, field }
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<OccupancyGrid> {
        &self.grid
    }

    pub fn field(&self) -> &DistanceField {
        &self.field
    }

    pub fn resolution(&self) -> f64 {
        self.grid.resolution()
    }

    pub fn revision(&self) -> u64 {
        self.grid.revision()
    }

    pub fn occupancy_revision(&self) -> u64 {
        self.grid.occupancy_revision()
    }

    pub fn state_at(&self, p: Point) -> CellState {
        self.grid.state_at(p)
    }

    pub fn is_unknown(&self, p: Point) -> bool {
        self.grid.state_at(p) == CellState::Unknown
    }

    /// Distance from the cell containing `p` to the nearest Occupied cell; `+inf`
    /// outside the grid or on an obstacle-free grid.
    #[inline]
    pub fn min_dist(&self, p: Point) -> f64 {
        match self.grid.world_to_cell(p) {
            Some((ix, iy)) => self.field.at(ix, iy),
            None => DistanceField::NO_OBSTACLE,
        }
    }

    /// See [`traversability_check`].
    pub fn traversable(&self, p0: Point, p1: Point, r_robot: f64) -> bool {
        traversability_check(p0, p1, self, r_robot)
    }

    pub fn unknown_area_in_disc(&self, center: Point, radius: f64) -> f64 {
        self.grid.unknown_area_in_disc(center, radius)
    }

    pub fn free_area_in_boundary(&self, b: &Boundary) -> f64 {
        self.grid.free_area_in_boundary(b)
    }
}

/// Walks every cell the closed segment [p0, p1] passes through and fails if
/// any of them is closer than `r_robot` to an Occupied cell. Unknown cells and
/// cells outside the raster pass.
///
/// The walk starts from the lexicographically smaller endpoint, so the result
/// does not depend on argument order.
pub fn traversability_check(p0: Point, p1: Point, map: &MapSnapshot, r_robot: f64) -> bool {
    let (a, b) = if (p0.x, p0.y) <= (p1.x, p1.y) {
        (p0, p1)
    } else {
        (p1, p0)
    };
    let g = map.grid();
    let ok = |ix: i64, iy: i64| {
        !g.in_bounds(ix, iy) || map.field().at(ix as usize, iy as usize) >= r_robot
    };
    let (mut ix, mut iy) = g.cell_coords(a);
    let (ex, ey) = g.cell_coords(b);
    if !ok(ix, iy) {
        return false;
    }
    let res = g.resolution();
    let o = g.origin();
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
    // Parametric distance along the segment to the next vertical / horizontal cell border.
    let next_border = |i: i64, step: i64, start: f64, origin: f64, delta: f64| -> (f64, f64) {
        if delta == 0.0 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let edge = origin + (i + i64::from(step > 0)) as f64 * res;
        ((edge - start) / delta, res / delta.abs())
    };
    let (mut t_x, dt_x) = next_border(ix, step_x, a.x, o.x, dx);
    let (mut t_y, dt_y) = next_border(iy, step_y, a.y, o.y, dy);
    let max_steps = (ex - ix).unsigned_abs() + (ey - iy).unsigned_abs();
    for _ in 0..max_steps {
        if (ix, iy) == (ex, ey) {
            break;
        }
        if t_x > 1.0 && t_y > 1.0 {
            break;
        }
        if t_x < t_y {
            ix += step_x;
            t_x += dt_x;
        } else if t_y < t_x {
            iy += step_y;
            t_y += dt_y;
        } else {
            // Exactly through a cell corner: the segment touches both side cells.
            if !ok(ix + step_x, iy) || !ok(ix, iy + step_y) {
                return false;
            }
            ix += step_x;
            iy += step_y;
            t_x += dt_x;
            t_y += dt_y;
        }
        if !ok(ix, iy) {
            return false;
        }
    }
    ok(ex, ey)
}
