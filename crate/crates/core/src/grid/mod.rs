//! Occupancy grids, exact obstacle-distance fields and the area and
//! clearance queries every planner in the crate is built on.

mod distance;
mod pgm;
mod snapshot;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use crate::geometry::Point;
use crate::{Error, Result};

pub use distance::{min_dist_to_obstacle, rebuild_distance_field, DistanceField};
pub use pgm::{
    encode_header, encode_pgm, header_path, read_map, write_map, GrayLevels, MapMeta, PgmFormat,
};
pub use snapshot::{traversability_check, MapSnapshot};

/// Ternary cell state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CellState {
    #[default]
    Unknown,
    Free,
    Occupied,
}

impl CellState {
    pub fn is_known(self) -> bool {
        self != CellState::Unknown
    }
}

/// Region used for sampling and area accounting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Rect { min: Point, max: Point },
    Disc { center: Point, radius: f64 },
}

impl Boundary {
    pub fn rect(min: Point, max: Point) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y) {
            return Err(Error::Param(format!(
                "rect boundary needs min < max, got {min} {max}"
            )));
        }
        Ok(Boundary::Rect { min, max })
    }

    pub fn disc(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Param(format!(
                "disc radius must be > 0, got {radius}"
            )));
        }
        Ok(Boundary::Disc { center, radius })
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Boundary::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
            Boundary::Disc { center, radius } => p.dist_sq(center) <= radius * radius,
        }
    }

    /// Axis-aligned bounding box.
    pub fn bbox(&self) -> (Point, Point) {
        match *self {
            Boundary::Rect { min, max } => (min, max),
            Boundary::Disc { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
        }
    }
}

static NEXT_LINEAGE: AtomicU64 = AtomicU64::new(1);

/// Row-major ternary raster. Cell (0, 0) has its lower-left corner at `origin`;
/// row index grows with +y.
#[derive(Debug)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    cells: Vec<CellState>,
    lineage: u64,
    revision: u64,
    occ_revision: u64,
    known: usize,
    unknown_rows: OnceLock<Vec<u32>>,
    free_rows: OnceLock<Vec<u32>>,
}

impl Clone for OccupancyGrid {
    fn clone(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            resolution: self.resolution,
            origin: self.origin,
            cells: self.cells.clone(),
            lineage: self.lineage,
            revision: self.revision,
            occ_revision: self.occ_revision,
            known: self.known,
            unknown_rows: self.unknown_rows.clone(),
            free_rows: self.free_rows.clone(),
        }
    }
}

impl PartialEq for OccupancyGrid {
    /// Content equality: geometry and cells. Revision counters are ignored.
    fn eq(&self, o: &Self) -> bool {
        self.width == o.width
            && self.height == o.height
            && self.resolution == o.resolution
            && self.origin == o.origin
            && self.cells == o.cells
    }
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        fill: CellState,
    ) -> Result<Self> {
        Self::from_cells(
            width,
            height,
            resolution,
            origin,
            vec![fill; width * height],
        )
    }

    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        cells: Vec<CellState>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Param(format!(
                "grid must be non-empty, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::Param(format!(
                "resolution must be > 0, got {resolution}"
            )));
        }
        if cells.len() != width * height {
            return Err(Error::Param(format!(
                "cell count {} does not match {width}x{height}",
                cells.len()
            )));
        }
        let known = cells.iter().filter(|c| c.is_known()).count();
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            cells,
            lineage: NEXT_LINEAGE.fetch_add(1, Ordering::Relaxed),
            revision: 0,
            occ_revision: 0,
            known,
            unknown_rows: OnceLock::new(),
            free_rows: OnceLock::new(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    /// Incremented on every cell change.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// Incremented only when the set of Occupied cells changes.
    pub fn occupancy_revision(&self) -> u64 {
        self.occ_revision
    }

    pub(crate) fn lineage(&self) -> u64 {
        self.lineage
    }

    /// World-space extent of the raster.
    pub fn bounds(&self) -> (Point, Point) {
        (
            self.origin,
            Point::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        )
    }

    pub fn bounding_rect(&self) -> Boundary {
        let (min, max) = self.bounds();
        Boundary::Rect { min, max }
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    /// Integer cell coordinates of the cell containing `p`, possibly out of range.
    #[inline]
    pub fn cell_coords(&self, p: Point) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    #[inline]
    pub fn in_bounds(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.width && (iy as usize) < self.height
    }

    /// Cell containing `p`, or `None` outside the raster.
    #[inline]
    pub fn world_to_cell(&self, p: Point) -> Option<(usize, usize)> {
        let (ix, iy) = self.cell_coords(p);
        self.in_bounds(ix, iy).then_some((ix as usize, iy as usize))
    }

    #[inline]
    pub fn cell_center(&self, ix: i64, iy: i64) -> Point {
        Point::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> CellState {
        self.cells[self.index(ix, iy)]
    }

    /// State of signed cell coordinates; out of range is Unknown.
    #[inline]
    pub fn get_signed(&self, ix: i64, iy: i64) -> CellState {
        if self.in_bounds(ix, iy) {
            self.get(ix as usize, iy as usize)
        } else {
            CellState::Unknown
        }
    }

    /// State of the cell containing `p`; out of range is Unknown.
    #[inline]
    pub fn state_at(&self, p: Point) -> CellState {
        let (ix, iy) = self.cell_coords(p);
        self.get_signed(ix, iy)
    }

    /// Sets one cell, returning the previous state.
    pub fn set(&mut self, ix: usize, iy: usize, state: CellState) -> CellState {
        let i = self.index(ix, iy);
        let old = self.cells[i];
        if old == state {
            return old;
        }
        self.cells[i] = state;
        self.revision += 1;
        if (old == CellState::Occupied) != (state == CellState::Occupied) {
            self.occ_revision += 1;
        }
        match (old.is_known(), state.is_known()) {
            (false, true) => self.known += 1,
            (true, false) => self.known -= 1,
            _ => {}
        }
        self.unknown_rows = OnceLock::new();
        self.free_rows = OnceLock::new();
        old
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }

    pub fn known_cells(&self) -> usize {
        self.known
    }

    /// Area of Free plus Occupied cells, m².
    pub fn known_area(&self) -> f64 {
        self.known as f64 * self.resolution * self.resolution
    }

    fn row_prefix(&self, state: CellState) -> &[u32] {
        let lock = match state {
            CellState::Unknown => &self.unknown_rows,
            CellState::Free => &self.free_rows,
            CellState::Occupied => unreachable!("no occupied prefix table"),
        };
        lock.get_or_init(|| {
            let w1 = self.width + 1;
            let mut pre = vec![0u32; self.height * w1];
            for iy in 0..self.height {
                let mut acc = 0u32;
                for ix in 0..self.width {
                    if self.get(ix, iy) == state {
                        acc += 1;
                    }
                    pre[iy * w1 + ix + 1] = acc;
                }
            }
            pre
        })
    }

    /// Counts lattice cells whose centers lie in the disc: (all cells, in-bounds
    /// cells, in-bounds cells in `state`).
    fn disc_counts(&self, center: Point, radius: f64, state: CellState) -> (u64, u64, u64) {
        let r = self.resolution;
        let r2 = radius * radius;
        let pre = self.row_prefix(state);
        let w1 = self.width + 1;
        let inside = |ix: i64, iy: i64| self.cell_center(ix, iy).dist_sq(center) <= r2;
        let iy_lo = ((center.y - radius - self.origin.y) / r - 0.5).floor() as i64 - 1;
        let iy_hi = ((center.y + radius - self.origin.y) / r - 0.5).ceil() as i64 + 1;
        let (mut total, mut in_bounds, mut hits) = (0u64, 0u64, 0u64);
        for iy in iy_lo..=iy_hi {
            let dy = self.cell_center(0, iy).y - center.y;
            let rem = r2 - dy * dy;
            if rem < 0.0 {
                continue;
            }
            let half = rem.sqrt();
            // Approximate column range, then fixed up against the exact predicate.
            let mut lo = ((center.x - half - self.origin.x) / r - 0.5).ceil() as i64;
            let mut hi = ((center.x + half - self.origin.x) / r - 0.5).floor() as i64;
            while inside(lo - 1, iy) {
                lo -= 1;
            }
            while lo <= hi && !inside(lo, iy) {
                lo += 1;
            }
            while inside(hi + 1, iy) {
                hi += 1;
            }
            while hi >= lo && !inside(hi, iy) {
                hi -= 1;
            }
            if hi < lo {
                continue;
            }
            total += (hi - lo + 1) as u64;
            if iy < 0 || iy as usize >= self.height {
                continue;
            }
            let clo = lo.max(0);
            let chi = hi.min(self.width as i64 - 1);
            if chi < clo {
                continue;
            }
            in_bounds += (chi - clo + 1) as u64;
            let row = iy as usize * w1;
            hits += (pre[row + chi as usize + 1] - pre[row + clo as usize]) as u64;
        }
        (total, in_bounds, hits)
    }

    /// Area of Unknown cells whose centers lie within `radius` of `center`.
    /// Cells outside the raster count as Unknown.
    /// True when every cell whose center lies closer than `radius` to the center
    /// of the cell containing `p` is known. Cells off the raster count as Unknown.
    pub fn footprint_known(&self, p: Point, radius: f64) -> bool {
        let (cx, cy) = self.cell_coords(p);
        let span = (radius / self.resolution).ceil() as i64;
        for dy in -span..=span {
            for dx in -span..=span {
                let d = (dx as f64).hypot(dy as f64) * self.resolution;
                if d < radius && self.get_signed(cx + dx, cy + dy) == CellState::Unknown {
                    return false;
                }
            }
        }
        true
    }

    pub fn unknown_area_in_disc(&self, center: Point, radius: f64) -> f64 {
        if !(radius > 0.0) {
            return 0.0;
        }
        let (total, in_bounds, unknown) = self.disc_counts(center, radius, CellState::Unknown);
        (total - in_bounds + unknown) as f64 * self.resolution * self.resolution
    }

    /// Area of Free cells whose centers lie inside `b`.
    pub fn free_area_in_boundary(&self, b: &Boundary) -> f64 {
        let n = match *b {
            Boundary::Disc { center, radius } => {
                self.disc_counts(center, radius, CellState::Free).2
            }
            Boundary::Rect { min, max } => {
                let r = self.resolution;
                let pre = self.row_prefix(CellState::Free);
                let w1 = self.width + 1;
                // Cell centers c with min <= c <= max.
                let ix_lo = (((min.x - self.origin.x) / r - 0.5).ceil() as i64).max(0);
                let ix_hi =
                    (((max.x - self.origin.x) / r - 0.5).floor() as i64).min(self.width as i64 - 1);
                let iy_lo = (((min.y - self.origin.y) / r - 0.5).ceil() as i64).max(0);
                let iy_hi = (((max.y - self.origin.y) / r - 0.5).floor() as i64)
                    .min(self.height as i64 - 1);
                let mut n = 0u64;
                if ix_lo <= ix_hi {
                    for iy in iy_lo..=iy_hi {
                        let row = iy as usize * w1;
                        n += (pre[row + ix_hi as usize + 1] - pre[row + ix_lo as usize]) as u64;
                    }
                }
                n
            }
        };
        n as f64 * self.resolution * self.resolution
    }
}

/// Converts a probability raster into a ternary grid. `None` marks unknown cells.
pub fn ternarize(
    probs: &[Option<f64>],
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    free_thresh: f64,
    occ_thresh: f64,
) -> Result<OccupancyGrid> {
    if !(0.0 <= free_thresh && free_thresh < occ_thresh && occ_thresh <= 1.0) {
        return Err(Error::Param(format!(
            "need 0 <= free_thresh < occ_thresh <= 1, got {free_thresh}, {occ_thresh}"
        )));
    }
    let cells = probs
        .iter()
        .map(|p| match *p {
            Some(p) if p < free_thresh => CellState::Free,
            Some(p) if p > occ_thresh => CellState::Occupied,
            _ => CellState::Unknown,
        })
        .collect();
    OccupancyGrid::from_cells(width, height, resolution, origin, cells)
}

pub const DEFAULT_FREE_THRESH: f64 = 0.25;
pub const DEFAULT_OCC_THRESH: f64 = 0.65;

#[cfg(test)]
mod tests;
