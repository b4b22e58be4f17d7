use super::{CellState, OccupancyGrid};
use crate::geometry::Point;
use crate::{Error, Result};

/// Exact Euclidean distance from each cell center to the nearest Occupied cell
/// center, in meters. Cells of a grid without obstacles hold `f64::INFINITY`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    resolution: f64,
    dist: Vec<f64>,
    lineage: u64,
    occ_revision: u64,
}

impl DistanceField {
    /// Sentinel for "no obstacle anywhere on the grid".
    pub const NO_OBSTACLE: f64 = f64::INFINITY;

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.dist
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.dist[iy * self.width + ix]
    }

    /// True if this field was built from the current occupancy of `grid`.
    pub fn is_current_for(&self, grid: &OccupancyGrid) -> bool {
        self.lineage == grid.lineage()
            && self.occ_revision == grid.occupancy_revision()
            && self.width == grid.width()
            && self.height == grid.height()
    }
}

// Large finite stand-in for +inf inside the 1D transform so parabola
// intersections stay finite.
const FAR: f64 = 1e20;

/// Lower-envelope-of-parabolas squared distance transform of one line.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let inter = |q: usize, p: usize| {
        let (qf, pf) = (q as f64, p as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
    };
    for q in 1..n {
        let mut s = inter(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = inter(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Rebuilds the exact distance field of `grid`.
pub fn rebuild_distance_field(grid: &OccupancyGrid) -> DistanceField {
    let (w, h) = (grid.width(), grid.height());
    let any_occ = grid.cells().contains(&CellState::Occupied);
    let dist = if !any_occ {
        vec![DistanceField::NO_OBSTACLE; w * h]
    } else {
        let n = w.max(h);
        let mut f = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut v = vec![0usize; n];
        let mut z = vec![0.0; n + 1];
        let mut sq: Vec<f64> = grid
            .cells()
            .iter()
            .map(|&c| if c == CellState::Occupied { 0.0 } else { FAR })
            .collect();
        for ix in 0..w {
            for iy in 0..h {
                f[iy] = sq[iy * w + ix];
            }
            edt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
            for iy in 0..h {
                sq[iy * w + ix] = out[iy];
            }
        }
        for iy in 0..h {
            f[..w].copy_from_slice(&sq[iy * w..(iy + 1) * w]);
            edt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
            sq[iy * w..(iy + 1) * w].copy_from_slice(&out[..w]);
        }
        let r = grid.resolution();
        sq.into_iter().map(|d2| d2.sqrt() * r).collect()
    };
    DistanceField {
        width: w,
        height: h,
        resolution: grid.resolution(),
        dist,
        lineage: grid.lineage(),
        occ_revision: grid.occupancy_revision(),
    }
}

/// Distance-field value of the cell containing `p`; `+inf` outside the grid.
pub fn min_dist_to_obstacle(p: Point, grid: &OccupancyGrid, field: &DistanceField) -> Result<f64> {
    if !field.is_current_for(grid) {
        return Err(Error::Consistency(format!(
            "distance field built for occupancy revision {}, grid is at {}",
            field.occ_revision,
            grid.occupancy_revision()
        )));
    }
    Ok(match grid.world_to_cell(p) {
        Some((ix, iy)) => field.at(ix, iy),
        None => DistanceField::NO_OBSTACLE,
    })
}
