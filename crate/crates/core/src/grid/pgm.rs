//! PGM (P5 binary / P2 ASCII) maps with a `key = value` sidecar header.
//!
//! The sidecar lives next to the image with the extension replaced by `.hdr`
//! and carries the resolution, the world origin of cell (0, 0) and the
//! gray-level thresholds. The top image row is the highest-y grid row.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{CellState, OccupancyGrid};
use crate::geometry::Point;
use crate::kv::KvFile;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    /// Binary, `P5`.
    Binary,
    /// ASCII, `P2`.
    Ascii,
}

/// Gray level ↔ cell state mapping. Levels `0..=occupied_max` read as
/// Occupied, `free_min..=255` as Free, everything between as Unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrayLevels {
    pub occupied_max: u8,
    pub free_min: u8,
    /// Level written for Unknown cells.
    pub unknown_level: u8,
}

impl Default for GrayLevels {
    fn default() -> Self {
        Self {
            occupied_max: 63,
            free_min: 192,
            unknown_level: 128,
        }
    }
}

impl GrayLevels {
    pub fn classify(&self, g: u8) -> CellState {
        if g <= self.occupied_max {
            CellState::Occupied
        } else if g >= self.free_min {
            CellState::Free
        } else {
            CellState::Unknown
        }
    }

    pub fn level(&self, s: CellState) -> u8 {
        match s {
            CellState::Occupied => 0,
            CellState::Free => 255,
            CellState::Unknown => self.unknown_level,
        }
    }

    fn validate(&self, path: &Path) -> Result<()> {
        let ok = self.occupied_max < self.unknown_level && self.unknown_level < self.free_min;
        if ok {
            Ok(())
        } else {
            Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!(
                    "gray levels need occupied_max < unknown_level < free_min, got {self:?}"
                ),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapMeta {
    pub format: PgmFormat,
    pub levels: GrayLevels,
}

impl Default for MapMeta {
    fn default() -> Self {
        Self {
            format: PgmFormat::Binary,
            levels: GrayLevels::default(),
        }
    }
}

pub fn header_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("hdr")
}

fn fmt_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Reads `path` and its sidecar header.
pub fn read_map(path: &Path) -> Result<(OccupancyGrid, MapMeta)> {
    let hdr_path = header_path(path);
    let hdr = KvFile::parse(&fs::read_to_string(&hdr_path)?, &hdr_path)?;
    let resolution: f64 = hdr
        .parse_field("resolution", &hdr_path)?
        .ok_or_else(|| fmt_err(&hdr_path, "missing `resolution`"))?;
    let ox: f64 = hdr.parse_field("origin_x", &hdr_path)?.unwrap_or(0.0);
    let oy: f64 = hdr.parse_field("origin_y", &hdr_path)?.unwrap_or(0.0);
    let d = GrayLevels::default();
    let levels = GrayLevels {
        occupied_max: hdr
            .parse_field("occupied_max", &hdr_path)?
            .unwrap_or(d.occupied_max),
        free_min: hdr
            .parse_field("free_min", &hdr_path)?
            .unwrap_or(d.free_min),
        unknown_level: hdr
            .parse_field("unknown_level", &hdr_path)?
            .unwrap_or(d.unknown_level),
    };
    levels.validate(&hdr_path)?;

    let bytes = fs::read(path)?;
    let (format, w, h, pixels) = parse_pgm(&bytes, path)?;
    let mut cells = vec![CellState::Unknown; w * h];
    for row in 0..h {
        let iy = h - 1 - row;
        for ix in 0..w {
            cells[iy * w + ix] = levels.classify(pixels[row * w + ix]);
        }
    }
    let grid = OccupancyGrid::from_cells(w, h, resolution, Point::new(ox, oy), cells)?;
    Ok((grid, MapMeta { format, levels }))
}

fn parse_pgm(bytes: &[u8], path: &Path) -> Result<(PgmFormat, usize, usize, Vec<u8>)> {
    let format = match bytes.get(..2) {
        Some(b"P5") => PgmFormat::Binary,
        Some(b"P2") => PgmFormat::Ascii,
        _ => return Err(fmt_err(path, "not a P5/P2 PGM")),
    };
    let mut pos = 2;
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        *slot =
            next_number(bytes, &mut pos).ok_or_else(|| fmt_err(path, "truncated PGM header"))?;
    }
    let [w, h, maxval] = header;
    if w == 0 || h == 0 {
        return Err(fmt_err(path, "empty PGM"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(fmt_err(path, format!("unsupported maxval {maxval}")));
    }
    let n = w * h;
    let pixels = match format {
        PgmFormat::Binary => {
            // Exactly one whitespace byte separates the header from the raster.
            pos += 1;
            let data = bytes
                .get(pos..pos + n)
                .ok_or_else(|| fmt_err(path, "truncated raster"))?;
            data.to_vec()
        }
        PgmFormat::Ascii => {
            let mut px = Vec::with_capacity(n);
            for _ in 0..n {
                let v = next_number(bytes, &mut pos)
                    .ok_or_else(|| fmt_err(path, "truncated raster"))?;
                px.push(v.min(255) as u8);
            }
            px
        }
    };
    // Rescale to 0..=255 when maxval differs.
    let pixels = if maxval == 255 {
        pixels
    } else {
        pixels
            .into_iter()
            .map(|p| ((p as usize * 255) / maxval) as u8)
            .collect()
    };
    Ok((format, w, h, pixels))
}

fn next_number(bytes: &[u8], pos: &mut usize) -> Option<usize> {
    loop {
        match bytes.get(*pos)? {
            b'#' => {
                while *bytes.get(*pos)? != b'\n' {
                    *pos += 1;
                }
            }
            c if c.is_ascii_whitespace() => *pos += 1,
            _ => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos]).ok()?.parse().ok()
}

/// Encodes the grid as PGM bytes.
pub fn encode_pgm(grid: &OccupancyGrid, meta: &MapMeta) -> Vec<u8> {
    let (w, h) = (grid.width(), grid.height());
    let level = |ix: usize, row: usize| meta.levels.level(grid.get(ix, h - 1 - row));
    match meta.format {
        PgmFormat::Binary => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.reserve(w * h);
            for row in 0..h {
                out.extend((0..w).map(|ix| level(ix, row)));
            }
            out
        }
        PgmFormat::Ascii => {
            let mut s = format!("P2\n{w} {h}\n255\n");
            for row in 0..h {
                for ix in 0..w {
                    if ix > 0 {
                        s.push(' ');
                    }
                    let _ = write!(s, "{}", level(ix, row));
                }
                s.push('\n');
            }
            s.into_bytes()
        }
    }
}

pub fn encode_header(grid: &OccupancyGrid, meta: &MapMeta) -> String {
    let o = grid.origin();
    format!(
        "# occupancy map header\nresolution = {}\norigin_x = {}\norigin_y = {}\noccupied_max = {}\nfree_min = {}\nunknown_level = {}\n",
        grid.resolution(),
        o.x,
        o.y,
        meta.levels.occupied_max,
        meta.levels.free_min,
        meta.levels.unknown_level
    )
}

/// Writes `path` and its sidecar header.
pub fn write_map(path: &Path, grid: &OccupancyGrid, meta: &MapMeta) -> Result<()> {
    meta.levels.validate(path)?;
    fs::write(path, encode_pgm(grid, meta))?;
    fs::write(header_path(path), encode_header(grid, meta))?;
    Ok(())
}
