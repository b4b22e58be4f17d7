use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::metrics::RunSummary;
use crate::controller::{MissionOutcome, MissionReport};
use crate::geometry::Point;
use crate::grid::{write_map, CellState, MapMeta, OccupancyGrid};
use crate::kv::KvFile;
use crate::rrt::RrtTree;
use crate::sim::{map_extension_rate, ExtensionLog};
use crate::{Error, Result};

const PX_PER_M: f64 = 20.0;

/// Everything drawn in an overlay.
pub struct SnapshotLayers<'a> {
    pub belief: &'a OccupancyGrid,
    pub trajectory: &'a [Point],
    pub tree: &'a RrtTree,
    pub frontiers: &'a [Point],
    pub start: Point,
    pub goal: Point,
}

/// Writes `map.pgm` (with its `.hdr` sidecar) and `overlay.svg` into `dir`.
pub fn export_snapshot(layers: &SnapshotLayers<'_>, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_map(&dir.join("map.pgm"), layers.belief, &MapMeta::default())?;
    fs::write(dir.join("overlay.svg"), render_svg(layers))?;
    Ok(())
}

/// SVG 1.1 overlay. Output depends only on the inputs.
pub fn render_svg(l: &SnapshotLayers<'_>) -> String {
    let g = l.belief;
    let (lo, hi) = g.bounds();
    let w = (hi.x - lo.x) * PX_PER_M;
    let h = (hi.y - lo.y) * PX_PER_M;
    let sx = |p: Point| (p.x - lo.x) * PX_PER_M;
    let sy = |p: Point| (hi.y - p.y) * PX_PER_M;
    let cell = g.resolution() * PX_PER_M;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{w:.1}" height="{h:.1}" fill="#ffffff"/>"##
    );
    for (state, color) in [
        (CellState::Unknown, "#b0b0b0"),
        (CellState::Occupied, "#202020"),
    ] {
        let _ = writeln!(s, r#"<g fill="{color}">"#);
        for iy in 0..g.height() {
            let mut ix = 0;
            while ix < g.width() {
                if g.get(ix, iy) != state {
                    ix += 1;
                    continue;
                }
                let run0 = ix;
                while ix < g.width() && g.get(ix, iy) == state {
                    ix += 1;
                }
                let x = run0 as f64 * cell;
                let y = (g.height() - 1 - iy) as f64 * cell;
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{cell:.2}"/>"#,
                    (ix - run0) as f64 * cell
                );
            }
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(
        s,
        r##"<g stroke="#3a7bd5" stroke-width="0.6" fill="none">"##
    );
    for (parent, child) in l.tree.edges() {
        let (a, b) = (parent.position, child.position);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            sx(a),
            sy(a),
            sx(b),
            sy(b)
        );
    }
    let _ = writeln!(s, "</g>");
    if !l.trajectory.is_empty() {
        let mut pts = String::new();
        for p in l.trajectory {
            let _ = write!(pts, "{:.2},{:.2} ", sx(*p), sy(*p));
        }
        let _ = writeln!(
            s,
            r##"<polyline points="{}" stroke="#d53a3a" stroke-width="2" fill="none"/>"##,
            pts.trim_end()
        );
    }
    let _ = writeln!(s, r##"<g fill="#e0a000">"##);
    for f in l.frontiers {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#,
            sx(*f),
            sy(*f)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r##"<circle cx="{:.2}" cy="{:.2}" r="6" fill="#20a040"/>"##,
        sx(l.start),
        sy(l.start)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="#8020c0"/>"##,
        sx(l.goal) - 5.0,
        sy(l.goal) - 5.0
    );
    s.push_str("</svg>\n");
    s
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Deterministic plain-text report. Wall-clock time is deliberately absent.
pub fn report_text(r: &MissionReport) -> String {
    let e = &r.extension;
    let (rot, st) = map_extension_rate(e);
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
    let mut s = String::new();
    let _ = writeln!(s, "seed = {}", r.seed);
    let _ = writeln!(s, "outcome = {}", r.outcome);
    let _ = writeln!(s, "total_time = {}", r.total_time);
    let _ = writeln!(s, "distance = {}", r.distance);
    let _ = writeln!(s, "cumulative_rotation = {}", r.cumulative_rotation);
    let _ = writeln!(s, "junction_rotation = {}", r.junction_rotation);
    let _ = writeln!(s, "replans = {}", r.replans);
    let _ = writeln!(s, "plan_queries = {}", r.plan_queries);
    let _ = writeln!(s, "known_area = {}", r.known_area());
    let _ = writeln!(s, "start = {} {}", r.start.x, r.start.y);
    let _ = writeln!(
        s,
        "final_position = {} {}",
        r.final_position.x, r.final_position.y
    );
    let _ = writeln!(s, "visited_junctions = {}", r.visited.len());
    let _ = writeln!(s, "rotation_time = {}", e.rotation_time);
    let _ = writeln!(s, "rotation_area = {}", e.rotation_area);
    let _ = writeln!(s, "straight_time = {}", e.straight_time);
    let _ = writeln!(s, "straight_area = {}", e.straight_area);
    let _ = writeln!(s, "rotation_rate = {}", opt(rot));
    let _ = writeln!(s, "straight_rate = {}", opt(st));
    let _ = writeln!(s, "segment_count = {}", r.segments.len());
    let _ = writeln!(s, "segments = {}", join(&r.segments));
    s
}

/// `t,x,y,theta,mode,known_area,finish_rate`, one row per simulation tick.
pub fn trajectory_csv(r: &MissionReport, reference_area: f64) -> String {
    let mut s = String::from("t,x,y,theta,mode,known_area,finish_rate\n");
    for p in &r.trajectory {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.t,
            p.pose.position.x,
            p.pose.position.y,
            p.pose.theta,
            p.mode,
            p.known_area,
            (p.known_area / reference_area).min(1.0)
        );
    }
    s
}

pub fn timing_text(r: &MissionReport) -> String {
    format!(
        "mission_secs = {}\nplanner_secs = {}\n",
        r.timing.mission_secs,
        join(&r.timing.planner_secs)
    )
}

/// Writes one run's directory: report, event log, trajectory, timing, map and overlay.
pub fn write_run(r: &MissionReport, reference_area: f64, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.txt"), report_text(r))?;
    fs::write(dir.join("events.log"), r.event_log())?;
    fs::write(
        dir.join("trajectory.csv"),
        trajectory_csv(r, reference_area),
    )?;
    fs::write(dir.join("timing.txt"), timing_text(r))?;
    let traj: Vec<Point> = r.trajectory.iter().map(|s| s.pose.position).collect();
    let frontiers: Vec<Point> = r.global_frontiers.iter().map(|f| f.position).collect();
    export_snapshot(
        &SnapshotLayers {
            belief: &r.belief,
            trajectory: &traj,
            tree: &r.global_tree,
            frontiers: &frontiers,
            start: r.start,
            goal: r.final_position,
        },
        dir,
    )
}

fn field<T: std::str::FromStr>(kv: &KvFile, key: &str, path: &Path) -> Result<T> {
    kv.parse_field(key, path)?.ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        msg: format!("missing {key}"),
    })
}

fn list(kv: &KvFile, key: &str, path: &Path) -> Result<Vec<f64>> {
    let text = kv.get(key).unwrap_or("");
    text.split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Format {
            path: path.to_path_buf(),
            msg: format!("bad number list in {key}"),
        })
}

/// Rebuilds a [`RunSummary`] from a directory written by [`write_run`].
pub fn load_run(dir: &Path) -> Result<RunSummary> {
    let rp = dir.join("report.txt");
    let kv = KvFile::parse(&fs::read_to_string(&rp)?, &rp)?;
    let tp = dir.join("timing.txt");
    let timing = KvFile::parse(&fs::read_to_string(&tp).unwrap_or_default(), &tp)?;
    let cp = dir.join("trajectory.csv");
    let csv = fs::read_to_string(&cp)?;
    let mut known_area = Vec::new();
    for (i, line) in csv.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |c: Option<&&str>| c.and_then(|v| v.parse::<f64>().ok());
        match (parse(cols.first()), parse(cols.get(5))) {
            (Some(t), Some(a)) => known_area.push((t, a)),
            _ => {
                return Err(Error::Format {
                    path: cp,
                    msg: format!("line {}: bad row", i + 1),
                })
            }
        }
    }
    let outcome: MissionOutcome = field(&kv, "outcome", &rp)?;
    Ok(RunSummary {
        seed: field(&kv, "seed", &rp)?,
        outcome,
        total_time: field(&kv, "total_time", &rp)?,
        segments: list(&kv, "segments", &rp)?,
        cumulative_rotation: field(&kv, "cumulative_rotation", &rp)?,
        junction_rotation: field(&kv, "junction_rotation", &rp)?,
        known_area,
        planner_secs: list(&timing, "planner_secs", &tp)?,
        extension: ExtensionLog {
            rotation_time: field(&kv, "rotation_time", &rp)?,
            rotation_area: field(&kv, "rotation_area", &rp)?,
            straight_time: field(&kv, "straight_time", &rp)?,
            straight_area: field(&kv, "straight_area", &rp)?,
        },
    })
}
