use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::export::{load_run, write_run};
use super::metrics::{compute_metrics, MetricsBundle, RunSummary};
use super::reference::reference_area;
use super::ScenarioConfig;
use crate::controller::{run_mission, MissionReport};
use crate::grid::OccupancyGrid;
use crate::polyline::sample_std;
use crate::sim::map_extension_rate;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BatchOptions {
    pub runs: usize,
    pub seed_base: u64,
    /// Where to write artifacts; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    /// Run missions one after another instead of on the rayon pool.
    pub sequential: bool,
}

#[derive(Debug)]
pub struct BatchResult {
    pub reports: Vec<MissionReport>,
    /// Seeds whose run returned an error, with the message.
    pub failures: Vec<(u64, String)>,
    pub metrics: MetricsBundle,
}

impl BatchResult {
    /// True iff every run reached Finished.
    pub fn all_finished(&self) -> bool {
        self.metrics.tallies.all_finished()
    }
}

/// Runs seeds `seed_base .. seed_base + runs` against an already loaded map.
pub fn run_batch(
    cfg: &ScenarioConfig,
    truth: &OccupancyGrid,
    reference: f64,
    opts: &BatchOptions,
) -> Result<BatchResult> {
    let seeds: Vec<u64> = (0..opts.runs as u64).map(|i| opts.seed_base + i).collect();
    let one = |seed: u64| {
        (
            seed,
            run_mission(truth.clone(), cfg.start, &cfg.mission, seed),
        )
    };
    let results: Vec<_> = if opts.sequential {
        seeds.iter().map(|&s| one(s)).collect()
    } else {
        seeds.par_iter().map(|&s| one(s)).collect()
    };

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (seed, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => failures.push((seed, e.to_string())),
        }
    }
    let summaries: Vec<RunSummary> = reports.iter().map(RunSummary::from).collect();
    let mut metrics = compute_metrics(&summaries, reference)?;
    metrics.tallies.failed = failures.len();

    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir)?;
        for r in &reports {
            write_run(r, reference, &dir.join(format!("run_{}", r.seed)))?;
        }
        write_metrics(dir, &cfg.name, &summaries, &metrics, &failures)?;
    }
    Ok(BatchResult {
        reports,
        failures,
        metrics,
    })
}

/// Loads the config, its truth map and reference area, then runs the batch.
pub fn run_scenario(
    config: &Path,
    runs: usize,
    seed_base: u64,
    out_dir: Option<&Path>,
) -> Result<BatchResult> {
    let cfg = ScenarioConfig::load(config)?;
    let truth = cfg.load_truth()?;
    let reference = reference_area(&cfg)?;
    let opts = BatchOptions {
        runs,
        seed_base,
        out_dir: out_dir.map(Path::to_path_buf),
        sequential: false,
    };
    run_batch(&cfg, &truth, reference, &opts)
}

/// Writes `metrics.csv` (one row per run) and `summary.txt` (batch aggregates).
pub fn write_metrics(
    dir: &Path,
    name: &str,
    runs: &[RunSummary],
    m: &MetricsBundle,
    failures: &[(u64, String)],
) -> Result<()> {
    let mut csv = String::from(
        "seed,outcome,total_time,final_finish_rate,segment_count,segment_std,cumulative_rotation,junction_rotation,rotation_rate,straight_rate\n",
    );
    let finals = m.final_finish_rates();
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
    for (r, fr) in runs.iter().zip(finals) {
        let (rot, st) = map_extension_rate(&r.extension);
        let std = (r.segments.len() >= 2).then(|| sample_std(&r.segments));
        let _ = writeln!(
            csv,
            "{},{},{:.3},{:.6},{},{},{:.6},{:.6},{},{}",
            r.seed,
            r.outcome,
            r.total_time,
            fr,
            r.segments.len(),
            opt(std),
            r.cumulative_rotation,
            r.junction_rotation,
            opt(rot),
            opt(st)
        );
    }
    fs::write(dir.join("metrics.csv"), csv)?;

    let t = &m.tallies;
    let mut s = String::new();
    let _ = writeln!(s, "scenario = {name}");
    let _ = writeln!(s, "runs = {}", t.total());
    let _ = writeln!(s, "finished = {}", t.finished);
    let _ = writeln!(s, "collision = {}", t.collision);
    let _ = writeln!(s, "stall = {}", t.stall);
    let _ = writeln!(s, "timeout = {}", t.timeout);
    let _ = writeln!(s, "failed = {}", t.failed);
    let _ = writeln!(s, "reference_area = {}", m.reference_area);
    let _ = writeln!(
        s,
        "s_p = {}",
        m.s_p.map_or("none".into(), |v| v.to_string())
    );
    let _ = writeln!(s, "phi_avg_sum = {}", m.phi_avg_sum);
    let _ = writeln!(s, "phi_avg_junction = {}", m.phi_avg_junction);
    let _ = writeln!(
        s,
        "t_calc_avg = {}",
        m.t_calc_avg.map_or("none".into(), |v| v.to_string())
    );
    for (seed, msg) in failures {
        let _ = writeln!(s, "# run {seed} failed: {msg}");
    }
    fs::write(dir.join("summary.txt"), s)?;
    Ok(())
}

/// Recomputes batch metrics from a directory written by [`run_batch`].
/// `reference` overrides the reference area stored in `summary.txt`.
pub fn recompute_metrics(
    dir: &Path,
    reference: Option<f64>,
) -> Result<(Vec<RunSummary>, MetricsBundle)> {
    let sp = dir.join("summary.txt");
    let summary = fs::read_to_string(&sp).ok();
    let kv = crate::kv::KvFile::parse(summary.as_deref().unwrap_or(""), &sp)?;
    let reference = match reference {
        Some(r) => r,
        None => kv
            .parse_field::<f64>("reference_area", &sp)?
            .ok_or_else(|| Error::Format {
                path: sp.clone(),
                msg: "no reference_area; pass a config to recompute it".into(),
            })?,
    };
    let mut runs = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let is_run = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("run_"));
        if is_run && path.join("report.txt").is_file() {
            runs.push(load_run(&path)?);
        }
    }
    runs.sort_by_key(|r| r.seed);
    let mut m = compute_metrics(&runs, reference)?;
    m.tallies.failed = kv.parse_field("failed", &sp)?.unwrap_or(0);
    Ok((runs, m))
}
