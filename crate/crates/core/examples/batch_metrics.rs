//! A small seeded batch with aggregate metrics.

use std::path::PathBuf;

use explora::harness::{reference_area, run_batch, BatchOptions, ScenarioConfig};
use explora::scenarios::bundled_dir;

fn main() -> explora::Result<()> {
    let cfg = ScenarioConfig::load(&bundled_dir().join("empty-room.cfg"))?.with_fov(180.0)?;
    let truth = cfg.load_truth()?;
    let reference = reference_area(&cfg)?;
    let out = PathBuf::from(std::env::var("EXPLORA_OUT").unwrap_or_else(|_| "explora-out".into()))
        .join("examples")
        .join("batch_metrics");
    let opts = BatchOptions {
        runs: 4,
        seed_base: 1,
        out_dir: Some(out.clone()),
        sequential: false,
    };
    let batch = run_batch(&cfg, &truth, reference, &opts)?;

    let m = &batch.metrics;
    let t = &m.tallies;
    println!(
        "finished {} collision {} stall {} timeout {} failed {}",
        t.finished, t.collision, t.stall, t.timeout, t.failed
    );
    for (seed, rate) in m
        .finish_rate
        .iter()
        .map(|(s, series)| (s, series.last().map_or(0.0, |p| p.1)))
    {
        println!("seed {seed}: final finish rate {rate:.4}");
    }
    println!("pooled segment std: {:?}", m.s_p);
    println!(
        "mean rotation per run: {:.3} rad (junctions {:.3} rad)",
        m.phi_avg_sum, m.phi_avg_junction
    );
    println!("mean planner time: {:?} s", m.t_calc_avg);
    println!("metrics.csv and summary.txt in {}", out.display());
    Ok(())
}
