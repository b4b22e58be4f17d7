//! Runs one full exploration mission and writes its artifacts.
//!
//! ```text
//! cargo run --release --example explore_mission [-- <map name> <seed>]
//! ```

use std::path::PathBuf;

use explora::controller::{run_mission, MissionConfig};
use explora::harness::{reference_area, write_run, ScenarioConfig};
use explora::scenarios::bundled_dir;

fn main() -> explora::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "office".into());
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let cfg = ScenarioConfig::load(&bundled_dir().join(format!("{name}.cfg")))?;
    let mission: MissionConfig = cfg.mission.clone();
    let report = run_mission(cfg.load_truth()?, cfg.start, &mission, seed)?;
    let reference = reference_area(&cfg)?;

    println!(
        "outcome {} after {:.1} s simulated",
        report.outcome, report.total_time
    );
    println!(
        "distance {:.1} m, rotation {:.1} rad, {} replans",
        report.distance, report.cumulative_rotation, report.replans
    );
    println!(
        "known {:.1} of {:.1} m^2 reference",
        report.known_area(),
        reference
    );

    let out = PathBuf::from(std::env::var("EXPLORA_OUT").unwrap_or_else(|_| "explora-out".into()))
        .join("examples")
        .join(format!("{name}_seed{seed}"));
    write_run(&report, reference, &out)?;
    println!("artifacts in {}", out.display());
    Ok(())
}
