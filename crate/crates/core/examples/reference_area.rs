//! Exhaustive-coverage reference area for every bundled map.

use explora::harness::{reference_area, ScenarioConfig};
use explora::scenarios::{bundled_dir, BUNDLED_NAMES};

fn main() -> explora::Result<()> {
    for name in BUNDLED_NAMES {
        let cfg = ScenarioConfig::load(&bundled_dir().join(format!("{name}.cfg")))?;
        let truth = cfg.load_truth()?;
        let free = truth.count(explora::CellState::Free) as f64 * truth.resolution().powi(2);
        let area = reference_area(&cfg)?;
        println!("{name:>12}: reference {area:8.3} m^2 ({free:8.3} m^2 free in the raster)");
    }
    Ok(())
}
