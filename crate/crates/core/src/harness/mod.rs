//! Scenario configs, batch execution, metrics and artifact export.

mod batch;
mod config;
mod export;
mod metrics;
mod reference;

pub use batch::{
    recompute_metrics, run_batch, run_scenario, write_metrics, BatchOptions, BatchResult,
};
pub use config::ScenarioConfig;
pub use export::{
    export_snapshot, load_run, render_svg, report_text, timing_text, trajectory_csv, write_run,
    SnapshotLayers,
};
pub use metrics::{
    compute_metrics, finish_rate_series, pooled_std, MetricsBundle, RunSummary, Tallies,
};
pub use reference::{
    reachable_cells, reference_area, reference_cache_path, reference_known_area,
    MAX_REFERENCE_PITCH,
};
