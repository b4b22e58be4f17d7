use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use explora::grid::{read_map, MapSnapshot};
use explora::harness::{
    recompute_metrics, reference_area, reference_cache_path, run_batch, write_metrics,
    BatchOptions, MetricsBundle, ScenarioConfig,
};
use explora::polyline::{plan_polyline, Backend, PolylineParams};
use explora::{Error, Point, Result};

#[derive(Parser)]
#[command(
    name = "explora",
    version,
    about = "Autonomous 2D exploration simulator and planners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output root; artifacts go to `<out>/<scenario name>/`.
    #[arg(long, env = "EXPLORA_OUT", default_value = "explora-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of seeded exploration missions.
    Explore {
        #[arg(long)]
        config: PathBuf,
        /// Number of runs; defaults to the config's `runs`.
        #[arg(long)]
        runs: Option<usize>,
        /// First seed; defaults to the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Lidar field of view in degrees.
        #[arg(long)]
        fov: Option<f64>,
        #[arg(long)]
        backend: Option<Backend>,
        #[command(flatten)]
        out: OutArgs,
        /// Run missions one at a time on a single thread.
        #[arg(long)]
        deterministic: bool,
    },
    /// Plan one polyline on a fully known map and print its junctions.
    PlanPolyline {
        /// Scenario config supplying map, start and planner parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// PGM map (overrides the config's map).
        #[arg(long)]
        map: Option<PathBuf>,
        /// Start as `x,y` (defaults to the config's start).
        #[arg(long, value_parser = parse_point)]
        from: Option<Point>,
        /// Goal as `x,y`.
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        k_rot: Option<f64>,
        #[arg(long)]
        k_uni: Option<f64>,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long, default_value_t = 0.24)]
        r_robot: f64,
    },
    /// Compute (or read from cache) the reference known area of a scenario.
    Reference {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute batch metrics from stored run reports.
    Metrics {
        /// Batch directory; defaults to `<out>/<scenario name>` from `--config`.
        dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got `{s}`"))?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in `{s}`"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in `{s}`"))?;
    Ok(Point::new(x, y))
}

fn print_metrics(m: &MetricsBundle) {
    let t = &m.tallies;
    println!(
        "tallies FIN={} CO={} OS={} TO={} ERR={}",
        t.finished, t.collision, t.stall, t.timeout, t.failed
    );
    let finals = m.final_finish_rates();
    if !finals.is_empty() {
        let min = finals.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        println!(
            "finish_rate mean={mean:.4} min={min:.4} (reference {:.3} m^2)",
            m.reference_area
        );
    }
    match m.s_p {
        Some(v) => println!("s_p={v:.4} m"),
        None => println!("s_p=none"),
    }
    println!(
        "phi_avg_sum={:.3} rad (junction only {:.3} rad)",
        m.phi_avg_sum, m.phi_avg_junction
    );
    if let Some(t) = m.t_calc_avg {
        println!("t_calc_avg={:.6} s", t);
    }
}

fn explore(
    config: &Path,
    runs: Option<usize>,
    seed: Option<u64>,
    fov: Option<f64>,
    backend: Option<Backend>,
    out: &Path,
    deterministic: bool,
) -> Result<bool> {
    let mut cfg = ScenarioConfig::load(config)?;
    if let Some(f) = fov {
        cfg = cfg.with_fov(f)?;
    }
    if let Some(b) = backend {
        cfg = cfg.with_backend(b);
    }
    let truth = cfg.load_truth()?;
    let reference = reference_area(&cfg)?;
    let dir = out.join(&cfg.name);
    let opts = BatchOptions {
        runs: runs.unwrap_or(cfg.runs),
        seed_base: seed.unwrap_or(cfg.seed),
        out_dir: Some(dir.clone()),
        sequential: deterministic,
    };
    if opts.runs == 0 {
        return Err(Error::Input("--runs must be >= 1".into()));
    }
    let batch = run_batch(&cfg, &truth, reference, &opts)?;
    for r in &batch.reports {
        println!(
            "run {} {} t={:.1}s known={:.2} m^2",
            r.seed,
            r.outcome,
            r.total_time,
            r.known_area()
        );
    }
    for (seed, msg) in &batch.failures {
        eprintln!("run {seed} failed: {msg}");
    }
    print_metrics(&batch.metrics);
    println!("artifacts in {}", dir.display());
    Ok(batch.all_finished())
}

#[allow(clippy::too_many_arguments)]
fn plan(
    config: Option<&Path>,
    map: Option<&Path>,
    from: Option<Point>,
    to: Point,
    d: Option<f64>,
    k_rot: Option<f64>,
    k_uni: Option<f64>,
    backend: Option<Backend>,
    r_robot: f64,
) -> Result<bool> {
    let cfg = config.map(ScenarioConfig::load).transpose()?;
    let map_path = map
        .map(Path::to_path_buf)
        .or_else(|| cfg.as_ref().map(|c| c.map_path.clone()))
        .ok_or_else(|| Error::Input("plan-polyline needs --map or --config".into()))?;
    let start = from
        .or_else(|| cfg.as_ref().map(|c| c.start.position))
        .ok_or_else(|| Error::Input("plan-polyline needs --from or --config".into()))?;
    let mut params = cfg
        .as_ref()
        .map(|c| c.mission.planner)
        .unwrap_or_else(PolylineParams::default);
    let r_robot = cfg.as_ref().map_or(r_robot, |c| c.mission.robot.r_robot);
    params.d = d.unwrap_or(params.d);
    params.k_rot = k_rot.unwrap_or(params.k_rot);
    params.k_uni = k_uni.unwrap_or(params.k_uni);
    params.backend = backend.unwrap_or(params.backend);
    params.validate()?;

    let (grid, _) = read_map(&map_path)?;
    let snap = MapSnapshot::new(grid);
    let t0 = Instant::now();
    let path = plan_polyline(start, to, &snap, &params, r_robot)?;
    let t_calc = t0.elapsed().as_secs_f64();
    let Some(path) = path else {
        println!("no path from {start} to {to}");
        return Ok(false);
    };
    for j in &path.junctions {
        println!("{} {}", j.x, j.y);
    }
    println!(
        "# backend={} segments={} score={:.6} segment_std={:.6} cumulative_rotation={:.6} t_calc={:.6}",
        params.backend,
        path.segment_count(),
        path.total_score(&params),
        path.length_std(),
        path.cumulative_rotation(),
        t_calc
    );
    Ok(true)
}

fn reference(config: &Path) -> Result<bool> {
    let cfg = ScenarioConfig::load(config)?;
    let area = reference_area(&cfg)?;
    println!("reference_area = {area}");
    println!("cache = {}", reference_cache_path(&cfg.map_path).display());
    Ok(true)
}

fn metrics(dir: Option<&Path>, config: Option<&Path>, out: &Path) -> Result<bool> {
    let cfg = config.map(ScenarioConfig::load).transpose()?;
    let dir = match (dir, &cfg) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(c)) => out.join(&c.name),
        (None, None) => {
            return Err(Error::Input(
                "metrics needs a batch directory or --config".into(),
            ))
        }
    };
    let reference = cfg.as_ref().map(reference_area).transpose()?;
    let (runs, m) = recompute_metrics(&dir, reference)?;
    let name = cfg.as_ref().map_or_else(
        || {
            dir.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        },
        |c| c.name.clone(),
    );
    write_metrics(&dir, &name, &runs, &m, &[])?;
    print_metrics(&m);
    Ok(m.tallies.all_finished())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Explore {
            config,
            runs,
            seed,
            fov,
            backend,
            out,
            deterministic,
        } => explore(
            config,
            *runs,
            *seed,
            *fov,
            *backend,
            &out.out,
            *deterministic,
        ),
        Command::PlanPolyline {
            config,
            map,
            from,
            to,
            d,
            k_rot,
            k_uni,
            backend,
            r_robot,
        } => plan(
            config.as_deref(),
            map.as_deref(),
            *from,
            *to,
            *d,
            *k_rot,
            *k_uni,
            *backend,
            *r_robot,
        ),
        Command::Reference { config } => reference(config),
        Command::Metrics { dir, config, out } => {
            metrics(dir.as_deref(), config.as_deref(), &out.out)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
