use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::controller::MissionConfig;
use crate::grid::{read_map, OccupancyGrid};
use crate::kv::KvFile;
use crate::polyline::Backend;
use crate::sim::{LidarConfig, Pose};
use crate::{Error, Result};

const KEYS: &[&str] = &[
    "name",
    "map",
    "start",
    "r_robot",
    "v_max",
    "omega_max",
    "fov",
    "beams",
    "r_sensing",
    "scan_rate",
    "dt",
    "eta_max",
    "theta_cov",
    "theta_fl",
    "downsample_cell",
    "max_samples",
    "d",
    "k_rot",
    "k_uni",
    "backend",
    "max_dense",
    "w_info",
    "w_dir",
    "w_dist",
    "w_free",
    "global_samples",
    "visited_cell",
    "stall_window",
    "time_budget",
    "max_replans",
    "seed",
    "runs",
];

/// One scenario: truth map, start pose, mission parameters and batch defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub map_path: PathBuf,
    pub start: Pose,
    pub mission: MissionConfig,
    pub seed: u64,
    pub runs: usize,
}

impl ScenarioConfig {
    /// Reads and validates a `key = value` scenario file. Relative map paths
    /// resolve against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            field: "(file)".into(),
            msg: e.to_string(),
        })?;
        let cfg = Self::parse(&text, path)?;
        if !cfg.map_path.is_file() {
            return Err(Error::Config {
                path: path.to_path_buf(),
                field: "map".into(),
                msg: format!("{} does not exist", cfg.map_path.display()),
            });
        }
        Ok(cfg)
    }

    /// Parses config text without touching the file system.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let kv = KvFile::parse(text, path)?;
        let field_err = |field: &str, msg: String| Error::Config {
            path: path.to_path_buf(),
            field: field.into(),
            msg,
        };
        for (k, _) in &kv.entries {
            if !KEYS.contains(&k.as_str()) {
                return Err(field_err(k, "unknown key".into()));
            }
        }

        let map = kv
            .get("map")
            .ok_or_else(|| field_err("map", "missing".into()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let map_path = base.join(map);
        let start_text = kv
            .get("start")
            .ok_or_else(|| field_err("start", "missing".into()))?;
        let nums: Vec<f64> = start_text
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| field_err("start", format!("expected `x y theta`, got `{start_text}`")))?;
        let start = match nums[..] {
            [x, y, th] if nums.iter().all(|v| v.is_finite()) => Pose::new(x, y, th),
            _ => {
                return Err(field_err(
                    "start",
                    format!("expected `x y theta`, got `{start_text}`"),
                ))
            }
        };
        let name = kv.get("name").map(str::to_string).unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into())
        });

        let mut m = MissionConfig::default();
        macro_rules! set {
            ($key:literal, $target:expr) => {
                if let Some(v) = kv.parse_field($key, path)? {
                    $target = v;
                }
            };
        }
        set!("r_robot", m.robot.r_robot);
        set!("v_max", m.robot.v_max);
        set!("omega_max", m.robot.omega_max);
        if let Some(fov) = kv.parse_field::<f64>("fov", path)? {
            m.lidar = LidarConfig::with_fov(fov);
        }
        set!("beams", m.lidar.beams);
        set!("r_sensing", m.lidar.r_sensing);
        set!("scan_rate", m.lidar.scan_rate_hz);
        set!("dt", m.dt);
        set!("eta_max", m.search.eta_max);
        set!("theta_cov", m.search.theta_cov);
        set!("theta_fl", m.search.theta_fl);
        set!("downsample_cell", m.search.downsample_cell);
        set!("max_samples", m.search.max_samples);
        set!("d", m.planner.d);
        set!("k_rot", m.planner.k_rot);
        set!("k_uni", m.planner.k_uni);
        set!("backend", m.planner.backend);
        set!("max_dense", m.planner.max_dense);
        set!("w_info", m.weights.w_info);
        set!("w_dir", m.weights.w_dir);
        set!("w_dist", m.weights.w_dist);
        set!("w_free", m.weights.w_free);
        set!("global_samples", m.global_samples);
        set!("visited_cell", m.visited_cell);
        set!("stall_window", m.stall_window);
        set!("max_replans", m.max_replans);
        if let Some(b) = kv.parse_field::<f64>("time_budget", path)? {
            m.time_budget = Some(b);
        }
        m.search.r_robot = m.robot.r_robot;
        let seed = kv.parse_field("seed", path)?.unwrap_or(1);
        let runs = kv.parse_field("runs", path)?.unwrap_or(1);

        let cfg = Self {
            name,
            map_path,
            start,
            mission: m,
            seed,
            runs,
        };
        cfg.validate(path)?;
        Ok(cfg)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        let m = &self.mission;
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let checks: [(&str, bool, &str); 22] = [
            ("r_robot", pos(m.robot.r_robot), "must be > 0"),
            ("v_max", pos(m.robot.v_max), "must be > 0"),
            ("omega_max", pos(m.robot.omega_max), "must be > 0"),
            (
                "fov",
                m.lidar.fov_deg > 0.0 && m.lidar.fov_deg <= 360.0,
                "must be in (0, 360]",
            ),
            ("beams", m.lidar.beams >= 2, "must be >= 2"),
            ("r_sensing", pos(m.lidar.r_sensing), "must be > 0"),
            ("scan_rate", pos(m.lidar.scan_rate_hz), "must be > 0"),
            ("dt", pos(m.dt), "must be > 0"),
            (
                "eta_max",
                m.search.eta_max >= m.robot.r_robot && m.search.eta_max.is_finite(),
                "must be >= r_robot",
            ),
            (
                "theta_cov",
                m.search.theta_cov > 0.0 && m.search.theta_cov <= 1.0,
                "must be in (0, 1]",
            ),
            ("theta_fl", m.search.theta_fl >= 1, "must be >= 1"),
            (
                "downsample_cell",
                pos(m.search.downsample_cell),
                "must be > 0",
            ),
            ("max_samples", m.search.max_samples >= 1, "must be >= 1"),
            ("d", pos(m.planner.d), "must be > 0"),
            (
                "k_rot",
                m.planner.k_rot >= 0.0 && m.planner.k_rot.is_finite(),
                "must be >= 0",
            ),
            (
                "k_uni",
                m.planner.k_uni >= 0.0 && m.planner.k_uni.is_finite(),
                "must be >= 0",
            ),
            ("max_dense", m.planner.max_dense >= 2, "must be >= 2"),
            (
                "w_info",
                m.weights.w_info >= 0.0 && m.weights.w_info.is_finite(),
                "must be >= 0",
            ),
            (
                "w_dir",
                m.weights.w_dir >= 0.0 && m.weights.w_dir.is_finite(),
                "must be >= 0",
            ),
            (
                "w_dist",
                m.weights.w_dist >= 0.0 && m.weights.w_dist.is_finite(),
                "must be >= 0",
            ),
            (
                "w_free",
                m.weights.w_free >= 0.0 && m.weights.w_free.is_finite(),
                "must be >= 0",
            ),
            ("runs", self.runs >= 1, "must be >= 1"),
        ];
        for (field, ok, msg) in checks {
            if !ok {
                return Err(Error::Config {
                    path: path.to_path_buf(),
                    field: field.into(),
                    msg: msg.into(),
                });
            }
        }
        m.validate().map_err(|e| Error::Config {
            path: path.to_path_buf(),
            field: "(parameters)".into(),
            msg: e.to_string(),
        })
    }

    pub fn load_truth(&self) -> Result<OccupancyGrid> {
        Ok(read_map(&self.map_path)?.0)
    }

    pub fn with_fov(mut self, fov: f64) -> Result<Self> {
        let beams = LidarConfig::with_fov(fov).beams;
        self.mission.lidar.fov_deg = fov;
        self.mission.lidar.beams = beams;
        self.mission.lidar.validate()?;
        Ok(self)
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.mission.planner.backend = backend;
        self
    }

    /// Serializes back to config text. `map` is written as given.
    pub fn to_text(&self, map: &str) -> String {
        let m = &self.mission;
        let mut s = String::new();
        let p = self.start.position;
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "map = {map}");
        let _ = writeln!(s, "start = {} {} {}", p.x, p.y, self.start.theta);
        let _ = writeln!(s, "\n# robot");
        let _ = writeln!(
            s,
            "r_robot = {}\nv_max = {}\nomega_max = {}",
            m.robot.r_robot, m.robot.v_max, m.robot.omega_max
        );
        let _ = writeln!(s, "\n# lidar");
        let _ = writeln!(
            s,
            "fov = {}\nbeams = {}\nr_sensing = {}\nscan_rate = {}",
            m.lidar.fov_deg, m.lidar.beams, m.lidar.r_sensing, m.lidar.scan_rate_hz
        );
        let _ = writeln!(s, "\n# frontier search");
        let _ = writeln!(
            s,
            "eta_max = {}\ntheta_cov = {}\ntheta_fl = {}\ndownsample_cell = {}\nmax_samples = {}",
            m.search.eta_max,
            m.search.theta_cov,
            m.search.theta_fl,
            m.search.downsample_cell,
            m.search.max_samples
        );
        let _ = writeln!(s, "\n# polyline planner");
        let _ = writeln!(
            s,
            "d = {}\nk_rot = {}\nk_uni = {}\nbackend = {}",
            m.planner.d, m.planner.k_rot, m.planner.k_uni, m.planner.backend
        );
        let _ = writeln!(s, "\n# frontier selection weights");
        let _ = writeln!(
            s,
            "w_info = {}\nw_dir = {}\nw_dist = {}\nw_free = {}",
            m.weights.w_info, m.weights.w_dir, m.weights.w_dist, m.weights.w_free
        );
        let _ = writeln!(s, "\n# batch");
        let _ = writeln!(s, "seed = {}\nruns = {}", self.seed, self.runs);
        s
    }
}
