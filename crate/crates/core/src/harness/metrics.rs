use crate::controller::{MissionOutcome, MissionReport};
use crate::polyline::sample_std;
use crate::sim::ExtensionLog;
use crate::{Error, Result};

/// The parts of a mission report that batch metrics need. Can be rebuilt
/// from the files a batch writes.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub outcome: MissionOutcome,
    pub total_time: f64,
    pub segments: Vec<f64>,
    pub cumulative_rotation: f64,
    pub junction_rotation: f64,
    /// (t, known area) samples.
    pub known_area: Vec<(f64, f64)>,
    pub planner_secs: Vec<f64>,
    pub extension: ExtensionLog,
}

impl From<&MissionReport> for RunSummary {
    fn from(r: &MissionReport) -> Self {
        Self {
            seed: r.seed,
            outcome: r.outcome,
            total_time: r.total_time,
            segments: r.segments.clone(),
            cumulative_rotation: r.cumulative_rotation,
            junction_rotation: r.junction_rotation,
            known_area: r.known_area_series(),
            planner_secs: r.timing.planner_secs.clone(),
            extension: r.extension,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tallies {
    pub finished: usize,
    pub collision: usize,
    pub stall: usize,
    pub timeout: usize,
    /// Runs that ended in an error before producing a report.
    pub failed: usize,
}

impl Tallies {
    pub fn total(&self) -> usize {
        self.finished + self.collision + self.stall + self.timeout + self.failed
    }

    pub fn all_finished(&self) -> bool {
        self.total() > 0 && self.finished == self.total()
    }

    fn add(&mut self, o: MissionOutcome) {
        match o {
            MissionOutcome::Finished => self.finished += 1,
            MissionOutcome::Collision => self.collision += 1,
            MissionOutcome::Stall => self.stall += 1,
            MissionOutcome::Timeout => self.timeout += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsBundle {
    pub reference_area: f64,
    pub tallies: Tallies,
    /// Per run: seed and (t, finish rate) series.
    pub finish_rate: Vec<(u64, Vec<(f64, f64)>)>,
    /// Pooled segment-length STD, m. `None` when no run has two segments.
    pub s_p: Option<f64>,
    /// Mean over runs of the total in-place rotation, rad.
    pub phi_avg_sum: f64,
    /// Mean over runs of the rotation at interior polyline junctions, rad.
    pub phi_avg_junction: f64,
    /// Mean wall-clock seconds per polyline query.
    pub t_calc_avg: Option<f64>,
}

impl MetricsBundle {
    pub fn final_finish_rates(&self) -> Vec<f64> {
        self.finish_rate
            .iter()
            .map(|(_, s)| s.last().map_or(0.0, |p| p.1))
            .collect()
    }
}

/// sqrt(Σ (n_i - 1) s_i² / Σ (n_i - 1)) with sample STDs s_i.
pub fn pooled_std<T: AsRef<[f64]>>(groups: &[T]) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for g in groups {
        let g = g.as_ref();
        if g.len() < 2 {
            continue;
        }
        let s = sample_std(g);
        let dof = (g.len() - 1) as f64;
        num += dof * s * s;
        den += dof;
    }
    (den > 0.0).then(|| (num / den).sqrt())
}

/// Known area over the reference, capped at 1.
pub fn finish_rate_series(known_area: &[(f64, f64)], reference: f64) -> Vec<(f64, f64)> {
    known_area
        .iter()
        .map(|&(t, a)| (t, (a / reference).min(1.0)))
        .collect()
}

pub fn compute_metrics(runs: &[RunSummary], reference_area: f64) -> Result<MetricsBundle> {
    if !(reference_area > 0.0 && reference_area.is_finite()) {
        return Err(Error::Input(format!(
            "reference known area must be > 0, got {reference_area}"
        )));
    }
    let mut tallies = Tallies::default();
    for r in runs {
        tallies.add(r.outcome);
    }
    let n = runs.len().max(1) as f64;
    let segs: Vec<&[f64]> = runs.iter().map(|r| r.segments.as_slice()).collect();
    let queries: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.planner_secs.iter().copied())
        .collect();
    Ok(MetricsBundle {
        reference_area,
        tallies,
        finish_rate: runs
            .iter()
            .map(|r| (r.seed, finish_rate_series(&r.known_area, reference_area)))
            .collect(),
        s_p: pooled_std(&segs),
        phi_avg_sum: runs.iter().map(|r| r.cumulative_rotation).sum::<f64>() / n,
        phi_avg_junction: runs.iter().map(|r| r.junction_rotation).sum::<f64>() / n,
        t_calc_avg: (!queries.is_empty())
            .then(|| queries.iter().sum::<f64>() / queries.len() as f64),
    })
}
