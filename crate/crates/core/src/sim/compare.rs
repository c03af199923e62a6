use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{generate_scene, run_trial, AgentConfig, Limits, Preset, SceneSpec, TrialMetrics};
use crate::error::SimError;
use crate::interaction::PipelineConfig;
use crate::layout::Method;
use crate::scene::{ObjectId, Scene};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Mixed into the trial seed when drawing the target.
const TARGET_SALT: u64 = 0x7a3c_51e9_0d2b_8f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SceneSource {
    /// The same scene for every trial.
    Fixed { scene: Scene },
    /// A fresh scene per trial, seeded by the trial seed.
    Generated { n_objects: usize, preset: Preset, skew: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub scene: SceneSource,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    pub agent: AgentConfig,
    pub limits: Limits,
    /// Shared pipeline settings; the method is set per condition.
    pub pipeline: PipelineConfig,
}

impl CompareConfig {
    pub fn new(scene: SceneSource, methods: Vec<Method>, trials: usize, seed: u64) -> Self {
        Self {
            scene,
            methods,
            trials,
            seed,
            agent: AgentConfig::default(),
            limits: Limits::default(),
            pipeline: PipelineConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.methods.is_empty() {
            return Err(SimError::InvalidConfig("no methods to compare".into()));
        }
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be positive".into()));
        }
        self.agent.validate()?;
        self.limits.validate()
    }
}

/// How trials are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Data-parallel over trials when built with the `parallel` feature,
    /// sequential otherwise.
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub method: Method,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub time_mean: f64,
    pub time_std: f64,
    pub rotation_mean: f64,
    pub rotation_std: f64,
    pub circles_mean: f64,
    pub pruned_mean: f64,
    pub dropped_mean: f64,
    pub retries_mean: f64,
    pub fov_time_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFlag {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub v: u32,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<ConditionSummary>,
    pub trends: Vec<TrendFlag>,
}

/// Scene and target for one trial; shared by every condition.
pub fn trial_setup(source: &SceneSource, seed: u64) -> Result<(Scene, ObjectId), SimError> {
    let scene = match source {
        SceneSource::Fixed { scene } => scene.clone(),
        SceneSource::Generated {
            n_objects,
            preset,
            skew,
        } => generate_scene(&SceneSpec {
            seed,
            n_objects: *n_objects,
            preset: *preset,
            skew: *skew,
        })?,
    };
    if scene.objects.is_empty() {
        return Err(SimError::EmptyScene);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ TARGET_SALT);
    let target = scene.objects[rng.random_range(0..scene.objects.len())].id;
    Ok((scene, target))
}

fn run_one(cfg: &CompareConfig, trial: usize) -> Result<Vec<TrialRecord>, SimError> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let (scene, target) = trial_setup(&cfg.scene, seed)?;
    let agent = cfg.agent.with_seed(seed);
    cfg.methods
        .iter()
        .map(|&method| {
            let pipeline = PipelineConfig {
                method,
                ..cfg.pipeline
            };
            let metrics = run_trial(&scene, target, &pipeline, &agent, &cfg.limits)?;
            Ok(TrialRecord { trial, seed, metrics })
        })
        .collect()
}

/// Runs every condition on the same seeded trials and summarizes them.
pub fn compare_methods(cfg: &CompareConfig) -> Result<Report, SimError> {
    compare_methods_with(cfg, Execution::default())
}

pub fn compare_methods_with(cfg: &CompareConfig, exec: Execution) -> Result<Report, SimError> {
    cfg.validate()?;
    let batches: Vec<Result<Vec<TrialRecord>, SimError>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..cfg.trials).into_par_iter().map(|i| run_one(cfg, i)).collect()
        }
        _ => (0..cfg.trials).map(|i| run_one(cfg, i)).collect(),
    };
    let mut records = Vec::with_capacity(cfg.trials * cfg.methods.len());
    for batch in batches {
        records.extend(batch?);
    }
    let summaries = cfg.methods.iter().map(|&m| summarize(m, &records)).collect::<Vec<_>>();
    let trends = trend_flags(&summaries);
    Ok(Report {
        v: REPORT_FORMAT_VERSION,
        records,
        summaries,
        trends,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn summarize(method: Method, records: &[TrialRecord]) -> ConditionSummary {
    let rows: Vec<&TrialMetrics> = records
        .iter()
        .map(|r| &r.metrics)
        .filter(|m| m.method == method)
        .collect();
    let col = |f: fn(&TrialMetrics) -> f64| rows.iter().map(|m| f(m)).collect::<Vec<_>>();
    let trials = rows.len();
    let successes = rows.iter().filter(|m| m.success).count();
    let (time_mean, time_std) = mean_std(&col(|m| m.time));
    let (rotation_mean, rotation_std) = mean_std(&col(|m| m.rotation_deg));
    ConditionSummary {
        method,
        trials,
        successes,
        success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        time_mean,
        time_std,
        rotation_mean,
        rotation_std,
        circles_mean: mean_std(&col(|m| m.circle_count as f64)).0,
        pruned_mean: mean_std(&col(|m| m.pruned_count as f64)).0,
        dropped_mean: mean_std(&col(|m| m.dropped_count as f64)).0,
        retries_mean: mean_std(&col(|m| m.retries as f64)).0,
        fov_time_mean: mean_std(&col(|m| m.fov_time)).0,
    }
}

/// Expected orderings between conditions, reported when both are present.
pub fn trend_flags(summaries: &[ConditionSummary]) -> Vec<TrendFlag> {
    let get = |m: Method| summaries.iter().find(|s| s.method == m);
    let mut flags = Vec::new();
    if let (Some(e3), Some(e1)) = (get(Method::Ec3), get(Method::Ec1)) {
        flags.push(TrendFlag {
            name: "rotation ec3 < ec1".into(),
            holds: e3.rotation_mean < e1.rotation_mean,
            detail: format!("{:.2} vs {:.2} deg", e3.rotation_mean, e1.rotation_mean),
        });
    }
    if let (Some(e3), Some(e2)) = (get(Method::Ec3), get(Method::Ec2)) {
        let rel = if e2.rotation_mean > 0.0 {
            (e3.rotation_mean - e2.rotation_mean) / e2.rotation_mean
        } else {
            0.0
        };
        flags.push(TrendFlag {
            name: "rotation ec3 within 10% of ec2".into(),
            holds: rel.abs() <= 0.10,
            detail: format!("{:+.1}%", rel * 100.0),
        });
        flags.push(TrendFlag {
            name: "circles ec3 < ec2".into(),
            holds: e3.circles_mean < e2.circles_mean,
            detail: format!("{:.2} vs {:.2}", e3.circles_mean, e2.circles_mean),
        });
    }
    flags
}

pub fn write_trials_jsonl(path: &Path, records: &[TrialRecord]) -> Result<(), SimError> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, summaries: &[ConditionSummary]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_path(path)?;
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    v: u32,
    summaries: &'a [ConditionSummary],
    trends: &'a [TrendFlag],
}

pub fn write_summary_json(path: &Path, report: &Report) -> Result<(), SimError> {
    let doc = SummaryDoc {
        v: report.v,
        summaries: &report.summaries,
        trends: &report.trends,
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `trials.jsonl`, `summary.csv` and `summary.json` into `dir`.
pub fn write_report(dir: &Path, report: &Report) -> Result<(), SimError> {
    std::fs::create_dir_all(dir)?;
    write_trials_jsonl(&dir.join("trials.jsonl"), &report.records)?;
    write_summary_csv(&dir.join("summary.csv"), &report.summaries)?;
    write_summary_json(&dir.join("summary.json"), report)
}

/// Plain-text table of the summaries followed by the trend flags.
pub fn format_table(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:>6} {:>8} {:>9} {:>8} {:>10} {:>9} {:>8} {:>8} {:>8}",
        "method", "trials", "success", "time_s", "time_sd", "rot_deg", "rot_sd", "circles", "pruned", "retries"
    );
    for r in &report.summaries {
        let _ = writeln!(
            s,
            "{:<6} {:>6} {:>8.2} {:>9.2} {:>8.2} {:>10.2} {:>9.2} {:>8.2} {:>8.2} {:>8.2}",
            r.method.name(),
            r.trials,
            r.success_rate,
            r.time_mean,
            r.time_std,
            r.rotation_mean,
            r.rotation_std,
            r.circles_mean,
            r.pruned_mean,
            r.retries_mean
        );
    }
    for t in &report.trends {
        let mark = if t.holds { "yes" } else { "NO" };
        let _ = writeln!(s, "trend {:<32} {:<4} {}", t.name, mark, t.detail);
    }
    s
}
