//! Experiment specs, aggregation detection and parameter sweeps.
//!
//! A sweep expands `system_sizes x noise_grid x beta_grid x repeats` into
//! independent runs. Run `k` (in that nesting order, repeats innermost) uses
//! seed `spec.seed + k`, so any single run can be reproduced in isolation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuous::{gen_random, run_until, Controller, NoiseModel, PhysicsParams, World};
use crate::discrete::{run_rounds_until, DiscreteNoise, LatticeWorld};
use crate::error::{Error, Result};
use crate::geometry::{min_dispersion_baseline, MetricsSample};
use crate::output::{fmt_sig9, write_metrics_csv, write_sidecar};

/// Side (cm) of the square in which continuous runs are placed, for every
/// swarm size. There are no walls; it only sets the initial spread.
pub const CONTINUOUS_ARENA_SIDE: f64 = 200.0;

/// Environment variable capping the sweep worker count.
pub const WORKERS_ENV: &str = "SWARMAGG_WORKERS";

pub const SUMMARY_HEADER: &str =
    "mode,n,param_name,param_value,mean_time,std_time,cutoff_fraction,repeats";

pub const RUNS_HEADER: &str = "index,mode,n,motion_noise,error_probability,perturbation,beta,\
repeat,seed,aggregation_time,contact_overflows,sed_circumference,hull_perimeter,dispersion,cluster_fraction,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continuous,
    Discrete,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Continuous => "continuous",
            Mode::Discrete => "discrete",
        }
    }

    /// Lattice constant or robot diameter used for the dispersion baseline.
    pub fn baseline_spacing(self) -> f64 {
        match self {
            Mode::Continuous => 2.0 * PhysicsParams::EPUCK.robot_radius,
            Mode::Discrete => 1.0,
        }
    }
}

fn default_threshold() -> f64 {
    0.15
}

/// A sweep description, read from JSON.
///
/// `noise_grid` entries are `[m*, p]` in continuous mode and `[p, d*]` in
/// discrete mode, where `d*` may be `null` to disable deadlock perturbation.
/// `horizon` is seconds or rounds; `sample_cadence` likewise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub system_sizes: Vec<usize>,
    pub noise_grid: Vec<(f64, Option<f64>)>,
    #[serde(default)]
    pub beta_grid: Vec<f64>,
    pub repeats: u32,
    pub horizon: f64,
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub aggregation_threshold: f64,
    pub sample_cadence: f64,
}

/// One expanded noise setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoisePoint {
    Continuous(NoiseModel),
    Discrete(DiscreteNoise),
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Spec(format!("{field}: {why}")));
        if self.system_sizes.is_empty() {
            return bad("system_sizes", "must not be empty".into());
        }
        if let Some(i) = self.system_sizes.iter().position(|&n| n == 0) {
            return bad(&format!("system_sizes[{i}]"), "must be at least 1".into());
        }
        if self.noise_grid.is_empty() {
            return bad("noise_grid", "must not be empty".into());
        }
        for i in 0..self.noise_grid.len() {
            if let Err(e) = self.noise_point(i) {
                return bad(&format!("noise_grid[{i}]"), e.to_string());
            }
        }
        if self.mode == Mode::Discrete && !self.beta_grid.is_empty() {
            return bad("beta_grid", "only applies to continuous mode".into());
        }
        for (i, &b) in self.beta_grid.iter().enumerate() {
            if !(0.0..std::f64::consts::PI).contains(&b) {
                return bad(&format!("beta_grid[{i}]"), format!("{b} outside [0, pi)"));
            }
        }
        if self.repeats == 0 {
            return bad("repeats", "must be at least 1".into());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("horizon", "must be positive".into());
        }
        if !(self.aggregation_threshold > 0.0 && self.aggregation_threshold < 1.0) {
            return bad("aggregation_threshold", "must lie in (0, 1)".into());
        }
        if !(self.sample_cadence > 0.0 && self.sample_cadence.is_finite()) {
            return bad("sample_cadence", "must be positive".into());
        }
        if self.mode == Mode::Discrete {
            for (name, v) in [
                ("horizon", self.horizon),
                ("sample_cadence", self.sample_cadence),
            ] {
                if v.fract() != 0.0 {
                    return bad(name, "must be a whole number of rounds".into());
                }
            }
        }
        Ok(())
    }

    fn noise_point(&self, i: usize) -> Result<NoisePoint> {
        let (a, b) = self.noise_grid[i];
        match self.mode {
            Mode::Continuous => {
                let p = b.ok_or_else(|| Error::Spec("error probability missing".into()))?;
                Ok(NoisePoint::Continuous(NoiseModel::new(a, p)?))
            }
            Mode::Discrete => {
                let d = match b {
                    None => None,
                    Some(d) if d >= 1.0 && d.fract() == 0.0 && d <= u32::MAX as f64 => {
                        Some(d as u32)
                    }
                    Some(d) => {
                        return Err(Error::Spec(format!("d* = {d} is not a positive integer")))
                    }
                };
                Ok(NoisePoint::Discrete(DiscreteNoise::new(a, d)?))
            }
        }
    }

    fn betas(&self) -> Vec<f64> {
        if self.beta_grid.is_empty() {
            vec![0.0]
        } else {
            self.beta_grid.clone()
        }
    }

    /// Every run of the sweep, in seed order.
    pub fn expand(&self) -> Result<Vec<RunConfig>> {
        let mut out = Vec::new();
        let betas = self.betas();
        for &n in &self.system_sizes {
            for i in 0..self.noise_grid.len() {
                let noise = self.noise_point(i)?;
                for &beta in &betas {
                    for repeat in 0..self.repeats {
                        let index = out.len();
                        out.push(RunConfig {
                            index,
                            mode: self.mode,
                            n,
                            noise,
                            beta,
                            repeat,
                            seed: self.seed.wrapping_add(index as u64),
                            horizon: self.horizon,
                            sample_cadence: self.sample_cadence,
                            threshold: self.aggregation_threshold,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A single run of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub index: usize,
    pub mode: Mode,
    pub n: usize,
    pub noise: NoisePoint,
    pub beta: f64,
    pub repeat: u32,
    pub seed: u64,
    pub horizon: f64,
    pub sample_cadence: f64,
    pub threshold: f64,
}

/// When a run first came within the threshold of the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AggregationTime {
    At(f64),
    Cutoff,
}

impl AggregationTime {
    pub fn time(self) -> Option<f64> {
        match self {
            AggregationTime::At(t) => Some(t),
            AggregationTime::Cutoff => None,
        }
    }

    /// The time, with a cutoff counted as `horizon`.
    pub fn censored(self, horizon: f64) -> f64 {
        self.time().unwrap_or(horizon)
    }
}

impl std::fmt::Display for AggregationTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AggregationTime::At(t) => f.write_str(&fmt_sig9(*t)),
            AggregationTime::Cutoff => f.write_str("CUTOFF"),
        }
    }
}

/// Dispersion at or below which `n` robots count as aggregated.
pub fn aggregation_level(n: usize, threshold: f64, spacing: f64) -> f64 {
    (1.0 + threshold) * min_dispersion_baseline(n, spacing)
}

/// First sample whose dispersion is within `threshold` of the
/// hexagonal-packing baseline for `n` robots at the given spacing.
pub fn detect_aggregation(
    series: &[MetricsSample],
    n: usize,
    threshold: f64,
    spacing: f64,
) -> Result<AggregationTime> {
    if series.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let level = aggregation_level(n, threshold, spacing);
    Ok(series
        .iter()
        .find(|s| s.dispersion <= level)
        .map_or(AggregationTime::Cutoff, |s| AggregationTime::At(s.time)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: RunConfig,
    pub aggregation: AggregationTime,
    pub final_metrics: Option<MetricsSample>,
    pub contact_overflows: u64,
    pub series: Vec<MetricsSample>,
    /// Set when the run could not be carried out.
    pub error: Option<String>,
}

/// Random initial placement for a continuous run.
pub fn continuous_world(
    n: usize,
    arena_side: f64,
    params: PhysicsParams,
    noise: NoiseModel,
    seed: u64,
) -> Result<World> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poses = gen_random(n, arena_side, params.robot_radius, &mut rng)?;
    World::new(poses, params, noise, Controller::X_STAR, seed)
}

/// Executes one run. With `early_stop` the run ends at the first aggregated
/// sample; the recorded aggregation time is the same either way.
pub fn execute(config: &RunConfig, early_stop: bool) -> RunRecord {
    match try_execute(config, early_stop) {
        Ok(r) => r,
        Err(e) => RunRecord {
            config: *config,
            aggregation: AggregationTime::Cutoff,
            final_metrics: None,
            contact_overflows: 0,
            series: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

fn try_execute(config: &RunConfig, early_stop: bool) -> Result<RunRecord> {
    let level = aggregation_level(config.n, config.threshold, config.mode.baseline_spacing());
    let stop = |s: &MetricsSample| early_stop && s.dispersion <= level;
    let (series, overflows) = match config.noise {
        NoisePoint::Continuous(noise) => {
            let params = PhysicsParams::EPUCK.with_cone_angle(config.beta);
            let mut world =
                continuous_world(config.n, CONTINUOUS_ARENA_SIDE, params, noise, config.seed)?;
            let out = run_until(&mut world, config.horizon, config.sample_cadence, stop)?;
            (out.series, out.contact_overflows)
        }
        NoisePoint::Discrete(noise) => {
            let mut world = LatticeWorld::random(config.n, noise, config.seed)?;
            let (series, _) = run_rounds_until(
                &mut world,
                config.horizon as u64,
                config.sample_cadence as u64,
                stop,
            )?;
            (series, 0)
        }
    };
    let aggregation = detect_aggregation(
        &series,
        config.n,
        config.threshold,
        config.mode.baseline_spacing(),
    )?;
    Ok(RunRecord {
        config: *config,
        aggregation,
        final_metrics: series.last().copied(),
        contact_overflows: overflows,
        series,
        error: None,
    })
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Stop each run once it aggregates.
    pub early_stop: bool,
    /// Directory for per-run CSVs, `runs.csv` and `summary.csv`.
    pub out_dir: Option<PathBuf>,
    /// Worker cap; falls back to the environment variable, then to rayon's
    /// default.
    pub workers: Option<usize>,
}

fn worker_count(requested: Option<usize>) -> Result<Option<usize>> {
    if let Some(w) = requested {
        return Ok(Some(w.max(1)));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|w| Some(w.max(1)))
            .map_err(|_| Error::Spec(format!("{WORKERS_ENV}: `{v}` is not a worker count"))),
        Err(_) => Ok(None),
    }
}

/// Runs every configuration of `spec` on a worker pool. Failed runs are
/// recorded, not fatal. Output files are written after all runs finish.
pub fn sweep(spec: &ExperimentSpec, options: &SweepOptions) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let configs = spec.expand()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = worker_count(options.workers)? {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Spec(format!("worker pool: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| execute(c, options.early_stop))
            .collect()
    });
    if let Some(dir) = &options.out_dir {
        write_sweep(dir, spec, &records)?;
    }
    Ok(records)
}

fn write_sweep(dir: &Path, spec: &ExperimentSpec, records: &[RunRecord]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for r in records {
        let stem = format!("run_{:05}", r.config.index);
        write_metrics_csv(&dir.join(format!("{stem}.csv")), &r.series)?;
        write_sidecar(
            &dir.join(format!("{stem}.txt")),
            &sidecar_entries(&r.config),
        )?;
    }
    std::fs::write(dir.join("runs.csv"), runs_csv(records))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(spec, records))?;
    Ok(())
}

/// Key/value record describing a run, for the sidecar file.
pub fn sidecar_entries(c: &RunConfig) -> Vec<(&'static str, String)> {
    let mut v = vec![
        ("mode", c.mode.as_str().to_string()),
        ("n", c.n.to_string()),
        ("seed", c.seed.to_string()),
        ("repeat", c.repeat.to_string()),
        ("horizon", fmt_sig9(c.horizon)),
        ("sample_cadence", fmt_sig9(c.sample_cadence)),
        ("aggregation_threshold", fmt_sig9(c.threshold)),
    ];
    match c.noise {
        NoisePoint::Continuous(noise) => {
            let p = PhysicsParams::EPUCK.with_cone_angle(c.beta);
            v.push(("controller", Controller::X_STAR.to_string()));
            v.push(("params", format!("{p:?}")));
            v.push(("arena_side", fmt_sig9(CONTINUOUS_ARENA_SIDE)));
            v.push(("motion_noise", fmt_sig9(noise.motion_noise_max)));
            v.push(("error_probability", fmt_sig9(noise.error_probability)));
        }
        NoisePoint::Discrete(noise) => {
            v.push(("error_probability", fmt_sig9(noise.error_probability)));
            v.push(("perturbation", perturbation_label(noise.perturbation)));
        }
    }
    v
}

fn perturbation_label(d: Option<u32>) -> String {
    d.map_or_else(|| "off".to_string(), |d| d.to_string())
}

fn noise_fields(noise: NoisePoint) -> (String, String, String) {
    match noise {
        NoisePoint::Continuous(n) => (
            fmt_sig9(n.motion_noise_max),
            fmt_sig9(n.error_probability),
            String::new(),
        ),
        NoisePoint::Discrete(n) => (
            String::new(),
            fmt_sig9(n.error_probability),
            perturbation_label(n.perturbation),
        ),
    }
}

/// One line per run.
pub fn runs_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RUNS_HEADER);
    out.push('\n');
    for r in records {
        let c = &r.config;
        let (m, p, d) = noise_fields(c.noise);
        let fm = r.final_metrics.map_or_else(
            || vec![String::new(); 4],
            |s| {
                vec![
                    fmt_sig9(s.sed_circumference),
                    fmt_sig9(s.hull_perimeter),
                    fmt_sig9(s.dispersion),
                    fmt_sig9(s.cluster_fraction),
                ]
            },
        );
        let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.index,
            c.mode.as_str(),
            c.n,
            m,
            p,
            d,
            fmt_sig9(c.beta),
            c.repeat,
            c.seed,
            r.aggregation,
            r.contact_overflows,
            fm.join(","),
            error
        );
    }
    out
}

/// Summary statistics of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub mode: Mode,
    pub n: usize,
    pub param_name: String,
    pub param_value: String,
    /// Mean over aggregated runs; `None` if every run hit the cutoff.
    pub mean_time: Option<f64>,
    /// Sample standard deviation over aggregated runs.
    pub std_time: Option<f64>,
    pub cutoff_fraction: f64,
    pub repeats: usize,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

/// Names of the grid axes that take more than one value in `spec`. When
/// nothing varies the primary noise axis is reported.
fn varying_axes(spec: &ExperimentSpec) -> Vec<usize> {
    let distinct = |vals: Vec<String>| {
        let mut v = vals;
        v.sort();
        v.dedup();
        v.len() > 1
    };
    let first = distinct(spec.noise_grid.iter().map(|g| fmt_sig9(g.0)).collect());
    let second = distinct(
        spec.noise_grid
            .iter()
            .map(|g| format!("{:?}", g.1))
            .collect(),
    );
    let beta = distinct(spec.betas().iter().map(|b| fmt_sig9(*b)).collect());
    let axes: Vec<usize> = [first, second, beta]
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| v.then_some(i))
        .collect();
    if axes.is_empty() {
        vec![match spec.mode {
            Mode::Continuous => 1,
            Mode::Discrete => 0,
        }]
    } else {
        axes
    }
}

fn axis_name(mode: Mode, axis: usize) -> &'static str {
    match (mode, axis) {
        (Mode::Continuous, 0) => "m*",
        (Mode::Continuous, 1) => "p",
        (Mode::Discrete, 0) => "p",
        (Mode::Discrete, 1) => "d*",
        _ => "beta",
    }
}

fn axis_value(c: &RunConfig, axis: usize) -> String {
    let (m, p, d) = noise_fields(c.noise);
    match (c.mode, axis) {
        (Mode::Continuous, 0) => m,
        (Mode::Continuous, 1) => p,
        (Mode::Discrete, 0) => p,
        (Mode::Discrete, 1) => d,
        _ => fmt_sig9(c.beta),
    }
}

/// Groups runs into cells (size x grid point) in sweep order.
pub fn summarize(spec: &ExperimentSpec, records: &[RunRecord]) -> Vec<CellSummary> {
    let axes = varying_axes(spec);
    let mut cells: Vec<CellSummary> = Vec::new();
    let mut times: Vec<Vec<f64>> = Vec::new();
    let mut cutoffs: Vec<usize> = Vec::new();
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let per_cell = spec.repeats as usize;
    for r in records {
        let c = &r.config;
        let cell = c.index / per_cell;
        if keys.last().map(|k| k.0) != Some(cell) {
            keys.push((cell, c.n));
            cells.push(CellSummary {
                mode: c.mode,
                n: c.n,
                param_name: axes
                    .iter()
                    .map(|&a| axis_name(c.mode, a))
                    .collect::<Vec<_>>()
                    .join(";"),
                param_value: axes
                    .iter()
                    .map(|&a| axis_value(c, a))
                    .collect::<Vec<_>>()
                    .join(";"),
                mean_time: None,
                std_time: None,
                cutoff_fraction: 0.0,
                repeats: 0,
            });
            times.push(Vec::new());
            cutoffs.push(0);
        }
        let last = cells.len() - 1;
        cells[last].repeats += 1;
        match r.aggregation.time() {
            Some(t) => times[last].push(t),
            None => cutoffs[last] += 1,
        }
    }
    for (i, cell) in cells.iter_mut().enumerate() {
        if let Some((m, s)) = mean_std(&times[i]) {
            cell.mean_time = Some(m);
            cell.std_time = Some(s);
        }
        cell.cutoff_fraction = cutoffs[i] as f64 / cell.repeats as f64;
    }
    cells
}

pub fn summary_csv(spec: &ExperimentSpec, records: &[RunRecord]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), fmt_sig9);
    for c in summarize(spec, records) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.mode.as_str(),
            c.n,
            c.param_name,
            c.param_value,
            opt(c.mean_time),
            opt(c.std_time),
            fmt_sig9(c.cutoff_fraction),
            c.repeats
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(time: f64, dispersion: f64) -> MetricsSample {
        MetricsSample {
            time,
            sed_circumference: 0.0,
            hull_perimeter: 0.0,
            dispersion,
            cluster_fraction: 1.0,
        }
    }

    fn discrete_spec() -> ExperimentSpec {
        ExperimentSpec::from_json(
            r#"{"mode": "discrete", "system_sizes": [8], "noise_grid": [[0.15, null]],
                "repeats": 3, "horizon": 400, "seed": 40, "sample_cadence": 1}"#,
        )
        .unwrap()
    }

    #[test]
    fn detection_cases() {
        let level = aggregation_level(10, 0.15, 7.4);
        let already = [sample(0.0, level - 1.0), sample(1.0, level + 5.0)];
        assert_eq!(
            detect_aggregation(&already, 10, 0.15, 7.4).unwrap(),
            AggregationTime::At(0.0)
        );
        let flat: Vec<_> = (0..20).map(|k| sample(k as f64, 1e3)).collect();
        assert_eq!(
            detect_aggregation(&flat, 10, 0.15, 7.4).unwrap(),
            AggregationTime::Cutoff
        );
        let crossing: Vec<_> = (0..12)
            .map(|k| {
                sample(
                    0.5 * k as f64,
                    if k < 7 { level * 2.0 } else { level * 0.99 },
                )
            })
            .collect();
        assert_eq!(
            detect_aggregation(&crossing, 10, 0.15, 7.4).unwrap(),
            AggregationTime::At(3.5)
        );
        assert!(detect_aggregation(&[], 10, 0.15, 7.4).is_err());
    }

    #[test]
    fn unknown_and_bad_fields_are_named() {
        let e = ExperimentSpec::from_json(
            r#"{"mode": "discrete", "system_sizes": [8], "noise_grid": [[0.1, null]],
                "repeats": 1, "horizon": 10, "seed": 0, "sample_cadence": 1, "repeat": 2}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("repeat"), "{e}");
        let e = ExperimentSpec::from_json(
            r#"{"mode": "continuous", "system_sizes": [8], "noise_grid": [[0.0, 1.5]],
                "repeats": 1, "horizon": 10, "seed": 0, "sample_cadence": 1}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("noise_grid[0]"), "{e}");
        let e = ExperimentSpec::from_json(
            r#"{"mode": "continuous", "system_sizes": [8], "noise_grid": [[0.0, 0.0]],
                "repeats": 0, "horizon": 10, "seed": 0, "sample_cadence": 1}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("repeats"), "{e}");
    }

    #[test]
    fn expansion_derives_distinct_seeds() {
        let spec = discrete_spec();
        assert_eq!(spec.aggregation_threshold, 0.15);
        let runs = spec.expand().unwrap();
        assert_eq!(runs.len(), 3);
        let seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![40, 41, 42]);
    }

    #[test]
    fn sweep_is_reproducible_and_summaries_match_runs() {
        let spec = discrete_spec();
        let dir = tempfile::tempdir().unwrap();
        let opts = |d: &Path| SweepOptions {
            early_stop: false,
            out_dir: Some(d.to_path_buf()),
            workers: Some(2),
        };
        let a = sweep(&spec, &opts(&dir.path().join("a"))).unwrap();
        let b = sweep(&spec, &opts(&dir.path().join("b"))).unwrap();
        assert_eq!(a.len(), 3);
        let read = |p: PathBuf| std::fs::read(p).unwrap();
        assert_eq!(
            read(dir.path().join("a/summary.csv")),
            read(dir.path().join("b/summary.csv"))
        );
        assert_eq!(
            read(dir.path().join("a/run_00001.csv")),
            read(dir.path().join("b/run_00001.csv"))
        );
        assert_eq!(
            a.iter().map(|r| r.aggregation).collect::<Vec<_>>(),
            b.iter().map(|r| r.aggregation).collect::<Vec<_>>()
        );

        // the summary mean is the mean of the per-run aggregation times
        let cells = summarize(&spec, &a);
        assert_eq!(cells.len(), 1);
        let times: Vec<f64> = a.iter().filter_map(|r| r.aggregation.time()).collect();
        if let Some((m, _)) = mean_std(&times) {
            assert!((cells[0].mean_time.unwrap() - m).abs() < 1e-9);
        }
        assert_eq!(cells[0].param_name, "p");
        assert_eq!(cells[0].param_value, "0.15");
    }

    #[test]
    fn cutoffs_are_excluded_from_means() {
        let spec = discrete_spec();
        let configs = spec.expand().unwrap();
        let mk = |c: &RunConfig, t: AggregationTime| RunRecord {
            config: *c,
            aggregation: t,
            final_metrics: None,
            contact_overflows: 0,
            series: vec![],
            error: None,
        };
        let recs = vec![
            mk(&configs[0], AggregationTime::At(10.0)),
            mk(&configs[1], AggregationTime::Cutoff),
            mk(&configs[2], AggregationTime::At(20.0)),
        ];
        let c = &summarize(&spec, &recs)[0];
        assert_eq!(c.mean_time, Some(15.0));
        assert!((c.cutoff_fraction - 1.0 / 3.0).abs() < 1e-15);
        let csv = summary_csv(&spec, &recs);
        assert!(csv.starts_with(SUMMARY_HEADER));
        assert!(csv.contains("discrete,8,p,0.15,15,"));
    }

    #[test]
    fn mean_std_values() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[3.0]), Some((3.0, 0.0)));
        let (m, s) = mean_std(&[1.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
