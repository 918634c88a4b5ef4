//! Threshold sweeps: per-trial records, aggregate success curves with
//! Wilson intervals, CSV output and exact replay.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pipeline::{
    expected_copy_count, oracle_certificate, solve, Outcome, PipelineConfig, Stage, ORACLE_LIMIT,
};
use crate::randgen::sample_gnp;
use crate::seed::{derive, digest};

pub const RECORD_VERSION: u32 = 1;
pub const SPEC_SCHEMA_VERSION: u32 = 1;

pub const TRIAL_HEADER: [&str; 13] = [
    "version",
    "n",
    "p_index",
    "p",
    "k",
    "trial",
    "seed",
    "mode",
    "success",
    "failed_stage",
    "stage_reached",
    "certificate_digest",
    "runtime_ms",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "n",
    "p_index",
    "p",
    "k",
    "mode",
    "trials",
    "successes",
    "success_rate",
    "wilson_low",
    "wilson_high",
    "expected_copies",
];

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Oracle,
    Pipeline,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Oracle => "oracle",
            Mode::Pipeline => "pipeline",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Mode::Oracle),
            "pipeline" => Ok(Mode::Pipeline),
            _ => Err(invalid(format!("unknown mode `{s}`"))),
        }
    }
}

/// Either explicit edge probabilities or exponents `ε` giving
/// `p = n^{−1/k+ε}`, clamped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PGrid {
    Explicit(Vec<f64>),
    Exponent(Vec<f64>),
}

impl PGrid {
    pub fn len(&self) -> usize {
        match self {
            PGrid::Explicit(v) | PGrid::Exponent(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self, n: usize, k: usize) -> Vec<f64> {
        match self {
            PGrid::Explicit(v) => v.clone(),
            PGrid::Exponent(e) => e
                .iter()
                .map(|&eps| (n as f64).powf(-1.0 / k as f64 + eps).clamp(0.0, 1.0))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "spec_version")]
    pub schema_version: u32,
    pub n_values: Vec<usize>,
    pub p_grid: PGrid,
    pub k: usize,
    pub trials: usize,
    pub mode: Mode,
    #[serde(default)]
    pub seed_base: u64,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Solver settings for pipeline mode; `k` and `seed` are overridden per
    /// trial.
    #[serde(default)]
    pub pipeline: Option<PipelineConfig>,
}

fn spec_version() -> u32 {
    SPEC_SCHEMA_VERSION
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SPEC_SCHEMA_VERSION {
            return Err(Error::VersionMismatch {
                found: self.schema_version,
                expected: SPEC_SCHEMA_VERSION,
            });
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.k == 0 {
            return Err(invalid("k must be positive"));
        }
        if self.n_values.is_empty() || self.p_grid.is_empty() {
            return Err(invalid("empty n or p grid"));
        }
        if self.mode == Mode::Oracle {
            if let Some(&n) = self.n_values.iter().find(|&&n| n > ORACLE_LIMIT) {
                return Err(Error::SizeLimit {
                    what: "oracle sweep n",
                    actual: n,
                    limit: ORACLE_LIMIT,
                });
            }
        }
        for &n in &self.n_values {
            for p in self.p_grid.values(n, self.k) {
                if p.is_nan() || !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("p = {p} is not a probability")));
                }
            }
        }
        if let Some(cfg) = &self.pipeline {
            self.trial_config(cfg.clone(), 0).validate()?;
        }
        Ok(())
    }

    fn trial_config(&self, base: PipelineConfig, seed: u64) -> PipelineConfig {
        PipelineConfig { k: self.k, seed, ..base }
    }
}

/// `hash(base, n, p_index, trial)`.
pub fn trial_seed(base: u64, n: usize, p_index: usize, trial: usize) -> u64 {
    derive(&[base, n as u64, p_index as u64, trial as u64])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub version: u32,
    pub n: usize,
    pub p: f64,
    pub p_index: usize,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub mode: Mode,
    pub success: bool,
    pub failed_stage: Option<Stage>,
    /// Number of completed pipeline stages; 0 or 1 for the oracle.
    pub stage_reached: usize,
    pub certificate_digest: Option<String>,
    pub runtime_ms: f64,
    pub stats: BTreeMap<String, u64>,
    /// Solver settings, pipeline mode only.
    pub config: Option<PipelineConfig>,
}

impl TrialRecord {
    /// Equality on everything but the runtime.
    pub fn same_result(&self, other: &TrialRecord) -> bool {
        let mut a = self.clone();
        a.runtime_ms = other.runtime_ms;
        a == *other
    }
}

/// Parameters identifying one trial.
#[derive(Clone, Debug)]
pub struct TrialKey {
    pub n: usize,
    pub p: f64,
    pub p_index: usize,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub mode: Mode,
    pub config: Option<PipelineConfig>,
}

pub fn run_trial(key: &TrialKey) -> Result<TrialRecord> {
    let start = Instant::now();
    let mut stats = BTreeMap::new();
    let (success, failed_stage, stage_reached, cert) = match key.mode {
        Mode::Oracle => {
            let g = sample_gnp(key.n, key.p, key.seed)?;
            stats.insert("edges".into(), g.edge_count() as u64);
            let min_deg = (0..g.n()).map(|v| g.degree(v)).min().unwrap_or(0);
            stats.insert("min_degree".into(), min_deg as u64);
            let c = oracle_certificate(&g, key.k)?;
            let ok = c.is_some();
            (ok, None, ok as usize, c.map(|c| c.cyclic_order))
        }
        Mode::Pipeline => {
            let base = key.config.clone().unwrap_or_default();
            let cfg = PipelineConfig {
                k: key.k,
                seed: key.seed,
                ..base
            };
            let res = solve(key.n, key.p, &cfg)?;
            let t = &res.trace;
            stats.insert("absorbers".into(), t.absorbers.len() as u64);
            stats.insert("pieces".into(), t.pieces.len() as u64);
            stats.insert("rounds_sampled".into(), t.sampled.len() as u64);
            stats.insert("leftovers".into(), t.sets.a_dprime.len() as u64);
            for s in &t.stages {
                stats.insert(format!("covered.{}", s.stage), s.covered as u64);
            }
            let reached = t.stages.iter().filter(|s| s.succeeded).count();
            match res.outcome {
                Outcome::Success { certificate } => (true, None, reached, Some(certificate.cyclic_order)),
                Outcome::Failure { stage, .. } => (false, Some(stage), reached, None),
            }
        }
    };
    Ok(TrialRecord {
        version: RECORD_VERSION,
        n: key.n,
        p: key.p,
        p_index: key.p_index,
        k: key.k,
        trial: key.trial,
        seed: key.seed,
        mode: key.mode,
        success,
        failed_stage,
        stage_reached,
        certificate_digest: cert.map(|c| digest(&c)),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        stats,
        config: key.config.clone().map(|c| PipelineConfig {
            k: key.k,
            seed: key.seed,
            ..c
        }),
    })
}

/// Re-run a stored trial.
pub fn replay(record: &TrialRecord) -> Result<TrialRecord> {
    if record.version != RECORD_VERSION {
        return Err(Error::VersionMismatch {
            found: record.version,
            expected: RECORD_VERSION,
        });
    }
    run_trial(&TrialKey {
        n: record.n,
        p: record.p,
        p_index: record.p_index,
        k: record.k,
        trial: record.trial,
        seed: record.seed,
        mode: record.mode,
        config: record.config.clone(),
    })
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let (x, n) = (successes as f64, trials as f64);
    let z2 = Z95 * Z95;
    let denom = n + z2;
    let center = (x + z2 / 2.0) / denom;
    let half = Z95 * (x * (n - x) / n + z2 / 4.0).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub p_index: usize,
    pub p: f64,
    pub k: usize,
    pub mode: Mode,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub expected_copies: Option<f64>,
}

/// One aggregate per `(n, p_index)`, in first-appearance order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut groups: BTreeMap<(usize, usize), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.n, r.p_index);
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let trials = g.len();
            let successes = g.iter().filter(|r| r.success).count();
            let (lo, hi) = wilson_interval(successes, trials);
            let first = g[0];
            Aggregate {
                n: first.n,
                p_index: first.p_index,
                p: first.p,
                k: first.k,
                mode: first.mode,
                trials,
                successes,
                success_rate: successes as f64 / trials as f64,
                wilson_low: lo,
                wilson_high: hi,
                expected_copies: expected_copy_count(first.n, first.k, first.p).ok(),
            }
        })
        .collect()
}

pub fn trial_row(r: &TrialRecord) -> Vec<String> {
    vec![
        r.version.to_string(),
        r.n.to_string(),
        r.p_index.to_string(),
        format!("{}", r.p),
        r.k.to_string(),
        r.trial.to_string(),
        r.seed.to_string(),
        r.mode.as_str().into(),
        (r.success as u8).to_string(),
        r.failed_stage.map(|s| s.name().to_string()).unwrap_or_default(),
        r.stage_reached.to_string(),
        r.certificate_digest.clone().unwrap_or_default(),
        format!("{:.3}", r.runtime_ms),
    ]
}

pub fn summary_row(a: &Aggregate) -> Vec<String> {
    vec![
        a.n.to_string(),
        a.p_index.to_string(),
        format!("{}", a.p),
        a.k.to_string(),
        a.mode.as_str().into(),
        a.trials.to_string(),
        a.successes.to_string(),
        format!("{:.6}", a.success_rate),
        format!("{:.6}", a.wilson_low),
        format!("{:.6}", a.wilson_high),
        a.expected_copies.map(|e| format!("{e:.6e}")).unwrap_or_default(),
    ]
}

/// Parse a trials CSV row back into its aggregate-relevant fields:
/// `(n, p_index, p, k, mode, success)`.
pub fn parse_trial_row(row: &csv::StringRecord) -> Result<(usize, usize, f64, usize, Mode, bool)> {
    let get = |i: usize| row.get(i).ok_or_else(|| invalid(format!("missing column {i}")));
    let num = |i: usize| -> Result<usize> { get(i)?.parse().map_err(|_| invalid(format!("bad integer in column {i}"))) };
    Ok((
        num(1)?,
        num(2)?,
        get(3)?.parse().map_err(|_| invalid("bad p"))?,
        num(4)?,
        get(7)?.parse()?,
        get(8)? == "1",
    ))
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
    pub trials_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub records_jsonl: PathBuf,
    pub spec_json: PathBuf,
}

/// Run every trial of `spec` and write `trials.csv`, `summary.csv`,
/// `records.jsonl` and `spec.json` into `out_dir`. Trial rows are flushed
/// after each grid point.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepOutput> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let trials_csv = out_dir.join("trials.csv");
    let summary_csv = out_dir.join("summary.csv");
    let records_jsonl = out_dir.join("records.jsonl");
    let spec_json = out_dir.join("spec.json");
    std::fs::write(&spec_json, serde_json::to_string_pretty(spec)?)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads.unwrap_or(0))
        .build()
        .map_err(|e| invalid(e.to_string()))?;
    let mut tw = csv::Writer::from_path(&trials_csv)?;
    tw.write_record(TRIAL_HEADER)?;
    tw.flush()?;
    let mut jw = File::create(&records_jsonl)?;
    let config = match spec.mode {
        Mode::Pipeline => Some(spec.pipeline.clone().unwrap_or_default()),
        Mode::Oracle => None,
    };
    let mut records = Vec::new();
    for &n in &spec.n_values {
        for (pi, p) in spec.p_grid.values(n, spec.k).into_iter().enumerate() {
            let keys: Vec<TrialKey> = (0..spec.trials)
                .map(|t| TrialKey {
                    n,
                    p,
                    p_index: pi,
                    k: spec.k,
                    trial: t,
                    seed: trial_seed(spec.seed_base, n, pi, t),
                    mode: spec.mode,
                    config: config.clone(),
                })
                .collect();
            let batch = pool.install(|| keys.par_iter().map(run_trial).collect::<Result<Vec<_>>>())?;
            for r in &batch {
                tw.write_record(trial_row(r))?;
                writeln!(jw, "{}", serde_json::to_string(r)?)?;
            }
            tw.flush()?;
            jw.flush()?;
            records.extend(batch);
        }
    }
    let aggregates = aggregate(&records);
    let mut sw = csv::Writer::from_path(&summary_csv)?;
    sw.write_record(SUMMARY_HEADER)?;
    for a in &aggregates {
        sw.write_record(summary_row(a))?;
    }
    sw.flush()?;
    Ok(SweepOutput {
        records,
        aggregates,
        trials_csv,
        summary_csv,
        records_jsonl,
        spec_json,
    })
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
