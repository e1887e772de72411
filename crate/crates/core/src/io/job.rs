//! Batch driver: read, regularize every ring, write outputs.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::svg::render_rings;
use super::{read_features_lenient, write_features, FeatureRecord, Format, IoError};
use crate::pipeline::{regularize, PipelineConfig, PipelineError, RegularizationReport, RegularizedRing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_DEGRADED: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub input_path: PathBuf,
    pub output_path: PathBuf,
    pub report_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub pipeline: PipelineConfig,
    pub parallelism: usize,
    /// Guessed from the file extension when unset.
    pub input_format: Option<Format>,
    pub output_format: Option<Format>,
}

impl JobConfig {
    pub fn new(input_path: impl Into<PathBuf>, output_path: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            output_path: output_path.into(),
            report_path: None,
            svg_path: None,
            pipeline: PipelineConfig::default(),
            parallelism: 1,
            input_format: None,
            output_format: None,
        }
    }

    pub fn validate(&self) -> Result<(), JobError> {
        if self.input_path.as_os_str().is_empty() || self.output_path.as_os_str().is_empty() {
            return Err(JobError::Config("input and output paths must be non-empty".into()));
        }
        if self.report_path.as_ref().is_some_and(|p| p.as_os_str().is_empty())
            || self.svg_path.as_ref().is_some_and(|p| p.as_os_str().is_empty())
        {
            return Err(JobError::Config("report and svg paths must be non-empty when given".into()));
        }
        if self.parallelism == 0 {
            return Err(JobError::Config("parallelism must be at least 1".into()));
        }
        self.pipeline.validate().map_err(|e: PipelineError| JobError::Config(e.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: IoError },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingRole {
    Exterior,
    Hole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: String,
    pub ring: RingRole,
    /// Hole number within the feature; 0 for the exterior.
    pub ring_index: usize,
    pub report: RegularizationReport,
}

#[derive(Debug, Clone, Default)]
pub struct JobSummary {
    pub features_in: usize,
    pub features_out: usize,
    pub skipped: usize,
    pub degraded: usize,
    pub entries: Vec<ReportEntry>,
}

impl JobSummary {
    pub fn exit_code(&self) -> i32 {
        if self.skipped > 0 || self.degraded > 0 {
            EXIT_DEGRADED
        } else {
            EXIT_OK
        }
    }
}

struct Processed {
    output: FeatureRecord,
    rings: Vec<RegularizedRing>,
}

fn process(rec: &FeatureRecord, cfg: &PipelineConfig) -> Processed {
    let ext = regularize(&rec.exterior, cfg);
    let holes: Vec<RegularizedRing> = rec.holes.iter().map(|h| regularize(h, cfg)).collect();
    let output = FeatureRecord::new(
        rec.id.clone(),
        ext.ring.clone(),
        holes.iter().map(|h| h.ring.clone()).collect(),
        rec.properties.clone(),
    );
    let mut rings = vec![ext];
    rings.extend(holes);
    Processed { output, rings }
}

fn svg_name(index: usize, id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    format!("{index:05}-{safe}.svg")
}

/// Runs a whole batch. Per-feature trouble is recorded in the summary;
/// only configuration and I/O problems are errors.
pub fn run_job_detailed(cfg: &JobConfig) -> Result<JobSummary, JobError> {
    cfg.validate()?;
    let io_err = |path: &std::path::Path| {
        let path = path.to_path_buf();
        move |source: IoError| JobError::Io { path, source }
    };
    let in_fmt = cfg.input_format.unwrap_or_else(|| Format::from_path(&cfg.input_path));
    let out_fmt = cfg.output_format.unwrap_or_else(|| Format::from_path(&cfg.output_path));
    let set = read_features_lenient(&cfg.input_path, in_fmt).map_err(io_err(&cfg.input_path))?;
    log::info!("read {} feature(s) from {}", set.records.len(), cfg.input_path.display());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| JobError::Pool(e.to_string()))?;
    let processed: Vec<Processed> =
        pool.install(|| set.records.par_iter().map(|r| process(r, &cfg.pipeline)).collect());

    let mut summary = JobSummary { features_in: set.records.len(), skipped: set.skipped.len(), ..Default::default() };
    for (rec, p) in set.records.iter().zip(&processed) {
        let mut degraded = false;
        for (k, r) in p.rings.iter().enumerate() {
            let report = &r.provenance;
            if !report.is_clean() {
                degraded = true;
                for w in &report.warnings {
                    log::warn!("feature {}: {w}", rec.id);
                }
                if let Some(f) = &report.failure {
                    log::warn!("feature {}: {:?} stage failed: {}", rec.id, f.stage, f.message);
                }
            }
            summary.entries.push(ReportEntry {
                id: rec.id.clone(),
                ring: if k == 0 { RingRole::Exterior } else { RingRole::Hole },
                ring_index: k.saturating_sub(1),
                report: report.clone(),
            });
        }
        summary.degraded += usize::from(degraded);
    }

    let outputs: Vec<FeatureRecord> = processed.iter().map(|p| p.output.clone()).collect();
    write_features(&outputs, &cfg.output_path, out_fmt).map_err(io_err(&cfg.output_path))?;
    summary.features_out = outputs.len();

    if let Some(path) = &cfg.report_path {
        let text = serde_json::to_string_pretty(&summary.entries).expect("reports serialize");
        std::fs::write(path, text + "\n").map_err(|e| io_err(path)(e.into()))?;
    }
    if let Some(dir) = &cfg.svg_path {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir)(e.into()))?;
        for (i, (rec, p)) in set.records.iter().zip(&processed).enumerate() {
            let mut before = vec![&rec.exterior];
            before.extend(rec.holes.iter());
            let after: Vec<&RegularizedRing> = p.rings.iter().collect();
            let path = dir.join(svg_name(i, &rec.id));
            std::fs::write(&path, render_rings(&before, &after)).map_err(|e| io_err(&path)(e.into()))?;
        }
    }
    Ok(summary)
}

/// Exit code 0 when every feature came through cleanly, 2 when any was
/// skipped or downgraded, 1 on a configuration or I/O error.
pub fn run_job(cfg: &JobConfig) -> i32 {
    match run_job_detailed(cfg) {
        Ok(s) => s.exit_code(),
        Err(e) => {
            log::error!("{e}");
            EXIT_FATAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_names_are_safe() {
        assert_eq!(svg_name(3, "a/b#1"), "00003-a_b_1.svg");
    }

    #[test]
    fn zero_parallelism_rejected() {
        let mut cfg = JobConfig::new("a.geojson", "b.geojson");
        cfg.parallelism = 0;
        assert!(matches!(cfg.validate(), Err(JobError::Config(_))));
        assert_eq!(run_job(&cfg), EXIT_FATAL);
    }
}
