//! End-to-end regularization of one ring.
//!
//! Stages, in the default order:
//!
//! 1. Douglas-Peucker on the ring, keeping the original→simplified mapping.
//! 2. Spike removal on the simplified ring. A removed vertex is dropped
//!    from the retained set, which merges its two runs into one.
//! 3. One total-least-squares line per run, fitted to all original
//!    vertices of the run.
//! 4. Corners rebuilt by intersecting consecutive fitted lines, with a
//!    projection fallback for near-parallel neighbors and skipped runs.
//!
//! A stage failure never aborts: the last good intermediate ring is
//! returned and the report records where things stopped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::despike::{remove_spikes, SpikeConfig, SpikeVerdict};
use crate::fitline::{tls_fit, FitResult};
use crate::geometry::{distance_to_boundary, line_intersection_guarded, project_point, signed_area, Point, Ring};
use crate::simplify::{ring_runs, simplify_ring, SegmentRun, SimplifyConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
    #[error("only {0} corners could be rebuilt")]
    RebuildFailed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerMode {
    Intersect,
    Project,
}

/// How one output corner was actually produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerSource {
    Intersect,
    /// Projection chosen by configuration.
    Project,
    /// Projection used because intersection was unavailable.
    ProjectFallback,
    /// Neither neighboring run was fitted; the simplified vertex is kept.
    Kept,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub simplify: SimplifyConfig,
    pub spike: SpikeConfig,
    pub despike_before_simplify: bool,
    pub corner_mode: CornerMode,
    /// Degrees. Consecutive lines closer than this are not intersected.
    pub parallel_fallback_deg: f64,
    pub min_run_points: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            simplify: SimplifyConfig::default(),
            spike: SpikeConfig::default(),
            despike_before_simplify: false,
            corner_mode: CornerMode::Intersect,
            parallel_fallback_deg: 1.0,
            min_run_points: 3,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.parallel_fallback_deg > 0.0 && self.parallel_fallback_deg < 45.0) {
            return Err(PipelineError::InvalidConfig("parallel_fallback_deg must lie in (0, 45)".into()));
        }
        if self.min_run_points < 2 {
            return Err(PipelineError::InvalidConfig("min_run_points must be at least 2".into()));
        }
        self.spike.validate().map_err(|e| PipelineError::InvalidConfig(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunFit {
    Fitted(FitResult),
    Skipped { reason: SkipReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    TooFewPoints,
    AllCoincident,
}

impl RunFit {
    pub fn fit(&self) -> Option<&FitResult> {
        match self {
            RunFit::Fitted(f) => Some(f),
            RunFit::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run: SegmentRun,
    pub fit: RunFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Despike,
    Simplify,
    Fit,
    Rebuild,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationReport {
    pub input_vertex_count: usize,
    pub output_vertex_count: usize,
    /// Input indices of the vertices that became output corners.
    pub retained_indices: Vec<usize>,
    /// Indices refer to the input ring.
    pub spike_verdicts: Vec<SpikeVerdict>,
    pub spike_passes: usize,
    /// Runs are expressed in input indices; in despike-first mode the
    /// fit only sees the vertices that survived despiking.
    pub per_run_fits: Vec<RunReport>,
    pub corner_modes_used: Vec<CornerSource>,
    pub epsilon_used: f64,
    /// Largest distance from an input vertex to the output boundary.
    pub max_deviation: f64,
    pub area_before: f64,
    pub area_after: f64,
    pub warnings: Vec<String>,
    pub failure: Option<StageFailure>,
}

impl RegularizationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty() && self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedRing {
    pub ring: Ring,
    pub provenance: RegularizationReport,
}

/// One run per edge of the simplified ring, cyclic.
pub fn segment_runs(original: &Ring, retained: &[usize]) -> Vec<SegmentRun> {
    ring_runs(retained, original.len())
}

/// Fits every run with at least `min_run_points` vertices.
pub fn fit_runs(original: &Ring, runs: &[SegmentRun], cfg: &PipelineConfig) -> Vec<RunReport> {
    let verts = original.vertices();
    runs.iter()
        .map(|&run| {
            if run.count < cfg.min_run_points {
                return RunReport { run, fit: RunFit::Skipped { reason: SkipReason::TooFewPoints } };
            }
            let pts: Vec<Point> = run.points(verts).collect();
            let fit = match tls_fit(&pts) {
                Ok(f) => RunFit::Fitted(f),
                Err(e) => {
                    log::warn!("run {}..{} not fitted: {e}", run.start, run.end);
                    RunFit::Skipped { reason: SkipReason::AllCoincident }
                }
            };
            RunReport { run, fit }
        })
        .collect()
}

/// Builds the output corners from consecutive run fits.
///
/// Corner `k` sits between run `k - 1` (ending at it) and run `k`
/// (starting at it).
pub fn rebuild_ring(
    fits: &[RunReport],
    original: &Ring,
    cfg: &PipelineConfig,
) -> Result<(Ring, Vec<CornerSource>), PipelineError> {
    let k = fits.len();
    if k < 3 {
        return Err(PipelineError::RebuildFailed(k));
    }
    let mut corners = Vec::with_capacity(k);
    let mut sources = Vec::with_capacity(k);
    for i in 0..k {
        let incoming = fits[(i + k - 1) % k].fit.fit();
        let outgoing = fits[i].fit.fit();
        let vertex = original.vertex(fits[i].run.start);

        let intersected = match (cfg.corner_mode, incoming, outgoing) {
            (CornerMode::Intersect, Some(a), Some(b)) => {
                line_intersection_guarded(&a.line, &b.line, cfg.parallel_fallback_deg).ok()
            }
            _ => None,
        };
        let (corner, source) = match intersected {
            Some(p) => (p, CornerSource::Intersect),
            None => {
                let projections: Vec<Point> =
                    [incoming, outgoing].into_iter().flatten().map(|f| project_point(&f.line, vertex)).collect();
                match projections.as_slice() {
                    [] => (vertex, CornerSource::Kept),
                    [p] => (*p, fallback_source(cfg)),
                    [p, q] => (p.midpoint(*q), fallback_source(cfg)),
                    _ => unreachable!(),
                }
            }
        };
        if !corner.is_finite() {
            return Err(PipelineError::RebuildFailed(i));
        }
        corners.push(corner);
        sources.push(source);
    }
    let ring = Ring::new(corners).map_err(|_| PipelineError::RebuildFailed(k))?;
    Ok((ring, sources))
}

fn fallback_source(cfg: &PipelineConfig) -> CornerSource {
    match cfg.corner_mode {
        CornerMode::Intersect => CornerSource::ProjectFallback,
        CornerMode::Project => CornerSource::Project,
    }
}

fn max_deviation(input: &Ring, output: &Ring) -> f64 {
    input.vertices().iter().map(|&p| distance_to_boundary(p, output)).fold(0.0, f64::max)
}

struct Partial {
    report: RegularizationReport,
}

impl Partial {
    fn finish(mut self, input: &Ring, ring: Ring) -> RegularizedRing {
        self.report.output_vertex_count = ring.len();
        self.report.area_after = signed_area(&ring);
        self.report.max_deviation = max_deviation(input, &ring);
        if !ring.is_simple() {
            self.report.warnings.push("output ring self-intersects".into());
        }
        RegularizedRing { ring, provenance: self.report }
    }

    fn fail(mut self, input: &Ring, stage: Stage, message: String, last_good: Ring) -> RegularizedRing {
        log::warn!("regularization stopped at {stage:?}: {message}");
        self.report.failure = Some(StageFailure { stage, message });
        self.finish(input, last_good)
    }
}

fn pick(ring: &Ring, idx: &[usize]) -> Vec<Point> {
    idx.iter().map(|&i| ring.vertex(i)).collect()
}

/// Runs the full regularization on `ring`.
pub fn regularize(ring: &Ring, cfg: &PipelineConfig) -> RegularizedRing {
    let mut partial = Partial {
        report: RegularizationReport {
            input_vertex_count: ring.len(),
            output_vertex_count: ring.len(),
            retained_indices: (0..ring.len()).collect(),
            spike_verdicts: Vec::new(),
            spike_passes: 0,
            per_run_fits: Vec::new(),
            corner_modes_used: Vec::new(),
            epsilon_used: cfg.simplify.epsilon(),
            max_deviation: 0.0,
            area_before: signed_area(ring),
            area_after: signed_area(ring),
            warnings: Vec::new(),
            failure: None,
        },
    };
    if let Err(e) = cfg.validate() {
        return partial.fail(ring, Stage::Simplify, e.to_string(), ring.clone());
    }

    // Working ring: what the simplifier and fitter see. `to_input` maps
    // its indices back to the input ring.
    let (work, to_input): (Ring, Vec<usize>) = if cfg.despike_before_simplify {
        match remove_spikes(ring, &cfg.spike) {
            Ok(out) => {
                let removed: std::collections::BTreeSet<usize> = out.removed.iter().copied().collect();
                let map: Vec<usize> = (0..ring.len()).filter(|i| !removed.contains(i)).collect();
                partial.report.spike_verdicts = out.verdicts;
                partial.report.spike_passes = out.passes;
                if out.hit_pass_cap {
                    partial.report.warnings.push(format!("spike removal hit the pass cap ({})", cfg.spike.max_passes));
                }
                (out.ring, map)
            }
            Err(e) => return partial.fail(ring, Stage::Despike, e.to_string(), ring.clone()),
        }
    } else {
        (ring.clone(), (0..ring.len()).collect())
    };

    let simplified = simplify_ring(&work, &cfg.simplify);
    partial.report.epsilon_used = simplified.epsilon_used;
    if simplified.epsilon_used != cfg.simplify.epsilon() {
        partial.report.warnings.push(format!("tolerance halved to {} to keep three vertices", simplified.epsilon_used));
    }
    let mut retained = simplified.retained;

    if !cfg.despike_before_simplify {
        let simple_ring = match Ring::new(pick(&work, &retained)) {
            Ok(r) => r,
            Err(e) => return partial.fail(ring, Stage::Simplify, e.to_string(), work),
        };
        match remove_spikes(&simple_ring, &cfg.spike) {
            Ok(out) => {
                let removed: std::collections::BTreeSet<usize> = out.removed.iter().copied().collect();
                partial.report.spike_verdicts = out
                    .verdicts
                    .into_iter()
                    .map(|mut v| {
                        v.vertex_index = to_input[retained[v.vertex_index]];
                        v
                    })
                    .collect();
                partial.report.spike_passes = out.passes;
                if out.hit_pass_cap {
                    partial.report.warnings.push(format!("spike removal hit the pass cap ({})", cfg.spike.max_passes));
                }
                retained = retained.iter().enumerate().filter(|(k, _)| !removed.contains(k)).map(|(_, &i)| i).collect();
            }
            Err(e) => return partial.fail(ring, Stage::Despike, e.to_string(), simple_ring),
        }
    }
    partial.report.retained_indices = retained.iter().map(|&i| to_input[i]).collect();
    let intermediate = match Ring::new(pick(&work, &retained)) {
        Ok(r) => r,
        Err(e) => return partial.fail(ring, Stage::Despike, e.to_string(), work),
    };

    let runs = segment_runs(&work, &retained);
    let fits = fit_runs(&work, &runs, cfg);
    if fits.iter().any(|f| matches!(f.fit, RunFit::Skipped { reason: SkipReason::AllCoincident })) {
        partial.report.warnings.push("a run with coincident vertices was not fitted".into());
    }
    partial.report.per_run_fits = fits
        .iter()
        .map(|f| RunReport {
            run: SegmentRun { start: to_input[f.run.start], end: to_input[f.run.end], count: f.run.count },
            fit: f.fit,
        })
        .collect();

    match rebuild_ring(&fits, &work, cfg) {
        Ok((out, sources)) => {
            partial.report.corner_modes_used = sources;
            if out.orientation() != ring.orientation() {
                return partial.fail(ring, Stage::Rebuild, "rebuilt ring flipped orientation".into(), intermediate);
            }
            partial.finish(ring, out)
        }
        Err(e) => partial.fail(ring, Stage::Rebuild, e.to_string(), intermediate),
    }
}
