//! Regularization of noisy building-footprint polygons.
//!
//! Outlines traced from rasters carry pixel staircases and small burrs.
//! This crate simplifies them with Douglas-Peucker, removes burrs, fits a
//! total-least-squares line to every wall, and rebuilds crisp corners.
//! A synthetic generator provides outlines with known ground truth.

pub mod despike;
pub mod fitline;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod simplify;
pub mod synth;

pub use despike::{diagnose_vertex, remove_spikes, Criterion, SpikeConfig, SpikeVerdict};
pub use fitline::{ols_fit, penalty_profile, residuals, tls_fit, FitResult, OlsResult};
pub use geometry::{Line, Orientation, Point, Polyline, Ring, Turn};
pub use pipeline::{regularize, CornerMode, PipelineConfig, RegularizationReport, RegularizedRing};
pub use simplify::{douglas_peucker, simplify_ring, SegmentRun, SimplifyConfig, SimplifyResult};
pub use synth::{SynthCase, SynthSpec};
