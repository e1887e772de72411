//! Burr (spike) detection and delete-and-reconnect repair.
//!
//! Each vertex is scored against four independent criteria and removed
//! only when enough of them fire at once. A sharp angle alone is not
//! enough: a genuine wedge-shaped wall has one too, so the scale criteria
//! (edge length, triangle area) and the local turn reversal have to agree.

use serde::{Deserialize, Serialize};
use std::ops::Sub;
use thiserror::Error;

use crate::geometry::{triangle_area, turn_sign, vertex_angle, Orientation, Point, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Criterion {
    SharpAngle,
    ShortEdges,
    TinyArea,
    TurnReversal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DespikeError {
    #[error("invalid spike configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("every vertex of a three-vertex ring is a spike")]
    RingCollapsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeConfig {
    /// Degrees. A vertex angle below this fires `SharpAngle`.
    pub max_angle: f64,
    /// Meters. Both incident edges below this fire `ShortEdges`.
    pub max_edge: f64,
    /// Square meters. The (prev, v, next) triangle below this fires `TinyArea`.
    pub max_area: f64,
    pub require_turn_reversal: bool,
    pub min_criteria: usize,
    pub max_passes: usize,
}

impl Default for SpikeConfig {
    fn default() -> Self {
        Self {
            max_angle: 30.0,
            max_edge: 0.5,
            max_area: 0.05,
            require_turn_reversal: true,
            min_criteria: 2,
            max_passes: 16,
        }
    }
}

impl SpikeConfig {
    pub fn validate(&self) -> Result<(), DespikeError> {
        if !(self.max_angle > 0.0 && self.max_angle < 180.0) {
            return Err(DespikeError::InvalidConfig("max_angle must lie in (0, 180) degrees"));
        }
        if !(self.max_edge > 0.0 && self.max_edge.is_finite()) {
            return Err(DespikeError::InvalidConfig("max_edge must be positive"));
        }
        if !(self.max_area >= 0.0 && self.max_area.is_finite()) {
            return Err(DespikeError::InvalidConfig("max_area must be non-negative"));
        }
        if !(1..=4).contains(&self.min_criteria) {
            return Err(DespikeError::InvalidConfig("min_criteria must lie in [1, 4]"));
        }
        if self.max_passes == 0 {
            return Err(DespikeError::InvalidConfig("max_passes must be at least 1"));
        }
        Ok(())
    }

    /// Removal rule applied to a set of fired criteria.
    pub fn is_spike(&self, fired: &[Criterion]) -> bool {
        fired.len() >= self.min_criteria && (!self.require_turn_reversal || fired.contains(&Criterion::TurnReversal))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeVerdict {
    pub vertex_index: usize,
    pub position: Point,
    /// Fired criteria in declaration order.
    pub fired: Vec<Criterion>,
    pub removed: bool,
    /// Sweep pass (1-based) that produced this verdict; 0 for a standalone
    /// diagnosis.
    pub pass: usize,
}

/// Criteria fired at position `i` of the cyclic vertex list `pts`.
fn fired_at(pts: &[Point], i: usize, cfg: &SpikeConfig) -> Vec<Criterion> {
    let n = pts.len();
    let at = |k: isize| pts[(i as isize + k).rem_euclid(n as isize) as usize];
    let (prev, v, next) = (at(-1), at(0), at(1));
    let mut fired = Vec::with_capacity(4);

    // Ring invariants rule out coincident neighbors; a degenerate angle
    // can only come from a caller-built list and counts as fully sharp.
    let angle = vertex_angle(prev, v, next).unwrap_or(0.0);
    if angle < cfg.max_angle {
        fired.push(Criterion::SharpAngle);
    }
    if v.distance(prev) < cfg.max_edge && v.distance(next) < cfg.max_edge {
        fired.push(Criterion::ShortEdges);
    }
    if triangle_area(prev, v, next) < cfg.max_area {
        fired.push(Criterion::TinyArea);
    }
    let here = turn_sign(prev, v, next);
    let before = turn_sign(at(-2), prev, v);
    let after = turn_sign(v, next, at(2));
    if here.is_opposite(before) && here.is_opposite(after) {
        fired.push(Criterion::TurnReversal);
    }
    fired
}

/// Scores vertex `i` of `ring` against every criterion.
///
/// `TurnReversal` fires when the turn at the vertex is opposite to the
/// turns at both of its neighbors, i.e. the boundary locally flips
/// between clockwise and counter-clockwise and back. This catches
/// outward burrs (convex apex between two reflex base vertices) as well
/// as inward notches.
pub fn diagnose_vertex(ring: &Ring, i: usize, cfg: &SpikeConfig) -> SpikeVerdict {
    let fired = fired_at(ring.vertices(), i, cfg);
    SpikeVerdict { vertex_index: i, position: ring.vertex(i), removed: cfg.is_spike(&fired), fired, pass: 0 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DespikeOutcome {
    pub ring: Ring,
    /// Every diagnosis that fired at least one criterion, in scan order.
    /// Indices refer to the input ring.
    pub verdicts: Vec<SpikeVerdict>,
    /// Input indices of removed vertices, in removal order.
    pub removed: Vec<usize>,
    pub passes: usize,
    /// True if `max_passes` ran out before a pass removed nothing.
    pub hit_pass_cap: bool,
}

/// Signed area change when the middle vertex of (p, v, q) is dropped.
fn removal_area_delta(p: Point, v: Point, q: Point) -> f64 {
    -0.5 * v.sub(p).cross(q.sub(p))
}

/// Removes spikes by sweeping the ring until a pass changes nothing.
///
/// Within a pass vertices are visited in index order. After a removal the
/// previous vertex is diagnosed again before the scan moves on, since its
/// angle and edges just changed. Removals that would leave fewer than
/// three vertices or flip the ring's orientation are refused.
pub fn remove_spikes(ring: &Ring, cfg: &SpikeConfig) -> Result<DespikeOutcome, DespikeError> {
    cfg.validate()?;
    if ring.len() == 3 && (0..3).all(|i| diagnose_vertex(ring, i, cfg).removed) {
        return Err(DespikeError::RingCollapsed);
    }

    let mut pts: Vec<Point> = ring.vertices().to_vec();
    let mut ids: Vec<usize> = (0..pts.len()).collect();
    let sign = match ring.orientation() {
        Orientation::Ccw => 1.0,
        Orientation::Cw => -1.0,
    };
    let mut area = crate::geometry::signed_area(ring);
    let mut verdicts = Vec::new();
    let mut removed = Vec::new();
    let mut passes = 0;
    let mut hit_pass_cap = true;

    for pass in 1..=cfg.max_passes {
        passes = pass;
        let mut removed_this_pass = 0;
        let mut i = 0;
        while i < pts.len() {
            let fired = fired_at(&pts, i, cfg);
            if fired.is_empty() {
                i += 1;
                continue;
            }
            let mut verdict = SpikeVerdict { vertex_index: ids[i], position: pts[i], removed: false, fired, pass };
            if cfg.is_spike(&verdict.fired) {
                let n = pts.len();
                let (p, v, q) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
                let merges = p.coincides(q);
                let new_area = area + removal_area_delta(p, v, q);
                let remaining = n - 1 - usize::from(merges);
                if remaining < 3 {
                    log::warn!("refusing to remove vertex {}: ring would drop below 3 vertices", ids[i]);
                } else if new_area * sign <= 0.0 {
                    log::warn!("refusing to remove vertex {}: ring would collapse or flip", ids[i]);
                } else {
                    verdict.removed = true;
                    removed.push(ids[i]);
                    pts.remove(i);
                    ids.remove(i);
                    area = new_area;
                    if merges {
                        // prev and next coincide now: keep one of them
                        let j = i % pts.len();
                        removed.push(ids[j]);
                        pts.remove(j);
                        ids.remove(j);
                    }
                    removed_this_pass += 1;
                    verdicts.push(verdict);
                    i = i.saturating_sub(1).min(pts.len());
                    continue;
                }
            }
            verdicts.push(verdict);
            i += 1;
        }
        if removed_this_pass == 0 {
            hit_pass_cap = false;
            break;
        }
    }
    if hit_pass_cap {
        log::info!("spike removal stopped at the pass cap ({})", cfg.max_passes);
    }

    let out = Ring::new(pts).map_err(|_| DespikeError::RingCollapsed)?;
    Ok(DespikeOutcome { ring: out, verdicts, removed, passes, hit_pass_cap })
}
