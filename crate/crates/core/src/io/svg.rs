//! Before/after previews for visual checks.

use std::fmt::Write as _;
use std::path::Path;

use super::{FeatureRecord, IoError};
use crate::geometry::{Point, Ring};
use crate::pipeline::RegularizedRing;

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn path_data(ring: &Ring) -> String {
    let mut d = String::new();
    for (i, p) in ring.vertices().iter().enumerate() {
        let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(p.x), num(-p.y));
    }
    d.push('Z');
    d
}

/// Renders input rings in gray, regularized rings in black and a red dot
/// at every vertex despiking removed. North is up.
pub fn render_rings(before: &[&Ring], after: &[&RegularizedRing]) -> String {
    let all = before.iter().flat_map(|r| r.vertices()).chain(after.iter().flat_map(|r| r.ring.vertices()));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let (w, h) = (x1 - x0, y1 - y0);
    let mx = if w > 0.0 { 0.05 * w } else { 1.0 };
    let my = if h > 0.0 { 0.05 * h } else { 1.0 };
    let marker = 0.01 * w.max(h).max(1e-6);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        num(x0 - mx),
        num(-y1 - my),
        num(w + 2.0 * mx),
        num(h + 2.0 * my)
    );
    s.push_str("<g fill=\"none\" stroke-linejoin=\"round\">\n");
    for r in before {
        let _ = writeln!(
            s,
            "<path class=\"before\" d=\"{}\" stroke=\"#999999\" stroke-width=\"2\" vector-effect=\"non-scaling-stroke\"/>",
            path_data(r)
        );
    }
    for r in after {
        let _ = writeln!(
            s,
            "<path class=\"after\" d=\"{}\" stroke=\"#000000\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\"/>",
            path_data(&r.ring)
        );
    }
    s.push_str("</g>\n<g fill=\"#d62728\">\n");
    for r in after {
        for v in r.provenance.spike_verdicts.iter().filter(|v| v.removed) {
            let Point { x, y } = v.position;
            let _ = writeln!(s, "<circle class=\"spike\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>", num(x), num(-y), num(marker));
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Input exterior and holes against one regularized ring.
pub fn render_svg(before: &FeatureRecord, after: &RegularizedRing) -> String {
    let mut rings = vec![&before.exterior];
    rings.extend(before.holes.iter());
    render_rings(&rings, &[after])
}

pub fn write_svg(before: &FeatureRecord, after: &RegularizedRing, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, render_svg(before, after))?;
    Ok(())
}
