//! Orthogonal (total least squares) line fitting.
//!
//! The fitted line minimizes the sum of squared perpendicular distances,
//! so walls of any direction, vertical ones included, are handled the
//! same way. Ordinary least squares is kept alongside for comparison.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Line, Point, COINCIDENCE_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("all points coincide")]
    AllCoincident,
    #[error("x-values have no spread; ordinary least squares is undefined for vertical data")]
    VerticalData,
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub line: Line,
    pub rms_orthogonal_residual: f64,
    pub sum_squared_residuals: f64,
    pub n_points: usize,
    pub centroid: Point,
    /// Both scatter eigenvalues are equal: every direction fits equally
    /// well and the line was pinned to horizontal.
    pub isotropic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub slope_m: f64,
    pub intercept_c: f64,
    pub sum_squared_vertical: f64,
}

/// Centroid and central second moments (sxx, syy, sxy).
fn moments(points: &[Point]) -> (Point, f64, f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.x, b + p.y));
    let c = Point::new(sx / n, sy / n);
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        xx += dx * dx;
        yy += dy * dy;
        xy += dx * dy;
    }
    (c, xx, yy, xy)
}

fn check_input(points: &[Point]) -> Result<(), FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(FitError::NonFinite);
    }
    Ok(())
}

/// Eigenvalues (larger, smaller) of the symmetric matrix [[xx, xy], [xy, yy]].
fn eigenvalues(xx: f64, yy: f64, xy: f64) -> (f64, f64) {
    let half_trace = 0.5 * (xx + yy);
    let r = (0.5 * (xx - yy)).hypot(xy);
    (half_trace + r, half_trace - r)
}

/// Total least squares line through `points`.
///
/// The normal is the eigenvector of the 2x2 scatter matrix with the
/// smallest eigenvalue, in closed form. The line passes through the
/// centroid and its squared-residual sum equals that eigenvalue.
pub fn tls_fit(points: &[Point]) -> Result<FitResult, FitError> {
    check_input(points)?;
    let spread = points.iter().map(|p| p.distance(points[0])).fold(0.0, f64::max);
    if spread < COINCIDENCE_EPS {
        return Err(FitError::AllCoincident);
    }
    let (centroid, xx, yy, xy) = moments(points);
    let (big, small) = eigenvalues(xx, yy, xy);
    let isotropic = big - small <= 1e-12 * big;

    let normal = if isotropic {
        Point::new(0.0, 1.0)
    } else {
        // Principal (largest-variance) direction; the normal is perpendicular.
        let theta = 0.5 * (2.0 * xy).atan2(xx - yy);
        let (s, c) = theta.sin_cos();
        Point::new(-s, c)
    };
    let line = Line::from_normal(normal, centroid).map_err(|_| FitError::NonFinite)?;
    let sum_squared_residuals: f64 = points.iter().map(|p| line.signed_distance(*p).powi(2)).sum();
    let n_points = points.len();
    Ok(FitResult {
        line,
        rms_orthogonal_residual: (sum_squared_residuals / n_points as f64).sqrt(),
        sum_squared_residuals,
        n_points,
        centroid,
        isotropic,
    })
}

/// Smallest eigenvalue of the centered scatter matrix: the optimal
/// orthogonal residual sum computed without forming the line.
pub fn min_scatter_eigenvalue(points: &[Point]) -> Result<f64, FitError> {
    check_input(points)?;
    let (_, xx, yy, xy) = moments(points);
    Ok(eigenvalues(xx, yy, xy).1.max(0.0))
}

/// Ordinary least squares `y = m·x + c`, minimizing vertical residuals.
pub fn ols_fit(points: &[Point]) -> Result<OlsResult, FitError> {
    check_input(points)?;
    let (centroid, xx, _, xy) = moments(points);
    if xx / (points.len() as f64) < 1e-12 {
        return Err(FitError::VerticalData);
    }
    let slope_m = xy / xx;
    let intercept_c = centroid.y - slope_m * centroid.x;
    let sum_squared_vertical = points.iter().map(|p| (p.y - slope_m * p.x - intercept_c).powi(2)).sum();
    Ok(OlsResult { slope_m, intercept_c, sum_squared_vertical })
}

/// Perpendicular distance of every point to `line`, in input order.
pub fn residuals(line: &Line, points: &[Point]) -> Vec<f64> {
    points.iter().map(|p| line.signed_distance(*p).abs()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub distance: f64,
    pub contribution: f64,
}

/// Each point's distance and its squared contribution to the fit
/// objective, largest contribution first. Shows how much say each point,
/// outliers in particular, has over the fitted line.
pub fn penalty_profile(points: &[Point], line: &Line) -> Vec<Penalty> {
    let mut out: Vec<Penalty> =
        residuals(line, points).into_iter().map(|d| Penalty { distance: d, contribution: d * d }).collect();
    out.sort_by(|a, b| b.contribution.total_cmp(&a.contribution));
    out
}
