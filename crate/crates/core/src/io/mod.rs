//! Reading and writing footprints, SVG previews and the batch driver.

mod csv_xy;
mod geojson;
pub mod job;
pub mod svg;
mod wkt;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::value::RawValue;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::geometry::{GeometryError, Orientation, Point, Ring};

pub use csv_xy::{parse_csv_xy, to_csv_xy};
pub use geojson::{corpus_to_geojson, parse_geojson, to_geojson};
pub use job::{run_job, JobConfig, ReportEntry};
pub use wkt::{parse_wkt, to_wkt};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
    #[error("unsupported geometry {kind} in feature {feature}")]
    UnsupportedGeometry { kind: String, feature: String },
    #[error("invalid ring in feature {feature}: {source}")]
    InvalidRing { feature: String, source: GeometryError },
    #[error("unknown format {0:?} (expected geojson, wkt or csv)")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    GeoJson,
    Wkt,
    CsvXy,
}

impl FromStr for Format {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "geojson" | "json" => Ok(Format::GeoJson),
            "wkt" => Ok(Format::Wkt),
            "csv" | "csv-xy" => Ok(Format::CsvXy),
            _ => Err(IoError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::GeoJson => "geojson",
            Format::Wkt => "wkt",
            Format::CsvXy => "csv",
        })
    }
}

impl Format {
    /// Guess from a file extension, defaulting to GeoJSON.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("wkt") => Format::Wkt,
            Some("csv") => Format::CsvXy,
            _ => Format::GeoJson,
        }
    }
}

/// Feature attributes, kept as the exact JSON text they were read from.
#[derive(Clone, Serialize)]
#[serde(transparent)]
pub struct Properties(Box<RawValue>);

impl Properties {
    pub fn empty() -> Self {
        Self(RawValue::from_string("{}".to_string()).expect("valid json"))
    }

    /// Checks that `text` is a single JSON value; the text is kept verbatim.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        RawValue::from_string(text.to_string()).map(Self)
    }

    pub fn from_map(map: &Map<String, Value>) -> Self {
        Self(serde_json::value::to_raw_value(map).expect("maps serialize"))
    }

    pub fn as_str(&self) -> &str {
        self.0.get()
    }

    /// Parsed view. Anything other than an object reads as empty.
    pub fn to_map(&self) -> Map<String, Value> {
        match serde_json::from_str(self.as_str()) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        self.to_map().remove(key)
    }
}

impl Default for Properties {
    fn default() -> Self {
        Self::empty()
    }
}

impl PartialEq for Properties {
    fn eq(&self, other: &Self) -> bool {
        self.as_str() == other.as_str()
    }
}

impl fmt::Debug for Properties {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One polygon: exterior CCW, holes CW, with pass-through properties.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub exterior: Ring,
    pub holes: Vec<Ring>,
    pub properties: Properties,
}

impl FeatureRecord {
    pub fn new(id: impl Into<String>, exterior: Ring, holes: Vec<Ring>, properties: Properties) -> Self {
        Self {
            id: id.into(),
            exterior: exterior.with_orientation(Orientation::Ccw),
            holes: holes.into_iter().map(|h| h.with_orientation(Orientation::Cw)).collect(),
            properties,
        }
    }
}

/// Something read from a file that was not turned into a record.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub feature: String,
    pub reason: String,
}

/// Parse result in lenient mode: unsupported geometries are skipped.
#[derive(Debug, Clone, Default)]
pub struct FeatureSet {
    pub records: Vec<FeatureRecord>,
    pub skipped: Vec<Skipped>,
}

pub(crate) fn ring_from(feature: &str, pts: Vec<Point>) -> Result<Ring, IoError> {
    Ring::from_raw(pts).map_err(|source| IoError::InvalidRing { feature: feature.to_string(), source })
}

/// Formats a coordinate with nine fraction digits.
pub(crate) fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.9}");
    if s == "-0.000000000" {
        "0.000000000".to_string()
    } else {
        s
    }
}

pub fn parse_features(text: &str, format: Format, lenient: bool) -> Result<FeatureSet, IoError> {
    match format {
        Format::GeoJson => parse_geojson(text, lenient),
        Format::Wkt => parse_wkt(text, lenient),
        Format::CsvXy => parse_csv_xy(text),
    }
}

/// Reads every polygon in `path`. Points and lines are an error.
pub fn read_features(path: &Path, format: Format) -> Result<Vec<FeatureRecord>, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_features(&text, format, false)?.records)
}

/// Like [`read_features`], but points and lines are skipped and listed.
pub fn read_features_lenient(path: &Path, format: Format) -> Result<FeatureSet, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_features(&text, format, true)
}

pub fn render_features(records: &[FeatureRecord], format: Format) -> String {
    match format {
        Format::GeoJson => to_geojson(records),
        Format::Wkt => to_wkt(records),
        Format::CsvXy => to_csv_xy(records),
    }
}

pub fn write_features(records: &[FeatureRecord], path: &Path, format: Format) -> Result<(), IoError> {
    std::fs::write(path, render_features(records, format))?;
    Ok(())
}
