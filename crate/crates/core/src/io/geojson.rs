use std::str::FromStr;

use serde::Deserialize;
use serde_json::value::RawValue;
use serde_json::{json, Number, Value};

use super::{fmt_coord, ring_from, FeatureRecord, FeatureSet, IoError, Properties, Skipped};
use crate::geometry::{Point, Ring};
use crate::synth::{SynthCase, SynthSpec};

fn parse_err(at: &str, message: impl Into<String>) -> IoError {
    IoError::Parse { position: at.to_string(), message: message.into() }
}

/// Any GeoJSON object; only the members we use are decoded, and
/// properties stay as raw text.
#[derive(Deserialize)]
struct RawObject<'a> {
    #[serde(rename = "type")]
    kind: Option<String>,
    #[serde(borrow, default)]
    features: Option<Vec<&'a RawValue>>,
    #[serde(default)]
    id: Option<Value>,
    #[serde(borrow, default)]
    properties: Option<&'a RawValue>,
    #[serde(default)]
    geometry: Option<Value>,
    #[serde(default)]
    coordinates: Option<Value>,
}

fn id_of(obj: &RawObject, index: usize) -> String {
    match &obj.id {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => index.to_string(),
    }
}

fn position(v: &Value, at: &str) -> Result<Point, IoError> {
    let arr = v.as_array().filter(|a| a.len() >= 2).ok_or_else(|| parse_err(at, "position must be [x, y]"))?;
    let x = arr[0].as_f64().ok_or_else(|| parse_err(at, "x is not a number"))?;
    let y = arr[1].as_f64().ok_or_else(|| parse_err(at, "y is not a number"))?;
    Ok(Point::new(x, y))
}

fn rings(v: &Value, id: &str) -> Result<(Ring, Vec<Ring>), IoError> {
    let at = format!("feature {id}");
    let list =
        v.as_array().filter(|l| !l.is_empty()).ok_or_else(|| parse_err(&at, "polygon needs at least one ring"))?;
    let mut out = Vec::with_capacity(list.len());
    for ring in list {
        let pts = ring
            .as_array()
            .ok_or_else(|| parse_err(&at, "ring must be an array of positions"))?
            .iter()
            .map(|p| position(p, &at))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(ring_from(id, pts)?);
    }
    let exterior = out.remove(0);
    Ok((exterior, out))
}

fn push_geometry(
    set: &mut FeatureSet,
    kind: &str,
    coords: Option<&Value>,
    id: String,
    properties: &Properties,
    lenient: bool,
) -> Result<(), IoError> {
    match (kind, coords) {
        ("Polygon", Some(c)) => {
            let (ext, holes) = rings(c, &id)?;
            set.records.push(FeatureRecord::new(id, ext, holes, properties.clone()));
        }
        ("MultiPolygon", Some(c)) => {
            let parts = c.as_array().ok_or_else(|| parse_err(&format!("feature {id}"), "expected polygon list"))?;
            for (k, part) in parts.iter().enumerate() {
                let pid = format!("{id}#{k}");
                let (ext, holes) = rings(part, &pid)?;
                set.records.push(FeatureRecord::new(pid, ext, holes, properties.clone()));
            }
        }
        ("Polygon" | "MultiPolygon", None) => return Err(parse_err(&format!("feature {id}"), "missing coordinates")),
        (other, _) => {
            let kind = if other.is_empty() { "null".to_string() } else { other.to_string() };
            if !lenient {
                return Err(IoError::UnsupportedGeometry { kind, feature: id });
            }
            log::warn!("skipping feature {id}: unsupported geometry {kind}");
            set.skipped.push(Skipped { feature: id, reason: format!("unsupported geometry {kind}") });
        }
    }
    Ok(())
}

fn push_feature(set: &mut FeatureSet, obj: &RawObject, index: usize, lenient: bool) -> Result<(), IoError> {
    let id = id_of(obj, index);
    let props = match obj.properties {
        Some(raw) => {
            Properties::from_json(raw.get()).map_err(|e| parse_err(&format!("feature {id}"), e.to_string()))?
        }
        None => Properties::empty(),
    };
    let geometry = obj.geometry.as_ref().filter(|g| g.is_object());
    let kind = geometry.and_then(|g| g.get("type")).and_then(Value::as_str).unwrap_or("");
    push_geometry(set, kind, geometry.and_then(|g| g.get("coordinates")), id, &props, lenient)
}

/// Accepts a FeatureCollection, a single Feature or a bare geometry.
pub fn parse_geojson(text: &str, lenient: bool) -> Result<FeatureSet, IoError> {
    let syntax = |e: serde_json::Error| parse_err(&format!("line {} column {}", e.line(), e.column()), e.to_string());
    // A full parse first, so syntax errors report positions in the file.
    serde_json::from_str::<serde::de::IgnoredAny>(text).map_err(syntax)?;
    let root: RawObject = serde_json::from_str(text).map_err(syntax)?;
    let mut set = FeatureSet::default();
    match root.kind.as_deref() {
        Some("FeatureCollection") => {
            let features =
                root.features.as_ref().ok_or_else(|| parse_err("root", "FeatureCollection without features array"))?;
            for (i, raw) in features.iter().enumerate() {
                let obj: RawObject =
                    serde_json::from_str(raw.get()).map_err(|e| parse_err(&format!("feature {i}"), e.to_string()))?;
                push_feature(&mut set, &obj, i, lenient)?;
            }
        }
        Some("Feature") => push_feature(&mut set, &root, 0, lenient)?,
        Some(kind) => {
            push_geometry(&mut set, kind, root.coordinates.as_ref(), "0".into(), &Properties::empty(), lenient)?
        }
        None => return Err(parse_err("root", "missing \"type\"")),
    }
    Ok(set)
}

fn coord_value(v: f64) -> Value {
    Value::Number(Number::from_str(&fmt_coord(v)).expect("formatted coordinate is a valid number"))
}

fn closed_ring_value(ring: &Ring) -> Value {
    let v = ring.vertices();
    let mut out: Vec<Value> = v.iter().map(|p| Value::Array(vec![coord_value(p.x), coord_value(p.y)])).collect();
    out.push(out[0].clone());
    Value::Array(out)
}

fn feature_text(r: &FeatureRecord) -> String {
    let mut coords = vec![closed_ring_value(&r.exterior)];
    coords.extend(r.holes.iter().map(closed_ring_value));
    let geometry = json!({ "type": "Polygon", "coordinates": coords });
    format!(
        "{{\"type\":\"Feature\",\"id\":{},\"properties\":{},\"geometry\":{}}}",
        Value::String(r.id.clone()),
        r.properties.as_str(),
        geometry
    )
}

fn collection(features: Vec<String>) -> String {
    if features.is_empty() {
        return "{\"type\":\"FeatureCollection\",\"features\":[]}\n".to_string();
    }
    format!("{{\"type\":\"FeatureCollection\",\"features\":[\n{}\n]}}\n", features.join(",\n"))
}

/// One Feature per line, closing vertex restored, nine fraction digits.
pub fn to_geojson(records: &[FeatureRecord]) -> String {
    collection(records.iter().map(feature_text).collect())
}

/// Synthetic corpus as features with `role`, `burr_indices` and `spec`.
/// Clean outlines are included only when `with_clean` is set.
pub fn corpus_to_geojson(cases: &[(SynthSpec, SynthCase)], with_clean: bool) -> String {
    let mut features = Vec::new();
    for (i, (spec, case)) in cases.iter().enumerate() {
        let props = |role: &str, burrs: &[usize]| {
            let v = json!({ "role": role, "burr_indices": burrs, "spec": spec });
            Properties::from_map(v.as_object().expect("object literal"))
        };
        if with_clean {
            let rec = FeatureRecord::new(format!("{i}-clean"), case.clean.clone(), vec![], props("clean", &[]));
            features.push(feature_text(&rec));
        }
        let rec = FeatureRecord::new(i.to_string(), case.noisy.clone(), vec![], props("noisy", &case.burr_indices));
        features.push(feature_text(&rec));
    }
    collection(features)
}
