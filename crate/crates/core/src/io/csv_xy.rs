//! Bare `x,y` rows. A blank line ends a ring and each ring becomes its
//! own record, so holes cannot be expressed.

use super::{fmt_coord, ring_from, FeatureRecord, FeatureSet, IoError, Properties};
use crate::geometry::Point;

pub fn parse_csv_xy(text: &str) -> Result<FeatureSet, IoError> {
    let mut set = FeatureSet::default();
    let mut current: Vec<Point> = Vec::new();
    let flush = |pts: &mut Vec<Point>, set: &mut FeatureSet| -> Result<(), IoError> {
        if !pts.is_empty() {
            let id = set.records.len().to_string();
            let ring = ring_from(&id, std::mem::take(pts))?;
            set.records.push(FeatureRecord::new(id, ring, vec![], Properties::empty()));
        }
        Ok(())
    };
    let mut offset = 0;
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let at = offset;
        offset += raw.len();
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut current, &mut set)?;
            continue;
        }
        if line.starts_with('#') || line.eq_ignore_ascii_case("x,y") {
            continue;
        }
        let bad = |m: &str| IoError::Parse { position: format!("line {} byte {}", i + 1, at), message: m.to_string() };
        let (xs, ys) = line.split_once(',').ok_or_else(|| bad("expected x,y"))?;
        let x = xs.trim().parse::<f64>().map_err(|_| bad("x is not a number"))?;
        let y = ys.trim().parse::<f64>().map_err(|_| bad("y is not a number"))?;
        current.push(Point::new(x, y));
    }
    flush(&mut current, &mut set)?;
    Ok(set)
}

/// Exterior rings only; holes are dropped with a warning.
pub fn to_csv_xy(records: &[FeatureRecord]) -> String {
    let mut out = String::from("x,y\n");
    for (k, r) in records.iter().enumerate() {
        if !r.holes.is_empty() {
            log::warn!("feature {}: {} hole(s) not representable in csv", r.id, r.holes.len());
        }
        if k > 0 {
            out.push('\n');
        }
        let v = r.exterior.vertices();
        for p in v.iter().chain(std::iter::once(&v[0])) {
            out.push_str(&format!("{},{}\n", fmt_coord(p.x), fmt_coord(p.y)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_wkt;

    #[test]
    fn matches_wkt() {
        let csv = "x,y\n# rectangle\n0,0\n4,0\n4,3\n0,3\n\n0,0\n1,0\n1,1\n";
        let set = parse_csv_xy(csv).unwrap();
        assert_eq!(set.records.len(), 2);
        let wkt = parse_wkt("POLYGON((0 0, 4 0, 4 3, 0 3, 0 0))", false).unwrap();
        assert_eq!(set.records[0].exterior, wkt.records[0].exterior);
    }

    #[test]
    fn round_trip() {
        let set = parse_csv_xy("x,y\n0,0\n0,2\n3,2\n3,0\n").unwrap();
        let back = parse_csv_xy(&to_csv_xy(&set.records)).unwrap();
        assert_eq!(back.records, set.records);
    }

    #[test]
    fn bad_row() {
        let err = parse_csv_xy("x,y\n0,0\n1;2\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { ref position, .. } if position == "line 3 byte 8"));
    }
}
