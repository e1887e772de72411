//! WKT polygons, one geometry per line.
//!
//! A line may carry an id before a tab: `b12<TAB>POLYGON((...))`. Lines
//! without one get their zero-based geometry index as id. `#` starts a
//! comment line.

use super::{fmt_coord, ring_from, FeatureRecord, FeatureSet, IoError, Properties, Skipped};
use crate::geometry::{Point, Ring};

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> IoError {
        IoError::Parse {
            position: format!("line {} byte {}", self.line, self.offset + self.pos),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), IoError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).to_ascii_uppercase()
    }

    fn number(&mut self) -> Result<f64, IoError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && matches!(self.s[self.pos], b'0'..=b'9' | b'+' | b'-' | b'.' | b'e' | b'E') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok().and_then(|t| t.parse::<f64>().ok()).ok_or_else(|| {
            self.pos = start;
            self.err("expected a number")
        })
    }

    fn ring(&mut self, id: &str) -> Result<Ring, IoError> {
        self.expect(b'(')?;
        let mut pts = Vec::new();
        loop {
            let x = self.number()?;
            let y = self.number()?;
            pts.push(Point::new(x, y));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected ',' or ')' in ring")),
            }
        }
        ring_from(id, pts)
    }

    fn polygon(&mut self, id: &str) -> Result<(Ring, Vec<Ring>), IoError> {
        self.expect(b'(')?;
        let mut rings = vec![self.ring(id)?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            rings.push(self.ring(id)?);
        }
        self.expect(b')')?;
        let ext = rings.remove(0);
        Ok((ext, rings))
    }
}

fn split_id(line: &str, index: usize) -> (String, &str, usize) {
    match line.split_once('\t') {
        Some((id, rest)) if !id.trim().is_empty() => (id.trim().to_string(), rest, id.len() + 1),
        _ => (index.to_string(), line, 0),
    }
}

pub fn parse_wkt(text: &str, lenient: bool) -> Result<FeatureSet, IoError> {
    let mut set = FeatureSet::default();
    let mut offset = 0;
    let mut index = 0;
    for (lineno, raw) in text.split_inclusive('\n').enumerate() {
        let line_offset = offset;
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (id, body, skip) = split_id(line, index);
        index += 1;
        let mut cur = Cursor { s: body.as_bytes(), pos: 0, line: lineno + 1, offset: line_offset + skip };
        let kind = cur.word();
        match kind.as_str() {
            "POLYGON" => {
                let (ext, holes) = cur.polygon(&id)?;
                set.records.push(FeatureRecord::new(id, ext, holes, Properties::empty()));
            }
            "MULTIPOLYGON" => {
                cur.expect(b'(')?;
                let mut k = 0;
                loop {
                    let pid = format!("{id}#{k}");
                    let (ext, holes) = cur.polygon(&pid)?;
                    set.records.push(FeatureRecord::new(pid, ext, holes, Properties::empty()));
                    k += 1;
                    if cur.peek() == Some(b',') {
                        cur.pos += 1;
                    } else {
                        break;
                    }
                }
                cur.expect(b')')?;
            }
            "" => return Err(cur.err("expected a geometry keyword")),
            _ => {
                if !lenient {
                    return Err(IoError::UnsupportedGeometry { kind, feature: id });
                }
                log::warn!("skipping feature {id}: unsupported geometry {kind}");
                set.skipped.push(Skipped { feature: id, reason: format!("unsupported geometry {kind}") });
                continue;
            }
        }
        if cur.peek().is_some() {
            return Err(cur.err("trailing characters after geometry"));
        }
    }
    Ok(set)
}

fn ring_text(ring: &Ring, out: &mut String) {
    out.push('(');
    let v = ring.vertices();
    for p in v.iter().chain(std::iter::once(&v[0])) {
        if !out.ends_with('(') {
            out.push_str(", ");
        }
        out.push_str(&fmt_coord(p.x));
        out.push(' ');
        out.push_str(&fmt_coord(p.y));
    }
    out.push(')');
}

pub fn to_wkt(records: &[FeatureRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.id);
        out.push_str("\tPOLYGON (");
        ring_text(&r.exterior, &mut out);
        for h in &r.holes {
            out.push_str(", ");
            ring_text(h, &mut out);
        }
        out.push_str(")\n");
    }
    out
}
