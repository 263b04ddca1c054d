//! Line-oriented text export of boundary geometries.
//!
//! ```text
//! G <dim> <depth> <family> <lambda|->
//! S x1 y1 x2 y2
//! B lo_1 .. lo_d hi_1 .. hi_d
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::simsys::{
    AaBox, BoundaryGeometry, DomainRule, Family, Primitives, Segment, SimilaritySystem,
};

pub fn write_geometry<W: Write>(geometry: &BoundaryGeometry, mut out: W) -> std::io::Result<()> {
    let family = geometry.family();
    let lambda = family
        .lambda()
        .map_or_else(|| "-".to_string(), |l| l.to_string());
    writeln!(
        out,
        "G {} {} {} {}",
        geometry.dim(),
        geometry.depth(),
        family.tag(),
        lambda
    )?;
    match geometry.primitives() {
        Primitives::Segments(segs) => {
            for s in segs {
                writeln!(out, "S {} {} {} {}", s.a[0], s.a[1], s.b[0], s.b[1])?;
            }
        }
        Primitives::Boxes(boxes) => {
            let dim = geometry.dim();
            for b in boxes {
                write!(out, "B")?;
                for v in b.lo[..dim].iter().chain(&b.hi[..dim]) {
                    write!(out, " {v}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn parse_floats(fields: &[&str], line: usize) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("{f:?}: {e}"),
            })
        })
        .collect()
}

/// Reads a geometry written by [`write_geometry`].
///
/// Polygons (segment files) get `InteriorOfPolygon`, box files get
/// `ComplementOfPrimitives`. Scales are recovered from segment lengths or
/// box sides, and the approximation bound from the family and depth.
pub fn read_geometry<R: BufRead>(input: R) -> Result<BoundaryGeometry> {
    let mut header: Option<(usize, usize, Family)> = None;
    let mut segments = Vec::new();
    let mut boxes = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((&kind, rest)) = fields.split_first() else {
            continue;
        };
        let bad = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        match kind {
            "G" => {
                if rest.len() != 4 {
                    return Err(bad("header needs dim, depth, family, lambda".into()));
                }
                let dim = rest[0].parse().map_err(|e| bad(format!("dim: {e}")))?;
                let depth = rest[1].parse().map_err(|e| bad(format!("depth: {e}")))?;
                let lambda = match rest[3] {
                    "-" => None,
                    v => Some(v.parse::<f64>().map_err(|e| bad(format!("lambda: {e}")))?),
                };
                header = Some((dim, depth, Family::from_tag(rest[2], lambda)?));
            }
            "S" => {
                let v = parse_floats(rest, lineno)?;
                if v.len() != 4 {
                    return Err(bad("segment needs 4 coordinates".into()));
                }
                segments.push(Segment::new([v[0], v[1]], [v[2], v[3]]));
            }
            "B" => {
                let dim = header.map(|h| h.0).ok_or_else(|| bad("box before header".into()))?;
                let v = parse_floats(rest, lineno)?;
                if v.len() != 2 * dim {
                    return Err(bad(format!("box needs {} coordinates", 2 * dim)));
                }
                boxes.push(AaBox::new(&v[..dim], &v[dim..]));
            }
            "#" => {}
            other => return Err(bad(format!("unknown record {other:?}"))),
        }
    }
    let (dim, depth, family) = header.ok_or(Error::Parse {
        line: 0,
        message: "missing header".into(),
    })?;
    let geometry = match (segments.is_empty(), boxes.is_empty()) {
        (false, true) => BoundaryGeometry::from_segments(segments, DomainRule::InteriorOfPolygon)?,
        (true, false) => BoundaryGeometry::from_boxes(dim, boxes)?,
        _ => {
            return Err(Error::Parse {
                line: 0,
                message: "file must contain only segments or only boxes".into(),
            })
        }
    };
    let approx = match family {
        Family::Custom => 0.0,
        _ => {
            let ratio = SimilaritySystem::for_family(family, dim)?.max_ratio();
            let lead = if matches!(family, Family::Koch(_)) { 1.0 } else { (dim as f64).sqrt() };
            lead * ratio.powi(depth as i32)
        }
    };
    Ok(geometry.with_metadata(depth, approx, family))
}
