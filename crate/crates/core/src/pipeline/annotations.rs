use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::pipeline::BoundingBox;

/// One row of a `frame_index,track_id,class,x,y,w,h` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub frame_index: usize,
    pub track_id: u64,
    pub class: String,
    pub bbox: BoundingBox,
}

pub const ANNOTATION_HEADER: &str = "frame_index,track_id,class,x,y,w,h";

/// Reads annotations; an optional header line and `#` comments are skipped.
pub fn read_annotations<R: BufRead>(reader: R) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || (out.is_empty() && t.starts_with("frame_index")) {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        let bad = |reason: &str| Error::Csv {
            line: line_no,
            reason: reason.to_string(),
        };
        if fields.len() != 7 {
            return Err(bad("expected 7 fields"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("non-integer field"));
        let bbox = BoundingBox::new(num(fields[3])?, num(fields[4])?, num(fields[5])?, num(fields[6])?);
        if bbox.w == 0 || bbox.h == 0 {
            return Err(bad("empty box"));
        }
        out.push(Annotation {
            frame_index: num(fields[0])?,
            track_id: fields[1].parse().map_err(|_| bad("non-integer track id"))?,
            class: fields[2].to_string(),
            bbox,
        });
    }
    Ok(out)
}

pub fn write_annotations<W: Write>(mut out: W, rows: &[Annotation]) -> Result<()> {
    writeln!(out, "{ANNOTATION_HEADER}")?;
    for a in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            a.frame_index, a.track_id, a.class, a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h
        )?;
    }
    Ok(())
}
