//! Line-delimited JSON interchange, one frame per line:
//! `{"t": seconds, "person": id, "joints": [[x, y] | [x, y, z], ...]}`.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{JointLayout, SkeletonFrame};

fn schema(line: usize, message: impl Into<String>) -> Error {
    Error::Schema { line, message: message.into() }
}

/// Parses one interchange line. `line_no` is 1-based and only used in errors.
pub fn parse_frame_line(text: &str, line_no: usize) -> Result<SkeletonFrame> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
    let obj = value.as_object().ok_or_else(|| schema(line_no, "expected a JSON object"))?;

    let t = obj.get("t").ok_or_else(|| schema(line_no, "missing field `t`"))?;
    let timestamp = t.as_f64().ok_or_else(|| schema(line_no, "field `t` must be a number"))?;
    if !(timestamp.is_finite() && timestamp >= 0.0) {
        return Err(schema(line_no, "field `t` must be a non-negative number"));
    }

    let person = match obj.get("person").ok_or_else(|| schema(line_no, "missing field `person`"))? {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(schema(line_no, "field `person` must be a string")),
    };

    let joints = obj
        .get("joints")
        .ok_or_else(|| schema(line_no, "missing field `joints`"))?
        .as_array()
        .ok_or_else(|| schema(line_no, "field `joints` must be an array"))?;
    if joints.is_empty() {
        return Err(schema(line_no, "field `joints` is empty"));
    }
    let mut dims = None;
    let mut coords = Vec::with_capacity(joints.len() * 3);
    for (j, joint) in joints.iter().enumerate() {
        let point = joint.as_array().ok_or_else(|| schema(line_no, format!("joint {j} must be an array")))?;
        match dims {
            None if point.len() == 2 || point.len() == 3 => dims = Some(point.len()),
            None => return Err(schema(line_no, format!("joint {j} has {} coordinates, expected 2 or 3", point.len()))),
            Some(d) if d != point.len() => {
                return Err(schema(
                    line_no,
                    format!("ragged joints: joint {j} has {} coordinates, expected {d}", point.len()),
                ))
            }
            Some(_) => {}
        }
        for c in point {
            let v = c.as_f64().ok_or_else(|| schema(line_no, format!("joint {j} has a non-numeric coordinate")))?;
            if !v.is_finite() {
                return Err(schema(line_no, format!("joint {j} has a non-finite coordinate")));
            }
            coords.push(v);
        }
    }
    let layout = JointLayout::new(joints.len(), dims.unwrap_or(2))?;
    Ok(SkeletonFrame { timestamp, person_id: person, layout, joints: coords })
}

/// Reads every non-blank line as a frame, in file order.
pub fn read_generic_jsonl<R: BufRead>(reader: R) -> Result<Vec<SkeletonFrame>> {
    let mut frames = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(parse_frame_line(&line, i + 1)?);
    }
    Ok(frames)
}

pub fn load_generic_jsonl(path: impl AsRef<Path>) -> Result<Vec<SkeletonFrame>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    read_generic_jsonl(BufReader::new(file))
}

pub fn frame_to_json(frame: &SkeletonFrame) -> Value {
    let joints: Vec<&[f64]> = frame.joints.chunks(frame.layout.dims).collect();
    json!({ "t": frame.timestamp, "person": frame.person_id, "joints": joints })
}

pub fn write_generic_jsonl<'a, W: Write>(
    frames: impl IntoIterator<Item = &'a SkeletonFrame>,
    mut out: W,
) -> std::io::Result<()> {
    for frame in frames {
        writeln!(out, "{}", frame_to_json(frame))?;
    }
    Ok(())
}
