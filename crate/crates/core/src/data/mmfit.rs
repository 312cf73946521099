//! MM-Fit layout: `<root>/<workout>/<workout>_pose_3d.npy` (or `_pose_2d`)
//! plus `<workout>_labels.csv` with rows `start_frame,end_frame,reps,exercise`.
//!
//! Pose arrays are accepted in two shapes:
//! - `(d, T, 1 + j)`: one plane per axis, slot 0 of the last axis holding the
//!   frame number (the distributed layout);
//! - `(T, j·d)`: one row per frame, row index = frame number.
//!
//! Label frame ranges are inclusive frame numbers.

use std::path::Path;

use crate::data::npy::NpyArray;
use crate::data::{ClipSource, LabeledClip, Modality};
use crate::error::{Error, Result};
use crate::model::{JointLayout, SkeletonSequence};

pub const MMFIT_FPS: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub start_frame: usize,
    pub end_frame: usize,
    pub reps: u32,
    pub exercise: String,
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLabels { line, reason: reason.into() }
}

fn parse_frame_number(field: &str) -> Option<usize> {
    let field = field.trim();
    field.parse::<usize>().ok().or_else(|| {
        let v: f64 = field.parse().ok()?;
        (v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < usize::MAX as f64).then_some(v as usize)
    })
}

/// Parses the labels CSV. A non-numeric first row is taken as a header.
pub fn parse_labels(text: &str) -> Result<Vec<LabelRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && i == 0 && fields.first().and_then(|f| parse_frame_number(f)).is_none() {
            continue;
        }
        if fields.len() < 4 {
            return Err(malformed(line_no, format!("expected 4 fields, found {}", fields.len())));
        }
        let start_frame = parse_frame_number(fields[0]).ok_or_else(|| malformed(line_no, "bad start frame"))?;
        let end_frame = parse_frame_number(fields[1]).ok_or_else(|| malformed(line_no, "bad end frame"))?;
        let reps: u32 = fields[2].parse().map_err(|_| malformed(line_no, "bad repetition count"))?;
        let exercise = fields[3..].join(",").trim().to_string();
        if start_frame > end_frame {
            return Err(malformed(line_no, "start frame after end frame"));
        }
        if reps == 0 {
            return Err(malformed(line_no, "repetition count must be positive"));
        }
        if exercise.is_empty() {
            return Err(malformed(line_no, "missing exercise name"));
        }
        rows.push(LabelRow { start_frame, end_frame, reps, exercise });
    }
    Ok(rows)
}

type NumberedRows = Vec<(usize, Vec<f64>)>;

/// Per-frame coordinate rows paired with their frame numbers.
fn pose_rows(array: &NpyArray, modality: Modality) -> Result<(JointLayout, NumberedRows)> {
    match array.shape.as_slice() {
        &[dims, frames, slots] => {
            if dims != 2 && dims != 3 {
                return Err(Error::Npy(format!("pose array has {dims} coordinate planes, expected 2 or 3")));
            }
            if slots < 2 {
                return Err(Error::Npy("pose array has no joint slots after the frame column".into()));
            }
            let layout = JointLayout::new(slots - 1, dims)?;
            let rows = (0..frames)
                .map(|t| {
                    let at = |axis: usize, slot: usize| array.data[(axis * frames + t) * slots + slot];
                    let number = at(0, 0);
                    if !(number.is_finite() && number >= 0.0) {
                        return Err(Error::Npy(format!("bad frame number {number} at row {t}")));
                    }
                    let coords = (1..slots)
                        .flat_map(|slot| (0..dims).map(move |axis| (axis, slot)))
                        .map(|(a, s)| at(a, s))
                        .collect();
                    Ok((number.round() as usize, coords))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((layout, rows))
        }
        &[frames, width] => {
            let dims = modality.dims();
            if width == 0 || width % dims != 0 {
                return Err(Error::Npy(format!("pose row width {width} is not a multiple of {dims}")));
            }
            let layout = JointLayout::new(width / dims, dims)?;
            let rows = (0..frames).map(|t| (t, array.data[t * width..(t + 1) * width].to_vec())).collect();
            Ok((layout, rows))
        }
        other => Err(Error::Npy(format!("unsupported pose array shape {other:?}"))),
    }
}

/// One clip per labeled segment of a workout.
pub fn load_mmfit(root: impl AsRef<Path>, workout: &str, modality: Modality) -> Result<Vec<LabeledClip>> {
    let dir = root.as_ref().join(workout);
    let pose_path = dir.join(format!("{workout}_pose_{}.npy", modality.label()));
    let labels_path = dir.join(format!("{workout}_labels.csv"));
    if !labels_path.exists() {
        return Err(Error::MissingFile(labels_path));
    }
    let labels_text = std::fs::read_to_string(&labels_path).map_err(|e| Error::io(&labels_path, e))?;
    let labels = parse_labels(&labels_text)?;
    let array = NpyArray::read(&pose_path)?;
    let (layout, rows) = pose_rows(&array, modality)?;
    let last_frame = rows.iter().map(|(n, _)| *n).max().ok_or_else(|| Error::Npy("pose array has no frames".into()))?;

    labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            if label.end_frame > last_frame {
                return Err(malformed(
                    i + 1,
                    format!("segment ends at frame {} but poses stop at {last_frame}", label.end_frame),
                ));
            }
            let frames: Vec<Vec<f64>> = rows
                .iter()
                .filter(|(n, _)| (label.start_frame..=label.end_frame).contains(n))
                .map(|(_, c)| c.clone())
                .collect();
            if frames.is_empty() {
                return Err(malformed(i + 1, "segment covers no pose frames"));
            }
            let id = format!("{workout}:{i}:{}", label.exercise);
            let seq = SkeletonSequence::new(id.clone(), MMFIT_FPS, layout, frames);
            seq.check()?;
            LabeledClip::new(id, seq, label.exercise.clone(), label.reps, ClipSource::MmFit)
        })
        .collect()
}

/// Workout ids (sub-directories with a labels file), sorted.
pub fn list_mmfit_workouts(root: impl AsRef<Path>) -> Result<Vec<String>> {
    let root = root.as_ref();
    let entries = std::fs::read_dir(root).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(root.to_path_buf()),
        _ => Error::io(root, e),
    })?;
    let mut workouts: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|name| root.join(name).join(format!("{name}_labels.csv")).exists())
        .collect();
    workouts.sort();
    Ok(workouts)
}
