//! UI-PRMD Kinect position files.
//!
//! Files are named `mNN_sNN_positions.txt` or, when segmented per episode,
//! `mNN_sNN_eNN_positions.txt`; they may sit anywhere under the root. One row
//! per frame, `3·j` delimited columns (whitespace or commas). Incorrect-
//! execution files (`_inc`) and angle files are ignored. Every subject
//! repeated each movement ten times.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::data::{ClipSource, LabeledClip};
use crate::error::{Error, Result};
use crate::model::{JointLayout, SkeletonSequence};

pub const UIPRMD_REPS: u32 = 10;
pub const UIPRMD_FPS: f64 = 30.0;

const MOVEMENTS: [&str; 10] = [
    "deep squat",
    "hurdle step",
    "inline lunge",
    "side lunge",
    "sit to stand",
    "leg raise",
    "shoulder abduction",
    "shoulder extension",
    "shoulder rotation",
    "shoulder scaption",
];

/// Parses one position file into coordinate rows.
pub fn parse_positions(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { line: line_no, message: format!("bad number {f:?}") })
            })
            .collect::<Result<Vec<f64>>>()?;
        let expected = match rows.first() {
            Some(first) => first.len(),
            None => row.len().div_ceil(3).max(1) * 3,
        };
        if row.len() != expected {
            return Err(Error::RaggedRow { line: line_no, expected, found: row.len() });
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct FileKey {
    movement: u32,
    subject: u32,
    episode: u32,
}

fn take_tagged(part: &str, tag: char) -> Option<u32> {
    part.strip_prefix(tag).filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))?.parse().ok()
}

fn parse_name(name: &str) -> Option<FileKey> {
    let stem = name.strip_suffix("_positions.txt")?;
    let parts: Vec<&str> = stem.split('_').collect();
    let (movement, subject, episode) = match parts.as_slice() {
        [m, s] => (take_tagged(m, 'm')?, take_tagged(s, 's')?, 0),
        [m, s, e] => (take_tagged(m, 'm')?, take_tagged(s, 's')?, take_tagged(e, 'e')?),
        _ => return None,
    };
    Some(FileKey { movement, subject, episode })
}

fn collect_files(dir: &Path, out: &mut Vec<(FileKey, PathBuf)>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(dir.to_path_buf()),
        _ => Error::io(dir, e),
    })?;
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for path in paths {
        if path.is_dir() {
            collect_files(&path, out)?;
        } else if let Some(key) = path.file_name().and_then(|n| n.to_str()).and_then(parse_name) {
            out.push((key, path));
        }
    }
    Ok(())
}

/// Movement ids present under `root`, sorted.
pub fn list_uiprmd_movements(root: impl AsRef<Path>) -> Result<Vec<u32>> {
    let mut files = Vec::new();
    collect_files(root.as_ref(), &mut files)?;
    let mut ids: Vec<u32> = files.iter().map(|(k, _)| k.movement).collect();
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

/// One clip per subject for the given movement, episodes concatenated in order.
pub fn load_uiprmd(root: impl AsRef<Path>, movement: u32) -> Result<Vec<LabeledClip>> {
    let root = root.as_ref();
    let mut files = Vec::new();
    collect_files(root, &mut files)?;
    let mut by_subject: BTreeMap<u32, Vec<(FileKey, PathBuf)>> = BTreeMap::new();
    for (key, path) in files.into_iter().filter(|(k, _)| k.movement == movement) {
        by_subject.entry(key.subject).or_default().push((key, path));
    }
    if by_subject.is_empty() {
        return Err(Error::MissingFile(root.join(format!("m{movement:02}_s*_positions.txt"))));
    }
    let exercise = MOVEMENTS
        .get((movement as usize).wrapping_sub(1))
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("movement {movement}"));

    by_subject
        .into_iter()
        .map(|(subject, mut parts)| {
            parts.sort();
            let mut frames: Vec<Vec<f64>> = Vec::new();
            for (_, path) in &parts {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let rows = parse_positions(&text)?;
                if let (Some(prev), Some(next)) = (frames.first(), rows.first()) {
                    if prev.len() != next.len() {
                        return Err(Error::RaggedRow { line: 1, expected: prev.len(), found: next.len() });
                    }
                }
                frames.extend(rows);
            }
            let width = frames.first().map(Vec::len).ok_or(Error::EmptySequence)?;
            let layout = JointLayout::new(width / 3, 3)?;
            let id = format!("m{movement:02}_s{subject:02}");
            let seq = SkeletonSequence::new(id.clone(), UIPRMD_FPS, layout, frames);
            seq.check()?;
            LabeledClip::new(id, seq, exercise.clone(), UIPRMD_REPS, ClipSource::UiPrmd)
        })
        .collect()
}
