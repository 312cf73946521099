use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use repcount::data::{
    group_by_person, list_mmfit_workouts, list_uiprmd_movements, load_generic_jsonl, load_mmfit, load_uiprmd,
    synthetic_suite, ClipSource, LabeledClip, Modality,
};
use repcount::metrics::sweep;
use repcount::model::DEFAULT_FPS;
use repcount::{CountingConfig, SkeletonSequence};

use crate::cli::{DatasetArgs, DatasetKind, EvalArgs, Format, ModalityArg};
use crate::commands::{open_output, truth_path};
use crate::UsageError;

/// Parses `256:1` or `256x1`.
pub fn parse_grid_entry(text: &str) -> Result<(usize, usize)> {
    let bad = || UsageError(format!("grid entries look like 256:1, got {text:?}"));
    let (w, s) = text.split_once([':', 'x']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, s.trim().parse().map_err(|_| bad())?))
}

fn require_root(args: &DatasetArgs) -> Result<&Path> {
    args.root.as_deref().ok_or_else(|| UsageError("--root is required for this dataset".into()).into())
}

fn jsonl_clips(root: &Path) -> Result<Vec<LabeledClip>> {
    let entries = std::fs::read_dir(root).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => anyhow::Error::from(repcount::Error::MissingFile(root.to_path_buf())),
        _ => anyhow::Error::from(e).context(format!("listing {}", root.display())),
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    let mut clips = Vec::new();
    for path in paths {
        let sidecar = truth_path(&path);
        if !sidecar.exists() {
            log::warn!("skipping {}: no {}", path.display(), sidecar.display());
            continue;
        }
        let truth: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(&sidecar).with_context(|| format!("reading {}", sidecar.display()))?,
        )
        .map_err(|e| UsageError(format!("{}: {e}", sidecar.display())))?;
        let count = truth["count"]
            .as_u64()
            .and_then(|c| u32::try_from(c).ok())
            .ok_or_else(|| UsageError(format!("{}: missing integer \"count\"", sidecar.display())))?;
        let frames = load_generic_jsonl(&path).with_context(|| format!("reading {}", path.display()))?;
        let mut groups = group_by_person(frames);
        if groups.len() != 1 {
            return Err(UsageError(format!("{}: expected one person, found {}", path.display(), groups.len())).into());
        }
        let (person, frames) = groups.remove(0);
        let fps = repcount::data::estimate_fps(&frames).unwrap_or(DEFAULT_FPS);
        let seq = SkeletonSequence::from_frames(person, fps, &frames)?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        clips.push(LabeledClip::new(id, seq, "jsonl", count, ClipSource::Jsonl)?);
    }
    Ok(clips)
}

/// Loads every clip named by the dataset flags. `window` sizes the
/// synthetic suite.
pub fn load_dataset(args: &DatasetArgs, window: usize) -> Result<Vec<LabeledClip>> {
    let modality = match args.modality {
        ModalityArg::TwoD => Modality::TwoD,
        ModalityArg::ThreeD => Modality::ThreeD,
    };
    let Some(kind) = args.dataset else {
        return Err(UsageError("--dataset is required".into()).into());
    };
    let clips = match kind {
        DatasetKind::Synth => synthetic_suite(args.clips, args.seed, window)?,
        DatasetKind::Mmfit => {
            let root = require_root(args)?;
            let mut clips = Vec::new();
            for workout in list_mmfit_workouts(root)? {
                clips.extend(
                    load_mmfit(root, &workout, modality).with_context(|| format!("loading workout {workout}"))?,
                );
            }
            clips
        }
        DatasetKind::Uiprmd => {
            let root = require_root(args)?;
            let movements = match args.movement {
                Some(m) => vec![m],
                None => list_uiprmd_movements(root)?,
            };
            let mut clips = Vec::new();
            for m in movements {
                clips.extend(load_uiprmd(root, m).with_context(|| format!("loading movement {m}"))?);
            }
            clips
        }
        DatasetKind::Jsonl => jsonl_clips(require_root(args)?)?,
    };
    if clips.is_empty() {
        return Err(UsageError("dataset contains no clips".into()).into());
    }
    Ok(clips)
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let grid = args.grid.iter().map(|g| parse_grid_entry(g)).collect::<Result<Vec<_>>>()?;
    let largest = grid.iter().map(|&(w, _)| w).max().unwrap_or(256);
    let clips = load_dataset(&args.data, largest)?;
    let base = CountingConfig { center_frames: args.center, ..CountingConfig::default() };
    let result = sweep(&clips, &grid, &base)?;
    for record in result.records.iter().filter(|r| r.failure.is_some()) {
        log::warn!(
            "{} (w={}, s={}): {}",
            record.clip_id,
            record.window,
            record.step,
            record.failure.as_deref().unwrap_or("")
        );
    }
    let mut out = open_output(args.out.as_deref())?;
    match args.format {
        Format::Jsonl => result.write_jsonl(&mut out)?,
        Format::Csv => result.write_csv(&mut out)?,
        Format::Text => result.write_text(&mut out)?,
    }
    out.flush()?;
    Ok(())
}
