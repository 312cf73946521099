//! Count scoring and hyperparameter sweeps.
//!
//! Both metrics work on rounded counts. MAE of count is
//! `(1/n) Σ |ĉ − c| / c`; off-by-one accuracy (OBOA) is the fraction of
//! clips with `|ĉ − c| ≤ 1`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{LabeledClip, Modality};
use crate::engine::count_sequence;
use crate::error::{Error, Result};
use crate::model::CountingConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub clip_id: String,
    pub exercise: String,
    pub predicted: u64,
    pub truth: u32,
    pub window: usize,
    pub step: usize,
    pub modality: Modality,
    /// Pipeline error for this clip; it is scored with a prediction of 0.
    pub failure: Option<String>,
    pub short_input: bool,
}

impl EvalRecord {
    pub fn abs_error(&self) -> u64 {
        self.predicted.abs_diff(self.truth as u64)
    }
}

/// Mean of `|ĉ − c| / c`. Terms are summed in sorted order so the result
/// does not depend on record order.
pub fn mae_of_count(records: &[EvalRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut terms = records
        .iter()
        .enumerate()
        .map(|(index, r)| {
            if r.truth == 0 {
                Err(Error::ZeroGroundTruth { index })
            } else {
                Ok(r.abs_error() as f64 / r.truth as f64)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

pub fn oboa(records: &[EvalRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let hits = records.iter().filter(|r| r.abs_error() <= 1).count();
    Ok(hits as f64 / records.len() as f64)
}

/// Scores for one `(window, step)` setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub window: usize,
    pub step: usize,
    pub modality: String,
    /// MAE per exercise, aligned with [`SweepResult::exercises`].
    pub per_exercise: Vec<f64>,
    pub overall_mae: f64,
    pub oboa: f64,
    pub clips: usize,
    /// Clips that errored or fell back to the short-input path.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Exercise names in order of first appearance among the clips.
    pub exercises: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub records: Vec<EvalRecord>,
}

/// Counts every clip under every `(window, step)` and aggregates the scores.
/// Per-clip failures are recorded, never dropped.
pub fn sweep(clips: &[LabeledClip], grid: &[(usize, usize)], base: &CountingConfig) -> Result<SweepResult> {
    if clips.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty (window, step) grid".into()));
    }
    let configs = grid
        .iter()
        .map(|&(w, s)| {
            let cfg = base.clone().with_window(w, s);
            cfg.validate()?;
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut exercises: Vec<String> = Vec::new();
    for clip in clips {
        if !exercises.contains(&clip.exercise) {
            exercises.push(clip.exercise.clone());
        }
    }

    let jobs: Vec<(usize, usize)> = (0..configs.len()).flat_map(|g| (0..clips.len()).map(move |c| (g, c))).collect();
    let records: Vec<EvalRecord> = jobs
        .par_iter()
        .map(|&(g, c)| {
            let (clip, cfg) = (&clips[c], &configs[g]);
            let (predicted, failure, short_input) = match count_sequence(&clip.sequence, cfg) {
                Ok(report) => (report.rounded_count, None, report.short_input),
                Err(e) => (0, Some(e.to_string()), false),
            };
            EvalRecord {
                clip_id: clip.id.clone(),
                exercise: clip.exercise.clone(),
                predicted,
                truth: clip.ground_truth,
                window: cfg.window,
                step: cfg.step,
                modality: clip.modality(),
                failure,
                short_input,
            }
        })
        .collect();

    let rows = configs
        .iter()
        .enumerate()
        .map(|(g, cfg)| {
            let row_records = &records[g * clips.len()..(g + 1) * clips.len()];
            let per_exercise = exercises
                .iter()
                .map(|ex| {
                    let subset: Vec<EvalRecord> = row_records.iter().filter(|r| &r.exercise == ex).cloned().collect();
                    mae_of_count(&subset)
                })
                .collect::<Result<Vec<_>>>()?;
            let modalities: Vec<Modality> = row_records.iter().map(|r| r.modality).collect();
            let modality = if modalities.iter().all(|&m| m == modalities[0]) {
                modalities[0].label().to_string()
            } else {
                "mixed".to_string()
            };
            Ok(SweepRow {
                window: cfg.window,
                step: cfg.step,
                modality,
                per_exercise,
                overall_mae: mae_of_count(row_records)?,
                oboa: oboa(row_records)?,
                clips: row_records.len(),
                failures: row_records.iter().filter(|r| r.failure.is_some() || r.short_input).count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult { exercises, rows, records })
}

impl SweepResult {
    pub fn row(&self, window: usize, step: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.window == window && r.step == step)
    }

    fn header(&self) -> Vec<String> {
        let mut cols = vec!["win".to_string(), "step".to_string()];
        cols.extend(self.exercises.iter().cloned());
        cols.extend(["overall_mae", "oboa", "clips", "failures"].map(String::from));
        cols
    }

    fn cells(&self, row: &SweepRow) -> Vec<String> {
        let mut cells = vec![row.window.to_string(), row.step.to_string()];
        cells.extend(row.per_exercise.iter().map(|v| format!("{v:.2}")));
        cells.extend([
            format!("{:.2}", row.overall_mae),
            format!("{:.2}", row.oboa),
            row.clips.to_string(),
            row.failures.to_string(),
        ]);
        cells
    }

    /// One line per `(window, step)`, one column per exercise.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let quote = |s: &str| {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        writeln!(out, "{}", self.header().iter().map(|h| quote(h)).collect::<Vec<_>>().join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", self.cells(row).join(","))?;
        }
        Ok(())
    }

    /// Same table with space-aligned columns.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = self.header();
        let body: Vec<Vec<String>> = self.rows.iter().map(|r| self.cells(r)).collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| body.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        writeln!(out, "{}", line(&header))?;
        for r in &body {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in &self.rows {
            let per: serde_json::Map<String, serde_json::Value> =
                self.exercises.iter().cloned().zip(row.per_exercise.iter().map(|v| (*v).into())).collect();
            let value = serde_json::json!({
                "window": row.window,
                "step": row.step,
                "modality": row.modality,
                "per_exercise_mae": per,
                "overall_mae": row.overall_mae,
                "oboa": row.oboa,
                "clips": row.clips,
                "failures": row.failures,
            });
            writeln!(out, "{value}")?;
        }
        Ok(())
    }
}
