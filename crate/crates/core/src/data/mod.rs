//! Ingestion of skeleton data and the synthetic clip generator.
//!
//! Loaders never touch coordinate values beyond parsing them; joint
//! confidence scores are not carried.

mod jsonl;
mod mmfit;
pub mod npy;
mod resample;
mod synth;
mod uiprmd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SkeletonFrame, SkeletonSequence};

pub use jsonl::{frame_to_json, load_generic_jsonl, parse_frame_line, read_generic_jsonl, write_generic_jsonl};
pub use mmfit::{list_mmfit_workouts, load_mmfit, parse_labels, LabelRow, MMFIT_FPS};
pub use npy::NpyArray;
pub use resample::resample_uniform;
pub use synth::{generate_synthetic, synthetic_suite, FrequencyProfile, SynthSpec};
pub use uiprmd::{list_uiprmd_movements, load_uiprmd, parse_positions, UIPRMD_FPS, UIPRMD_REPS};

/// Where a clip came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClipSource {
    MmFit,
    UiPrmd,
    Synthetic,
    Jsonl,
}

/// Which pose array of a dataset to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
}

impl Modality {
    pub fn dims(self) -> usize {
        match self {
            Modality::TwoD => 2,
            Modality::ThreeD => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Modality::TwoD => "2d",
            Modality::ThreeD => "3d",
        }
    }
}

/// A sequence with its known repetition count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledClip {
    pub id: String,
    pub sequence: SkeletonSequence,
    pub exercise: String,
    pub ground_truth: u32,
    pub source: ClipSource,
}

impl LabeledClip {
    pub fn new(
        id: impl Into<String>,
        sequence: SkeletonSequence,
        exercise: impl Into<String>,
        ground_truth: u32,
        source: ClipSource,
    ) -> Result<Self> {
        let id = id.into();
        if ground_truth == 0 {
            return Err(Error::InvalidSpec(format!("clip {id} has ground truth 0; need at least one repetition")));
        }
        Ok(LabeledClip { id, sequence, exercise: exercise.into(), ground_truth, source })
    }

    pub fn modality(&self) -> Modality {
        if self.sequence.layout.dims == 2 {
            Modality::TwoD
        } else {
            Modality::ThreeD
        }
    }
}

/// Splits frames by person, keeping first-appearance order of persons and
/// file order within each person.
pub fn group_by_person(frames: Vec<SkeletonFrame>) -> Vec<(String, Vec<SkeletonFrame>)> {
    let mut groups: Vec<(String, Vec<SkeletonFrame>)> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for frame in frames {
        let slot = *index.entry(frame.person_id.clone()).or_insert_with(|| {
            groups.push((frame.person_id.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(frame);
    }
    groups
}

/// Frame rate implied by first/last timestamps, if they span a positive time.
pub fn estimate_fps(frames: &[SkeletonFrame]) -> Option<f64> {
    let (first, last) = (frames.first()?, frames.last()?);
    let span = last.timestamp - first.timestamp;
    (frames.len() > 1 && span > 0.0).then(|| (frames.len() - 1) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JointLayout;

    #[test]
    fn grouping_preserves_order() {
        let layout = JointLayout::new(1, 2).unwrap();
        let mk = |t: f64, p: &str| SkeletonFrame::new(t, p, layout, vec![t, 1.0]).unwrap();
        let groups = group_by_person(vec![mk(0.0, "b"), mk(0.0, "a"), mk(1.0, "b"), mk(1.0, "a"), mk(2.0, "b")]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "b");
        assert_eq!(groups[0].1.iter().map(|f| f.timestamp).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert_eq!(groups[1].0, "a");
    }

    #[test]
    fn fps_estimate() {
        let layout = JointLayout::new(1, 2).unwrap();
        let frames: Vec<_> =
            (0..31).map(|i| SkeletonFrame::new(i as f64 / 30.0, "a", layout, vec![1.0, 1.0]).unwrap()).collect();
        assert!((estimate_fps(&frames).unwrap() - 30.0).abs() < 1e-9);
        assert_eq!(estimate_fps(&frames[..1]), None);
    }

    #[test]
    fn zero_truth_rejected() {
        let seq = SkeletonSequence::new("a", 30.0, JointLayout::new(1, 2).unwrap(), vec![vec![1.0, 1.0]]);
        assert!(LabeledClip::new("c", seq, "squat", 0, ClipSource::Jsonl).is_err());
    }
}
