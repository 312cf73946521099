//! Core value types shared by the similarity, spectral and engine stages.
//!
//! Joint layouts are opaque: a frame is a flat `j × d` coordinate vector and
//! nothing downstream cares which joint is which. The pipeline works in frame
//! units; `fps` only matters for reporting and for converting period bounds
//! given in seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::TrackPoint;

/// Frame rate assumed when none is known.
pub const DEFAULT_FPS: f64 = 30.0;

/// Number of joints and coordinate dimensionality of a skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointLayout {
    pub joints: usize,
    pub dims: usize,
}

impl JointLayout {
    pub fn new(joints: usize, dims: usize) -> Result<Self> {
        if joints == 0 {
            return Err(Error::InvalidJointLayout("joint count must be positive".into()));
        }
        if dims != 2 && dims != 3 {
            return Err(Error::InvalidJointLayout(format!("dimension must be 2 or 3, got {dims}")));
        }
        Ok(JointLayout { joints, dims })
    }

    pub fn coords(&self) -> usize {
        self.joints * self.dims
    }
}

/// One person's joints at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    pub timestamp: f64,
    pub person_id: String,
    pub layout: JointLayout,
    /// Row-major `[x0, y0, (z0), x1, y1, ...]`.
    pub joints: Vec<f64>,
}

impl SkeletonFrame {
    pub fn new(timestamp: f64, person_id: impl Into<String>, layout: JointLayout, joints: Vec<f64>) -> Result<Self> {
        let frame = SkeletonFrame { timestamp, person_id: person_id.into(), layout, joints };
        frame.validate()?;
        Ok(frame)
    }

    pub fn validate(&self) -> Result<()> {
        JointLayout::new(self.layout.joints, self.layout.dims)?;
        if !(self.timestamp.is_finite() && self.timestamp >= 0.0) {
            return Err(Error::InvalidJointLayout(format!("timestamp {} is not a non-negative real", self.timestamp)));
        }
        if self.joints.len() != self.layout.coords() {
            return Err(Error::InconsistentJointLayout {
                frame: 0,
                expected: self.layout.coords(),
                found: self.joints.len(),
                joints: self.layout.joints,
                dims: self.layout.dims,
            });
        }
        if let Some(index) = self.joints.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate { frame: 0, index });
        }
        Ok(())
    }
}

/// Uniformly sampled frames of one person.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSequence {
    pub person_id: String,
    pub fps: f64,
    pub layout: JointLayout,
    pub frames: Vec<Vec<f64>>,
}

impl SkeletonSequence {
    /// Builds a sequence without checking it; see [`validate_sequence`].
    pub fn new(person_id: impl Into<String>, fps: f64, layout: JointLayout, frames: Vec<Vec<f64>>) -> Self {
        SkeletonSequence { person_id: person_id.into(), fps, layout, frames }
    }

    /// Collects already-uniform frames of one person in the given order.
    /// The layout is taken from the first frame.
    pub fn from_frames(person_id: impl Into<String>, fps: f64, frames: &[SkeletonFrame]) -> Result<Self> {
        let first = frames.first().ok_or(Error::EmptySequence)?;
        let seq =
            SkeletonSequence::new(person_id, fps, first.layout, frames.iter().map(|f| f.joints.clone()).collect());
        validate_sequence(seq)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Frames stamped at `start + n / fps`.
    pub fn to_frames(&self, start: f64) -> Vec<SkeletonFrame> {
        self.frames
            .iter()
            .enumerate()
            .map(|(n, joints)| SkeletonFrame {
                timestamp: start + n as f64 / self.fps,
                person_id: self.person_id.clone(),
                layout: self.layout,
                joints: joints.clone(),
            })
            .collect()
    }

    pub fn duration_secs(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }

    /// Applies `f` to every joint coordinate triple/pair, returning a new sequence.
    pub fn map_joints(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Self {
        let dims = self.layout.dims;
        let frames = self.frames.iter().map(|frame| frame.chunks(dims).flat_map(&mut f).collect()).collect();
        SkeletonSequence { frames, ..self.clone() }
    }
}

/// Checks every sequence invariant and hands the sequence back unchanged.
pub fn validate_sequence(seq: SkeletonSequence) -> Result<SkeletonSequence> {
    seq.check()?;
    Ok(seq)
}

impl SkeletonSequence {
    /// Borrowing form of [`validate_sequence`].
    pub fn check(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::EmptySequence);
        }
        JointLayout::new(self.layout.joints, self.layout.dims)?;
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::InvalidJointLayout(format!("fps must be positive, got {}", self.fps)));
        }
        let expected = self.layout.coords();
        for (frame, coords) in self.frames.iter().enumerate() {
            if coords.len() != expected {
                return Err(Error::InconsistentJointLayout {
                    frame,
                    expected,
                    found: coords.len(),
                    joints: self.layout.joints,
                    dims: self.layout.dims,
                });
            }
            if let Some(index) = coords.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate { frame, index });
            }
        }
        Ok(())
    }
}

/// Tuning knobs for the counting pipeline. Frequencies are in cycles/frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingConfig {
    /// Spectrogram window length in frames.
    pub window: usize,
    /// Hop between consecutive windows in frames.
    pub step: usize,
    /// Subtract the per-frame joint centroid before comparing frames.
    pub center_frames: bool,
    /// Lower edge of the dominant-frequency search. `None` means one bin
    /// (`1/w` for the effective window length), which always excludes DC.
    pub min_freq: Option<f64>,
    pub max_freq: f64,
    /// A window counts as motion only if its in-band peak is at least this
    /// many times the in-band mean magnitude.
    pub motion_threshold: f64,
    /// Batch-only: frame the similarity signal is measured against.
    pub reference_index: usize,
    /// Refine the peak bin with the rectangular-window magnitude-ratio
    /// estimator. With `false` the result is the bare bin frequency `k/w`.
    pub refine_peak: bool,
}

impl Default for CountingConfig {
    fn default() -> Self {
        CountingConfig {
            window: 256,
            step: 1,
            center_frames: false,
            min_freq: None,
            max_freq: 0.5,
            motion_threshold: 4.0,
            reference_index: 0,
            refine_peak: true,
        }
    }
}

impl CountingConfig {
    pub fn with_window(mut self, window: usize, step: usize) -> Self {
        self.window = window;
        self.step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidConfig(format!("window must be at least 2, got {}", self.window)));
        }
        if self.step == 0 || self.step > self.window {
            return Err(Error::InvalidConfig(format!(
                "step must satisfy 1 <= step <= window ({}), got {}",
                self.window, self.step
            )));
        }
        let min = self.min_freq.unwrap_or(1.0 / self.window as f64);
        if !(min > 0.0 && min <= self.max_freq && self.max_freq <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < min_freq <= max_freq <= 0.5, got min {min} max {}",
                self.max_freq
            )));
        }
        if !(self.motion_threshold.is_finite() && self.motion_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "motion threshold must be positive, got {}",
                self.motion_threshold
            )));
        }
        Ok(())
    }

    /// Search band `(min, max)` in cycles/frame for a DFT of `window` samples.
    pub fn band(&self, window: usize) -> (f64, f64) {
        (self.min_freq.unwrap_or(1.0 / window as f64), self.max_freq)
    }

    /// Sets the band from period bounds in seconds. A bound of `None` leaves
    /// that edge at its default.
    pub fn with_period_bounds(mut self, fps: f64, min_period: Option<f64>, max_period: Option<f64>) -> Result<Self> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::InvalidConfig(format!("fps must be positive, got {fps}")));
        }
        for p in [min_period, max_period].into_iter().flatten() {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidConfig(format!("period bounds must be positive, got {p}")));
            }
        }
        // Long periods bound the low frequencies and vice versa.
        if let Some(max_p) = max_period {
            self.min_freq = Some(1.0 / (max_p * fps));
        }
        if let Some(min_p) = min_period {
            self.max_freq = (1.0 / (min_p * fps)).min(0.5);
        }
        self.validate()?;
        Ok(self)
    }
}

/// Banker's rounding of a non-negative count.
pub fn round_half_even(x: f64) -> u64 {
    x.max(0.0).round_ties_even() as u64
}

/// Outcome of counting one person's clip or stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub person_id: String,
    pub raw_count: f64,
    pub rounded_count: u64,
    pub freq_track: Vec<TrackPoint>,
    pub frames_processed: usize,
    /// The clip was shorter than the window and was analysed as one DFT.
    pub short_input: bool,
}

impl CountReport {
    pub fn new(
        person_id: impl Into<String>,
        raw_count: f64,
        freq_track: Vec<TrackPoint>,
        frames_processed: usize,
        short_input: bool,
    ) -> Self {
        CountReport {
            person_id: person_id.into(),
            raw_count,
            rounded_count: round_half_even(raw_count),
            freq_track,
            frames_processed,
            short_input,
        }
    }

    pub fn empty(person_id: impl Into<String>, frames_processed: usize) -> Self {
        CountReport::new(person_id, 0.0, Vec::new(), frames_processed, frames_processed > 0)
    }
}
