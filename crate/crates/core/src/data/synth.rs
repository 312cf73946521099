//! Synthetic skeleton clips with known repetition counts.
//!
//! Every coordinate moves as `base + amplitude · (1 − cos 2πφ(n)) / 2`, so
//! frame 0 is the rest pose `base` and each completed phase cycle is one
//! repetition. Ground truth is the number of completed cycles,
//! `⌊φ(N−1)⌋`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{ClipSource, LabeledClip};
use crate::error::{Error, Result};
use crate::model::{JointLayout, SkeletonSequence, DEFAULT_FPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrequencyProfile {
    Stationary {
        f0: f64,
    },
    /// Frequency ramps linearly from `start` at frame 0 to `end` at frame N−1.
    Chirp {
        start: f64,
        end: f64,
    },
}

impl FrequencyProfile {
    /// Cumulative phase in cycles at frame `n` of an `frames`-long clip.
    pub fn phase(&self, n: usize, frames: usize) -> f64 {
        let n = n as f64;
        match *self {
            FrequencyProfile::Stationary { f0 } => f0 * n,
            FrequencyProfile::Chirp { start, end } => {
                if frames < 2 {
                    start * n
                } else {
                    start * n + (end - start) * n * n / (2.0 * (frames - 1) as f64)
                }
            }
        }
    }

    fn check(&self) -> Result<()> {
        let ok = |f: f64| f.is_finite() && f > 0.0 && f <= 0.5;
        match *self {
            FrequencyProfile::Stationary { f0 } if ok(f0) => Ok(()),
            FrequencyProfile::Chirp { start, end } if ok(start) && ok(end) => Ok(()),
            _ => Err(Error::InvalidSpec(format!("frequencies must lie in (0, 0.5] cycles/frame: {self:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub joints: usize,
    pub dims: usize,
    pub base: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub profile: FrequencyProfile,
    pub frames: usize,
    /// Standard deviation of additive Gaussian noise per coordinate.
    pub sigma: f64,
    pub seed: u64,
    pub fps: f64,
}

impl SynthSpec {
    /// Spec with a seeded random rest pose (coordinates in `[0.5, 1.5)`) and
    /// per-coordinate amplitudes in `[-0.5, 0.5)`.
    pub fn random_pose(
        joints: usize,
        dims: usize,
        profile: FrequencyProfile,
        frames: usize,
        sigma: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed9a_7e0f_b0d1);
        let coords = joints * dims;
        let base = (0..coords).map(|_| rng.random_range(0.5..1.5)).collect();
        let amplitude = (0..coords).map(|_| rng.random_range(-0.5..0.5)).collect();
        SynthSpec { joints, dims, base, amplitude, profile, frames, sigma, seed, fps: DEFAULT_FPS }
    }

    pub fn validate(&self) -> Result<()> {
        let layout = JointLayout::new(self.joints, self.dims).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        if self.base.len() != layout.coords() || self.amplitude.len() != layout.coords() {
            return Err(Error::InvalidSpec(format!(
                "base and amplitude need {} entries, got {} and {}",
                layout.coords(),
                self.base.len(),
                self.amplitude.len()
            )));
        }
        if self.base.iter().chain(&self.amplitude).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("base and amplitude must be finite".into()));
        }
        self.profile.check()?;
        if self.frames == 0 {
            return Err(Error::InvalidSpec("need at least one frame".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidSpec(format!("sigma must be non-negative, got {}", self.sigma)));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::InvalidSpec(format!("fps must be positive, got {}", self.fps)));
        }
        Ok(())
    }

    /// Completed cycles over the clip.
    pub fn ground_truth(&self) -> u32 {
        (self.profile.phase(self.frames - 1, self.frames) + 1e-9).floor() as u32
    }

    pub fn mean_abs_amplitude(&self) -> f64 {
        self.amplitude.iter().map(|a| a.abs()).sum::<f64>() / self.amplitude.len().max(1) as f64
    }
}

/// Renders a spec into a clip. Identical specs give bit-identical frames.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<LabeledClip> {
    spec.validate()?;
    let noise = Normal::new(0.0, spec.sigma).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let frames = (0..spec.frames)
        .map(|n| {
            let displacement = (1.0 - (2.0 * std::f64::consts::PI * spec.profile.phase(n, spec.frames)).cos()) / 2.0;
            spec.base
                .iter()
                .zip(&spec.amplitude)
                .map(|(b, a)| {
                    let eps = if spec.sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                    b + a * displacement + eps
                })
                .collect()
        })
        .collect();
    let id = format!("synth-{}", spec.seed);
    let layout = JointLayout::new(spec.joints, spec.dims)?;
    let seq = SkeletonSequence::new(id.clone(), spec.fps, layout, frames);
    LabeledClip::new(id, seq, "synthetic", spec.ground_truth(), ClipSource::Synthetic)
}

/// Seeded suite of stationary clips: f0 in `[2/w, 0.1]`, length in
/// `[4w, max(4w, 2000)]`, noise sigma up to 5% of the mean amplitude.
pub fn synthetic_suite(clips: usize, seed: u64, window: usize) -> Result<Vec<LabeledClip>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_len = 4 * window;
    let max_len = min_len.max(2000);
    (0..clips)
        .map(|i| {
            let f0 = rng.random_range(2.0 / window as f64..=0.1);
            let frames = rng.random_range(min_len..=max_len);
            let joints = [18, 22, 25][rng.random_range(0..3)];
            let clip_seed = rng.random::<u64>();
            let noise_ratio = rng.random_range(0.0..=0.05);
            let mut spec =
                SynthSpec::random_pose(joints, 3, FrequencyProfile::Stationary { f0 }, frames, 0.0, clip_seed);
            spec.sigma = noise_ratio * spec.mean_abs_amplitude();
            let mut clip = generate_synthetic(&spec)?;
            clip.id = format!("synth-{i:03}");
            clip.sequence.person_id = clip.id.clone();
            Ok(clip)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_ground_truth_floor() {
        let spec = SynthSpec::random_pose(4, 3, FrequencyProfile::Stationary { f0: 0.01 }, 1000, 0.0, 1);
        assert_eq!(spec.ground_truth(), 9);
        let spec = SynthSpec { frames: 1001, ..spec };
        assert_eq!(spec.ground_truth(), 10);
        let spec = SynthSpec::random_pose(4, 3, FrequencyProfile::Stationary { f0: 0.02 }, 1001, 0.0, 1);
        assert_eq!(spec.ground_truth(), 20);
    }

    #[test]
    fn chirp_ground_truth_closed_form() {
        let spec = SynthSpec::random_pose(4, 3, FrequencyProfile::Chirp { start: 0.02, end: 0.04 }, 2000, 0.0, 1);
        // φ(N−1) = (0.02 + 0.04) / 2 · 1999
        assert_eq!(spec.ground_truth(), 59);
        assert!((spec.profile.phase(1999, 2000) - 0.03 * 1999.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec::random_pose(18, 3, FrequencyProfile::Stationary { f0: 0.03 }, 500, 0.05, 42);
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        let other = generate_synthetic(&SynthSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a.sequence.frames, other.sequence.frames);
    }

    #[test]
    fn first_frame_is_rest_pose() {
        let spec = SynthSpec::random_pose(5, 2, FrequencyProfile::Stationary { f0: 0.05 }, 50, 0.0, 3);
        let clip = generate_synthetic(&spec).unwrap();
        assert_eq!(clip.sequence.frames[0], spec.base);
    }

    #[test]
    fn invalid_specs() {
        let good = SynthSpec::random_pose(4, 3, FrequencyProfile::Stationary { f0: 0.02 }, 100, 0.0, 1);
        for bad in [
            SynthSpec { profile: FrequencyProfile::Stationary { f0: 0.9 }, ..good.clone() },
            SynthSpec { profile: FrequencyProfile::Stationary { f0: 0.0 }, ..good.clone() },
            SynthSpec { profile: FrequencyProfile::Chirp { start: 0.1, end: 0.6 }, ..good.clone() },
            SynthSpec { frames: 0, ..good.clone() },
            SynthSpec { sigma: -1.0, ..good.clone() },
            SynthSpec { dims: 4, ..good.clone() },
            SynthSpec { base: vec![1.0], ..good.clone() },
        ] {
            assert!(matches!(generate_synthetic(&bad), Err(Error::InvalidSpec(_))), "{bad:?}");
        }
    }

    #[test]
    fn suite_respects_ranges() {
        let suite = synthetic_suite(20, 7, 256).unwrap();
        assert_eq!(suite.len(), 20);
        for clip in &suite {
            assert!((1024..=2000).contains(&clip.sequence.len()));
            assert!(clip.ground_truth >= 7);
        }
        assert_eq!(suite, synthetic_suite(20, 7, 256).unwrap());
    }
}
