//! Repetition counting from skeleton keypoint sequences.
//!
//! The pipeline turns a per-person series of joint coordinates into a 1D
//! cosine-similarity signal against a reference frame, takes a sliding-window
//! DFT spectrogram of that signal, picks the dominant in-band frequency of
//! every window and integrates it over the clip to get a repetition count.
//!
//! ```
//! use repcount::data::{generate_synthetic, FrequencyProfile, SynthSpec};
//! use repcount::{count_sequence, CountingConfig};
//!
//! let spec = SynthSpec::random_pose(18, 3, FrequencyProfile::Stationary { f0: 0.02 }, 1001, 0.0, 7);
//! let clip = generate_synthetic(&spec).unwrap();
//! let report = count_sequence(&clip.sequence, &CountingConfig::default()).unwrap();
//! assert!((report.rounded_count as i64 - clip.ground_truth as i64).abs() <= 1);
//! ```

pub mod data;
pub mod engine;
mod error;
pub mod metrics;
pub mod model;
pub mod similarity;
pub mod spectral;

pub use engine::{count_sequence, PersonSession, SessionRouter, StreamUpdate};
pub use error::{Error, Result};
pub use model::{
    round_half_even, validate_sequence, CountReport, CountingConfig, JointLayout, SkeletonFrame, SkeletonSequence,
};
pub use similarity::{cosine_similarity, reference_signal, self_similarity_matrix, SimilarityMatrix, SimilaritySignal};
pub use spectral::{
    dft_magnitudes, dominant_frequency, integrate_count, spectrogram, Dominant, FrequencyTrack, Spectrogram, TrackPoint,
};
