use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,
    #[error("non-finite coordinate in frame {frame} at index {index}")]
    NonFiniteCoordinate { frame: usize, index: usize },
    #[error("frame {frame} has {found} coordinates, expected {expected} ({joints} joints x {dims} dims)")]
    InconsistentJointLayout { frame: usize, expected: usize, found: usize, joints: usize, dims: usize },
    #[error("invalid joint layout: {0}")]
    InvalidJointLayout(String),
    #[error("invalid counting config: {0}")]
    InvalidConfig(String),

    #[error("frame {frame} has (near) zero norm")]
    ZeroNormFrame { frame: usize },
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("DFT window of {len} samples is too short (need at least 2)")]
    WindowTooShort { len: usize },
    #[error("frequency band [{min_freq}, {max_freq}] contains no DFT bin for window {window}")]
    EmptyBand { min_freq: f64, max_freq: f64, window: usize },
    #[error("frequency track is empty")]
    EmptyTrack,

    #[error("frame for person {found:?} pushed to session of person {expected:?}")]
    PersonMismatch { expected: String, found: String },
    #[error("session for person {0:?} is already finalized")]
    SessionFinalized(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: schema error: {message}")]
    Schema { line: usize, message: String },
    #[error("timestamps are not strictly increasing at frame {index}")]
    NonMonotonicTimestamps { index: usize },
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("malformed labels at line {line}: {reason}")]
    MalformedLabels { line: usize, reason: String },
    #[error("line {line}: ragged row with {found} columns, expected {expected}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("npy: {0}")]
    Npy(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("no evaluation records")]
    EmptyRecords,
    #[error("record {index} has zero ground truth")]
    ZeroGroundTruth { index: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by malformed or missing input files, as opposed
    /// to failures of the counting pipeline itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Schema { .. }
                | Error::MissingFile(_)
                | Error::MalformedLabels { .. }
                | Error::RaggedRow { .. }
                | Error::Npy(_)
                | Error::Io { .. }
                | Error::NonMonotonicTimestamps { .. }
                | Error::InvalidJointLayout(_)
                | Error::InconsistentJointLayout { .. }
                | Error::NonFiniteCoordinate { .. }
                | Error::InvalidSpec(_)
                | Error::InvalidConfig(_)
        )
    }
}
