use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "repcount", version, about = "Count exercise repetitions from skeleton keypoint streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count repetitions per person in JSONL files or a dataset.
    Count(CountArgs),
    /// Read JSONL frames from stdin and print live updates.
    Stream(StreamArgs),
    /// Score counting accuracy over a dataset and a (window, step) grid.
    Eval(EvalArgs),
    /// Write a synthetic clip as JSONL with a ground-truth sidecar.
    Synth(SynthArgs),
    /// Measure per-frame streaming latency.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long, default_value_t = 256)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Subtract each frame's joint centroid before comparing frames.
    #[arg(long)]
    pub center: bool,
    /// Frame rate; needed to convert period bounds to cycles per frame.
    #[arg(long)]
    pub fps: Option<f64>,
    /// Shortest repetition period in seconds.
    #[arg(long)]
    pub min_period: Option<f64>,
    /// Longest repetition period in seconds.
    #[arg(long)]
    pub max_period: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Mmfit,
    Uiprmd,
    Synth,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModalityArg {
    #[value(name = "2d")]
    TwoD,
    #[value(name = "3d")]
    ThreeD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct DatasetArgs {
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetKind>,
    /// Dataset root directory.
    #[arg(long)]
    pub root: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "3d")]
    pub modality: ModalityArg,
    /// UI-PRMD movement id; all movements when omitted.
    #[arg(long)]
    pub movement: Option<u32>,
    /// Clips in a synthetic suite.
    #[arg(long, default_value_t = 100)]
    pub clips: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// JSONL files; `-` reads standard input.
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Resample each person onto a uniform grid at --fps before counting.
    #[arg(long)]
    pub resample: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// `window:step` pairs, e.g. `128:1,256:1`.
    #[arg(long, value_delimiter = ',', default_value = "256:1")]
    pub grid: Vec<String>,
    #[arg(long)]
    pub center: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Stationary frequency in cycles per frame.
    #[arg(long, conflicts_with = "chirp", required_unless_present = "chirp")]
    pub f0: Option<f64>,
    /// Linear chirp `start:end` in cycles per frame.
    #[arg(long)]
    pub chirp: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub frames: usize,
    #[arg(long, default_value_t = 18)]
    pub joints: usize,
    #[arg(long, default_value_t = 3)]
    pub dims: usize,
    /// Noise standard deviation per coordinate.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    #[arg(long)]
    pub person: Option<String>,
    /// Output JSONL path; the truth file goes next to it as `<stem>.truth.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 256)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[arg(long, default_value_t = 100_000)]
    pub frames: usize,
    #[arg(long, default_value_t = 18)]
    pub joints: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: Format,
}
