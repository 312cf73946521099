//! Sliding-window spectrogram of the similarity signal, dominant-frequency
//! tracking, and count-by-integration.
//!
//! Frequencies are in cycles/frame throughout. Windows are rectangular and
//! un-padded; bin `k` of a `w`-sample window sits at `k/w`.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CountingConfig;
use crate::similarity::SimilaritySignal;

/// In-band peaks at or below this fraction of the column maximum are
/// round-off, not motion.
const NOISE_FLOOR: f64 = 1e-10;

/// Reusable forward DFT of a fixed length.
pub struct DftPlan {
    window: usize,
    fft: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl std::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan").field("window", &self.window).finish()
    }
}

impl DftPlan {
    pub fn new(window: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::WindowTooShort { len: window });
        }
        let fft = FftPlanner::new().plan_fft_forward(window);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Ok(DftPlan { window, fft, buffer: vec![Complex::default(); window], scratch })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Writes `⌊w/2⌋ + 1` magnitudes of `samples` into `out`.
    pub fn magnitudes_into(&mut self, samples: &[f64], out: &mut Vec<f64>) -> Result<()> {
        if samples.len() != self.window {
            return Err(Error::LengthMismatch { left: samples.len(), right: self.window });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate {
                frame: 0,
                index: samples.iter().position(|v| !v.is_finite()).unwrap_or(0),
            });
        }
        for (slot, &x) in self.buffer.iter_mut().zip(samples) {
            *slot = Complex::new(x, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        out.clear();
        out.extend(self.buffer[..=self.window / 2].iter().map(|c| c.norm()));
        Ok(())
    }
}

/// `|Σ x(n) e^{-i2πkn/w}|` for `k = 0..=⌊w/2⌋`.
pub fn dft_magnitudes(samples: &[f64]) -> Result<Vec<f64>> {
    let mut plan = DftPlan::new(samples.len())?;
    let mut out = Vec::with_capacity(samples.len() / 2 + 1);
    plan.magnitudes_into(samples, &mut out)?;
    Ok(out)
}

/// Magnitude columns of a sliding-window DFT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrogram {
    /// Effective window; equals the input length when it was shorter than
    /// the configured window.
    pub window: usize,
    pub step: usize,
    pub columns: Vec<Vec<f64>>,
    pub short_input: bool,
}

impl Spectrogram {
    pub fn center_frame(&self, column: usize) -> f64 {
        window_center(column, self.window, self.step)
    }

    /// One row per column: center frame, then magnitudes for bins `0..=w/2`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (m, column) in self.columns.iter().enumerate() {
            write!(out, "{}", self.center_frame(m))?;
            for v in column {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

pub(crate) fn window_center(column: usize, window: usize, step: usize) -> f64 {
    (column * step) as f64 + (window as f64 - 1.0) / 2.0
}

/// Number of full windows over `len` samples.
pub fn column_count(len: usize, window: usize, step: usize) -> usize {
    if len < window {
        0
    } else {
        (len - window) / step + 1
    }
}

/// Column `m` is the DFT of `signal[m·s .. m·s + w)`. Inputs shorter than the
/// window are analysed as a single DFT of their full length.
pub fn spectrogram(signal: &SimilaritySignal, cfg: &CountingConfig) -> Result<Spectrogram> {
    cfg.validate()?;
    let values = &signal.values;
    if values.len() < cfg.window {
        log::warn!(
            "signal has {} samples, shorter than the {}-frame window; using a single {}-point DFT",
            values.len(),
            cfg.window,
            values.len()
        );
        let column = dft_magnitudes(values)?;
        return Ok(Spectrogram { window: values.len(), step: cfg.step, columns: vec![column], short_input: true });
    }
    let (window, step) = (cfg.window, cfg.step);
    let count = column_count(values.len(), window, step);
    let columns = (0..count)
        .into_par_iter()
        .map_init(
            || DftPlan::new(window).expect("window validated"),
            |plan, m| {
                let mut out = Vec::with_capacity(window / 2 + 1);
                plan.magnitudes_into(&values[m * step..m * step + window], &mut out).map(|_| out)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrogram { window, step, columns, short_input: false })
}

/// Result of the peak search in one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dominant {
    Frequency { freq: f64, peak: f64 },
    NoMotion { peak: f64 },
}

impl Dominant {
    /// Frequency to integrate: zero for windows without motion.
    pub fn freq_or_zero(&self) -> f64 {
        match *self {
            Dominant::Frequency { freq, .. } => freq,
            Dominant::NoMotion { .. } => 0.0,
        }
    }

    pub fn peak(&self) -> f64 {
        match *self {
            Dominant::Frequency { peak, .. } | Dominant::NoMotion { peak } => peak,
        }
    }
}

/// Inclusive bin range searched for a `window`-sample DFT.
pub fn search_band(window: usize, cfg: &CountingConfig) -> Result<(usize, usize)> {
    let (min_freq, max_freq) = cfg.band(window);
    let w = window as f64;
    let lo = ((min_freq * w - 1e-9).ceil().max(1.0)) as usize;
    let hi = ((max_freq * w + 1e-9).floor() as usize).min(window / 2);
    if lo > hi {
        return Err(Error::EmptyBand { min_freq, max_freq, window });
    }
    Ok((lo, hi))
}

/// Strongest in-band frequency of one spectrogram column.
///
/// Ties go to the lowest bin. The column is `NoMotion` when the peak is
/// below `motion_threshold` times the in-band mean.
pub fn dominant_frequency(column: &[f64], window: usize, cfg: &CountingConfig) -> Result<Dominant> {
    if column.len() != window / 2 + 1 {
        return Err(Error::LengthMismatch { left: column.len(), right: window / 2 + 1 });
    }
    let (lo, hi) = search_band(window, cfg)?;
    let band = &column[lo..=hi];
    let mut best = 0;
    for (i, &v) in band.iter().enumerate() {
        if v > band[best] {
            best = i;
        }
    }
    let peak = band[best];
    let mean = band.iter().sum::<f64>() / band.len() as f64;
    let column_max = column.iter().copied().fold(0.0, f64::max);
    if peak < cfg.motion_threshold * mean || peak <= NOISE_FLOOR * column_max {
        return Ok(Dominant::NoMotion { peak });
    }
    let k = lo + best;
    let offset = if cfg.refine_peak { ratio_offset(column, k, lo, hi) } else { 0.0 };
    Ok(Dominant::Frequency { freq: (k as f64 + offset) / window as f64, peak })
}

/// Sub-bin offset from the larger in-band neighbour. For a rectangular
/// window the main-lobe magnitudes at `k` and `k±1` stand in the ratio
/// `(1-δ) : δ`, so `δ = |X[k±1]| / (|X[k]| + |X[k±1]|)`.
fn ratio_offset(column: &[f64], k: usize, lo: usize, hi: usize) -> f64 {
    let left = if k > lo { column[k - 1] } else { 0.0 };
    let right = if k < hi { column[k + 1] } else { 0.0 };
    let (neighbour, sign) = if right >= left { (right, 1.0) } else { (left, -1.0) };
    let total = column[k] + neighbour;
    if total > 0.0 {
        sign * neighbour / total
    } else {
        0.0
    }
}

/// One spectrogram column reduced to its dominant frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub center_frame: f64,
    /// `None` for windows without motion.
    pub freq: Option<f64>,
    pub peak_magnitude: f64,
}

impl TrackPoint {
    pub fn new(center_frame: f64, dominant: Dominant) -> Self {
        let freq = match dominant {
            Dominant::Frequency { freq, .. } => Some(freq),
            Dominant::NoMotion { .. } => None,
        };
        TrackPoint { center_frame, freq, peak_magnitude: dominant.peak() }
    }

    pub fn freq_or_zero(&self) -> f64 {
        self.freq.unwrap_or(0.0)
    }
}

/// Local frequency per spectrogram column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrack {
    pub window: usize,
    pub step: usize,
    pub points: Vec<TrackPoint>,
}

pub fn frequency_track(spec: &Spectrogram, cfg: &CountingConfig) -> Result<FrequencyTrack> {
    let points = spec
        .columns
        .iter()
        .enumerate()
        .map(|(m, column)| Ok(TrackPoint::new(spec.center_frame(m), dominant_frequency(column, spec.window, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyTrack { window: spec.window, step: spec.step, points })
}

/// Midpoint quadrature of frequency over frames, fed one column at a time.
///
/// Each column owns the frames from halfway to the previous center to
/// halfway to the next one; the first span starts at frame 0 and the last
/// ends at the clip length once [`RunningIntegral::close`] is called.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunningIntegral {
    left_edge: f64,
    last: Option<(f64, f64)>,
    completed: f64,
}

impl RunningIntegral {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a column; settles the span of the previous one.
    pub fn push(&mut self, center: f64, freq: f64) {
        if let Some((prev_center, prev_freq)) = self.last {
            let edge = (prev_center + center) / 2.0;
            self.completed += prev_freq * (edge - self.left_edge);
            self.left_edge = edge;
        }
        self.last = Some((center, freq));
    }

    /// Sum over settled spans only.
    pub fn completed(&self) -> f64 {
        self.completed
    }

    /// Total with the last span extended to `total_frames`.
    pub fn close(&self, total_frames: usize) -> f64 {
        match self.last {
            Some((_, freq)) => self.completed + freq * (total_frames as f64 - self.left_edge),
            None => 0.0,
        }
    }
}

/// Span of frames attributed to each center by [`integrate_count`].
pub fn quadrature_spans(centers: &[f64], total_frames: usize) -> Vec<f64> {
    let mut edges = Vec::with_capacity(centers.len() + 1);
    edges.push(0.0);
    edges.extend(centers.windows(2).map(|p| (p[0] + p[1]) / 2.0));
    edges.push(total_frames as f64);
    edges.windows(2).map(|e| e[1] - e[0]).collect()
}

/// Repetitions as `Σ_m freq_m × span_m` over a clip of `total_frames`.
pub fn integrate_count(track: &FrequencyTrack, total_frames: usize) -> Result<f64> {
    if track.points.is_empty() {
        return Err(Error::EmptyTrack);
    }
    let mut integral = RunningIntegral::new();
    for p in &track.points {
        integral.push(p.center_frame, p.freq_or_zero());
    }
    Ok(integral.close(total_frames))
}
