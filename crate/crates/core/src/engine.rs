//! Batch and streaming orchestration.
//!
//! A [`PersonSession`] keeps the last `w` similarity values of one person in a
//! ring buffer and emits one spectrogram column every `s` frames once the
//! buffer is full. Its finalized count equals [`count_sequence`] on the same
//! frames. [`SessionRouter`] fans an interleaved multi-person stream out to
//! independent sessions keyed by `person_id`.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{round_half_even, CountReport, CountingConfig, JointLayout, SkeletonFrame, SkeletonSequence};
use crate::similarity::{reference_signal, PreparedFrame};
use crate::spectral::{
    dft_magnitudes, dominant_frequency, frequency_track, integrate_count, spectrogram, window_center, DftPlan,
    RunningIntegral, TrackPoint,
};

/// Full pipeline over one validated sequence.
pub fn count_sequence(seq: &SkeletonSequence, cfg: &CountingConfig) -> Result<CountReport> {
    cfg.validate()?;
    seq.check()?;
    let signal = reference_signal(seq, cfg)?;
    if signal.len() < 2 {
        return Ok(CountReport::empty(seq.person_id.clone(), signal.len()));
    }
    let spec = spectrogram(&signal, cfg)?;
    let track = frequency_track(&spec, cfg)?;
    let raw = integrate_count(&track, signal.len())?;
    Ok(CountReport::new(seq.person_id.clone(), raw, track.points, signal.len(), spec.short_input))
}

/// Progress of one person after a pushed frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamUpdate {
    pub person_id: String,
    pub frames_processed: usize,
    /// Settled spans only; see [`PersonSession::finalize`] for the closed total.
    pub raw_count: f64,
    pub rounded_count: u64,
    /// The column completed by this frame, if any.
    pub new_column: Option<TrackPoint>,
}

impl StreamUpdate {
    /// Latest local frequency; `None` means no column yet or no motion.
    pub fn latest_freq(&self) -> Option<f64> {
        self.new_column.and_then(|c| c.freq)
    }
}

/// Incremental counter for one person. The reference is the first accepted
/// frame. Not shareable across threads while pushing; distinct sessions are
/// independent.
#[derive(Debug)]
pub struct PersonSession {
    person_id: String,
    cfg: CountingConfig,
    layout: Option<JointLayout>,
    reference: Option<PreparedFrame>,
    ring: VecDeque<f64>,
    last_similarity: f64,
    frames_seen: usize,
    plan: DftPlan,
    magnitudes: Vec<f64>,
    track: Vec<TrackPoint>,
    integral: RunningIntegral,
    report: Option<CountReport>,
}

impl PersonSession {
    pub fn new(person_id: impl Into<String>, cfg: CountingConfig) -> Result<Self> {
        cfg.validate()?;
        let plan = DftPlan::new(cfg.window)?;
        Ok(PersonSession {
            person_id: person_id.into(),
            layout: None,
            reference: None,
            ring: VecDeque::with_capacity(cfg.window),
            last_similarity: 1.0,
            frames_seen: 0,
            plan,
            magnitudes: Vec::with_capacity(cfg.window / 2 + 1),
            track: Vec::new(),
            integral: RunningIntegral::new(),
            report: None,
            cfg,
        })
    }

    pub fn person_id(&self) -> &str {
        &self.person_id
    }

    pub fn frames_seen(&self) -> usize {
        self.frames_seen
    }

    pub fn track(&self) -> &[TrackPoint] {
        &self.track
    }

    pub fn is_finalized(&self) -> bool {
        self.report.is_some()
    }

    pub fn push_frame(&mut self, frame: &SkeletonFrame) -> Result<StreamUpdate> {
        if self.report.is_some() {
            return Err(Error::SessionFinalized(self.person_id.clone()));
        }
        if frame.person_id != self.person_id {
            return Err(Error::PersonMismatch { expected: self.person_id.clone(), found: frame.person_id.clone() });
        }
        frame.validate()?;
        if let Some(layout) = self.layout {
            if layout != frame.layout {
                return Err(Error::InconsistentJointLayout {
                    frame: self.frames_seen,
                    expected: layout.coords(),
                    found: frame.joints.len(),
                    joints: layout.joints,
                    dims: layout.dims,
                });
            }
        }

        let prepared = PreparedFrame::new(&frame.joints, frame.layout.dims, self.cfg.center_frames);
        let similarity = match &self.reference {
            None => {
                if prepared.is_zero() {
                    return Err(Error::ZeroNormFrame { frame: self.frames_seen });
                }
                let s = prepared.cosine(&prepared);
                self.layout = Some(frame.layout);
                self.reference = Some(prepared);
                s
            }
            Some(reference) if !prepared.is_zero() => reference.cosine(&prepared),
            Some(_) => self.last_similarity,
        };
        self.last_similarity = similarity;

        let window = self.cfg.window;
        if self.ring.len() == window {
            self.ring.pop_front();
        }
        self.ring.push_back(similarity);
        self.frames_seen += 1;

        let mut new_column = None;
        if self.frames_seen >= window && (self.frames_seen - window).is_multiple_of(self.cfg.step) {
            let column = (self.frames_seen - window) / self.cfg.step;
            self.plan.magnitudes_into(self.ring.make_contiguous(), &mut self.magnitudes)?;
            let dominant = dominant_frequency(&self.magnitudes, window, &self.cfg)?;
            let point = TrackPoint::new(window_center(column, window, self.cfg.step), dominant);
            self.integral.push(point.center_frame, point.freq_or_zero());
            self.track.push(point);
            new_column = Some(point);
        }

        let raw_count = self.integral.completed();
        Ok(StreamUpdate {
            person_id: self.person_id.clone(),
            frames_processed: self.frames_seen,
            raw_count,
            rounded_count: round_half_even(raw_count),
            new_column,
        })
    }

    /// Closes the quadrature at the last frame and freezes the session.
    /// Calling it again returns the same report.
    pub fn finalize(&mut self) -> Result<CountReport> {
        if let Some(report) = &self.report {
            return Ok(report.clone());
        }
        let n = self.frames_seen;
        let report = if n < 2 {
            CountReport::empty(self.person_id.clone(), n)
        } else if n < self.cfg.window {
            // The ring still holds every similarity value.
            let values: Vec<f64> = self.ring.iter().copied().collect();
            let column = dft_magnitudes(&values)?;
            let point = TrackPoint::new(window_center(0, n, self.cfg.step), dominant_frequency(&column, n, &self.cfg)?);
            let mut integral = RunningIntegral::new();
            integral.push(point.center_frame, point.freq_or_zero());
            CountReport::new(self.person_id.clone(), integral.close(n), vec![point], n, true)
        } else {
            CountReport::new(self.person_id.clone(), self.integral.close(n), self.track.clone(), n, false)
        };
        self.report = Some(report.clone());
        Ok(report)
    }
}

/// Routes frames to per-person sessions, creating them on first sight.
#[derive(Debug)]
pub struct SessionRouter {
    cfg: CountingConfig,
    sessions: Vec<PersonSession>,
    index: HashMap<String, usize>,
}

impl SessionRouter {
    pub fn new(cfg: CountingConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(SessionRouter { cfg, sessions: Vec::new(), index: HashMap::new() })
    }

    /// Pushes one frame to its person's session.
    pub fn step(&mut self, frame: &SkeletonFrame) -> Result<StreamUpdate> {
        let slot = match self.index.get(&frame.person_id) {
            Some(&slot) => slot,
            None => {
                self.sessions.push(PersonSession::new(frame.person_id.clone(), self.cfg.clone())?);
                self.index.insert(frame.person_id.clone(), self.sessions.len() - 1);
                self.sessions.len() - 1
            }
        };
        self.sessions[slot].push_frame(frame)
    }

    pub fn session(&self, person_id: &str) -> Option<&PersonSession> {
        self.index.get(person_id).map(|&i| &self.sessions[i])
    }

    /// Person ids in order of first appearance.
    pub fn persons(&self) -> impl Iterator<Item = &str> {
        self.sessions.iter().map(|s| s.person_id())
    }

    /// Finalizes every session; reports come in order of first appearance.
    pub fn finalize_all(&mut self) -> Result<Vec<CountReport>> {
        self.sessions.iter_mut().map(PersonSession::finalize).collect()
    }
}
