//! Cosine self-similarity between skeleton frames.
//!
//! Only the reference row is used for counting; the full matrix is built for
//! inspection and plotting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CountingConfig, SkeletonSequence};

/// Norms below this are treated as pose-estimation dropouts.
pub const ZERO_NORM: f64 = 1e-12;

/// `(a·b) / (‖a‖‖b‖)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let na = norm(a);
    if na < ZERO_NORM {
        return Err(Error::ZeroNormFrame { frame: 0 });
    }
    let nb = norm(b);
    if nb < ZERO_NORM {
        return Err(Error::ZeroNormFrame { frame: 1 });
    }
    Ok(cosine_with_norms(a, na, b, nb))
}

pub(crate) fn cosine_with_norms(a: &[f64], na: f64, b: &[f64], nb: f64) -> f64 {
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Frame preprocessing: optional removal of the per-frame joint centroid.
pub(crate) fn prepare(frame: &[f64], dims: usize, center: bool) -> Vec<f64> {
    let mut out = frame.to_vec();
    if center {
        let joints = frame.len() / dims;
        for axis in 0..dims {
            let mean = frame.iter().skip(axis).step_by(dims).sum::<f64>() / joints as f64;
            for v in out.iter_mut().skip(axis).step_by(dims) {
                *v -= mean;
            }
        }
    }
    out
}

/// A prepared frame together with its norm.
#[derive(Debug, Clone)]
pub(crate) struct PreparedFrame {
    pub coords: Vec<f64>,
    pub norm: f64,
}

impl PreparedFrame {
    pub fn new(frame: &[f64], dims: usize, center: bool) -> Self {
        let coords = prepare(frame, dims, center);
        let norm = norm(&coords);
        PreparedFrame { coords, norm }
    }

    pub fn is_zero(&self) -> bool {
        self.norm < ZERO_NORM
    }

    pub fn cosine(&self, other: &PreparedFrame) -> f64 {
        cosine_with_norms(&self.coords, self.norm, &other.coords, other.norm)
    }
}

/// Similarity of every frame against one reference frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySignal {
    pub values: Vec<f64>,
    pub reference_index: usize,
}

impl SimilaritySignal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn prepared_reference(seq: &SkeletonSequence, cfg: &CountingConfig) -> Result<(Vec<PreparedFrame>, usize)> {
    let reference = cfg.reference_index;
    if reference >= seq.frames.len() {
        return Err(Error::InvalidConfig(format!(
            "reference index {reference} out of range for {} frames",
            seq.frames.len()
        )));
    }
    let prepared: Vec<PreparedFrame> =
        seq.frames.iter().map(|f| PreparedFrame::new(f, seq.layout.dims, cfg.center_frames)).collect();
    if prepared[reference].is_zero() {
        return Err(Error::ZeroNormFrame { frame: reference });
    }
    Ok((prepared, reference))
}

/// For each frame, the index of the frame that stands in for it: itself if
/// nonzero, else the most recent nonzero frame, else the reference.
fn substitutes(prepared: &[PreparedFrame], reference: usize) -> Vec<usize> {
    let mut last = reference;
    prepared
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if !p.is_zero() {
                last = i;
            }
            last
        })
        .collect()
}

/// Cosine similarity of every frame against `cfg.reference_index`.
///
/// A zero-norm frame repeats the previous value (1.0 when there is none).
pub fn reference_signal(seq: &SkeletonSequence, cfg: &CountingConfig) -> Result<SimilaritySignal> {
    let (prepared, reference) = prepared_reference(seq, cfg)?;
    let anchor = &prepared[reference];
    let mut previous = 1.0;
    let values = prepared
        .iter()
        .map(|p| {
            if !p.is_zero() {
                previous = anchor.cosine(p);
            }
            previous
        })
        .collect();
    Ok(SimilaritySignal { values, reference_index: reference })
}

/// Dense, symmetric `T × T` similarity matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.size + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.size..(a + 1) * self.size]
    }

    /// Header-free row-major CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for a in 0..self.size {
            let row: Vec<String> = self.row(a).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// All pairwise similarities. Quadratic in memory; not used for counting.
pub fn self_similarity_matrix(seq: &SkeletonSequence, cfg: &CountingConfig) -> Result<SimilarityMatrix> {
    let (prepared, reference) = prepared_reference(seq, cfg)?;
    let subs = substitutes(&prepared, reference);
    let size = prepared.len();
    let mut data = vec![0.0; size * size];
    for a in 0..size {
        data[a * size + a] = prepared[subs[a]].cosine(&prepared[subs[a]]);
        for b in (a + 1)..size {
            let v = prepared[subs[a]].cosine(&prepared[subs[b]]);
            data[a * size + b] = v;
            data[b * size + a] = v;
        }
    }
    Ok(SimilarityMatrix { size, data })
}
