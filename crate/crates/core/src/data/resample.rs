use crate::error::{Error, Result};
use crate::model::{SkeletonFrame, SkeletonSequence};

/// Linearly interpolates one person's frames onto a uniform `1/fps` grid
/// spanning the first to the last timestamp.
pub fn resample_uniform(frames: &[SkeletonFrame], fps: f64) -> Result<SkeletonSequence> {
    let first = frames.first().ok_or(Error::EmptySequence)?;
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::InvalidConfig(format!("fps must be positive, got {fps}")));
    }
    for (i, pair) in frames.windows(2).enumerate() {
        if pair[1].timestamp <= pair[0].timestamp {
            return Err(Error::NonMonotonicTimestamps { index: i + 1 });
        }
        if pair[1].layout != first.layout || pair[1].person_id != first.person_id {
            return Err(Error::InconsistentJointLayout {
                frame: i + 1,
                expected: first.layout.coords(),
                found: pair[1].joints.len(),
                joints: first.layout.joints,
                dims: first.layout.dims,
            });
        }
    }
    let start = first.timestamp;
    let span = frames[frames.len() - 1].timestamp - start;
    let count = (span * fps + 1e-9).floor() as usize + 1;

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let t = start + k as f64 / fps;
        while seg + 1 < frames.len() - 1 && frames[seg + 1].timestamp <= t {
            seg += 1;
        }
        if frames.len() == 1 {
            out.push(first.joints.clone());
            continue;
        }
        let (a, b) = (&frames[seg], &frames[seg + 1]);
        let alpha = ((t - a.timestamp) / (b.timestamp - a.timestamp)).clamp(0.0, 1.0);
        out.push(a.joints.iter().zip(&b.joints).map(|(x, y)| x + alpha * (y - x)).collect());
    }
    let seq = SkeletonSequence::new(first.person_id.clone(), fps, first.layout, out);
    seq.check()?;
    Ok(seq)
}
