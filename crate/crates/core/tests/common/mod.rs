//! Test-only oracles, independent of the library's FFT path.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repcount::data::{generate_synthetic, FrequencyProfile, LabeledClip, SynthSpec};
use repcount::SkeletonSequence;

/// Direct O(w²) DFT magnitudes for bins `0..=w/2`, with a twiddle table
/// indexed by `(k·n) mod w`.
pub fn direct_dft(x: &[f64]) -> Vec<f64> {
    let w = x.len();
    let table: Vec<(f64, f64)> = (0..w)
        .map(|i| {
            let a = -2.0 * PI * i as f64 / w as f64;
            (a.cos(), a.sin())
        })
        .collect();
    (0..=w / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, &v) in x.iter().enumerate() {
                let (c, s) = table[(k * n) % w];
                re += v * c;
                im += v * s;
            }
            re.hypot(im)
        })
        .collect()
}

/// Index of the largest value in `xs[lo..=hi]`, ties to the lowest index.
pub fn argmax_in(xs: &[f64], lo: usize, hi: usize) -> usize {
    let mut best = lo;
    for k in lo..=hi {
        if xs[k] > xs[best] {
            best = k;
        }
    }
    best
}

/// Uniformly random rotation from a normalised quaternion.
pub fn random_rotation(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = loop {
        let q = [0.0; 4].map(|_: f64| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            break q.map(|v| v / n);
        }
    };
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn rotate(seq: &SkeletonSequence, r: &[[f64; 3]; 3]) -> SkeletonSequence {
    assert_eq!(seq.layout.dims, 3);
    seq.map_joints(|p| (0..3).map(|i| r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2]).collect())
}

pub fn stationary(f0: f64, frames: usize, sigma: f64, seed: u64) -> LabeledClip {
    let spec = SynthSpec::random_pose(18, 3, FrequencyProfile::Stationary { f0 }, frames, sigma, seed);
    generate_synthetic(&spec).unwrap()
}

pub fn chirp(start: f64, end: f64, frames: usize, seed: u64) -> LabeledClip {
    let spec = SynthSpec::random_pose(18, 3, FrequencyProfile::Chirp { start, end }, frames, 0.0, seed);
    generate_synthetic(&spec).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
