mod common;

use common::{chirp, stationary};
use repcount::data::{
    group_by_person, load_mmfit, read_generic_jsonl, resample_uniform, write_generic_jsonl, Modality, NpyArray,
};
use repcount::{count_sequence, CountingConfig, JointLayout, PersonSession, SessionRouter, SkeletonSequence};

fn cfg() -> CountingConfig {
    CountingConfig::default()
}

#[test]
fn stationary_f0_002_counts_20() {
    let clip = stationary(0.02, 1000, 0.0, 21);
    let report = count_sequence(&clip.sequence, &cfg()).unwrap();
    assert!((report.raw_count - 20.0).abs() <= 1.0, "{}", report.raw_count);
}

#[test]
fn chirp_counts_60() {
    let clip = chirp(0.02, 0.04, 2000, 22);
    let report = count_sequence(&clip.sequence, &cfg()).unwrap();
    assert!((report.raw_count - 60.0).abs() <= 2.0, "{}", report.raw_count);
    assert!(report.rounded_count.abs_diff(clip.ground_truth as u64) <= 2);
}

#[test]
fn ten_cycles() {
    let clip = stationary(0.01, 1001, 0.0, 23);
    assert_eq!(clip.ground_truth, 10);
    let report = count_sequence(&clip.sequence, &cfg()).unwrap();
    assert!((9..=11).contains(&report.rounded_count), "{}", report.raw_count);
    assert_eq!(report.frames_processed, 1001);
    assert!(!report.short_input);
}

#[test]
fn static_pose_counts_zero() {
    let layout = JointLayout::new(18, 3).unwrap();
    let pose: Vec<f64> = (0..54).map(|i| 1.0 + i as f64 * 0.01).collect();
    let seq = SkeletonSequence::new("still", 30.0, layout, vec![pose; 600]);
    let report = count_sequence(&seq, &cfg()).unwrap();
    assert_eq!(report.rounded_count, 0);
    assert!(report.freq_track.iter().all(|p| p.freq.is_none()));
}

#[test]
fn noisy_clip_stays_within_one() {
    let clip = stationary(0.05, 1500, 0.01, 24);
    let report = count_sequence(&clip.sequence, &cfg()).unwrap();
    assert!(
        report.rounded_count.abs_diff(clip.ground_truth as u64) <= 1,
        "{} vs {}",
        report.raw_count,
        clip.ground_truth
    );
}

#[test]
fn short_clip_uses_single_dft() {
    let clip = stationary(0.05, 200, 0.0, 25);
    let report = count_sequence(&clip.sequence, &cfg()).unwrap();
    assert!(report.short_input);
    assert_eq!(report.freq_track.len(), 1);
    assert!(report.rounded_count.abs_diff(clip.ground_truth as u64) <= 1, "{}", report.raw_count);
}

#[test]
fn single_frame_is_empty_report() {
    let seq = SkeletonSequence::new("one", 30.0, JointLayout::new(2, 2).unwrap(), vec![vec![1.0, 2.0, 3.0, 4.0]]);
    let report = count_sequence(&seq, &cfg()).unwrap();
    assert_eq!((report.raw_count, report.rounded_count, report.frames_processed), (0.0, 0, 1));
}

#[test]
fn stream_matches_batch() {
    for (w, s, center) in [(256, 1, false), (128, 4, true), (64, 7, false)] {
        let cfg = CountingConfig { center_frames: center, ..cfg().with_window(w, s) };
        let clip = stationary(0.04, 900, 0.02, w as u64);
        let batch = count_sequence(&clip.sequence, &cfg).unwrap();
        let mut session = PersonSession::new(clip.id.clone(), cfg).unwrap();
        let mut columns = 0;
        for frame in clip.sequence.to_frames(0.0) {
            let update = session.push_frame(&frame).unwrap();
            columns += update.new_column.is_some() as usize;
        }
        let streamed = session.finalize().unwrap();
        assert_eq!(columns, batch.freq_track.len());
        assert!((streamed.raw_count - batch.raw_count).abs() <= 1e-9);
        assert_eq!(streamed.rounded_count, batch.rounded_count);
        assert_eq!(streamed.freq_track, batch.freq_track);
    }
}

#[test]
fn stream_matches_batch_on_short_input() {
    let clip = stationary(0.05, 150, 0.0, 27);
    let batch = count_sequence(&clip.sequence, &cfg()).unwrap();
    let mut session = PersonSession::new(clip.id.clone(), cfg()).unwrap();
    for frame in clip.sequence.to_frames(0.0) {
        assert!(session.push_frame(&frame).unwrap().new_column.is_none());
    }
    let streamed = session.finalize().unwrap();
    assert!((streamed.raw_count - batch.raw_count).abs() <= 1e-9);
    assert!(streamed.short_input);
}

#[test]
fn router_separates_people() {
    let mut a = stationary(0.02, 1000, 0.0, 31);
    let mut b = stationary(0.04, 1000, 0.0, 32);
    a.sequence.person_id = "A".into();
    b.sequence.person_id = "B".into();
    let mut router = SessionRouter::new(cfg()).unwrap();
    for (fa, fb) in a.sequence.to_frames(0.0).iter().zip(b.sequence.to_frames(0.0).iter()) {
        router.step(fa).unwrap();
        router.step(fb).unwrap();
    }
    let reports = router.finalize_all().unwrap();
    assert_eq!(reports.iter().map(|r| r.person_id.as_str()).collect::<Vec<_>>(), ["A", "B"]);
    for (report, clip) in reports.iter().zip([&a, &b]) {
        let single = count_sequence(&clip.sequence, &cfg()).unwrap();
        assert_eq!(report.raw_count, single.raw_count);
        assert!(report.rounded_count.abs_diff(clip.ground_truth as u64) <= 1);
    }
}

#[test]
fn jsonl_round_trip_and_resample() {
    let clip = stationary(0.03, 800, 0.0, 41);
    let frames = clip.sequence.to_frames(5.0);
    let mut buf = Vec::new();
    write_generic_jsonl(&frames, &mut buf).unwrap();
    let parsed = read_generic_jsonl(buf.as_slice()).unwrap();
    let groups = group_by_person(parsed);
    assert_eq!(groups.len(), 1);
    let seq = resample_uniform(&groups[0].1, 30.0).unwrap();
    assert_eq!(seq.len(), 800);
    let direct = count_sequence(&clip.sequence, &cfg()).unwrap();
    let via_file = count_sequence(&seq, &cfg()).unwrap();
    assert_eq!(direct.rounded_count, via_file.rounded_count);
    assert!((direct.raw_count - via_file.raw_count).abs() < 1e-6);
}

#[test]
fn mmfit_fixture_counts() {
    let clip = stationary(0.04, 1200, 0.0, 51);
    let (joints, frames) = (clip.sequence.layout.joints, clip.sequence.len());
    // (3, T, 1 + joints) with the frame number in slot 0
    let slots = joints + 1;
    let mut data = vec![0.0; 3 * frames * slots];
    for a in 0..3 {
        for t in 0..frames {
            data[(a * frames + t) * slots] = t as f64;
            for j in 0..joints {
                data[(a * frames + t) * slots + 1 + j] = clip.sequence.frames[t][j * 3 + a];
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w07");
    std::fs::create_dir(&w).unwrap();
    std::fs::write(w.join("w07_pose_3d.npy"), NpyArray { shape: vec![3, frames, slots], data }.to_bytes()).unwrap();
    std::fs::write(w.join("w07_labels.csv"), format!("0,{},{},squats\n", frames - 1, clip.ground_truth)).unwrap();
    let clips = load_mmfit(dir.path(), "w07", Modality::ThreeD).unwrap();
    assert_eq!(clips[0].sequence.frames, clip.sequence.frames);
    let report = count_sequence(&clips[0].sequence, &cfg()).unwrap();
    assert!(report.rounded_count.abs_diff(clip.ground_truth as u64) <= 1);
}
