use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use repcount::data::NpyArray;
use serde_json::Value;

fn repcount() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repcount"))
}

fn run(args: &[&str]) -> Output {
    repcount().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child =
        repcount().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let input = input.to_vec();
    let writer = std::thread::spawn(move || stdin.write_all(&input));
    let out = child.wait_with_output().unwrap();
    writer.join().unwrap().unwrap();
    out
}

fn stdout_lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn synth(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut args = vec!["synth", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn truth(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path.with_extension("truth.json")).unwrap()).unwrap()
}

/// Merges two single-person files line by line, renaming the persons.
fn interleave(a: &Path, b: &Path) -> String {
    let rename = |line: &str, who: &str| {
        let mut v: Value = serde_json::from_str(line).unwrap();
        v["person"] = who.into();
        v.to_string()
    };
    let (la, lb) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    let mut out = String::new();
    for (x, y) in la.lines().zip(lb.lines()) {
        out.push_str(&rename(x, "A"));
        out.push('\n');
        out.push_str(&rename(y, "B"));
        out.push('\n');
    }
    out
}

#[test]
fn synth_truth_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.02", "--frames", "1001"]);
    assert_eq!(truth(&a)["count"], 20);
    assert_eq!(truth(&a)["profile"]["kind"], "stationary");
    let b = synth(dir.path(), "b.jsonl", &["--chirp", "0.02:0.04", "--frames", "2000"]);
    assert_eq!(truth(&b)["count"], 59);
    assert_eq!(std::fs::read_to_string(&b).unwrap().lines().count(), 2000);
}

#[test]
fn synth_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    for args in [vec!["--f0", "0.9"], vec!["--chirp", "0.02-0.04"], vec!["--f0", "0.02", "--dims", "4"], vec![]] {
        let mut full = vec!["synth", "--out", out.to_str().unwrap()];
        full.extend(args.iter());
        assert_eq!(run(&full).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn count_ten_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.01", "--frames", "1001", "--seed", "3"]);
    let lines = stdout_lines(&run(&["count", a.to_str().unwrap()]));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["event"], "report");
    assert_eq!(lines[0]["count"], 10);
    assert_eq!(lines[0]["frames"], 1001);
}

#[test]
fn count_two_people_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.02", "--frames", "1000", "--seed", "1"]);
    let b = synth(dir.path(), "b.jsonl", &["--f0", "0.04", "--frames", "1000", "--seed", "2"]);
    let mixed = dir.path().join("mixed.jsonl");
    std::fs::write(&mixed, interleave(&b, &a)).unwrap();
    let lines = stdout_lines(&run(&["count", mixed.to_str().unwrap()]));
    assert_eq!(lines.iter().map(|l| l["person"].as_str().unwrap()).collect::<Vec<_>>(), ["A", "B"]);
    assert!((lines[0]["count"].as_i64().unwrap() - 39).abs() <= 1);
    assert!((lines[1]["count"].as_i64().unwrap() - 19).abs() <= 1);
}

#[test]
fn count_csv_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.05", "--frames", "600"]);
    let out = run_stdin(&["count", "--format", "csv"], &std::fs::read(&a).unwrap());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("person,count,raw_count,frames"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "synth-0");
    assert!(row[1].parse::<i64>().unwrap().abs_diff(29) <= 1, "{row:?}");
    assert_eq!(row[3], "600");
}

#[test]
fn count_exit_codes() {
    assert_eq!(run(&["count", "/no/such/file.jsonl"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"t\": 0, \"person\": \"a\", \"joints\": [[1, 2]]}\nnot json\n").unwrap();
    let out = run(&["count", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    // All-zero first frame: valid input, but no reference to compare against.
    let zero = dir.path().join("zero.jsonl");
    std::fs::write(
        &zero,
        "{\"t\": 0, \"person\": \"a\", \"joints\": [[0, 0]]}\n{\"t\": 1, \"person\": \"a\", \"joints\": [[1, 0]]}\n",
    )
    .unwrap();
    assert_eq!(run(&["count", zero.to_str().unwrap()]).status.code(), Some(3));
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.05", "--frames", "300"]);
    assert_eq!(run(&["count", "--resample", a.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["count", "--window", "1", a.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn count_with_period_bounds_and_resample() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.02", "--frames", "1001"]);
    let path = a.to_str().unwrap();
    let plain = stdout_lines(&run(&["count", path]));
    let bounded = stdout_lines(&run(&["count", "--min-period", "1", "--max-period", "3", path]));
    assert_eq!(bounded[0]["count"], plain[0]["count"]);
    let resampled = stdout_lines(&run(&["count", "--resample", "--fps", "30", path]));
    assert_eq!(resampled[0]["count"], plain[0]["count"]);
}

#[test]
fn stream_final_lines_equal_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.03", "--frames", "900", "--sigma", "0.01", "--seed", "4"]);
    let b = synth(dir.path(), "b.jsonl", &["--f0", "0.07", "--frames", "900", "--seed", "5"]);
    let mixed = interleave(&a, &b);
    let file = dir.path().join("mixed.jsonl");
    std::fs::write(&file, &mixed).unwrap();
    for cfg in [vec![], vec!["--window", "128", "--step", "4", "--center"]] {
        let mut count_args = vec!["count", file.to_str().unwrap()];
        count_args.extend(cfg.iter());
        let mut stream_args = vec!["stream"];
        stream_args.extend(cfg.iter());
        let counted = stdout_lines(&run(&count_args));
        let streamed = stdout_lines(&run_stdin(&stream_args, mixed.as_bytes()));
        let reports: Vec<&Value> = streamed.iter().filter(|l| l["event"] == "report").collect();
        assert_eq!(reports, counted.iter().collect::<Vec<_>>());
        assert!(streamed.iter().any(|l| l["event"] == "update"));
    }
}

#[test]
fn stream_updates_only_on_new_columns() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.05", "--frames", "300"]);
    let lines = stdout_lines(&run_stdin(&["stream", "--window", "64", "--step", "8"], &std::fs::read(&a).unwrap()));
    let updates: Vec<&Value> = lines.iter().filter(|l| l["event"] == "update").collect();
    assert_eq!(updates.len(), (300 - 64) / 8 + 1);
    assert_eq!(updates[0]["frames"], 64);
    assert_eq!(updates[1]["frames"], 72);
}

#[test]
fn stream_empty_input() {
    let out = run_stdin(&["stream"], b"");
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn stream_skips_malformed_line() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.jsonl", &["--f0", "0.04", "--frames", "700"]);
    let clean = std::fs::read_to_string(&a).unwrap();
    let mut lines: Vec<&str> = clean.lines().collect();
    lines.insert(350, "{\"t\": oops");
    let dirty = lines.join("\n") + "\n";
    let out = run_stdin(&["stream"], dirty.as_bytes());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let last = |o: &Output| stdout_lines(o).into_iter().last().unwrap();
    assert_eq!(last(&out), last(&run_stdin(&["stream"], clean.as_bytes())));
}

#[test]
fn stream_period_bounds_need_fps() {
    assert_eq!(run_stdin(&["stream", "--min-period", "1"], b"").status.code(), Some(2));
    assert!(run_stdin(&["stream", "--min-period", "1", "--fps", "30"], b"").status.success());
}

#[test]
fn eval_synth_is_deterministic() {
    let args = ["eval", "--dataset", "synth", "--clips", "12", "--seed", "7", "--grid", "128:1", "--format", "csv"];
    let first = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, run(&args).stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("win,step,synthetic,overall_mae,oboa,clips,failures"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn eval_usage_errors() {
    assert_eq!(run(&["eval", "--dataset", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--dataset", "synth", "--grid", "256"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--dataset", "mmfit"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--dataset", "mmfit", "--root", "/no/such/dir"]).status.code(), Some(2));
}

#[test]
fn eval_jsonl_directory() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "a.jsonl", &["--f0", "0.02", "--frames", "1200", "--seed", "1"]);
    synth(dir.path(), "b.jsonl", &["--f0", "0.06", "--frames", "1200", "--seed", "2"]);
    let lines = stdout_lines(&run(&["eval", "--dataset", "jsonl", "--root", dir.path().to_str().unwrap()]));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["clips"], 2);
    assert_eq!(lines[0]["oboa"], 1.0);
}

fn mmfit_fixture(root: &Path) {
    let w = root.join("w00");
    std::fs::create_dir_all(&w).unwrap();
    let (frames, joints) = (1500, 4);
    // rows of (T, joints·3), two exercises at different rates
    let mut data = Vec::with_capacity(frames * joints * 3);
    for t in 0..frames {
        let f = if t < 750 { 0.02 } else { 0.05 };
        let start = if t < 750 { 0 } else { 750 };
        let phase = f * (t - start) as f64;
        let d = (1.0 - (2.0 * std::f64::consts::PI * phase).cos()) / 2.0;
        for c in 0..joints * 3 {
            data.push(1.0 + 0.1 * c as f64 + (0.3 - 0.05 * c as f64) * d);
        }
    }
    let array = NpyArray { shape: vec![frames, joints * 3], data };
    std::fs::write(w.join("w00_pose_3d.npy"), array.to_bytes()).unwrap();
    std::fs::write(w.join("w00_labels.csv"), "0,749,14,squats\n750,1499,37,lunges\n").unwrap();
}

#[test]
fn eval_and_count_mmfit_fixture() {
    let dir = tempfile::tempdir().unwrap();
    mmfit_fixture(dir.path());
    let root = dir.path().to_str().unwrap();
    let out = run(&["eval", "--dataset", "mmfit", "--root", root, "--grid", "256:1", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "win,step,squats,lunges,overall_mae,oboa,clips,failures");
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("256,1,"));

    let lines = stdout_lines(&run(&["count", "--dataset", "mmfit", "--root", root]));
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["person"], "w00:0:squats");
    assert_eq!(lines[1]["truth"], 37);
    for l in &lines {
        assert!((l["count"].as_i64().unwrap() - l["truth"].as_i64().unwrap()).abs() <= 1, "{l}");
    }
}

#[test]
fn bench_reports() {
    let out = stdout_lines(&run(&["bench", "--frames", "0"]));
    assert_eq!(out[0]["frames"], 0);
    assert!(out[0]["median_us"].is_null());

    let median = |w: &str| {
        let lines = stdout_lines(&run(&["bench", "--frames", "20000", "--window", w]));
        lines[0]["median_us"].as_f64().unwrap()
    };
    let (m256, m128) = (median("256"), median("128"));
    assert!(m128 <= m256 * 1.5 + 5.0, "w128 {m128} us vs w256 {m256} us");
}
