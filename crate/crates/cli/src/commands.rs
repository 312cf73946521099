use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use repcount::data::{
    estimate_fps, generate_synthetic, group_by_person, load_generic_jsonl, parse_frame_line, read_generic_jsonl,
    resample_uniform, write_generic_jsonl, FrequencyProfile, LabeledClip, SynthSpec,
};
use repcount::model::DEFAULT_FPS;
use repcount::{
    count_sequence, CountReport, CountingConfig, JointLayout, PersonSession, SessionRouter, SkeletonFrame,
    SkeletonSequence,
};
use serde_json::{json, Value};

use crate::cli::{BenchArgs, CountArgs, Format, PipelineArgs, StreamArgs, SynthArgs};
use crate::eval::load_dataset;
use crate::UsageError;

impl PipelineArgs {
    /// Counting config; `fps_hint` stands in for a missing --fps when
    /// converting period bounds.
    pub fn config(&self, fps_hint: Option<f64>) -> Result<CountingConfig> {
        let cfg = CountingConfig {
            center_frames: self.center,
            ..CountingConfig::default().with_window(self.window, self.step)
        };
        cfg.validate()?;
        if self.min_period.is_none() && self.max_period.is_none() {
            return Ok(cfg);
        }
        let fps = self.fps.or(fps_hint).ok_or_else(|| UsageError("--min-period/--max-period need --fps".into()))?;
        Ok(cfg.with_period_bounds(fps, self.min_period, self.max_period)?)
    }
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn report_json(report: &CountReport) -> Value {
    json!({
        "event": "report",
        "person": report.person_id,
        "count": report.rounded_count,
        "raw_count": report.raw_count,
        "frames": report.frames_processed,
    })
}

struct ReportWriter {
    out: Box<dyn Write>,
    format: Format,
    with_truth: bool,
    header_done: bool,
}

impl ReportWriter {
    fn write(&mut self, report: &CountReport, clip: Option<&LabeledClip>) -> io::Result<()> {
        match self.format {
            Format::Jsonl => {
                let mut value = report_json(report);
                if let Some(clip) = clip {
                    value["truth"] = clip.ground_truth.into();
                    value["exercise"] = clip.exercise.clone().into();
                }
                writeln!(self.out, "{value}")
            }
            Format::Csv => {
                if !self.header_done {
                    self.header_done = true;
                    let extra = if self.with_truth { ",truth,exercise" } else { "" };
                    writeln!(self.out, "person,count,raw_count,frames{extra}")?;
                }
                write!(
                    self.out,
                    "{},{},{},{}",
                    csv_field(&report.person_id),
                    report.rounded_count,
                    report.raw_count,
                    report.frames_processed
                )?;
                if let Some(clip) = clip {
                    write!(self.out, ",{},{}", clip.ground_truth, csv_field(&clip.exercise))?;
                }
                writeln!(self.out)
            }
            Format::Text => {
                write!(
                    self.out,
                    "{}: {} reps ({:.2} raw, {} frames)",
                    report.person_id, report.rounded_count, report.raw_count, report.frames_processed
                )?;
                if let Some(clip) = clip {
                    write!(self.out, ", truth {}", clip.ground_truth)?;
                }
                writeln!(self.out)
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_input(path: &Path) -> Result<Vec<SkeletonFrame>> {
    if path == Path::new("-") {
        return read_generic_jsonl(io::stdin().lock()).context("reading standard input");
    }
    load_generic_jsonl(path).with_context(|| format!("reading {}", path.display()))
}

pub fn count(args: CountArgs) -> Result<()> {
    let mut writer = ReportWriter {
        out: open_output(args.out.as_deref())?,
        format: args.format,
        with_truth: args.data.dataset.is_some(),
        header_done: false,
    };

    if args.data.dataset.is_some() {
        if !args.inputs.is_empty() {
            return Err(UsageError("give either input files or --dataset, not both".into()).into());
        }
        let clips = load_dataset(&args.data, args.pipeline.window)?;
        for clip in &clips {
            let cfg = args.pipeline.config(Some(clip.sequence.fps))?;
            let mut report = count_sequence(&clip.sequence, &cfg).with_context(|| format!("counting {}", clip.id))?;
            report.person_id = clip.id.clone();
            writer.write(&report, Some(clip))?;
        }
        writer.out.flush()?;
        return Ok(());
    }

    let inputs = if args.inputs.is_empty() { vec![PathBuf::from("-")] } else { args.inputs.clone() };
    for path in &inputs {
        let frames = read_input(path)?;
        for (person, frames) in group_by_person(frames) {
            let fps_hint = args.pipeline.fps.or_else(|| estimate_fps(&frames));
            let seq = if args.resample {
                let fps = args.pipeline.fps.ok_or_else(|| UsageError("--resample needs --fps".into()))?;
                resample_uniform(&frames, fps).with_context(|| format!("{}: person {person}", path.display()))?
            } else {
                SkeletonSequence::from_frames(person.clone(), fps_hint.unwrap_or(DEFAULT_FPS), &frames)
                    .with_context(|| format!("{}: person {person}", path.display()))?
            };
            let cfg = args.pipeline.config(fps_hint)?;
            let report = count_sequence(&seq, &cfg).with_context(|| format!("{}: person {person}", path.display()))?;
            writer.write(&report, None)?;
        }
    }
    writer.out.flush()?;
    Ok(())
}

pub fn stream(args: StreamArgs) -> Result<()> {
    let mut router = SessionRouter::new(args.pipeline.config(None)?)?;
    let mut out = io::stdout().lock();
    for (i, line) in io::stdin().lock().lines().enumerate() {
        let line = line.context("reading standard input")?;
        if line.trim().is_empty() {
            continue;
        }
        let update = match parse_frame_line(&line, i + 1).and_then(|frame| router.step(&frame)) {
            Ok(update) => update,
            Err(e) => {
                eprintln!("warning: skipping input line {}: {e}", i + 1);
                continue;
            }
        };
        if let Some(column) = update.new_column {
            let value = json!({
                "event": "update",
                "person": update.person_id,
                "frames": update.frames_processed,
                "count": update.rounded_count,
                "raw_count": update.raw_count,
                "freq": column.freq,
            });
            writeln!(out, "{value}")?;
            out.flush()?;
        }
    }
    for report in router.finalize_all()? {
        writeln!(out, "{}", report_json(&report))?;
    }
    out.flush()?;
    Ok(())
}

fn parse_chirp(text: &str) -> Result<(f64, f64)> {
    let bad = || UsageError(format!("--chirp expects start:end, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn truth_path(out: &Path) -> PathBuf {
    out.with_extension("truth.json")
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let profile = match (&args.chirp, args.f0) {
        (Some(chirp), _) => {
            let (start, end) = parse_chirp(chirp)?;
            FrequencyProfile::Chirp { start, end }
        }
        (None, Some(f0)) => FrequencyProfile::Stationary { f0 },
        (None, None) => return Err(UsageError("one of --f0 or --chirp is required".into()).into()),
    };
    let mut spec = SynthSpec::random_pose(args.joints, args.dims, profile, args.frames, args.sigma, args.seed);
    spec.fps = args.fps;
    let mut clip = generate_synthetic(&spec)?;
    if let Some(person) = &args.person {
        clip.sequence.person_id = person.clone();
    }
    let frames = clip.sequence.to_frames(0.0);
    let mut out = BufWriter::new(File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?);
    write_generic_jsonl(&frames, &mut out)?;
    out.flush()?;

    let truth = json!({
        "count": clip.ground_truth,
        "profile": profile,
        "seed": args.seed,
        "frames": args.frames,
        "person": clip.sequence.person_id,
    });
    let path = truth_path(&args.out);
    std::fs::write(&path, format!("{truth}\n")).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let cfg = CountingConfig::default().with_window(args.window, args.step);
    cfg.validate()?;
    let mut session = PersonSession::new("bench", cfg)?;
    let spec = SynthSpec::random_pose(
        args.joints,
        3,
        FrequencyProfile::Stationary { f0: 0.03 },
        args.frames.max(1),
        0.0,
        args.seed,
    );
    let layout = JointLayout::new(args.joints, 3)?;

    let mut samples = Vec::with_capacity(args.frames);
    for n in 0..args.frames {
        let d = (1.0 - (2.0 * std::f64::consts::PI * spec.profile.phase(n, args.frames)).cos()) / 2.0;
        let joints = spec.base.iter().zip(&spec.amplitude).map(|(b, a)| b + a * d).collect();
        let frame = SkeletonFrame::new(n as f64 / DEFAULT_FPS, "bench", layout, joints)?;
        let start = Instant::now();
        session.push_frame(&frame)?;
        samples.push(start.elapsed().as_secs_f64() * 1e6);
    }
    let report = session.finalize()?;
    samples.sort_by(f64::total_cmp);
    let pick = |q: f64| (!samples.is_empty()).then(|| samples[((samples.len() - 1) as f64 * q).round() as usize]);
    let (median, p99) = (pick(0.5), pick(0.99));
    let mean = (!samples.is_empty()).then(|| samples.iter().sum::<f64>() / samples.len() as f64);

    let mut out = io::stdout().lock();
    match args.format {
        Format::Jsonl => writeln!(
            out,
            "{}",
            json!({
                "event": "bench",
                "window": args.window,
                "step": args.step,
                "frames": args.frames,
                "median_us": median,
                "p99_us": p99,
                "mean_us": mean,
                "count": report.rounded_count,
            })
        )?,
        Format::Csv => {
            let cell = |v: Option<f64>| v.map(|v| format!("{v:.3}")).unwrap_or_default();
            writeln!(out, "window,step,frames,median_us,p99_us,mean_us,count")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                args.window,
                args.step,
                args.frames,
                cell(median),
                cell(p99),
                cell(mean),
                report.rounded_count
            )?;
        }
        Format::Text => {
            let cell = |v: Option<f64>| v.map(|v| format!("{v:.2} us")).unwrap_or_else(|| "n/a".into());
            writeln!(
                out,
                "w={} s={} frames={}: median {}, p99 {}",
                args.window,
                args.step,
                args.frames,
                cell(median),
                cell(p99)
            )?;
        }
    }
    Ok(())
}
