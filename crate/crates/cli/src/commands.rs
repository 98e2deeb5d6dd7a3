use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use pedalpower::dataset::io::{read_dataset_file, read_reference_file, write_dataset_file, write_reference_file};
use pedalpower::dataset::{align_streams, balance_histogram, AlignConfig, LabeledStroke};
use pedalpower::eval::io::{read_predictions_file, write_predictions_file};
use pedalpower::eval::{bench_latency, evaluate, render_accuracy_table, render_latency_table, EvalReport, Prediction};
use pedalpower::nn::{load_model, quantize_model, save_model, DenseModel, ModelFile, HIDDEN_DIMS};
use pedalpower::signal::io::{read_sensor_file, write_sensor_file};
use pedalpower::signal::{process_stream, NormalizationBounds, PipelineConfig, StrokeSegmenter};
use pedalpower::synth::io::write_truth_file;
use pedalpower::synth::{generate_ride, protocol_profile, reference_meter, Preset, ReferenceConfig};
use pedalpower::train::{train as fit, TrainConfig};

use crate::{BenchArgs, BuildDatasetArgs, EvalArgs, InferArgs, QuantizeArgs, ReportArgs, SynthArgs, TrainArgs};

pub const SENSOR_FILE: &str = "sensor.csv";
pub const REFERENCE_FILE: &str = "reference.csv";
pub const TRUTH_FILE: &str = "truth.csv";
const POWER_RANGE_W: (f64, f64) = (0.0, 300.0);

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let preset: Preset = a.profile.parse()?;
    let mut profile = protocol_profile(preset, a.seed);
    let mut reference = ReferenceConfig {
        seed: a.seed,
        ..ReferenceConfig::default()
    };
    if a.noise_free {
        profile = profile.noise_free();
        reference.noise_pct = 0.0;
    }
    let ride = generate_ride(&profile, a.seed)?;
    let ticks = reference_meter(&ride.truth, &reference)?;
    ensure_dir(&a.out)?;
    write_sensor_file(&a.out.join(SENSOR_FILE), &ride.samples)?;
    write_reference_file(&a.out.join(REFERENCE_FILE), &ticks)?;
    write_truth_file(&a.out.join(TRUTH_FILE), &ride.truth.strokes)?;
    println!(
        "{preset}: {:.1} min, {} samples, {} strokes, {} reference ticks -> {}",
        profile.duration_s() / 60.0,
        ride.samples.len(),
        ride.truth.strokes.len(),
        ticks.len(),
        a.out.display()
    );
    Ok(())
}

fn ride_id(dir: &Path) -> String {
    dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn build_dataset(a: BuildDatasetArgs) -> Result<()> {
    let config = PipelineConfig::default().with_cutoff(a.cutoff_hz);
    let mut rides: Vec<(String, &PathBuf)> = a.rides.iter().map(|d| (ride_id(d), d)).collect();
    rides.sort_by(|x, y| x.0.cmp(&y.0));
    if let Some(w) = rides.windows(2).find(|w| w[0].0 == w[1].0) {
        bail!("two rides share the id {:?}", w[0].0);
    }
    let mut dataset: Vec<LabeledStroke<f32>> = Vec::new();
    let mut log = String::new();
    for (id, dir) in rides {
        let samples = read_sensor_file(&dir.join(SENSOR_FILE))?;
        let reference = read_reference_file(&dir.join(REFERENCE_FILE))?;
        let (strokes, stats) = process_stream::<f32>(&samples, &config)?;
        let aligned = align_streams(&strokes, &reference, &AlignConfig::default(), &id)?;
        log.push_str(&format!(
            "{id}: {} segments, {} rejected (amplitude {}, duration {}, shape {}), {} long gaps, {} labeled, {} dropped\n",
            stats.segments,
            stats.rejected(),
            stats.rejected_amplitude,
            stats.rejected_duration,
            stats.rejected_shape,
            stats.segmenter.discarded_long,
            aligned.labeled.len(),
            aligned.dropped
        ));
        dataset.extend(aligned.labeled);
    }
    ensure_dir(&a.out)?;
    write_dataset_file(&a.out.join("dataset.csv"), &dataset)?;
    let balance = balance_histogram(&dataset, a.bins, POWER_RANGE_W)?;
    let mut buf = Vec::new();
    balance.write_csv(&mut buf)?;
    fs::write(a.out.join("balance.csv"), buf).context("writing balance.csv")?;
    let summary = format!("{log}\n{}", balance.summary());
    write_text(&a.out.join("balance.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let data: Vec<LabeledStroke<f32>> = read_dataset_file(&a.dataset)?;
    let Some(first) = data.first() else {
        bail!("{} has no strokes", a.dataset.display());
    };
    let mut dims = vec![first.input.len()];
    dims.extend(HIDDEN_DIMS);
    dims.push(1);
    let config = TrainConfig {
        dims,
        max_epochs: a.epochs,
        batch_size: a.batch_size,
        lr0: a.lr,
        decay: a.decay,
        patience: a.patience,
        val_fraction: a.val_fraction,
        seed: a.seed,
        standardize_targets: !a.raw_targets,
        bounds: NormalizationBounds::default(),
    };
    let (model, history) = fit(&data, &config)?;
    ensure_dir(&a.out)?;
    save_model(&a.out.join("model.pwm"), &ModelFile::Float(model))?;
    let mut buf = Vec::new();
    history.write_csv(&mut buf).context("formatting history")?;
    fs::write(a.out.join("history.csv"), buf).context("writing history.csv")?;
    println!(
        "trained on {} strokes: {} epochs, best epoch {} (val MSE {:.3} W^2) -> {}",
        data.len(),
        history.epochs.len(),
        history.best_epoch,
        history.best_val_mse(),
        a.out.display()
    );
    Ok(())
}

fn load_float(path: &Path) -> Result<DenseModel<f32>> {
    match load_model(path)? {
        ModelFile::Float(m) => Ok(m),
        ModelFile::Quantized(_) => bail!("{} is already quantized", path.display()),
    }
}

pub fn quantize(a: QuantizeArgs) -> Result<()> {
    let model = load_float(&a.model)?;
    let data: Vec<LabeledStroke<f32>> = read_dataset_file(&a.dataset)?;
    let calibration: Vec<&[f32]> = data.iter().map(|s| s.input.as_slice()).collect();
    let q = quantize_model(&model, &calibration)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    save_model(&a.out, &ModelFile::Quantized(q))?;
    let size = fs::metadata(&a.out).map(|m| m.len()).unwrap_or(0);
    println!("calibrated on {} inputs; int8 model {} bytes -> {}", calibration.len(), size, a.out.display());
    Ok(())
}

fn load_checked(path: &Path, quantized: bool) -> Result<ModelFile> {
    let m = load_model(path)?;
    if quantized && !matches!(m, ModelFile::Quantized(_)) {
        bail!("{} is a float model but --quantized was given", path.display());
    }
    Ok(m)
}

fn predict(model: &ModelFile, input: &[f32]) -> Result<f64> {
    Ok(match model {
        ModelFile::Float(m) => m.forward(input)? as f64,
        ModelFile::Quantized(q) => q.forward(input)? as f64,
    })
}

fn predict_dataset(model: &ModelFile, data: &[LabeledStroke<f32>]) -> Result<Vec<Prediction>> {
    data.iter()
        .map(|s| {
            Ok(Prediction {
                start_us: s.start_us,
                end_us: s.end_us,
                predicted_power_w: predict(model, s.input.as_slice())?,
            })
        })
        .collect()
}

fn pipeline_for(model: &ModelFile, cutoff_hz: f64) -> PipelineConfig {
    PipelineConfig {
        bounds: *model.bounds(),
        ..PipelineConfig::default()
    }
    .with_cutoff(cutoff_hz)
}

pub fn infer(a: InferArgs) -> Result<()> {
    let model = load_checked(&a.model, a.quantized)?;
    let predictions = match (&a.ride, &a.dataset) {
        (Some(ride), _) => {
            let samples = read_sensor_file(&ride.join(SENSOR_FILE))?;
            let (strokes, _) = process_stream::<f32>(&samples, &pipeline_for(&model, a.cutoff_hz))?;
            strokes
                .iter()
                .map(|s| {
                    Ok(Prediction {
                        start_us: s.start_us,
                        end_us: s.end_us,
                        predicted_power_w: predict(&model, s.input.as_slice())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        (None, Some(ds)) => predict_dataset(&model, &read_dataset_file(ds)?)?,
        (None, None) => bail!("one of --ride or --dataset is required"),
    };
    write_predictions_file(&a.out, &predictions)?;
    println!("{} predictions -> {}", predictions.len(), a.out.display());
    Ok(())
}

fn truth_of(data: &[LabeledStroke<f32>]) -> Vec<Prediction> {
    data.iter()
        .map(|s| Prediction {
            start_us: s.start_us,
            end_us: s.end_us,
            predicted_power_w: s.label_power_w as f64,
        })
        .collect()
}

fn eval_text(r: &EvalReport) -> String {
    let mut s = format!(
        "samples {}\nduration_min {:.3}\nmae_w {:.4}\navg_power_diff_w {:.4}\nband_lo,band_hi,count,mae_w\n",
        r.samples,
        r.duration_s / 60.0,
        r.mae_w,
        r.avg_power_diff_w
    );
    for b in &r.per_band {
        let mae = b.mae_w.map_or(String::new(), |m| format!("{m:.4}"));
        s.push_str(&format!("{},{},{},{}\n", b.lo_w, b.hi_w, b.count, mae));
    }
    s
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let predictions = read_predictions_file(&a.predictions)?;
    let truth = truth_of(&read_dataset_file::<f32>(&a.dataset)?);
    let report = evaluate(&predictions, &truth, a.bins, POWER_RANGE_W)?;
    let text = eval_text(&report);
    if let Some(out) = &a.out {
        write_text(out, &text)?;
    }
    print!("{text}");
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let model = load_checked(&a.model, a.quantized)?;
    let samples = read_sensor_file(&a.ride.join(SENSOR_FILE))?;
    let config = pipeline_for(&model, a.cutoff_hz);
    let mut seg = StrokeSegmenter::new(config.segmenter.clone())?;
    let mut segments = Vec::new();
    for s in samples {
        segments.extend(seg.push(s)?);
    }
    segments.extend(seg.flush());
    let report = match &model {
        ModelFile::Float(m) => bench_latency(m, &segments, &config, a.warmup)?,
        ModelFile::Quantized(q) => bench_latency(q, &segments, &config, a.warmup)?,
    };
    let kind = match model {
        ModelFile::Float(_) => "f32",
        ModelFile::Quantized(_) => "int8",
    };
    let text = format!("model: {} ({kind})\n{}", a.model.display(), render_latency_table(&report));
    if let Some(out) = &a.out {
        write_text(out, &text)?;
    }
    print!("{text}");
    Ok(())
}

pub fn report(a: ReportArgs) -> Result<()> {
    let data = read_dataset_file::<f32>(&a.dataset)?;
    let truth = truth_of(&data);
    let mut evals = Vec::new();
    for path in &a.models {
        let model = load_model(path)?;
        let kind = match model {
            ModelFile::Float(_) => "f32",
            ModelFile::Quantized(_) => "int8",
        };
        let name = format!("{} ({kind})", path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()));
        let predictions = predict_dataset(&model, &data)?;
        evals.push((name, evaluate(&predictions, &truth, a.bins, POWER_RANGE_W)?));
    }
    let runs: Vec<(&str, &EvalReport)> = evals.iter().map(|(n, r)| (n.as_str(), r)).collect();
    let mut text = format!("dataset: {} strokes\n\n{}", data.len(), render_accuracy_table(&runs));
    if let Some(b) = &a.bench {
        let bench = fs::read_to_string(b).with_context(|| format!("reading {}", b.display()))?;
        text.push('\n');
        text.push_str(&bench);
    }
    if let Some(out) = &a.out {
        write_text(out, &text)?;
    }
    print!("{text}");
    Ok(())
}
