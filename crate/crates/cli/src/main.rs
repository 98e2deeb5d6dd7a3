use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "pedalpower", version, about = "Per-stroke cycling power estimation from cleat force and IMU data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic ride: sensor.csv, reference.csv, truth.csv
    Synth(SynthArgs),
    /// Segment rides and label strokes with reference power
    BuildDataset(BuildDatasetArgs),
    /// Train a float model on a dataset
    Train(TrainArgs),
    /// Convert a float model to int8 using dataset inputs for calibration
    Quantize(QuantizeArgs),
    /// Estimate power per stroke for a ride or a dataset
    Infer(InferArgs),
    /// Score predictions against dataset labels
    Eval(EvalArgs),
    /// Time the per-stroke stages on a ride
    Bench(BenchArgs),
    /// Render accuracy (and optionally latency) tables
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// band-sweep, generalization or outdoor-like
    #[arg(long)]
    pub profile: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Disable sensor noise, force modulation and reference noise
    #[arg(long)]
    pub noise_free: bool,
}

#[derive(Args, Debug)]
pub struct BuildDatasetArgs {
    /// Ride directory produced by `synth`; repeatable
    #[arg(long = "ride", required = true)]
    pub rides: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub cutoff_hz: f64,
    /// Balance histogram bin width in watts
    #[arg(long, default_value_t = 20.0)]
    pub bins: f64,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output directory for model.pwm and history.csv
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 256)]
    pub epochs: usize,
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.05)]
    pub decay: f64,
    #[arg(long, default_value_t = 5)]
    pub patience: usize,
    #[arg(long, default_value_t = 0.15)]
    pub val_fraction: f64,
    /// Take SGD steps on raw watt targets instead of standardized ones
    #[arg(long)]
    pub raw_targets: bool,
}

#[derive(Args, Debug)]
pub struct QuantizeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset whose inputs calibrate activation ranges
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct InferArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Require an int8 model
    #[arg(long)]
    pub quantized: bool,
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    pub ride: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Prediction CSV path
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub cutoff_hz: f64,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    /// Dataset providing the truth labels, row for row
    #[arg(long)]
    pub dataset: PathBuf,
    /// Per-band breakdown width in watts
    #[arg(long, default_value_t = 20.0)]
    pub bins: f64,
    /// Also write the report here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Require an int8 model
    #[arg(long)]
    pub quantized: bool,
    #[arg(long)]
    pub ride: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub warmup: usize,
    #[arg(long, default_value_t = 10.0)]
    pub cutoff_hz: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Model to score; repeatable, one column each
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    #[arg(long)]
    pub dataset: PathBuf,
    /// Latency table written by `bench --out`, appended verbatim
    #[arg(long)]
    pub bench: Option<PathBuf>,
    #[arg(long, default_value_t = 20.0)]
    pub bins: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::BuildDataset(a) => commands::build_dataset(a),
        Command::Train(a) => commands::train(a),
        Command::Quantize(a) => commands::quantize(a),
        Command::Infer(a) => commands::infer(a),
        Command::Eval(a) => commands::eval(a),
        Command::Bench(a) => commands::bench(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
