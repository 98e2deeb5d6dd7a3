use std::hint::black_box;
use std::time::Instant;

use super::io::format_prediction;
use super::Prediction;
use crate::error::{Error, Result};
use crate::nn::{DenseModel, QuantizedModel};
use crate::signal::{PipelineConfig, StrokePipeline, StrokeSegment};

/// Stage names in report order.
pub const STAGES: [&str; 4] = ["pre-processing", "inference", "post-processing", "serialization"];
pub const MIN_STROKES: usize = 1000;

/// Anything that maps a normalized input to watts in two steps: the model
/// proper and an output conversion timed as post-processing.
pub trait PowerEstimator {
    type Raw: Copy;
    fn infer(&self, input: &[f32]) -> Result<Self::Raw>;
    fn to_watts(&self, raw: Self::Raw) -> f64;
}

impl PowerEstimator for DenseModel<f32> {
    type Raw = f32;

    fn infer(&self, input: &[f32]) -> Result<f32> {
        self.forward(input)
    }

    fn to_watts(&self, raw: f32) -> f64 {
        raw as f64
    }
}

impl PowerEstimator for QuantizedModel {
    type Raw = u8;

    fn infer(&self, input: &[f32]) -> Result<u8> {
        self.forward_quantized(&self.quantize_input(input)?)
    }

    fn to_watts(&self, raw: u8) -> f64 {
        self.dequantize_output(raw) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageStats {
    pub name: String,
    pub median_ns: f64,
    pub p95_ns: f64,
}

impl StageStats {
    fn from_samples(name: &str, v: &mut [u64]) -> Self {
        v.sort_unstable();
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2] as f64
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2]) as f64
        };
        let p95 = v[((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1] as f64;
        Self {
            name: name.to_owned(),
            median_ns: median,
            p95_ns: p95,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyReport {
    /// One entry per [`STAGES`] element, same order.
    pub stages: Vec<StageStats>,
    /// Whole-stroke time measured around all four stages.
    pub end_to_end: StageStats,
    pub strokes: usize,
    /// Stage times at or below this are not distinguishable from zero.
    pub resolution_ns: f64,
    pub host: String,
}

impl LatencyReport {
    pub fn stage_median_sum_ns(&self) -> f64 {
        self.stages.iter().map(|s| s.median_ns).sum()
    }
}

/// Measurement floor of `Instant`: the 95th percentile of back-to-back
/// readings, which is what an empty timed region costs.
pub fn timer_resolution() -> f64 {
    let mut d: Vec<u64> = (0..2001)
        .map(|_| {
            let a = Instant::now();
            let b = Instant::now();
            (b - a).as_nanos() as u64
        })
        .collect();
    StageStats::from_samples("", &mut d).p95_ns.max(1.0)
}

pub fn host_description() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_owned())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!("{} {}, {cpu}, {threads} threads", std::env::consts::OS, std::env::consts::ARCH)
}

/// Times each stage for every accepted segment after `warmup` untimed ones.
/// Needs at least 1000 timed strokes.
pub fn bench_latency<E: PowerEstimator>(
    estimator: &E,
    segments: &[StrokeSegment],
    pipeline: &PipelineConfig,
    warmup: usize,
) -> Result<LatencyReport> {
    let mut pipe = StrokePipeline::<f32>::new(pipeline.clone())?;
    let mut times: [Vec<u64>; 5] = Default::default();
    let mut line = String::with_capacity(64);
    let mut seen = 0;
    for seg in segments {
        let t0 = Instant::now();
        let Some(stroke) = pipe.process_segment(seg)? else {
            continue;
        };
        let t1 = Instant::now();
        let raw = estimator.infer(black_box(stroke.input.as_slice()))?;
        let t2 = Instant::now();
        let record = Prediction {
            start_us: stroke.start_us,
            end_us: stroke.end_us,
            predicted_power_w: estimator.to_watts(black_box(raw)),
        };
        let t3 = Instant::now();
        line.clear();
        format_prediction(&mut line, black_box(&record));
        black_box(line.len());
        let t4 = Instant::now();
        seen += 1;
        if seen <= warmup {
            continue;
        }
        for (v, d) in times.iter_mut().zip([t1 - t0, t2 - t1, t3 - t2, t4 - t3, t4 - t0]) {
            v.push(d.as_nanos() as u64);
        }
    }
    let n = times[0].len();
    if n < MIN_STROKES {
        return Err(Error::Benchmark(format!(
            "only {n} timed strokes after {warmup} warm-up; need {MIN_STROKES}"
        )));
    }
    let [a, b, c, d, e] = &mut times;
    let stages = [a, b, c, d]
        .into_iter()
        .zip(STAGES)
        .map(|(v, name)| StageStats::from_samples(name, v))
        .collect();
    Ok(LatencyReport {
        stages,
        end_to_end: StageStats::from_samples("end-to-end", e),
        strokes: n,
        resolution_ns: timer_resolution(),
        host: host_description(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let mut v: Vec<u64> = (1..=100).rev().collect();
        let s = StageStats::from_samples("x", &mut v);
        assert_eq!((s.median_ns, s.p95_ns), (50.5, 95.0));
        let mut one = vec![7];
        let s = StageStats::from_samples("x", &mut one);
        assert_eq!((s.median_ns, s.p95_ns), (7.0, 7.0));
    }

    #[test]
    fn resolution_positive() {
        assert!(timer_resolution() >= 1.0);
    }
}
