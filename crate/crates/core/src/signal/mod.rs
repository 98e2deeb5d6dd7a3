//! Raw sensor stream to normalized model inputs: low-pass filtering, ring
//! buffering, peak-bounded stroke segmentation, candidate validation,
//! fixed-length resampling, feature extraction and normalization.

mod features;
mod filter;
pub mod io;
mod normalize;
mod peaks;
mod pipeline;
mod resample;
mod ring;
mod segmenter;
mod validate;

pub use features::{extract_features, StrokeFeatures};
pub use filter::{lowpass_filter, SinglePoleLowPass};
pub use normalize::{input_dim, normalize, Bounds, ModelInput, NormalizationBounds, CHANNELS, FEATURES};
pub use peaks::{detect_peaks, detect_peaks_windowed, refine_peak};
pub use pipeline::{process_stream, PipelineConfig, PipelineStats, ProcessedStroke, StrokePipeline};
pub use resample::{resample_segment, resample_to_length, ResampledStroke};
pub use ring::RingBuffer;
pub use segmenter::{SegmenterConfig, SegmenterDiagnostics, StrokeSegmenter};
pub use validate::{validate_candidate, Rejection, ValidationCriteria, Verdict};

/// Nominal sensor stream rate.
pub const SAMPLE_RATE_HZ: f64 = 58.3;

/// Load-cell measurement range upper bound.
pub const FORCE_RANGE_N: f64 = 1000.0;

/// One timestamped reading of the cleat force sensor and the three inertial
/// channels that follow the pedal's degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    pub timestamp_us: u64,
    pub force_n: f64,
    pub accel_x_g: f64,
    pub accel_z_g: f64,
    pub gyro_y_dps: f64,
}

impl SensorSample {
    pub fn new(timestamp_us: u64, force_n: f64, accel_x_g: f64, accel_z_g: f64, gyro_y_dps: f64) -> Self {
        Self {
            timestamp_us,
            force_n,
            accel_x_g,
            accel_z_g,
            gyro_y_dps,
        }
    }

    /// Force clamped to the load cell's range.
    pub fn clamped(mut self) -> Self {
        self.force_n = self.force_n.clamp(0.0, FORCE_RANGE_N);
        self
    }

    pub(crate) fn channels(&self) -> [f64; 4] {
        [self.force_n, self.accel_x_g, self.accel_z_g, self.gyro_y_dps]
    }

    pub(crate) fn with_channels(timestamp_us: u64, ch: [f64; 4]) -> Self {
        Self::new(timestamp_us, ch[0], ch[1], ch[2], ch[3])
    }
}

/// Samples between two consecutive detected force maxima, both boundary
/// peaks included. `start_us`/`end_us` are the sub-sample peak times.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeSegment {
    pub samples: Vec<SensorSample>,
    pub start_us: u64,
    pub end_us: u64,
}

impl StrokeSegment {
    /// Segment spanning `samples` with the window taken from the first and
    /// last sample timestamps.
    pub fn from_samples(samples: Vec<SensorSample>) -> Self {
        let start_us = samples.first().map_or(0, |s| s.timestamp_us);
        let end_us = samples.last().map_or(0, |s| s.timestamp_us);
        Self {
            samples,
            start_us,
            end_us,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.end_us.saturating_sub(self.start_us) as f64 * 1e-6
    }

    pub fn force(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.force_n).collect()
    }
}
