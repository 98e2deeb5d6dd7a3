use std::marker::PhantomData;

use super::features::{extract_features, StrokeFeatures};
use super::normalize::{input_dim, normalize, ModelInput, NormalizationBounds};
use super::resample::resample_segment;
use super::segmenter::{SegmenterConfig, SegmenterDiagnostics, StrokeSegmenter};
use super::validate::{validate_candidate, Rejection, ValidationCriteria, Verdict};
use super::{SensorSample, StrokeSegment};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub segmenter: SegmenterConfig,
    pub criteria: ValidationCriteria,
    pub samples_per_channel: usize,
    pub bounds: NormalizationBounds,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            segmenter: SegmenterConfig::default(),
            criteria: ValidationCriteria::default(),
            samples_per_channel: 32,
            bounds: NormalizationBounds::default(),
        }
    }
}

impl PipelineConfig {
    pub fn input_dim(&self) -> usize {
        input_dim(self.samples_per_channel)
    }

    pub fn with_cutoff(mut self, cutoff_hz: f64) -> Self {
        self.segmenter.cutoff_hz = cutoff_hz;
        self
    }
}

/// A validated stroke ready for the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedStroke<T> {
    pub start_us: u64,
    pub end_us: u64,
    pub features: StrokeFeatures,
    pub input: ModelInput<T>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineStats {
    pub segments: u64,
    pub accepted: u64,
    pub rejected_amplitude: u64,
    pub rejected_duration: u64,
    pub rejected_shape: u64,
    pub segmenter: SegmenterDiagnostics,
}

impl PipelineStats {
    pub fn rejected(&self) -> u64 {
        self.rejected_amplitude + self.rejected_duration + self.rejected_shape
    }
}

/// Segmenter followed by validation, resampling, feature extraction and
/// normalization. Single owner; outputs are plain values.
#[derive(Debug, Clone)]
pub struct StrokePipeline<T = f32> {
    segmenter: StrokeSegmenter,
    config: PipelineConfig,
    stats: PipelineStats,
    _scalar: PhantomData<T>,
}

impl<T: Real> StrokePipeline<T> {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.criteria.check()?;
        config.bounds.check()?;
        if config.samples_per_channel < 2 {
            return Err(Error::config("samples_per_channel must be at least 2"));
        }
        Ok(Self {
            segmenter: StrokeSegmenter::new(config.segmenter.clone())?,
            config,
            stats: PipelineStats::default(),
            _scalar: PhantomData,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn stats(&self) -> PipelineStats {
        let mut s = self.stats;
        s.segmenter = self.segmenter.diagnostics();
        s
    }

    pub fn push(&mut self, sample: SensorSample) -> Result<Vec<ProcessedStroke<T>>> {
        let segments = self.segmenter.push(sample)?;
        self.process(segments)
    }

    pub fn flush(&mut self) -> Result<Vec<ProcessedStroke<T>>> {
        let segments = self.segmenter.flush();
        self.process(segments)
    }

    /// Runs one segment through validation and featurization.
    pub fn process_segment(&mut self, segment: &StrokeSegment) -> Result<Option<ProcessedStroke<T>>> {
        self.stats.segments += 1;
        match validate_candidate(segment, &self.config.criteria) {
            Verdict::Reject(r) => {
                match r {
                    Rejection::Amplitude => self.stats.rejected_amplitude += 1,
                    Rejection::Duration => self.stats.rejected_duration += 1,
                    Rejection::Shape => self.stats.rejected_shape += 1,
                }
                Ok(None)
            }
            Verdict::Accept => {
                let features = extract_features(segment)?;
                let channels = resample_segment(segment, self.config.samples_per_channel)?;
                let input = normalize(&channels, &features, &self.config.bounds)?;
                self.stats.accepted += 1;
                Ok(Some(ProcessedStroke {
                    start_us: segment.start_us,
                    end_us: segment.end_us,
                    features,
                    input,
                }))
            }
        }
    }

    fn process(&mut self, segments: Vec<StrokeSegment>) -> Result<Vec<ProcessedStroke<T>>> {
        let mut out = Vec::with_capacity(segments.len());
        for seg in &segments {
            if let Some(p) = self.process_segment(seg)? {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// Whole-stream convenience: push every sample, then flush.
pub fn process_stream<T: Real>(
    samples: &[SensorSample],
    config: &PipelineConfig,
) -> Result<(Vec<ProcessedStroke<T>>, PipelineStats)> {
    let mut p = StrokePipeline::new(config.clone())?;
    let mut out = Vec::new();
    for s in samples {
        out.extend(p.push(*s)?);
    }
    out.extend(p.flush()?);
    Ok((out, p.stats()))
}
