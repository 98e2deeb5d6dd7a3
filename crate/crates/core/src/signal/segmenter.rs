use super::filter::SinglePoleLowPass;
use super::peaks::{detect_peaks_windowed, refine_peak};
use super::ring::RingBuffer;
use super::{SensorSample, StrokeSegment, SAMPLE_RATE_HZ};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterConfig {
    pub sample_rate_hz: f64,
    pub cutoff_hz: f64,
    pub min_prominence_n: f64,
    /// Minimum spacing between force maxima; 25 samples is 140 rpm at 58.3 Hz.
    pub min_distance_samples: usize,
    /// Longest stroke kept; longer peak-to-peak gaps are discarded.
    pub max_stroke_s: f64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: SAMPLE_RATE_HZ,
            cutoff_hz: 10.0,
            min_prominence_n: 20.0,
            min_distance_samples: 25,
            max_stroke_s: 2.0,
        }
    }
}

impl SegmenterConfig {
    pub fn max_stroke_samples(&self) -> usize {
        (self.max_stroke_s * self.sample_rate_hz).ceil() as usize
    }

    /// Samples a candidate must wait before its peak decision is final.
    fn lookahead(&self) -> usize {
        self.max_stroke_samples() + 2 * self.min_distance_samples
    }

    /// Ring capacity: the decision neighborhood on both sides of a
    /// candidate. Always at least two maximum-length strokes.
    pub fn ring_capacity(&self) -> usize {
        2 * self.lookahead() + 2
    }

    fn validate(&self) -> Result<()> {
        SinglePoleLowPass::<f64>::alpha_for(self.cutoff_hz, self.sample_rate_hz)?;
        if !(self.min_prominence_n > 0.0) {
            return Err(Error::config("min_prominence_n must be positive"));
        }
        if self.min_distance_samples == 0 {
            return Err(Error::config("min_distance_samples must be at least 1"));
        }
        if !(self.max_stroke_s > 0.0) {
            return Err(Error::config("max_stroke_s must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SegmenterDiagnostics {
    pub samples_accepted: u64,
    pub samples_rejected: u64,
    pub peaks: u64,
    /// Peak-to-peak gaps longer than the maximum stroke (or already evicted).
    pub discarded_long: u64,
}

/// Streaming state machine: filters incoming samples into a ring buffer and
/// emits a [`StrokeSegment`] whenever a force maximum is confirmed after the
/// previous one. Each segment is emitted exactly once.
#[derive(Debug, Clone)]
pub struct StrokeSegmenter {
    config: SegmenterConfig,
    filters: [SinglePoleLowPass<f64>; 4],
    ring: RingBuffer<SensorSample>,
    last_timestamp: Option<u64>,
    next_candidate: u64,
    last_peak: Option<(u64, u64)>,
    diagnostics: SegmenterDiagnostics,
}

impl StrokeSegmenter {
    pub fn new(config: SegmenterConfig) -> Result<Self> {
        config.validate()?;
        let lp = SinglePoleLowPass::new(config.cutoff_hz, config.sample_rate_hz)?;
        Ok(Self {
            ring: RingBuffer::new(config.ring_capacity()),
            filters: [lp; 4],
            config,
            last_timestamp: None,
            next_candidate: 1,
            last_peak: None,
            diagnostics: SegmenterDiagnostics::default(),
        })
    }

    pub fn config(&self) -> &SegmenterConfig {
        &self.config
    }

    pub fn diagnostics(&self) -> SegmenterDiagnostics {
        self.diagnostics
    }

    pub fn ring(&self) -> &RingBuffer<SensorSample> {
        &self.ring
    }

    /// Appends one sample; returns any segment completed by it. A sample
    /// whose timestamp does not advance is rejected and the state is left
    /// unchanged.
    pub fn push(&mut self, sample: SensorSample) -> Result<Vec<StrokeSegment>> {
        if let Some(prev) = self.last_timestamp {
            if sample.timestamp_us <= prev {
                self.diagnostics.samples_rejected += 1;
                return Err(Error::NonMonotonic {
                    prev,
                    got: sample.timestamp_us,
                });
            }
        }
        self.last_timestamp = Some(sample.timestamp_us);
        self.diagnostics.samples_accepted += 1;

        let raw = sample.clamped().channels();
        let mut ch = [0.0; 4];
        for k in 0..4 {
            ch[k] = self.filters[k].step(raw[k]);
        }
        self.ring.push(SensorSample::with_channels(sample.timestamp_us, ch));

        let newest = self.ring.total_pushed() - 1;
        let mut out = Vec::new();
        let look = self.config.lookahead() as u64;
        while self.next_candidate + look <= newest {
            let c = self.next_candidate;
            self.next_candidate += 1;
            if let Some(seg) = self.evaluate(c) {
                out.push(seg);
            }
        }
        Ok(out)
    }

    /// Decides all pending candidates with the data available. Call at end
    /// of stream.
    pub fn flush(&mut self) -> Vec<StrokeSegment> {
        let total = self.ring.total_pushed();
        let mut out = Vec::new();
        while self.next_candidate + 1 < total {
            let c = self.next_candidate;
            self.next_candidate += 1;
            if let Some(seg) = self.evaluate(c) {
                out.push(seg);
            }
        }
        out
    }

    fn evaluate(&mut self, c: u64) -> Option<StrokeSegment> {
        let look = self.config.lookahead() as u64;
        let lo = c.saturating_sub(look).max(self.ring.oldest_index());
        let hi = (c + look).min(self.ring.total_pushed() - 1);
        let window = self.ring.range(lo, hi)?;
        let local = (c - lo) as usize;
        // Cheap rejection before running the full detector.
        if window[local - 1].force_n > window[local].force_n || window[local + 1].force_n > window[local].force_n {
            return None;
        }
        let force: Vec<f64> = window.iter().map(|s| s.force_n).collect();
        let peaks = detect_peaks_windowed(
            &force,
            self.config.min_prominence_n,
            self.config.min_distance_samples,
            Some(self.config.max_stroke_samples()),
        );
        if !peaks.contains(&local) {
            return None;
        }
        if let Some((prev, _)) = self.last_peak {
            if c - prev < self.config.min_distance_samples as u64 {
                return None;
            }
        }
        let delta = refine_peak(&force, local);
        let t_peak = refined_time(&window, local, delta);
        self.diagnostics.peaks += 1;

        let prev = self.last_peak.replace((c, t_peak));
        let (p_idx, p_time) = prev?;
        if c - p_idx > self.config.max_stroke_samples() as u64 {
            self.diagnostics.discarded_long += 1;
            return None;
        }
        match self.ring.range(p_idx, c) {
            Some(samples) if t_peak > p_time => Some(StrokeSegment {
                samples,
                start_us: p_time,
                end_us: t_peak,
            }),
            _ => {
                self.diagnostics.discarded_long += 1;
                None
            }
        }
    }
}

fn refined_time(w: &[SensorSample], i: usize, delta: f64) -> u64 {
    let t = w[i].timestamp_us as f64;
    let step = if delta >= 0.0 {
        w.get(i + 1).map_or(0.0, |n| n.timestamp_us as f64 - t)
    } else {
        w.get(i.wrapping_sub(1)).map_or(0.0, |p| t - p.timestamp_us as f64)
    };
    (t + delta * step).round() as u64
}
