use super::StrokeSegment;
use crate::error::{Error, Result};

/// Per-stroke scalars that resampling and normalization would otherwise
/// wash out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeFeatures {
    pub cadence_rpm: f64,
    /// max force - min force within the stroke
    pub amplitude_n: f64,
    /// min force within the stroke
    pub offset_n: f64,
}

/// Computed on the original (pre-resampling) segment.
pub fn extract_features(segment: &StrokeSegment) -> Result<StrokeFeatures> {
    let duration = segment.duration_s();
    if !(duration > 0.0) {
        return Err(Error::InvalidSegment("zero-duration segment".into()));
    }
    if segment.is_empty() {
        return Err(Error::InvalidSegment("empty segment".into()));
    }
    let (lo, hi) = segment
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.force_n), hi.max(s.force_n)));
    Ok(StrokeFeatures {
        cadence_rpm: 60.0 / duration,
        amplitude_n: hi - lo,
        offset_n: lo,
    })
}
