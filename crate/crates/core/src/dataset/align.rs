use super::{LabeledStroke, ReferencePowerSample};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::ProcessedStroke;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignConfig {
    /// How far outside the reference span a stroke window may reach.
    pub tolerance_us: u64,
    /// Added to reference timestamps to map them onto the sensor clock.
    pub clock_offset_us: i64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            tolerance_us: 500_000,
            clock_offset_us: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment<T> {
    pub labeled: Vec<LabeledStroke<T>>,
    /// Strokes with no usable reference coverage.
    pub dropped: usize,
}

/// Time-weighted mean of the sample-and-hold reference over
/// `[start_us, end_us]`. Before the first tick its value is held backwards.
/// `ticks` must be sorted by time and `start_us < end_us`.
pub fn window_label(ticks: &[(i64, f64)], start_us: i64, end_us: i64) -> Option<f64> {
    if ticks.is_empty() || end_us <= start_us {
        return None;
    }
    let first = ticks.partition_point(|&(t, _)| t <= start_us);
    let mut value = ticks[first.saturating_sub(1)].1;
    let mut t = start_us;
    let mut acc = 0.0;
    for &(tick, v) in ticks[first..].iter().take_while(|(tick, _)| *tick < end_us) {
        acc += value * (tick - t) as f64;
        t = tick;
        value = v;
    }
    acc += value * (end_us - t) as f64;
    Some(acc / (end_us - start_us) as f64)
}

/// Labels each stroke with the reference power averaged over its window.
/// Strokes outside the reference span (beyond the tolerance) or without a
/// tick within the tolerance of their window are dropped and counted.
pub fn align_streams<T: Real>(
    strokes: &[ProcessedStroke<T>],
    reference: &[ReferencePowerSample],
    config: &AlignConfig,
    ride_id: &str,
) -> Result<Alignment<T>> {
    if strokes.is_empty() {
        return Ok(Alignment {
            labeled: Vec::new(),
            dropped: 0,
        });
    }
    let ticks: Vec<(i64, f64)> = reference
        .iter()
        .map(|r| (r.timestamp_us as i64 + config.clock_offset_us, r.power_w))
        .collect();
    let tol = config.tolerance_us as i64;
    let span_lo = strokes.first().map_or(0, |s| s.start_us) as i64;
    let span_hi = strokes.last().map_or(0, |s| s.end_us) as i64;
    let (ref_lo, ref_hi) = match (ticks.first(), ticks.last()) {
        (Some(a), Some(b)) => (a.0 - tol, b.0 + tol),
        _ => return Err(Error::Alignment { overlap_fraction: 0.0 }),
    };
    let overlap = (span_hi.min(ref_hi) - span_lo.max(ref_lo)).max(0);
    if overlap == 0 {
        return Err(Error::Alignment {
            overlap_fraction: 0.0,
        });
    }

    let mut labeled = Vec::with_capacity(strokes.len());
    let mut dropped = 0;
    for s in strokes {
        let (a, b) = (s.start_us as i64, s.end_us as i64);
        let inside = a >= ref_lo && b <= ref_hi;
        let lo = ticks.partition_point(|&(t, _)| t < a - tol);
        let near = ticks.get(lo).is_some_and(|&(t, _)| t <= b + tol);
        match window_label(&ticks, a, b) {
            Some(label) if inside && near => labeled.push(LabeledStroke {
                input: s.input.clone(),
                label_power_w: T::lit(label),
                start_us: s.start_us,
                end_us: s.end_us,
                ride_id: ride_id.to_owned(),
            }),
            _ => dropped += 1,
        }
    }
    Ok(Alignment { labeled, dropped })
}
