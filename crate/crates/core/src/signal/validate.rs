use std::fmt;

use super::StrokeSegment;
use crate::error::{Error, Result};

/// Thresholds a stroke candidate must meet to be kept.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCriteria {
    pub min_amplitude_n: f64,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    /// How far both boundary peaks must rise above the interior minimum.
    pub min_prominence_n: f64,
}

impl Default for ValidationCriteria {
    /// Amplitude 20 N, duration 0.43 to 2.0 s (30 to 140 rpm).
    fn default() -> Self {
        Self {
            min_amplitude_n: 20.0,
            min_duration_s: 0.43,
            max_duration_s: 2.0,
            min_prominence_n: 20.0,
        }
    }
}

impl ValidationCriteria {
    pub fn check(&self) -> Result<()> {
        let positive = [
            self.min_amplitude_n,
            self.min_duration_s,
            self.max_duration_s,
            self.min_prominence_n,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::config("validation thresholds must be positive"));
        }
        if self.min_duration_s >= self.max_duration_s {
            return Err(Error::config(format!(
                "min_duration_s {} must be below max_duration_s {}",
                self.min_duration_s, self.max_duration_s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rejection {
    Amplitude,
    Duration,
    /// No rise-fall-rise shape: the force minimum sits on a boundary, or the
    /// boundary peaks do not clear it by the prominence threshold.
    Shape,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::Amplitude => "amplitude",
            Rejection::Duration => "duration",
            Rejection::Shape => "shape",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

/// Checks amplitude, then duration, then shape; the first failure wins.
pub fn validate_candidate(segment: &StrokeSegment, criteria: &ValidationCriteria) -> Verdict {
    let force = segment.force();
    if force.len() < 2 {
        return Verdict::Reject(Rejection::Shape);
    }
    let (mut min_i, mut min_v, mut max_v) = (0usize, f64::INFINITY, f64::NEG_INFINITY);
    for (i, &f) in force.iter().enumerate() {
        if f < min_v {
            min_v = f;
            min_i = i;
        }
        max_v = max_v.max(f);
    }
    if max_v - min_v < criteria.min_amplitude_n {
        return Verdict::Reject(Rejection::Amplitude);
    }
    let d = segment.duration_s();
    if d < criteria.min_duration_s || d > criteria.max_duration_s {
        return Verdict::Reject(Rejection::Duration);
    }
    let last = force.len() - 1;
    let boundary = force[0].min(force[last]);
    if min_i == 0 || min_i == last || boundary - min_v < criteria.min_prominence_n {
        return Verdict::Reject(Rejection::Shape);
    }
    Verdict::Accept
}
