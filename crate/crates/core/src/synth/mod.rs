//! Synthetic stand-in for an instrumented bike: a 58.3 Hz cleat sensor
//! stream, a 4 Hz reference power meter, and exact per-stroke ground truth.

mod generator;
pub mod io;
mod presets;
mod reference;

pub use generator::{generate_ride, generate_ride_traced, force_shape_mean, PowerTrace, Ride};
pub use presets::{protocol_profile, Preset, BAND_SWEEP_BANDS, BAND_SWEEP_CADENCES};
pub use reference::{reference_meter, ReferenceConfig};

use crate::error::{Error, Result};

/// One constant-target stretch of a ride.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RideSegment {
    pub duration_s: f64,
    pub target_power_w: f64,
    pub cadence_rpm: f64,
}

impl RideSegment {
    pub const fn new(duration_s: f64, target_power_w: f64, cadence_rpm: f64) -> Self {
        Self {
            duration_s,
            target_power_w,
            cadence_rpm,
        }
    }
}

/// Gaussian noise standard deviations added to each emitted channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLevels {
    pub force_n: f64,
    pub accel_g: f64,
    pub gyro_dps: f64,
}

impl NoiseLevels {
    pub const ZERO: NoiseLevels = NoiseLevels {
        force_n: 0.0,
        accel_g: 0.0,
        gyro_dps: 0.0,
    };
}

impl Default for NoiseLevels {
    fn default() -> Self {
        Self {
            force_n: 2.0,
            accel_g: 0.02,
            gyro_dps: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RideProfile {
    pub segments: Vec<RideSegment>,
    /// Metadata only.
    pub rider_mass_kg: f64,
    pub noise: NoiseLevels,
    pub crank_length_m: f64,
    /// Fraction of tangential crank force seen by the cleat load cell.
    pub force_transfer: f64,
    pub force_offset_n: f64,
    /// Relative standard deviation of the slow peak-force modulation.
    pub walk_sigma: f64,
    pub walk_tau_s: f64,
    /// Linear transition time into each segment's targets.
    pub ramp_s: f64,
    /// Foot pitch oscillation amplitude.
    pub foot_pitch_deg: f64,
}

impl RideProfile {
    pub fn new(segments: Vec<RideSegment>) -> Self {
        Self {
            segments,
            rider_mass_kg: 75.0,
            noise: NoiseLevels::default(),
            crank_length_m: 0.1725,
            force_transfer: 0.7,
            force_offset_n: 30.0,
            walk_sigma: 0.03,
            walk_tau_s: 8.0,
            ramp_s: 2.0,
            foot_pitch_deg: 12.0,
        }
    }

    /// Noise and force modulation switched off.
    pub fn noise_free(mut self) -> Self {
        self.noise = NoiseLevels::ZERO;
        self.walk_sigma = 0.0;
        self
    }

    pub fn constant(duration_s: f64, target_power_w: f64, cadence_rpm: f64) -> Self {
        Self::new(vec![RideSegment::new(duration_s, target_power_w, cadence_rpm)])
    }

    pub fn duration_s(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn check(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::config("ride profile has no segments"));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration_s > 0.0) || !s.duration_s.is_finite() {
                return Err(Error::config(format!("segment {i}: duration {} must be positive", s.duration_s)));
            }
            if !(s.target_power_w >= 0.0) || !s.target_power_w.is_finite() {
                return Err(Error::config(format!("segment {i}: power {} must be non-negative", s.target_power_w)));
            }
            if !(30.0..=140.0).contains(&s.cadence_rpm) {
                return Err(Error::config(format!("segment {i}: cadence {} outside [30, 140] rpm", s.cadence_rpm)));
            }
        }
        let n = &self.noise;
        let non_neg = [n.force_n, n.accel_g, n.gyro_dps, self.walk_sigma, self.ramp_s, self.force_offset_n];
        if non_neg.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::config("noise levels, walk sigma, ramp and offset must be non-negative"));
        }
        if !(self.crank_length_m > 0.0) || !(self.force_transfer > 0.0) || !(self.walk_tau_s > 0.0) {
            return Err(Error::config("crank length, force transfer and walk tau must be positive"));
        }
        Ok(())
    }
}

/// Exact stroke-averaged mechanical power between consecutive force maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthStroke {
    pub start_us: u64,
    pub end_us: u64,
    pub true_power_w: f64,
    pub true_cadence_rpm: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub strokes: Vec<GroundTruthStroke>,
    pub ride_duration_us: u64,
}

impl GroundTruth {
    /// Stroke whose window contains `t_us`, if any.
    pub fn stroke_at(&self, t_us: u64) -> Option<&GroundTruthStroke> {
        let i = self.strokes.partition_point(|s| s.end_us <= t_us);
        self.strokes.get(i).filter(|s| s.start_us <= t_us)
    }
}
