use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::GroundTruth;
use crate::dataset::ReferencePowerSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConfig {
    pub rate_hz: f64,
    /// One standard deviation of multiplicative noise, in percent.
    pub noise_pct: f64,
    pub seed: u64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            rate_hz: 4.0,
            noise_pct: 1.5,
            seed: 0,
        }
    }
}

/// Ticks at `rate_hz` over the whole ride. Each tick holds the average power
/// of the stroke containing it (the first or last stroke outside the
/// stroke span), times `1 + N(0, noise_pct / 100)`, floored at zero.
pub fn reference_meter(truth: &GroundTruth, config: &ReferenceConfig) -> Result<Vec<ReferencePowerSample>> {
    if truth.strokes.is_empty() {
        return Err(Error::config("reference meter needs at least one stroke"));
    }
    if !(config.rate_hz > 0.0) || !(config.noise_pct >= 0.0) {
        return Err(Error::config("reference rate must be positive and noise non-negative"));
    }
    let end = truth.ride_duration_us.max(truth.strokes.last().map_or(0, |s| s.end_us));
    let period_us = 1e6 / config.rate_hz;
    let sigma = config.noise_pct / 100.0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // keep clear of the generator's stream for the same seed
    rng.set_stream(1);
    let mut out = Vec::new();
    let mut i = 0;
    for k in 0u64.. {
        let t = (k as f64 * period_us).round() as u64;
        if t >= end {
            break;
        }
        while i + 1 < truth.strokes.len() && truth.strokes[i].end_us <= t {
            i += 1;
        }
        let eps: f64 = StandardNormal.sample(&mut rng);
        let power = (truth.strokes[i].true_power_w * (1.0 + sigma * eps)).max(0.0);
        out.push(ReferencePowerSample::new(t, power));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::GroundTruthStroke;

    fn stroke(a: u64, b: u64, p: f64) -> GroundTruthStroke {
        GroundTruthStroke {
            start_us: a,
            end_us: b,
            true_power_w: p,
            true_cadence_rpm: 60e6 / (b - a) as f64,
        }
    }

    fn quiet() -> ReferenceConfig {
        ReferenceConfig {
            noise_pct: 0.0,
            ..ReferenceConfig::default()
        }
    }

    #[test]
    fn sample_and_hold() {
        let truth = GroundTruth {
            strokes: vec![stroke(0, 2_000_000, 150.0)],
            ride_duration_us: 2_000_000,
        };
        let r = reference_meter(&truth, &quiet()).unwrap();
        assert_eq!(r.len(), 8);
        assert!(r.iter().all(|s| s.power_w == 150.0));
    }

    #[test]
    fn tick_count_and_stroke_lookup() {
        let strokes: Vec<_> = (0..60).map(|i| stroke(i * 1_000_000, (i + 1) * 1_000_000, i as f64)).collect();
        let truth = GroundTruth {
            strokes,
            ride_duration_us: 60_000_000,
        };
        let r = reference_meter(&truth, &quiet()).unwrap();
        assert_eq!(r.len(), 240);
        for s in &r {
            assert_eq!(s.power_w, (s.timestamp_us / 1_000_000) as f64);
        }
    }

    #[test]
    fn empty_truth_rejected() {
        assert!(reference_meter(&GroundTruth::default(), &quiet()).is_err());
    }
}
