use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NoiseLevels, RideProfile, RideSegment};
use crate::error::{Error, Result};

/// Power bands of the band-sweep protocol, five minutes each.
pub const BAND_SWEEP_BANDS: [(f64, f64); 6] = [
    (60.0, 100.0),
    (100.0, 140.0),
    (140.0, 180.0),
    (180.0, 220.0),
    (220.0, 250.0),
    (250.0, 300.0),
];
pub const BAND_SWEEP_CADENCES: [f64; 4] = [60.0, 75.0, 90.0, 105.0];

const BAND_S: f64 = 300.0;
const STEP_S: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    BandSweep,
    Generalization,
    OutdoorLike,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::BandSweep, Preset::Generalization, Preset::OutdoorLike];

    pub fn name(self) -> &'static str {
        match self {
            Preset::BandSweep => "band-sweep",
            Preset::Generalization => "generalization",
            Preset::OutdoorLike => "outdoor-like",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config(format!("unknown profile {s:?} (expected band-sweep, generalization or outdoor-like)")))
    }
}

pub fn protocol_profile(preset: Preset, seed: u64) -> RideProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match preset {
        Preset::BandSweep => band_sweep(&mut rng),
        Preset::Generalization => generalization(&mut rng),
        Preset::OutdoorLike => outdoor_like(&mut rng),
    }
}

/// Six bands in ascending order. Each band is split into 15 s steps whose
/// targets are stratified across the band, so every part of it is ridden.
fn band_sweep(rng: &mut ChaCha8Rng) -> RideProfile {
    let steps = (BAND_S / STEP_S) as usize;
    let mut segments = Vec::new();
    for (lo, hi) in BAND_SWEEP_BANDS {
        let width = (hi - lo) / steps as f64;
        let mut powers: Vec<f64> = (0..steps).map(|i| lo + width * (i as f64 + rng.gen::<f64>())).collect();
        powers.shuffle(rng);
        for p in powers {
            let c = *BAND_SWEEP_CADENCES.choose(rng).expect("non-empty");
            segments.push(RideSegment::new(STEP_S, p, c));
        }
    }
    RideProfile::new(segments)
}

/// Ten minutes of random levels over the full range.
fn generalization(rng: &mut ChaCha8Rng) -> RideProfile {
    let segments = (0..30)
        .map(|_| RideSegment::new(20.0, rng.gen_range(60.0..300.0), rng.gen_range(60.0..105.0)))
        .collect();
    RideProfile::new(segments)
}

/// 25 minutes of irregular efforts with short surges and noisier sensors.
fn outdoor_like(rng: &mut ChaCha8Rng) -> RideProfile {
    let mut segments = Vec::new();
    let mut t = 0.0;
    while t < 1500.0 {
        let d: f64 = if rng.gen_bool(0.2) { rng.gen_range(3.0..8.0) } else { rng.gen_range(10.0..40.0) };
        let d = d.min(1500.0 - t).max(1.0);
        segments.push(RideSegment::new(d, rng.gen_range(60.0..300.0), rng.gen_range(55.0..110.0)));
        t += d;
    }
    let mut p = RideProfile::new(segments);
    p.noise = NoiseLevels {
        force_n: 6.0,
        accel_g: 0.15,
        gyro_dps: 8.0,
    };
    p.walk_sigma = 0.06;
    p.ramp_s = 1.0;
    p
}
