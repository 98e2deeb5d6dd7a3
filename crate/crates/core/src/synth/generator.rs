use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{GroundTruth, GroundTruthStroke, RideProfile};
use crate::error::Result;
use crate::signal::{SensorSample, SAMPLE_RATE_HZ};

/// Internal integration steps per emitted sample.
pub const OVERSAMPLE: usize = 10;
const G: f64 = 9.81;

#[derive(Debug, Clone, PartialEq)]
pub struct Ride {
    pub samples: Vec<SensorSample>,
    pub truth: GroundTruth,
}

/// Instantaneous mechanical power `F_t * omega * r` on the internal grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerTrace {
    pub dt_s: f64,
    pub power_w: Vec<f64>,
}

/// Cycle mean of `max(0, sin θ)^1.5`, by composite Simpson.
pub fn force_shape_mean() -> f64 {
    let n = 20_000;
    let h = PI / n as f64;
    let f = |x: f64| x.sin().max(0.0).powf(1.5);
    let mut s = f(0.0) + f(PI);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 / TAU
}

pub fn generate_ride(profile: &RideProfile, seed: u64) -> Result<Ride> {
    Ok(run(profile, seed, false)?.0)
}

/// Like [`generate_ride`], also returning the internal power signal.
pub fn generate_ride_traced(profile: &RideProfile, seed: u64) -> Result<(Ride, PowerTrace)> {
    run(profile, seed, true)
}

/// (target power, cadence) at time `t`, ramped linearly from the previous
/// segment over `ramp_s`.
struct Targets<'a> {
    profile: &'a RideProfile,
    ends: Vec<f64>,
}

impl<'a> Targets<'a> {
    fn new(profile: &'a RideProfile) -> Self {
        let ends = profile
            .segments
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s.duration_s;
                Some(*acc)
            })
            .collect();
        Self { profile, ends }
    }

    fn at(&self, t: f64) -> (f64, f64) {
        let segs = &self.profile.segments;
        let i = self.ends.partition_point(|&e| e <= t).min(segs.len() - 1);
        let cur = segs[i];
        let start = if i == 0 { 0.0 } else { self.ends[i - 1] };
        let ramp = self.profile.ramp_s.min(cur.duration_s);
        if i == 0 || ramp == 0.0 || t - start >= ramp {
            return (cur.target_power_w, cur.cadence_rpm);
        }
        let prev = segs[i - 1];
        let u = (t - start) / ramp;
        (
            prev.target_power_w + u * (cur.target_power_w - prev.target_power_w),
            prev.cadence_rpm + u * (cur.cadence_rpm - prev.cadence_rpm),
        )
    }
}

fn run(profile: &RideProfile, seed: u64, keep_trace: bool) -> Result<(Ride, PowerTrace)> {
    profile.check()?;
    let total_s = profile.duration_s();
    let dt = 1.0 / (SAMPLE_RATE_HZ * OVERSAMPLE as f64);
    let n_fine = (total_s / dt).floor() as usize;
    let k_shape = force_shape_mean();
    let r = profile.crank_length_m;
    let pitch0 = profile.foot_pitch_deg.to_radians();
    let targets = Targets::new(profile);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };
    let walk_a = (-dt / profile.walk_tau_s).exp();
    let walk_b = profile.walk_sigma * (1.0 - walk_a * walk_a).sqrt();
    let mut walk = 0.0;

    let mut theta = 0.0;
    let mut next_boundary = FRAC_PI_2;
    let mut stroke_start: Option<f64> = None;
    let mut energy = 0.0;
    let mut prev_power = 0.0;
    let mut prev_theta = 0.0;

    let mut samples = Vec::with_capacity(n_fine / OVERSAMPLE + 1);
    let mut strokes = Vec::new();
    let mut trace = PowerTrace {
        dt_s: dt,
        power_w: Vec::new(),
    };

    for k in 0..=n_fine {
        let t = k as f64 * dt;
        let (p_target, cadence) = targets.at(t);
        let omega = cadence * TAU / 60.0;
        if k > 0 {
            // crank angle advances with the midpoint angular velocity
            let (_, c_mid) = targets.at(t - 0.5 * dt);
            theta += c_mid * TAU / 60.0 * dt;
        }
        let shape = theta.sin().max(0.0).powf(1.5);
        let power = (p_target * (1.0 + walk)).max(0.0) * shape / k_shape;
        if keep_trace {
            trace.power_w.push(power);
        }

        if k > 0 {
            if theta >= next_boundary {
                // split the step at the interpolated crossing
                let u = (next_boundary - prev_theta) / (theta - prev_theta);
                let t_cross = t - dt + u * dt;
                let p_cross = prev_power + u * (power - prev_power);
                energy += 0.5 * (prev_power + p_cross) * u * dt;
                if let Some(t0) = stroke_start {
                    let period = t_cross - t0;
                    strokes.push(GroundTruthStroke {
                        start_us: (t0 * 1e6).round() as u64,
                        end_us: (t_cross * 1e6).round() as u64,
                        true_power_w: energy / period,
                        true_cadence_rpm: 60.0 / period,
                    });
                }
                stroke_start = Some(t_cross);
                energy = 0.5 * (p_cross + power) * (1.0 - u) * dt;
                next_boundary += TAU;
            } else {
                energy += 0.5 * (prev_power + power) * dt;
            }
        }
        prev_power = power;
        prev_theta = theta;

        if k % OVERSAMPLE == 0 {
            let n = k / OVERSAMPLE;
            let f_t = power / (omega * r);
            let force = profile.force_transfer * f_t + profile.force_offset_n + profile.noise.force_n * normal();

            // specific force of the pedal spindle on its circle, x forward, z up
            let a_c = omega * omega * r;
            let fx = -a_c * theta.sin() / G;
            let fz = -a_c * theta.cos() / G + 1.0;
            let pitch = pitch0 * (theta - PI / 4.0).sin();
            let (sp, cp) = pitch.sin_cos();
            let ax = fx * cp - fz * sp + profile.noise.accel_g * normal();
            let az = fx * sp + fz * cp + profile.noise.accel_g * normal();
            let gyro = profile.foot_pitch_deg * omega * (theta - PI / 4.0).cos() + profile.noise.gyro_dps * normal();

            let ts = (n as f64 * 1e6 / SAMPLE_RATE_HZ).round() as u64;
            samples.push(SensorSample::new(ts, force, ax, az, gyro).clamped());
        }
        walk = walk_a * walk + walk_b * normal();
    }

    let truth = GroundTruth {
        strokes,
        ride_duration_us: (total_s * 1e6).round() as u64,
    };
    Ok((Ride { samples, truth }, trace))
}
