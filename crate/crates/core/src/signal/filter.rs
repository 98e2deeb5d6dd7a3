use std::f64::consts::PI;

use super::SensorSample;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// First-order IIR low-pass, `y[n] = y[n-1] + alpha * (x[n] - y[n-1])`,
/// primed with the first input so a constant stream passes unchanged.
#[derive(Debug, Clone, Copy)]
pub struct SinglePoleLowPass<T> {
    alpha: T,
    state: Option<T>,
}

impl<T: Real> SinglePoleLowPass<T> {
    pub fn new(cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        Ok(Self {
            alpha: T::lit(Self::alpha_for(cutoff_hz, sample_rate_hz)?),
            state: None,
        })
    }

    /// `alpha = dt / (RC + dt)` with `RC = 1 / (2 pi f_c)`.
    pub fn alpha_for(cutoff_hz: f64, sample_rate_hz: f64) -> Result<f64> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::config(format!("sample rate must be positive, got {sample_rate_hz}")));
        }
        let nyquist = sample_rate_hz / 2.0;
        if !(cutoff_hz > 0.0 && cutoff_hz < nyquist) {
            return Err(Error::config(format!(
                "cutoff {cutoff_hz} Hz outside (0, {nyquist}) Hz"
            )));
        }
        let dt = 1.0 / sample_rate_hz;
        let rc = 1.0 / (2.0 * PI * cutoff_hz);
        Ok(dt / (rc + dt))
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn step(&mut self, x: T) -> T {
        let y = match self.state {
            None => x,
            Some(prev) => prev + self.alpha * (x - prev),
        };
        self.state = Some(y);
        y
    }

    pub fn reset(&mut self) {
        self.state = None;
    }
}

/// Filters all four channels of `stream`; timestamps are left untouched.
pub fn lowpass_filter(stream: &[SensorSample], cutoff_hz: f64, sample_rate_hz: f64) -> Result<Vec<SensorSample>> {
    if stream.is_empty() {
        return Err(Error::config("cannot filter an empty stream"));
    }
    let mut bank = [SinglePoleLowPass::<f64>::new(cutoff_hz, sample_rate_hz)?; 4];
    Ok(stream
        .iter()
        .map(|s| {
            let ch = s.channels();
            let mut out = [0.0; 4];
            for k in 0..4 {
                out[k] = bank[k].step(ch[k]);
            }
            SensorSample::with_channels(s.timestamp_us, out)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stream(force: &[f64]) -> Vec<SensorSample> {
        force
            .iter()
            .enumerate()
            .map(|(i, &f)| SensorSample::new(i as u64 * 17_153, f, 0.0, 1.0, 0.0))
            .collect()
    }

    #[test]
    fn constant_stream_is_a_fixed_point() {
        let out = lowpass_filter(&stream(&[400.0; 50]), 10.0, 58.3).unwrap();
        assert!(out.iter().all(|s| s.force_n == 400.0 && s.accel_z_g == 1.0));
    }

    #[test]
    fn unit_step_first_response_equals_alpha() {
        let dt = 1.0 / 58.3;
        let rc = 1.0 / (2.0 * PI * 10.0);
        let alpha = dt / (rc + dt);
        let out = lowpass_filter(&stream(&[0.0, 1.0, 1.0]), 10.0, 58.3).unwrap();
        assert_eq!(out[0].force_n, 0.0);
        assert_eq!(out[1].force_n, alpha);
        assert!(alpha > 0.5 && alpha < 0.53);
    }

    #[test]
    fn timestamps_and_first_sample_preserved() {
        let input = stream(&[3.0, 9.0, -2.0, 7.0]);
        let out = lowpass_filter(&input, 5.0, 58.3).unwrap();
        assert_eq!(out[0], input[0]);
        for (a, b) in input.iter().zip(&out) {
            assert_eq!(a.timestamp_us, b.timestamp_us);
        }
    }

    #[test]
    fn white_noise_variance_drops() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = lowpass_filter(&stream(&x), 10.0, 58.3).unwrap();
        let var = |v: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = v.collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / v.len() as f64
        };
        let vin = var(&mut x.iter().copied());
        let vout = var(&mut y.iter().map(|s| s.force_n));
        assert!(vout < vin, "{vout} !< {vin}");
    }

    #[test]
    fn cutoff_outside_nyquist_is_rejected() {
        let s = stream(&[1.0]);
        assert!(matches!(lowpass_filter(&s, 0.0, 58.3), Err(Error::Config(_))));
        assert!(matches!(lowpass_filter(&s, 29.15, 58.3), Err(Error::Config(_))));
        assert!(matches!(lowpass_filter(&s, -1.0, 58.3), Err(Error::Config(_))));
        assert!(lowpass_filter(&[], 10.0, 58.3).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let mut f = SinglePoleLowPass::<f32>::new(10.0, 58.3).unwrap();
        assert_eq!(f.step(2.0), 2.0);
        let y = f.step(3.0);
        assert!((y - (2.0 + f.alpha())).abs() < 1e-6);
    }
}
