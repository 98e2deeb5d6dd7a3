use super::features::StrokeFeatures;
use super::resample::ResampledStroke;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Time-series channels in input order.
pub const CHANNELS: [&str; 4] = ["force", "accel_x", "accel_z", "gyro_y"];
/// Scalar features appended after the channels.
pub const FEATURES: [&str; 3] = ["cadence", "amplitude", "offset"];

/// Closed interval mapped onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

/// Fixed normalization ranges. They are part of the model: a trained model
/// file carries the bounds it was trained with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationBounds {
    pub force: Bounds,
    pub accel_x: Bounds,
    pub accel_z: Bounds,
    pub gyro_y: Bounds,
    pub cadence: Bounds,
    pub amplitude: Bounds,
    pub offset: Bounds,
}

impl Default for NormalizationBounds {
    fn default() -> Self {
        Self {
            force: Bounds::new(0.0, 1000.0),
            accel_x: Bounds::new(-8.0, 8.0),
            accel_z: Bounds::new(-8.0, 8.0),
            gyro_y: Bounds::new(-500.0, 500.0),
            cadence: Bounds::new(0.0, 200.0),
            amplitude: Bounds::new(0.0, 1000.0),
            offset: Bounds::new(0.0, 500.0),
        }
    }
}

impl NormalizationBounds {
    /// Channel bounds followed by feature bounds, the order used on disk.
    pub fn to_array(&self) -> [Bounds; 7] {
        [
            self.force,
            self.accel_x,
            self.accel_z,
            self.gyro_y,
            self.cadence,
            self.amplitude,
            self.offset,
        ]
    }

    pub fn from_array(b: [Bounds; 7]) -> Self {
        Self {
            force: b[0],
            accel_x: b[1],
            accel_z: b[2],
            gyro_y: b[3],
            cadence: b[4],
            amplitude: b[5],
            offset: b[6],
        }
    }

    pub fn check(&self) -> Result<()> {
        for (b, name) in self.to_array().iter().zip(CHANNELS.iter().chain(FEATURES.iter())) {
            if !(b.hi > b.lo) || !b.lo.is_finite() || !b.hi.is_finite() {
                return Err(Error::config(format!(
                    "normalization bounds for {name} must satisfy lo < hi, got [{}, {}]",
                    b.lo, b.hi
                )));
            }
        }
        Ok(())
    }
}

/// Normalized network input: four channel blocks then three features,
/// every element in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInput<T> {
    values: Vec<T>,
}

impl<T: Real> ModelInput<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cast<U: Real>(&self) -> ModelInput<U> {
        ModelInput::new(self.values.iter().map(|v| U::lit(v.as_f64())).collect())
    }
}

impl<T> AsRef<[T]> for ModelInput<T> {
    fn as_ref(&self) -> &[T] {
        &self.values
    }
}

/// Input dimension for `samples_per_channel` resampled points per channel.
pub const fn input_dim(samples_per_channel: usize) -> usize {
    CHANNELS.len() * samples_per_channel + FEATURES.len()
}

pub fn normalize<T: Real>(
    channels: &ResampledStroke<f64>,
    features: &StrokeFeatures,
    bounds: &NormalizationBounds,
) -> Result<ModelInput<T>> {
    bounds.check()?;
    let len = channels.force.len();
    if channels.channels().iter().any(|c| c.len() != len) {
        return Err(Error::InvalidSegment("channels differ in length".into()));
    }
    let mut values = Vec::with_capacity(input_dim(len));
    let chan_bounds = [bounds.force, bounds.accel_x, bounds.accel_z, bounds.gyro_y];
    for (ch, b) in channels.channels().iter().zip(chan_bounds) {
        values.extend(ch.iter().map(|&x| T::lit(b.apply(x))));
    }
    values.push(T::lit(bounds.cadence.apply(features.cadence_rpm)));
    values.push(T::lit(bounds.amplitude.apply(features.amplitude_n)));
    values.push(T::lit(bounds.offset.apply(features.offset_n)));
    Ok(ModelInput::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stroke(v: f64) -> ResampledStroke<f64> {
        ResampledStroke {
            force: vec![v; 32],
            accel_x: vec![0.0; 32],
            accel_z: vec![8.0; 32],
            gyro_y: vec![-500.0; 32],
        }
    }

    fn feats() -> StrokeFeatures {
        StrokeFeatures {
            cadence_rpm: 90.0,
            amplitude_n: 350.0,
            offset_n: 120.0,
        }
    }

    #[test]
    fn force_midpoint() {
        let b = NormalizationBounds::default();
        assert_eq!(b.force.apply(500.0), 0.5);
        let m: ModelInput<f32> = normalize(&stroke(500.0), &feats(), &b).unwrap();
        assert_eq!(m.len(), 131);
        assert_eq!(m.as_slice()[0], 0.5);
        assert_eq!(m.as_slice()[32], 0.5);
        assert_eq!(m.as_slice()[64], 1.0);
        assert_eq!(m.as_slice()[96], 0.0);
        assert_eq!(m.as_slice()[128], 0.45);
        assert_eq!(m.as_slice()[129], 0.35);
        assert_eq!(m.as_slice()[130], 0.24);
    }

    #[test]
    fn endpoints_and_clamp() {
        let b = Bounds::new(0.0, 1000.0);
        assert_eq!(b.apply(0.0), 0.0);
        assert_eq!(b.apply(1000.0), 1.0);
        assert_eq!(b.apply(1200.0), 1.0);
        assert_eq!(b.apply(-3.0), 0.0);
    }

    #[test]
    fn inverted_bounds_rejected() {
        let mut b = NormalizationBounds::default();
        b.gyro_y = Bounds::new(5.0, 5.0);
        assert!(matches!(normalize::<f64>(&stroke(1.0), &feats(), &b), Err(Error::Config(_))));
    }

    #[test]
    fn all_elements_in_unit_interval() {
        let m: ModelInput<f64> = normalize(&stroke(5000.0), &feats(), &NormalizationBounds::default()).unwrap();
        assert!(m.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(input_dim(32), 131);
    }
}
