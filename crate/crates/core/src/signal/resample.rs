use super::StrokeSegment;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Linear interpolation of `x` onto `target_len` equally spaced positions
/// over `[0, len - 1]`. Both endpoints are reproduced exactly.
pub fn resample_to_length<T: Real>(x: &[T], target_len: usize) -> Result<Vec<T>> {
    if x.len() < 2 {
        return Err(Error::InvalidSegment(format!(
            "need at least 2 samples to resample, got {}",
            x.len()
        )));
    }
    if target_len < 2 {
        return Err(Error::config(format!("target length must be at least 2, got {target_len}")));
    }
    let span = (x.len() - 1) as f64;
    let steps = (target_len - 1) as f64;
    Ok((0..target_len)
        .map(|k| {
            let pos = (k as f64 * span) / steps;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if i + 1 >= x.len() {
                x[x.len() - 1]
            } else if frac == 0.0 {
                x[i]
            } else {
                x[i] + (x[i + 1] - x[i]) * T::lit(frac)
            }
        })
        .collect())
}

/// The four channels of a stroke on a common fixed-length grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledStroke<T> {
    pub force: Vec<T>,
    pub accel_x: Vec<T>,
    pub accel_z: Vec<T>,
    pub gyro_y: Vec<T>,
}

impl<T> ResampledStroke<T> {
    pub fn channels(&self) -> [&[T]; 4] {
        [&self.force, &self.accel_x, &self.accel_z, &self.gyro_y]
    }
}

pub fn resample_segment(segment: &StrokeSegment, target_len: usize) -> Result<ResampledStroke<f64>> {
    let col = |f: fn(&super::SensorSample) -> f64| -> Result<Vec<f64>> {
        let v: Vec<f64> = segment.samples.iter().map(f).collect();
        resample_to_length(&v, target_len)
    };
    Ok(ResampledStroke {
        force: col(|s| s.force_n)?,
        accel_x: col(|s| s.accel_x_g)?,
        accel_z: col(|s| s.accel_z_g)?,
        gyro_y: col(|s| s.gyro_y_dps)?,
    })
}
