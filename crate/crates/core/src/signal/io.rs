//! Sensor stream CSV: `timestamp_us,force_n,accel_x_g,accel_z_g,gyro_y_dps`.

use std::io::{Read, Write};
use std::path::Path;

use super::SensorSample;
use crate::csvio;
use crate::error::Result;

pub const SENSOR_HEADER: [&str; 5] = ["timestamp_us", "force_n", "accel_x_g", "accel_z_g", "gyro_y_dps"];

pub fn write_sensor_csv<W: Write>(out: W, samples: &[SensorSample]) -> Result<()> {
    let mut w = csvio::writer(out);
    w.write_record(SENSOR_HEADER)?;
    for s in samples {
        w.write_record(&[
            s.timestamp_us.to_string(),
            s.force_n.to_string(),
            s.accel_x_g.to_string(),
            s.accel_z_g.to_string(),
            s.gyro_y_dps.to_string(),
        ])?;
    }
    csvio::finish(w, Path::new("<sensor csv>"))
}

pub fn write_sensor_file(path: &Path, samples: &[SensorSample]) -> Result<()> {
    write_sensor_csv(csvio::create(path)?, samples)
}

/// Parses a sensor CSV. Rejects a missing/incorrect header, non-finite
/// fields, and timestamps that do not strictly increase, citing the line.
pub fn read_sensor_csv<R: Read>(input: R, name: &Path) -> Result<Vec<SensorSample>> {
    let mut out = Vec::new();
    let mut prev = None;
    for (line, rec) in csvio::records(input, name, &SENSOR_HEADER)? {
        let ts = csvio::parse_u64(&rec[0], name, line)?;
        let mut v = [0.0; 4];
        for k in 0..4 {
            v[k] = csvio::parse_finite(&rec[k + 1], name, line)?;
        }
        csvio::check_increasing(&mut prev, ts, name, line)?;
        out.push(SensorSample::with_channels(ts, v));
    }
    Ok(out)
}

pub fn read_sensor_file(path: &Path) -> Result<Vec<SensorSample>> {
    read_sensor_csv(csvio::open(path)?, path)
}
