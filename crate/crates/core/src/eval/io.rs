//! Prediction CSV: `start_us,end_us,predicted_power_w`.

use std::io::{Read, Write};
use std::path::Path;

use super::Prediction;
use crate::csvio;
use crate::error::{Error, Result};

pub const PREDICTION_HEADER: [&str; 3] = ["start_us", "end_us", "predicted_power_w"];

/// One CSV row, without allocation beyond `buf`'s growth.
pub fn format_prediction(buf: &mut String, p: &Prediction) {
    use std::fmt::Write as _;
    let _ = writeln!(buf, "{},{},{}", p.start_us, p.end_us, p.predicted_power_w);
}

pub fn write_predictions_csv<W: Write>(mut out: W, predictions: &[Prediction]) -> Result<()> {
    let mut s = PREDICTION_HEADER.join(",");
    s.push('\n');
    for p in predictions {
        format_prediction(&mut s, p);
    }
    out.write_all(s.as_bytes()).map_err(|e| Error::io("<prediction csv>", e))
}

pub fn write_predictions_file(path: &Path, predictions: &[Prediction]) -> Result<()> {
    let mut f = csvio::create(path)?;
    write_predictions_csv(&mut f, predictions)?;
    f.flush().map_err(|e| Error::io(path, e))
}

pub fn read_predictions_csv<R: Read>(input: R, name: &Path) -> Result<Vec<Prediction>> {
    csvio::records(input, name, &PREDICTION_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(Prediction {
                start_us: csvio::parse_u64(&rec[0], name, line)?,
                end_us: csvio::parse_u64(&rec[1], name, line)?,
                predicted_power_w: csvio::parse_finite(&rec[2], name, line)?,
            })
        })
        .collect()
}

pub fn read_predictions_file(path: &Path) -> Result<Vec<Prediction>> {
    read_predictions_csv(csvio::open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = vec![
            Prediction {
                start_us: 5,
                end_us: 700_000,
                predicted_power_w: 187.25,
            },
            Prediction {
                start_us: 700_000,
                end_us: 1_350_123,
                predicted_power_w: 0.1 + 0.2,
            },
        ];
        let mut buf = Vec::new();
        write_predictions_csv(&mut buf, &p).unwrap();
        assert!(buf.starts_with(b"start_us,end_us,predicted_power_w\n5,700000,187.25\n"));
        assert_eq!(read_predictions_csv(&buf[..], Path::new("p")).unwrap(), p);
    }
}
