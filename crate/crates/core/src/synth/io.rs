//! Ground-truth CSV: `start_us,end_us,true_power_w,true_cadence_rpm`.

use std::io::{Read, Write};
use std::path::Path;

use super::GroundTruthStroke;
use crate::csvio;
use crate::error::{Error, Result};

pub const TRUTH_HEADER: [&str; 4] = ["start_us", "end_us", "true_power_w", "true_cadence_rpm"];

pub fn write_truth_csv<W: Write>(out: W, strokes: &[GroundTruthStroke]) -> Result<()> {
    let mut w = csvio::writer(out);
    w.write_record(TRUTH_HEADER)?;
    for s in strokes {
        w.write_record(&[
            s.start_us.to_string(),
            s.end_us.to_string(),
            s.true_power_w.to_string(),
            s.true_cadence_rpm.to_string(),
        ])?;
    }
    csvio::finish(w, Path::new("<truth csv>"))
}

pub fn write_truth_file(path: &Path, strokes: &[GroundTruthStroke]) -> Result<()> {
    write_truth_csv(csvio::create(path)?, strokes)
}

/// Rejects empty or overlapping windows and negative power.
pub fn read_truth_csv<R: Read>(input: R, name: &Path) -> Result<Vec<GroundTruthStroke>> {
    let mut out: Vec<GroundTruthStroke> = Vec::new();
    for (line, rec) in csvio::records(input, name, &TRUTH_HEADER)? {
        let s = GroundTruthStroke {
            start_us: csvio::parse_u64(&rec[0], name, line)?,
            end_us: csvio::parse_u64(&rec[1], name, line)?,
            true_power_w: csvio::parse_finite(&rec[2], name, line)?,
            true_cadence_rpm: csvio::parse_finite(&rec[3], name, line)?,
        };
        if s.end_us <= s.start_us {
            return Err(Error::parse(name, line, "stroke window has non-positive length"));
        }
        if s.true_power_w < 0.0 {
            return Err(Error::parse(name, line, "negative power"));
        }
        if out.last().is_some_and(|p| p.end_us > s.start_us) {
            return Err(Error::parse(name, line, "stroke overlaps the previous one"));
        }
        out.push(s);
    }
    Ok(out)
}

pub fn read_truth_file(path: &Path) -> Result<Vec<GroundTruthStroke>> {
    read_truth_csv(csvio::open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_overlap() {
        let s = vec![
            GroundTruthStroke {
                start_us: 10,
                end_us: 700_010,
                true_power_w: 181.123456789,
                true_cadence_rpm: 85.714285714,
            },
            GroundTruthStroke {
                start_us: 700_010,
                end_us: 1_400_000,
                true_power_w: 0.0,
                true_cadence_rpm: 85.0,
            },
        ];
        let mut buf = Vec::new();
        write_truth_csv(&mut buf, &s).unwrap();
        assert_eq!(read_truth_csv(&buf[..], Path::new("t")).unwrap(), s);

        let bad = "start_us,end_us,true_power_w,true_cadence_rpm\n0,100,1,60\n50,200,1,60\n";
        assert!(matches!(read_truth_csv(bad.as_bytes(), Path::new("t")), Err(Error::Parse { line: 3, .. })));
    }
}
