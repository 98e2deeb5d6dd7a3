//! Reference stream CSV (`timestamp_us,power_w`) and the labeled dataset
//! CSV (`ride_id,start_us,end_us,label_power_w,x0,...`).

use std::io::{Read, Write};
use std::path::Path;

use super::{LabeledStroke, ReferencePowerSample};
use crate::csvio;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::ModelInput;

pub const REFERENCE_HEADER: [&str; 2] = ["timestamp_us", "power_w"];
const DATASET_PREFIX: [&str; 4] = ["ride_id", "start_us", "end_us", "label_power_w"];

pub fn write_reference_csv<W: Write>(out: W, samples: &[ReferencePowerSample]) -> Result<()> {
    let mut w = csvio::writer(out);
    w.write_record(REFERENCE_HEADER)?;
    for s in samples {
        w.write_record(&[s.timestamp_us.to_string(), s.power_w.to_string()])?;
    }
    csvio::finish(w, Path::new("<reference csv>"))
}

pub fn write_reference_file(path: &Path, samples: &[ReferencePowerSample]) -> Result<()> {
    write_reference_csv(csvio::create(path)?, samples)
}

pub fn read_reference_csv<R: Read>(input: R, name: &Path) -> Result<Vec<ReferencePowerSample>> {
    let mut out = Vec::new();
    let mut prev = None;
    for (line, rec) in csvio::records(input, name, &REFERENCE_HEADER)? {
        let ts = csvio::parse_u64(&rec[0], name, line)?;
        let p = csvio::parse_finite(&rec[1], name, line)?;
        if p < 0.0 {
            return Err(Error::parse(name, line, format!("negative power {p}")));
        }
        csvio::check_increasing(&mut prev, ts, name, line)?;
        out.push(ReferencePowerSample::new(ts, p));
    }
    Ok(out)
}

pub fn read_reference_file(path: &Path) -> Result<Vec<ReferencePowerSample>> {
    read_reference_csv(csvio::open(path)?, path)
}

fn dataset_header(dim: usize) -> Vec<String> {
    DATASET_PREFIX
        .iter()
        .map(|s| s.to_string())
        .chain((0..dim).map(|i| format!("x{i}")))
        .collect()
}

/// Values are written in shortest round-trip form, so reading back yields
/// bit-identical inputs and labels.
pub fn write_dataset_csv<T: Real, W: Write>(out: W, dataset: &[LabeledStroke<T>]) -> Result<()> {
    let dim = dataset.first().map_or(0, |s| s.input.len());
    let mut w = csvio::writer(out);
    w.write_record(dataset_header(dim))?;
    let mut row = Vec::with_capacity(dim + 4);
    for s in dataset {
        if s.input.len() != dim {
            return Err(Error::Shape {
                expected: dim,
                actual: s.input.len(),
            });
        }
        row.clear();
        row.push(s.ride_id.clone());
        row.push(s.start_us.to_string());
        row.push(s.end_us.to_string());
        row.push(s.label_power_w.to_string());
        row.extend(s.input.as_slice().iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    csvio::finish(w, Path::new("<dataset csv>"))
}

pub fn write_dataset_file<T: Real>(path: &Path, dataset: &[LabeledStroke<T>]) -> Result<()> {
    write_dataset_csv(csvio::create(path)?, dataset)
}

/// The input dimension is taken from the header's `x` columns.
pub fn read_dataset_csv<T: Real, R: Read>(input: R, name: &Path) -> Result<Vec<LabeledStroke<T>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut it = r.records();
    let header = match it.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(Error::parse(name, 1, e.to_string())),
        None => return Err(Error::parse(name, 1, "missing header")),
    };
    let dim = header.len().saturating_sub(DATASET_PREFIX.len());
    if !header.iter().eq(dataset_header(dim).iter().map(String::as_str)) {
        return Err(Error::parse(name, 1, "expected header ride_id,start_us,end_us,label_power_w,x0,..."));
    }
    let parse = |field: &str, line: u64| -> Result<T> {
        match field.trim().parse::<T>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::parse(name, line, format!("bad value {field:?}"))),
        }
    };
    let mut out = Vec::new();
    for rec in it {
        let rec = rec.map_err(|e| Error::parse(name, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(Error::parse(name, line, format!("expected {} fields, got {}", header.len(), rec.len())));
        }
        let start_us = csvio::parse_u64(&rec[1], name, line)?;
        let end_us = csvio::parse_u64(&rec[2], name, line)?;
        if end_us <= start_us {
            return Err(Error::parse(name, line, "stroke window has non-positive length"));
        }
        let label = parse(&rec[3], line)?;
        if label < T::zero() {
            return Err(Error::parse(name, line, "negative label"));
        }
        let values = (4..rec.len()).map(|k| parse(&rec[k], line)).collect::<Result<Vec<T>>>()?;
        out.push(LabeledStroke {
            input: ModelInput::new(values),
            label_power_w: label,
            start_us,
            end_us,
            ride_id: rec[0].to_owned(),
        });
    }
    Ok(out)
}

pub fn read_dataset_file<T: Real>(path: &Path) -> Result<Vec<LabeledStroke<T>>> {
    read_dataset_csv(csvio::open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dataset_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<LabeledStroke<f32>> = (0..1000)
            .map(|i| LabeledStroke {
                input: ModelInput::new((0..131).map(|_| rng.gen::<f32>()).collect()),
                label_power_w: rng.gen_range(0.0..300.0),
                start_us: i * 700_000,
                end_us: i * 700_000 + 650_000 + i,
                ride_id: format!("ride-{}", i % 3),
            })
            .collect();
        let mut buf = Vec::new();
        write_dataset_csv(&mut buf, &data).unwrap();
        let back: Vec<LabeledStroke<f32>> = read_dataset_csv(&buf[..], Path::new("d")).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn reference_errors_cite_lines() {
        let mut text = String::from("timestamp_us,power_w\n");
        for k in 0..55 {
            text.push_str(&format!("{},150\n", k * 250_000));
        }
        text.push_str("1000,150\n");
        let e = read_reference_csv(text.as_bytes(), Path::new("r")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 57, .. }), "{e}");
        let e = read_reference_csv("timestamp_us,power_w\n0,nan\n".as_bytes(), Path::new("r")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(read_reference_csv("0,1\n".as_bytes(), Path::new("r")).is_err());
    }

    #[test]
    fn reference_round_trip() {
        let r = vec![ReferencePowerSample::new(0, 151.25), ReferencePowerSample::new(250_000, 0.0)];
        let mut buf = Vec::new();
        write_reference_csv(&mut buf, &r).unwrap();
        assert_eq!(read_reference_csv(&buf[..], Path::new("r")).unwrap(), r);
    }

    #[test]
    fn dataset_bad_rows() {
        let t = "ride_id,start_us,end_us,label_power_w,x0\na,0,10,5,0.5\na,0,10,5,NaN\n";
        assert!(matches!(read_dataset_csv::<f64, _>(t.as_bytes(), Path::new("d")), Err(Error::Parse { line: 3, .. })));
        let t = "ride_id,start_us,end_us,label_power_w,x1\n";
        assert!(read_dataset_csv::<f64, _>(t.as_bytes(), Path::new("d")).is_err());
    }
}
