//! Shared CSV plumbing: LF-terminated writers, header checks and
//! line-numbered field parsing.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use csv::StringRecord;

use crate::error::{Error, Result};

pub(crate) fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn finish<W: Write>(mut w: csv::Writer<W>, name: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(name, e))
}

/// Records after a header equal to `header`, each with its 1-based line.
pub(crate) fn records<R: Read>(input: R, name: &Path, header: &[&str]) -> Result<Vec<(u64, StringRecord)>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut it = r.records();
    match it.next() {
        Some(Ok(h)) if h.iter().eq(header.iter().copied()) => {}
        Some(Ok(h)) => {
            return Err(Error::parse(
                name,
                1,
                format!("expected header {:?}, got {:?}", header.join(","), h.iter().collect::<Vec<_>>().join(",")),
            ))
        }
        Some(Err(e)) => return Err(Error::parse(name, 1, e.to_string())),
        None => return Err(Error::parse(name, 1, "missing header")),
    }
    let mut out = Vec::new();
    for rec in it {
        let rec = rec.map_err(|e| Error::parse(name, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(Error::parse(name, line, format!("expected {} fields, got {}", header.len(), rec.len())));
        }
        out.push((line, rec));
    }
    Ok(out)
}

pub(crate) fn parse_finite(field: &str, name: &Path, line: u64) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(name, line, format!("bad number {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(name, line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

pub(crate) fn parse_u64(field: &str, name: &Path, line: u64) -> Result<u64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(name, line, format!("bad integer {field:?}")))
}

/// Fails unless `ts` strictly exceeds the previous timestamp.
pub(crate) fn check_increasing(prev: &mut Option<u64>, ts: u64, name: &Path, line: u64) -> Result<()> {
    if let Some(p) = *prev {
        if ts <= p {
            return Err(Error::parse(name, line, format!("timestamp {ts} does not increase (previous {p})")));
        }
    }
    *prev = Some(ts);
    Ok(())
}
