use std::fmt::Write as _;
use std::io::Write;

use super::LabeledStroke;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fraction of the median bin count below which a bin is flagged.
pub const UNDERFILL_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    /// `counts.len() + 1` ascending bin edges in watts.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub min_count: usize,
    pub max_count: usize,
    pub median_count: f64,
    /// Indices of under-filled bins.
    pub flagged: Vec<usize>,
}

impl BalanceReport {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `bin_lo,bin_hi,count,flag` with flag 1 for under-filled bins.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = crate::csvio::writer(out);
        w.write_record(["bin_lo", "bin_hi", "count", "flag"])?;
        for (i, c) in self.counts.iter().enumerate() {
            let flag = if self.flagged.contains(&i) { "1" } else { "0" };
            w.write_record(&[self.edges[i].to_string(), self.edges[i + 1].to_string(), c.to_string(), flag.into()])?;
        }
        crate::csvio::finish(w, std::path::Path::new("<balance csv>"))
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "strokes: {}", self.total());
        let _ = writeln!(
            s,
            "bins: {} x {} W, occupancy min {} / median {} / max {}",
            self.counts.len(),
            self.edges.get(1).zip(self.edges.first()).map_or(0.0, |(b, a)| b - a),
            self.min_count,
            self.median_count,
            self.max_count
        );
        let bar_scale = self.max_count.max(1) as f64 / 40.0;
        for (i, c) in self.counts.iter().enumerate() {
            let bar = "#".repeat((*c as f64 / bar_scale).round() as usize);
            let mark = if self.flagged.contains(&i) { "  under-filled" } else { "" };
            let _ = writeln!(s, "{:>5}-{:<5} {:>6} {}{}", self.edges[i], self.edges[i + 1], c, bar, mark);
        }
        if self.flagged.is_empty() {
            let _ = writeln!(s, "no under-filled bins");
        }
        s
    }
}

/// Histogram of label power. Labels outside `range_w` count toward the
/// nearest edge bin, so counts always sum to the dataset size.
pub fn balance_histogram<T: Real>(dataset: &[LabeledStroke<T>], bin_width_w: f64, range_w: (f64, f64)) -> Result<BalanceReport> {
    let (lo, hi) = range_w;
    if !(bin_width_w > 0.0) || !(hi > lo) {
        return Err(Error::config(format!("bad histogram: width {bin_width_w}, range [{lo}, {hi}]")));
    }
    let n_bins = ((hi - lo) / bin_width_w - 1e-9).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=n_bins).map(|i| (lo + i as f64 * bin_width_w).min(hi)).collect();
    let mut counts = vec![0usize; n_bins];
    for s in dataset {
        let p = s.label_power_w.as_f64();
        let i = ((p - lo) / bin_width_w).floor();
        let i = if i.is_nan() { 0 } else { i.clamp(0.0, (n_bins - 1) as f64) as usize };
        counts[i] += 1;
    }
    let mut sorted = counts.clone();
    sorted.sort_unstable();
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2] as f64
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) as f64
    };
    let flagged = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| (c as f64) < UNDERFILL_FRACTION * median)
        .map(|(i, _)| i)
        .collect();
    Ok(BalanceReport {
        min_count: sorted[0],
        max_count: sorted[m - 1],
        median_count: median,
        edges,
        counts,
        flagged,
    })
}
