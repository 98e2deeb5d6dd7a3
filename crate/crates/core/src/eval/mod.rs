//! Accuracy metrics, per-stroke prediction files, latency benchmarking and
//! report rendering.

mod bench;
pub mod io;
mod report;

pub use bench::{bench_latency, timer_resolution, LatencyReport, PowerEstimator, StageStats, STAGES};
pub use report::{render_accuracy_table, render_latency_table, MCU_LATENCY_MS};

use crate::error::{Error, Result};

/// Estimated power for one stroke window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub start_us: u64,
    pub end_us: u64,
    pub predicted_power_w: f64,
}

fn check_pair(p: &[f64], t: &[f64]) -> Result<()> {
    if p.len() != t.len() {
        return Err(Error::Shape {
            expected: t.len(),
            actual: p.len(),
        });
    }
    if p.is_empty() {
        return Err(Error::config("no samples to evaluate"));
    }
    Ok(())
}

/// Mean absolute error in watts.
pub fn mae(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    check_pair(predictions, truths)?;
    Ok(predictions.iter().zip(truths).map(|(p, t)| (p - t).abs()).sum::<f64>() / predictions.len() as f64)
}

/// `|mean(predictions) - mean(truths)|`
pub fn avg_power_diff(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    check_pair(predictions, truths)?;
    let n = predictions.len() as f64;
    Ok((predictions.iter().sum::<f64>() / n - truths.iter().sum::<f64>() / n).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandMae {
    pub lo_w: f64,
    pub hi_w: f64,
    pub count: usize,
    /// `None` for an empty band.
    pub mae_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub samples: usize,
    pub mae_w: f64,
    pub avg_power_diff_w: f64,
    /// Truth-power bands; values outside the range fall in the edge bands.
    pub per_band: Vec<BandMae>,
    /// From the first window start to the last window end.
    pub duration_s: f64,
}

/// Scores predictions against truths whose windows must match one to one.
pub fn evaluate(predictions: &[Prediction], truths: &[Prediction], band_w: f64, range_w: (f64, f64)) -> Result<EvalReport> {
    if predictions.len() != truths.len() {
        return Err(Error::Shape {
            expected: truths.len(),
            actual: predictions.len(),
        });
    }
    if let Some((i, (p, t))) = predictions
        .iter()
        .zip(truths)
        .enumerate()
        .find(|(_, (p, t))| p.start_us != t.start_us || p.end_us != t.end_us)
    {
        return Err(Error::config(format!(
            "row {i}: prediction window [{}, {}] does not match truth window [{}, {}]",
            p.start_us, p.end_us, t.start_us, t.end_us
        )));
    }
    if !(band_w > 0.0) || !(range_w.1 > range_w.0) {
        return Err(Error::config("band width must be positive and the range non-empty"));
    }
    let p: Vec<f64> = predictions.iter().map(|x| x.predicted_power_w).collect();
    let t: Vec<f64> = truths.iter().map(|x| x.predicted_power_w).collect();
    let n_bands = ((range_w.1 - range_w.0) / band_w - 1e-9).ceil().max(1.0) as usize;
    let mut sums = vec![(0usize, 0.0f64); n_bands];
    for (pi, ti) in p.iter().zip(&t) {
        let b = ((ti - range_w.0) / band_w).floor().clamp(0.0, (n_bands - 1) as f64) as usize;
        sums[b].0 += 1;
        sums[b].1 += (pi - ti).abs();
    }
    let per_band = sums
        .iter()
        .enumerate()
        .map(|(i, &(count, s))| BandMae {
            lo_w: range_w.0 + i as f64 * band_w,
            hi_w: (range_w.0 + (i + 1) as f64 * band_w).min(range_w.1),
            count,
            mae_w: (count > 0).then(|| s / count as f64),
        })
        .collect();
    let first = truths.iter().map(|x| x.start_us).min().unwrap_or(0);
    let last = truths.iter().map(|x| x.end_us).max().unwrap_or(0);
    Ok(EvalReport {
        samples: p.len(),
        mae_w: mae(&p, &t)?,
        avg_power_diff_w: avg_power_diff(&p, &t)?,
        per_band,
        duration_s: last.saturating_sub(first) as f64 * 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_examples() {
        assert_eq!(mae(&[100.0, 200.0], &[110.0, 190.0]).unwrap(), 10.0);
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let t = [100.0, 150.0, 200.0, 250.0];
        let alt: Vec<f64> = t.iter().enumerate().map(|(i, x)| x + if i % 2 == 0 { 10.0 } else { -10.0 }).collect();
        assert_eq!(avg_power_diff(&alt, &t).unwrap(), 0.0);
        assert_eq!(mae(&alt, &t).unwrap(), 10.0);
        let shifted: Vec<f64> = t.iter().map(|x| x + 5.0).collect();
        assert_eq!(avg_power_diff(&shifted, &t).unwrap(), 5.0);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(mae(&[1.0], &[1.0, 2.0]), Err(Error::Shape { .. })));
        assert!(avg_power_diff(&[], &[]).is_err());
    }

    fn pred(i: u64, w: f64) -> Prediction {
        Prediction {
            start_us: i * 700_000,
            end_us: (i + 1) * 700_000,
            predicted_power_w: w,
        }
    }

    #[test]
    fn report_bands() {
        let truth: Vec<_> = (0..10).map(|i| pred(i, 50.0 + 20.0 * i as f64)).collect();
        let preds: Vec<_> = truth.iter().map(|t| Prediction { predicted_power_w: t.predicted_power_w + 4.0, ..*t }).collect();
        let r = evaluate(&preds, &truth, 20.0, (0.0, 300.0)).unwrap();
        assert_eq!(r.samples, 10);
        assert!((r.mae_w - 4.0).abs() < 1e-12);
        assert_eq!(r.per_band.len(), 15);
        assert_eq!(r.per_band[0].mae_w, None);
        assert_eq!(r.per_band[2].count, 1);
        assert!((r.duration_s - 7.0).abs() < 1e-9);

        let mut bad = preds.clone();
        bad[3].end_us += 1;
        assert!(evaluate(&bad, &truth, 20.0, (0.0, 300.0)).is_err());
        assert!(evaluate(&preds[..9], &truth, 20.0, (0.0, 300.0)).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_permutation_invariant(
            pairs in prop::collection::vec((0.0f64..400.0, 0.0f64..400.0), 1..100),
            k in any::<prop::sample::Index>(),
        ) {
            let (p, t): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let m = mae(&p, &t).unwrap();
            prop_assert!(m >= 0.0);
            prop_assert!((m - mae(&t, &p).unwrap()).abs() < 1e-9);
            prop_assert!((avg_power_diff(&p, &t).unwrap() - avg_power_diff(&t, &p).unwrap()).abs() < 1e-9);
            let mut rot = pairs.clone();
            rot.rotate_left(k.index(pairs.len()));
            let (p2, t2): (Vec<f64>, Vec<f64>) = rot.into_iter().unzip();
            prop_assert!((m - mae(&p2, &t2).unwrap()).abs() < 1e-9);
            prop_assert!((avg_power_diff(&p, &t).unwrap() - avg_power_diff(&p2, &t2).unwrap()).abs() < 1e-9);
        }
    }
}
