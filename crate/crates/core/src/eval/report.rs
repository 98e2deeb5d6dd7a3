use std::fmt::Write as _;

use super::{EvalReport, LatencyReport, STAGES};

/// Per-stage latency of the original 84 MHz microcontroller build, in
/// milliseconds, in [`STAGES`] order, followed by the total. Shown for
/// context only; desktop numbers are not comparable.
pub const MCU_LATENCY_MS: [f64; 5] = [0.824, 3.333, 0.0031785, 0.169, 4.33];

/// Accuracy figures of the reference hardware prototype:
/// (test, samples, minutes, MAE W, average power difference W).
const PROTOTYPE_ACCURACY: [(&str, usize, f64, f64, Option<f64>); 3] = [
    ("roller trainer, int8", 1570, 20.0, 12.289, Some(1.735)),
    ("outdoor", 1850, 25.0, 15.321, Some(0.889)),
    ("generalization", 8150, 96.0, 15.947, None),
];

/// Accuracy table with one column per evaluated run, then the prototype's
/// figures for context. Output depends only on the inputs.
pub fn render_accuracy_table(runs: &[(&str, &EvalReport)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Accuracy");
    let _ = writeln!(s, "{:<28} {:>10} {:>10} {:>10} {:>12}", "run", "samples", "minutes", "MAE W", "avg diff W");
    for (name, r) in runs {
        let _ = writeln!(
            s,
            "{:<28} {:>10} {:>10.1} {:>10.3} {:>12.3}",
            name,
            r.samples,
            r.duration_s / 60.0,
            r.mae_w,
            r.avg_power_diff_w
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "prototype figures (context only)");
    for (name, n, min, mae, diff) in PROTOTYPE_ACCURACY {
        let diff = diff.map_or("-".to_owned(), |d| format!("{d:.3}"));
        let _ = writeln!(s, "{:<28} {:>10} {:>10.1} {:>10.3} {:>12}", name, n, min, mae, diff);
    }
    for (name, r) in runs {
        let _ = writeln!(s);
        let _ = writeln!(s, "per-band MAE, {name}");
        for b in &r.per_band {
            let mae = b.mae_w.map_or("-".to_owned(), |m| format!("{m:.3}"));
            let _ = writeln!(s, "{:>5}-{:<5} {:>8} {:>10}", b.lo_w, b.hi_w, b.count, mae);
        }
    }
    s
}

fn fmt_ns(ns: f64, resolution: f64) -> String {
    if ns <= resolution {
        format!("< {:.3} us", resolution / 1e3)
    } else {
        format!("{:.3} us", ns / 1e3)
    }
}

/// Four-stage latency table with the microcontroller figures alongside.
pub fn render_latency_table(r: &LatencyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Latency per stroke (host-scale: {})", r.host);
    let _ = writeln!(s, "{} strokes timed, timer floor {:.3} us", r.strokes, r.resolution_ns / 1e3);
    let _ = writeln!(s, "{:<26} {:>14} {:>14} {:>16}", "stage", "median", "p95", "MCU @ 84 MHz");
    for (i, st) in r.stages.iter().enumerate() {
        debug_assert_eq!(st.name, STAGES[i]);
        let _ = writeln!(
            s,
            "{:<26} {:>14} {:>14} {:>13.4} ms",
            st.name,
            fmt_ns(st.median_ns, r.resolution_ns),
            fmt_ns(st.p95_ns, r.resolution_ns),
            MCU_LATENCY_MS[i]
        );
    }
    let _ = writeln!(
        s,
        "{:<26} {:>14} {:>14} {:>13.4} ms",
        "total (sum of medians)",
        fmt_ns(r.stage_median_sum_ns(), r.resolution_ns),
        "",
        MCU_LATENCY_MS[4]
    );
    let _ = writeln!(
        s,
        "{:<26} {:>14} {:>14}",
        "end-to-end (measured)",
        fmt_ns(r.end_to_end.median_ns, r.resolution_ns),
        fmt_ns(r.end_to_end.p95_ns, r.resolution_ns)
    );
    let _ = writeln!(s, "post-processing = output dequantization + record assembly; serialization = CSV row formatting");
    let _ = writeln!(s, "MCU column is the embedded build, not a target for this host");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{BandMae, StageStats};

    #[test]
    fn latency_rows_in_stage_order() {
        let r = LatencyReport {
            stages: STAGES
                .iter()
                .map(|n| StageStats {
                    name: n.to_string(),
                    median_ns: 1500.0,
                    p95_ns: 2000.0,
                })
                .collect(),
            end_to_end: StageStats {
                name: "end-to-end".into(),
                median_ns: 6100.0,
                p95_ns: 7000.0,
            },
            strokes: 1000,
            resolution_ns: 20.0,
            host: "test".into(),
        };
        let t = render_latency_table(&r);
        let pos: Vec<usize> = STAGES.iter().map(|n| t.find(n).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(t.contains("6.000 us"));
        assert!(t.contains("4.3300 ms"));
    }

    #[test]
    fn below_resolution_marked() {
        assert_eq!(fmt_ns(10.0, 25.0), "< 0.025 us");
        assert_eq!(fmt_ns(2500.0, 25.0), "2.500 us");
    }

    #[test]
    fn accuracy_table_stable() {
        let r = EvalReport {
            samples: 10,
            mae_w: 4.0,
            avg_power_diff_w: 1.0,
            per_band: vec![BandMae {
                lo_w: 0.0,
                hi_w: 20.0,
                count: 0,
                mae_w: None,
            }],
            duration_s: 600.0,
        };
        let a = render_accuracy_table(&[("test", &r)]);
        assert_eq!(a, render_accuracy_table(&[("test", &r)]));
        assert!(a.contains("12.289"));
        assert!(a.lines().any(|l| l.split_whitespace().eq(["0-20", "0", "-"])));
    }
}
