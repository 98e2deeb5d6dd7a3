use crate::scalar::Real;

/// Local maxima of `x` with prominence at least `min_prominence` and
/// pairwise spacing at least `min_distance` samples.
///
/// Flat tops count as a single maximum at the plateau midpoint. When two
/// candidates are closer than `min_distance`, the higher one wins and ties go
/// to the earlier index.
pub fn detect_peaks<T: Real>(x: &[T], min_prominence: T, min_distance: usize) -> Vec<usize> {
    detect_peaks_windowed(x, min_prominence, min_distance, None)
}

/// [`detect_peaks`] with the prominence base search limited to `reach`
/// samples on each side of a candidate. The streaming segmenter uses this
/// form so a decision only depends on a bounded neighborhood.
pub fn detect_peaks_windowed<T: Real>(
    x: &[T],
    min_prominence: T,
    min_distance: usize,
    reach: Option<usize>,
) -> Vec<usize> {
    let candidates: Vec<usize> = local_maxima(x)
        .into_iter()
        .filter(|&p| prominence(x, p, reach) >= min_prominence)
        .collect();
    select_by_distance(x, candidates, min_distance.max(1))
}

fn local_maxima<T: Real>(x: &[T]) -> Vec<usize> {
    let n = x.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let mut i = 1;
    while i < n - 1 {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < n - 1 && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                out.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Height of the peak above the higher of its two bases, each base being the
/// minimum between the peak and the nearest strictly higher sample (or the
/// window / sequence edge).
fn prominence<T: Real>(x: &[T], peak: usize, reach: Option<usize>) -> T {
    let lo = reach.map_or(0, |r| peak.saturating_sub(r));
    let hi = reach.map_or(x.len() - 1, |r| (peak + r).min(x.len() - 1));
    let h = x[peak];

    let mut left_min = h;
    let mut i = peak;
    while i > lo {
        i -= 1;
        if x[i] > h {
            break;
        }
        left_min = left_min.min(x[i]);
    }

    let mut right_min = h;
    let mut j = peak;
    while j < hi {
        j += 1;
        if x[j] > h {
            break;
        }
        right_min = right_min.min(x[j]);
    }
    h - left_min.max(right_min)
}

fn select_by_distance<T: Real>(x: &[T], peaks: Vec<usize>, distance: usize) -> Vec<usize> {
    if distance <= 1 || peaks.len() < 2 {
        return peaks;
    }
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    // Highest first; equal heights keep index order because the sort is stable.
    order.sort_by(|&a, &b| x[peaks[b]].partial_cmp(&x[peaks[a]]).unwrap_or(std::cmp::Ordering::Equal));
    let mut keep = vec![true; peaks.len()];
    for &k in &order {
        if !keep[k] {
            continue;
        }
        let p = peaks[k];
        let mut j = k;
        while j > 0 && p - peaks[j - 1] < distance {
            j -= 1;
            keep[j] = false;
        }
        let mut j = k + 1;
        while j < peaks.len() && peaks[j] - p < distance {
            keep[j] = false;
            j += 1;
        }
    }
    peaks.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

/// Sub-sample offset of the vertex of the parabola through `x[i-1..=i+1]`,
/// clamped to `[-0.5, 0.5]`. Returns 0 at the sequence edges.
pub fn refine_peak<T: Real>(x: &[T], i: usize) -> f64 {
    if i == 0 || i + 1 >= x.len() {
        return 0.0;
    }
    let (a, b, c) = (x[i - 1].as_f64(), x[i].as_f64(), x[i + 1].as_f64());
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn monotone_sequence_has_no_peaks() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(detect_peaks(&x, 0.0, 1).is_empty());
        assert!(detect_peaks(&[1.0, 2.0], 0.0, 1).is_empty());
    }

    #[test]
    fn twin_peaks() {
        assert_eq!(detect_peaks(&[0.0, 5.0, 0.0, 5.0, 0.0], 1.0, 1), vec![1, 3]);
    }

    #[test]
    fn distance_conflict_higher_wins_tie_goes_early() {
        let x = [0.0, 5.0, 0.0, 6.0, 0.0, 0.0, 0.0];
        assert_eq!(detect_peaks(&x, 1.0, 3), vec![3]);
        let x = [0.0, 5.0, 0.0, 5.0, 0.0];
        assert_eq!(detect_peaks(&x, 1.0, 3), vec![1]);
    }

    #[test]
    fn prominence_filters_ripples() {
        // A ripple of height 1 sitting on the flank of a big peak.
        let x = [0.0, 3.0, 2.0, 10.0, 0.0];
        assert_eq!(detect_peaks(&x, 2.0, 1), vec![3]);
        assert_eq!(detect_peaks(&x, 0.5, 1), vec![1, 3]);
    }

    #[test]
    fn plateau_reports_midpoint() {
        let x = [0.0, 2.0, 2.0, 2.0, 0.0];
        assert_eq!(detect_peaks(&x, 1.0, 1), vec![2]);
    }

    #[test]
    fn parabola_vertex() {
        // samples of -(t - 2.3)^2 at t = 1, 2, 3
        let f = |t: f64| -(t - 2.3) * (t - 2.3);
        let x = [f(1.0), f(2.0), f(3.0)];
        assert!((refine_peak(&x, 1) - 0.3).abs() < 1e-12);
        assert_eq!(refine_peak(&[0.0, 5.0, 0.0], 1), 0.0);
    }

    proptest! {
        #[test]
        fn indices_increase_with_min_gap(
            x in proptest::collection::vec(-100.0f64..100.0, 3..200),
            prom in 0.0f64..50.0,
            dist in 1usize..20,
        ) {
            let p = detect_peaks(&x, prom, dist);
            for w in p.windows(2) {
                prop_assert!(w[1] > w[0]);
                prop_assert!(w[1] - w[0] >= dist);
            }
            for &i in &p {
                prop_assert!(i > 0 && i < x.len() - 1);
                prop_assert!(x[i] >= x[i - 1] && x[i] >= x[i + 1]);
            }
        }
    }
}
