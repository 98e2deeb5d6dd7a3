use pedalpower::synth::{generate_ride, generate_ride_traced, reference_meter, GroundTruth, GroundTruthStroke, ReferenceConfig, RideProfile};

#[test]
fn stroke_energy_matches_the_power_trace() {
    let (ride, trace) = generate_ride_traced(&RideProfile::constant(90.0, 200.0, 85.0), 4).unwrap();
    let first = ride.truth.strokes.first().unwrap().start_us;
    let last = ride.truth.strokes.last().unwrap().end_us;
    let from_strokes: f64 = ride
        .truth
        .strokes
        .iter()
        .map(|s| s.true_power_w * (s.end_us - s.start_us) as f64 * 1e-6)
        .sum();
    // rectangle rule on the trace over the same span
    let i0 = (first as f64 * 1e-6 / trace.dt_s).round() as usize;
    let i1 = (last as f64 * 1e-6 / trace.dt_s).round() as usize;
    let from_trace: f64 = trace.power_w[i0..i1].iter().sum::<f64>() * trace.dt_s;
    assert!((from_strokes - from_trace).abs() <= 0.02 * from_trace, "{from_strokes} J vs {from_trace} J");
}

#[test]
fn noise_free_power_hits_the_target() {
    for (p, rpm) in [(100.0, 70.0), (250.0, 100.0)] {
        let (_, trace) = generate_ride_traced(&RideProfile::constant(60.0, p, rpm).noise_free(), 1).unwrap();
        // skip the ramp in from rest
        let skip = (5.0 / trace.dt_s) as usize;
        let tail = &trace.power_w[skip..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((mean - p).abs() <= 0.01 * p, "{p} W target, {mean} W mean");
    }
}

#[test]
fn force_spectrum_peaks_at_the_cadence() {
    let rpm = 75.0;
    let ride = generate_ride(&RideProfile::constant(60.0, 180.0, rpm), 2).unwrap();
    let t0 = ride.samples[0].timestamp_us as f64 * 1e-6;
    let mean = ride.samples.iter().map(|s| s.force_n).sum::<f64>() / ride.samples.len() as f64;
    let power_at = |f: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for s in &ride.samples {
            let ph = 2.0 * std::f64::consts::PI * f * (s.timestamp_us as f64 * 1e-6 - t0);
            re += (s.force_n - mean) * ph.cos();
            im += (s.force_n - mean) * ph.sin();
        }
        re * re + im * im
    };
    let freqs: Vec<f64> = (20..=400).map(|k| k as f64 * 0.01).collect();
    let peak = freqs.iter().copied().max_by(|a, b| power_at(*a).total_cmp(&power_at(*b))).unwrap();
    assert!((peak - rpm / 60.0).abs() <= 0.02, "peak at {peak} Hz");
}

fn flat_truth(power: f64, seconds: u64) -> GroundTruth {
    GroundTruth {
        strokes: (0..seconds)
            .map(|i| GroundTruthStroke {
                start_us: i * 1_000_000,
                end_us: (i + 1) * 1_000_000,
                true_power_w: power,
                true_cadence_rpm: 60.0,
            })
            .collect(),
        ride_duration_us: seconds * 1_000_000,
    }
}

#[test]
fn reference_noise_has_the_configured_spread() {
    let r = reference_meter(
        &flat_truth(200.0, 2500),
        &ReferenceConfig {
            seed: 8,
            ..ReferenceConfig::default()
        },
    )
    .unwrap();
    assert_eq!(r.len(), 10_000);
    let n = r.len() as f64;
    let mean = r.iter().map(|s| s.power_w).sum::<f64>() / n;
    let std = (r.iter().map(|s| (s.power_w - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((std - 3.0).abs() <= 0.3, "std {std}");
    assert!((mean - 200.0).abs() < 0.2, "mean {mean}");
}

#[test]
fn quiet_reference_is_constant_within_each_stroke() {
    let ride = generate_ride(&RideProfile::constant(60.0, 150.0, 90.0), 6).unwrap();
    let quiet = ReferenceConfig {
        noise_pct: 0.0,
        ..ReferenceConfig::default()
    };
    for s in reference_meter(&ride.truth, &quiet).unwrap() {
        if let Some(stroke) = ride.truth.stroke_at(s.timestamp_us) {
            assert_eq!(s.power_w, stroke.true_power_w);
        }
    }
}
