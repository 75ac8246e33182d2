use uniprep::{generate, simulate};

#[test]
fn twenty_seven_state_histogram_is_flat() {
    let state = simulate(&generate(27).unwrap()).unwrap();
    let p: f64 = 1.0 / 27.0;
    let mean = 10_000.0 * p;
    let sigma = (10_000.0 * p * (1.0 - p)).sqrt();
    assert!((mean - 370.370).abs() < 0.001 && (sigma - 18.885).abs() < 0.001);

    let hist = state.sample(10_000, 1);
    assert_eq!(hist.counts.values().sum::<u64>(), 10_000);
    for k in 0..27 {
        let dev = (hist.count(k) as f64 - mean).abs();
        assert!(dev <= 5.0 * sigma, "state {k}: {}", hist.count(k));
    }
    assert_eq!(hist.count_outside(27), 0);
    assert!(hist.chi_square_uniform(27).p_value > 0.001);
}

#[test]
fn small_run_conserves_shots() {
    let hist = simulate(&generate(4).unwrap()).unwrap().sample(8, 1);
    assert_eq!(hist.counts.values().sum::<u64>(), 8);
    assert!(hist.counts.keys().all(|&k| k < 4));
}

#[test]
fn chi_square_of_perfect_counts_is_zero() {
    let hist = uniprep::Histogram {
        shots: 30,
        counts: (0..3).map(|k| (k, 10)).collect(),
    };
    let test = hist.chi_square_uniform(3);
    assert_eq!(test.statistic, 0.0);
    assert_eq!(test.degrees_of_freedom, 2);
    assert!((test.p_value - 1.0).abs() < 1e-12);
}
