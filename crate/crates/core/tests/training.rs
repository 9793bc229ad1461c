use qwalk_core::lackadaisical::{evolve_reduced, initial_reduced_state, optimal_steps, BasisClass, GraphParams};
use qwalk_core::rng::{stream_rng, STREAM_LABEL, STREAM_WHEEL};
use qwalk_core::sampling::measure_cascade;
use qwalk_core::search_space::{MarkedSet, Window};
use qwalk_core::trainer::{run_batch, run_training, TrainingConfig};

#[test]
fn fixture_run_is_reproducible() {
    let cfg = TrainingConfig::default();
    let a = run_training(&cfg).unwrap();
    assert_eq!(a, run_training(&cfg).unwrap());
    assert_eq!(a.k, 160);
    assert_eq!(a.steps, optimal_steps(&GraphParams::new(262_144, 160, 1).unwrap()));
    let json = serde_json::to_string(&a).unwrap();
    let back: qwalk_core::trainer::TrainingRun = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a);
}

#[test]
fn batch_frequencies_follow_the_evolved_state() {
    let batch = run_batch(&TrainingConfig::default(), 10_000).unwrap();
    assert!(batch.failures.is_empty());
    assert!(batch.tv_distance() < 0.02, "tv = {}", batch.tv_distance());
    let p = batch.expected_success();
    let sd = (p * (1.0 - p) / 10_000.0).sqrt();
    assert!((batch.success_rate() - p).abs() <= 3.0 * sd + 1e-4, "rate {} vs {p}", batch.success_rate());
    for r in &batch.runs {
        if r.class.is_success() {
            assert!(r.solved);
            assert_eq!(r.verification.epochs, 1);
        }
    }
}

#[test]
fn schedule_falls_through_to_a_populated_window() {
    let cfg = TrainingConfig { window_schedule: vec![4, 512], dp_schedule: vec![0.05], ..TrainingConfig::default() };
    let run = run_training(&cfg).unwrap();
    assert_eq!(run.window.width(), 512);
    assert_eq!(run.k, 160);
}

/// Class frequencies of repeated measurements of the N = 512², k = 52 walk,
/// against the reported 99.96 / 0.03 / 0.01 / 0.00 percent.
#[test]
fn measurement_statistics_for_52_solutions() {
    let win = Window::square(512, 0.05).unwrap();
    let marked = MarkedSet::from_positions(win.labels().step_by(5000).take(52).collect());
    assert_eq!(marked.k(), 52);
    let p = GraphParams::new(win.vertex_count(), 52, 1).unwrap();
    let s = evolve_reduced(&initial_reduced_state::<f64>(&p), optimal_steps(&p));
    let mut counts = [0u32; 4];
    let mut hits = 0;
    let n = 10_000;
    for i in 0..n {
        let m = measure_cascade(&s, &marked, &win, &mut stream_rng(i, STREAM_WHEEL), &mut stream_rng(i, STREAM_LABEL))
            .unwrap();
        counts[m.class.index()] += 1;
        assert_eq!(m.class.is_success(), marked.contains(m.label));
        hits += u32::from(marked.contains(m.label));
    }
    let reported = [99.96, 0.03, 0.01, 0.00];
    for c in BasisClass::ALL {
        let pct = 100.0 * f64::from(counts[c.index()]) / f64::from(n as u32);
        assert!((pct - reported[c.index()]).abs() <= 1.0, "{c}: {pct}");
    }
    assert!(f64::from(hits) / f64::from(n as u32) > 0.99);
}
