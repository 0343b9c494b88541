use debruijn::rational::int;
use debruijn::simulator::{
    exact_map, gillespie_step, simulate_many, simulate_measure, simulate_measure_stream,
    simulate_trajectory, stream_rng, total_variation, EmpiricalMeasure,
};
use debruijn::stationary::stationary_vector;
use debruijn::{RateSystem, Word};

fn r0() -> RateSystem {
    let v = [[1, 2], [3, 5]];
    RateSystem::new(2, 2, |a, k| int(v[a - 1][k - 1])).unwrap()
}

#[test]
fn seeded_runs_are_reproducible() {
    let r = r0();
    let a = simulate_measure(&r, 7, 500.0, 10.0).unwrap();
    let b = simulate_measure(&r, 7, 500.0, 10.0).unwrap();
    assert_eq!(a, b);
    let c = simulate_measure_stream(&r, 7, 1, 500.0, 10.0).unwrap();
    assert_ne!(a, c);
    assert!((a.total_time() - 490.0).abs() < 1e-9);
}

#[test]
fn trajectories_follow_graph_edges() {
    let r = r0();
    let t = simulate_trajectory(&r, 3, 200.0).unwrap();
    assert!(!t.jumps.is_empty());
    let mut current = t.initial.clone();
    let mut elapsed = 0.0;
    for (dwell, next) in &t.jumps {
        assert!(*dwell > 0.0);
        assert_ne!(next, &current, "self-loops are never taken");
        assert!((1..=2).any(|a| current.shift_append(a) == *next));
        elapsed += dwell;
        current = next.clone();
    }
    assert!(elapsed <= t.total_time);
}

#[test]
fn jump_probabilities_and_dwell_mean() {
    let r = r0();
    let from = Word::parse(2, "12").unwrap();
    let to_21 = Word::parse(2, "21").unwrap();
    let mut rng = stream_rng(11, 0);
    let samples = 40_000;
    let mut hits = 0usize;
    let mut dwell = 0.0;
    for _ in 0..samples {
        let step = gillespie_step(&from, &r, &mut rng).unwrap();
        dwell += step.dwell;
        if step.next == to_21 {
            hits += 1;
        }
    }
    // Exits of 12: 21 at rate 1, 22 at rate 5.
    let p = 1.0 / 6.0;
    let sd = (p * (1.0 - p) / samples as f64).sqrt();
    assert!((hits as f64 / samples as f64 - p).abs() < 5.0 * sd);
    let mean = dwell / samples as f64;
    let mean_sd = (1.0 / 6.0) / (samples as f64).sqrt();
    assert!((mean - 1.0 / 6.0).abs() < 5.0 * mean_sd);
}

#[test]
fn merging_adds_occupation() {
    let r = r0();
    let runs: Vec<EmpiricalMeasure> = (0..3)
        .map(|k| simulate_measure_stream(&r, 5, k, 300.0, 0.0).unwrap())
        .collect();
    let mut left = runs[0].clone();
    left.merge(&runs[1]).unwrap();
    left.merge(&runs[2]).unwrap();
    let mut right = runs[1].clone();
    right.merge(&runs[2]).unwrap();
    let mut outer = runs[0].clone();
    outer.merge(&right).unwrap();
    for (a, b) in left.occupation().iter().zip(outer.occupation()) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((left.total_time() - 900.0).abs() < 1e-9);

    let combined = simulate_many(&r, 5, 300.0, 0.0, 3).unwrap();
    for (a, b) in combined.occupation().iter().zip(left.occupation()) {
        assert!((a - b).abs() < 1e-9);
    }

    let other = EmpiricalMeasure::empty(3, 2);
    assert!(left.merge(&other).is_err());
}

#[test]
fn concurrent_estimate_is_close_to_exact() {
    let r = r0();
    let exact = exact_map(&stationary_vector(&r));
    let measure = simulate_many(&r, 21, 25_000.0, 100.0, 4).unwrap();
    let tv = total_variation(&measure.to_map(), &exact).unwrap();
    assert!(tv < 0.02, "tv = {tv}");
}

#[test]
fn zero_trajectories_rejected() {
    assert!(simulate_many(&r0(), 1, 10.0, 0.0, 0).is_err());
}
