use pgee::embed;
use pgee::eval::bench::linear_fit;
use pgee::models::{sample_sbm_sparse, scaled_sbm_preset};
use pgee::Sample;
use std::time::Instant;

// Mean seconds per call over enough calls to fill `budget` seconds.
fn per_call(s: &Sample, budget: f64) -> f64 {
    let t = Instant::now();
    let mut calls = 0;
    while calls == 0 || t.elapsed().as_secs_f64() < budget {
        std::hint::black_box(embed(&s.graph, &s.labels).unwrap());
        calls += 1;
    }
    t.elapsed().as_secs_f64() / calls as f64
}

#[test]
fn embed_time_is_linear_in_edges() {
    let (n, k) = (10_000, 20);
    let samples: Vec<Sample> = [1e5, 2e5, 4e5, 8e5]
        .iter()
        .enumerate()
        .map(|(i, &target)| {
            sample_sbm_sparse(&scaled_sbm_preset(n, k, target).unwrap(), i as u64).unwrap()
        })
        .collect();
    // round-robin so a slow stretch of the machine hits every point alike
    let mut best = vec![f64::INFINITY; samples.len()];
    for _ in 0..7 {
        for (b, s) in best.iter_mut().zip(&samples) {
            *b = b.min(per_call(s, 0.03));
        }
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.graph.s() as f64).collect();
    let fit = linear_fit(&xs, &best).unwrap();
    println!("edges {xs:?} seconds {best:?} r2 {:.4}", fit.r_squared);
    assert!(fit.r_squared >= 0.98, "R^2 = {}", fit.r_squared);
    assert!(fit.slope > 0.0);
}
