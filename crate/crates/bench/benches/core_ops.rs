use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use resvar::bayes::posterior_log_odds;
use resvar::estimator::dicker_estimate;
use resvar::model::{sample_beta_spherical, sample_design, sample_response, GaussianLinearModel};
use resvar::seed::SeedSpec;
use resvar::sim::{run_scenario, table1_hypothesis, ScenarioConfig};
use resvar::{Dataset, TwoPointHypothesis};

fn fixture_dataset(n: usize, p: usize) -> Dataset {
    let seed = SeedSpec::new(1, "bench/data", 0);
    let design = sample_design(n, p, &seed).unwrap();
    let beta = sample_beta_spherical(p, 1.0, &seed.child("beta")).unwrap();
    let model = GaussianLinearModel::new(beta, 1.0).unwrap();
    sample_response(&design, &model, &seed.child("eps")).unwrap()
}

fn bench_sample_design(c: &mut Criterion) {
    let seed = SeedSpec::new(2, "bench/design", 0);
    c.bench_function("sample_design_200x200", |b| {
        b.iter(|| sample_design(black_box(200), black_box(200), &seed).unwrap())
    });
}

fn bench_dicker_estimate(c: &mut Criterion) {
    let data = fixture_dataset(200, 200);
    c.bench_function("dicker_estimate_200x200", |b| {
        b.iter(|| dicker_estimate(black_box(&data)))
    });
}

fn bench_posterior_log_odds(c: &mut Criterion) {
    let hyp = TwoPointHypothesis::new(1.0, 1.0, 0.5, 1.5).unwrap();
    let y: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.37).sin()).collect();
    c.bench_function("posterior_log_odds_n1000", |b| {
        b.iter(|| posterior_log_odds(black_box(&y), &hyp).unwrap())
    });
}

fn bench_run_scenario(c: &mut Criterion) {
    let config = ScenarioConfig::new(100, 100, table1_hypothesis(0), 3, "bench/scenario")
        .with_replications(200);
    c.bench_function("run_scenario_n100_r200", |b| {
        b.iter(|| run_scenario(black_box(&config)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_sample_design,
    bench_dicker_estimate,
    bench_posterior_log_odds,
    bench_run_scenario
);
criterion_main!(benches);
