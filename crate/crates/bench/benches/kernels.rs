use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpsco_bench::hinge_task;
use dpsco_core::accountant::{self, AccountantConstants, ApproxDpBudget};
use dpsco_core::acsa::{acsa_run, AcsaParams, StochasticOracle};
use dpsco_core::smoothing::{SmoothedOracle, SmoothedOracleConfig};
use dpsco_core::{QuadraticOffset, Streams};

fn oracle_query(c: &mut Criterion) {
    let mut group = c.benchmark_group("smoothed_oracle_query");
    for &(d, b) in &[(16usize, 64usize), (64, 64), (64, 512)] {
        let task = hinge_task(4096, d);
        let cfg = SmoothedOracleConfig {
            radius_r: 0.05,
            batch_b: b,
            noise_sigma: 0.1,
            data: task.data.view(),
            family: &task.family,
            domain: &task.domain,
        };
        let mut oracle = SmoothedOracle::new(cfg, Streams::new(1)).unwrap();
        let w = vec![0.01; d];
        let mut out = vec![0.0; d];
        group.bench_with_input(BenchmarkId::from_parameter(format!("d{d}_b{b}")), &(), |bench, _| {
            bench.iter(|| oracle.query(black_box(&w), &mut out).unwrap())
        });
    }
    group.finish();
}

fn acsa_steps(c: &mut Criterion) {
    let d = 64;
    let task = hinge_task(4096, d);
    let cfg = SmoothedOracleConfig {
        radius_r: 0.05,
        batch_b: 64,
        noise_sigma: 0.1,
        data: task.data.view(),
        family: &task.family,
        domain: &task.domain,
    };
    let h = QuadraticOffset::zero(d);
    c.bench_function("acsa_100_steps_d64_b64", |bench| {
        bench.iter(|| {
            let mut oracle = SmoothedOracle::new(cfg, Streams::new(2)).unwrap();
            let params = AcsaParams { steps: 100, mu: 0.0, l: 20.0 };
            acsa_run(&mut oracle, &params, &task.omega0, &h, &task.domain).unwrap()
        })
    });
}

fn calibration(c: &mut Criterion) {
    let budget = ApproxDpBudget::new(0.5, 1e-5).unwrap();
    let consts = AccountantConstants::default();
    c.bench_function("calibrate_sigma", |bench| {
        bench.iter(|| accountant::calibrate(1.0, black_box(200), black_box(2000), 4096, &budget, &consts).unwrap())
    });
}

criterion_group!(benches, oracle_query, acsa_steps, calibration);
criterion_main!(benches);
