//! Parallel-vs-sequential benchmarks for the pure batch paths, plus the
//! tile-shape sensitivity of the built-in workload.
//!
//! Run with `cargo bench -p kerntune`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kerntune::harness::{synthetic_cost, CostModel, DeviceSpec};
use kerntune::space::{ParamSpace, ParamSpec};
use kerntune::surrogate::{Mlp, RegressionData, Scaler, TrainConfig, TrainedSurrogate};
use kerntune::workload::{run_workload, WorkloadSpec, NUM_STAGES};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn full_space() -> ParamSpace {
    let stages = [
        "xi_limiter",
        "eta_limiter",
        "xi_flux",
        "eta_flux",
        "source_term",
        "right_hand_side",
        "update_solution",
    ];
    let mut specs = Vec::new();
    for s in stages {
        specs.push(ParamSpec::from_range(format!("{s}_gang"), 100, 1000, 100).unwrap());
        specs.push(ParamSpec::from_range(format!("{s}_vector"), 32, 384, 32).unwrap());
    }
    ParamSpace::new(specs, false).unwrap()
}

fn surrogate_for(inputs: usize) -> TrainedSurrogate {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = Array2::from_shape_fn((256, inputs), |_| rng.gen_range(0.0..1000.0));
    let y = Array1::from_shape_fn(256, |_| rng.gen_range(0.8..2.0));
    let _ = RegressionData::new(x.clone(), y.clone()).unwrap();
    TrainedSurrogate {
        model: Mlp::init(&[inputs, 64, 64, 1], 7).unwrap(),
        x_scaler: Scaler::fit(x.view()).unwrap(),
        y_scaler: Scaler::fit_1d(y.view()).unwrap(),
        train_config: TrainConfig::default(),
        r2_train: 0.0,
        r2_test: 0.0,
    }
}

fn bench_predict(c: &mut Criterion) {
    let space = full_space();
    let surrogate = surrogate_for(space.num_params());
    let mut group = c.benchmark_group("predict");
    for &rows in &[1_000usize, 10_000, 100_000] {
        let configs = space.sample(rows, 42).unwrap();
        let mut x = Array2::zeros((rows, space.num_params()));
        for (i, cfg) in configs.iter().enumerate() {
            for (j, v) in space.encode(cfg, None).unwrap().into_iter().enumerate() {
                x[[i, j]] = v;
            }
        }
        group.throughput(Throughput::Elements(rows as u64));
        group.bench_with_input(BenchmarkId::new("sequential", rows), &x, |b, x| {
            b.iter(|| surrogate.predict_seq(x.view()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", rows), &x, |b, x| {
            b.iter(|| surrogate.predict_par(x.view()).unwrap())
        });
    }
    group.finish();
}

fn bench_synthetic_eval(c: &mut Criterion) {
    let space = full_space();
    let model = CostModel::default_for_stages(NUM_STAGES);
    let device = DeviceSpec {
        name: "p100".into(),
        gflops: 4700.0,
        base_scale: 0.8,
    };
    let configs = space.sample(50_000, 3).unwrap();
    let mut group = c.benchmark_group("synthetic_eval");
    group.throughput(Throughput::Elements(configs.len() as u64));
    group.bench_function("sequential", |b| {
        b.iter(|| {
            configs
                .iter()
                .map(|cfg| synthetic_cost(cfg, &device, &model).unwrap())
                .sum::<f64>()
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            configs
                .par_iter()
                .map(|cfg| synthetic_cost(cfg, &device, &model).unwrap())
                .sum::<f64>()
        })
    });
    group.finish();
}

fn bench_workload_tiles(c: &mut Criterion) {
    let mut group = c.benchmark_group("workload_tiles");
    group.sample_size(20);
    for (label, tiles) in [
        ("1x1", [(1, 1); NUM_STAGES]),
        ("8x32", [(8, 32); NUM_STAGES]),
        ("64x4", [(64, 4); NUM_STAGES]),
    ] {
        let spec = WorkloadSpec {
            nx: 128,
            ny: 128,
            steps: 1,
            tiles,
            ..Default::default()
        };
        group.bench_function(label, |b| b.iter(|| run_workload(&spec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_predict, bench_synthetic_eval, bench_workload_tiles);
criterion_main!(benches);
