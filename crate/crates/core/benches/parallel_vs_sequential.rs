use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use costblend::harness::cv::cv_select;
use costblend::harness::{grid_for, prepare_run, AlgorithmSpec, CostKind, Criterion as Select, ExperimentConfig};
use costblend::kernel::{Gram, Kernel};
use costblend::par::ExecMode;
use costblend::reductions::{train, Algorithm, TrainOptions, TrainSet};
use costblend::synth;

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn bench_ovo(c: &mut Criterion) {
    let data = synth::separated_clusters(&[60; 6], 1.5, &mut ChaCha8Rng::seed_from_u64(1));
    let ds = data.with_regular_costs();
    let gram = Gram::new(Kernel::Perceptron, ds.features.clone());
    let rows: Vec<usize> = (0..ds.len()).collect();
    let set = TrainSet { gram: &gram, rows: &rows, labels: &ds.labels, costs: &ds.costs, classes: ds.classes };
    let mut group = c.benchmark_group("train_ovo_6_classes");
    for mode in MODES {
        let options = TrainOptions { mode, ..TrainOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &options, |b, o| {
            b.iter(|| train(Algorithm::Ovo, &set, None, None, 1.0, o).unwrap())
        });
    }
    group.finish();
}

fn bench_cv(c: &mut Criterion) {
    let data = synth::gaussian_classes(
        &synth::circle_centers(3),
        &[1.2; 3],
        &[50, 50, 50],
        &mut ChaCha8Rng::seed_from_u64(2),
    );
    let spec = AlgorithmSpec::soft(Algorithm::Osr);
    let mut config = ExperimentConfig::new("bench.txt", vec![spec]);
    config.cost.source = CostKind::Inconsistent;
    config.alpha_grid = vec![0.0, 0.5, 1.0];
    let grid = grid_for(spec, &config.lambda_grid, &config.alpha_grid);
    let mut group = c.benchmark_group("cv_select_soft_osr");
    group.sample_size(10);
    for mode in MODES {
        let prepared = prepare_run(&config, &data, None, 0, None, mode).unwrap();
        let options = TrainOptions { mode, ..TrainOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &options, |b, o| {
            b.iter(|| cv_select(spec, &prepared.train, &prepared.folds, &grid, Select::Cost, o).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ovo, bench_cv);
criterion_main!(benches);
