use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmSpec, CostKind, Criterion, ExperimentConfig};
use super::cv::{checked_folds, criterion_for, cv_select, fit, grid_for, GridPoint, RunData};
use super::report::Report;
use super::seed::{derive_seed, COSTS, FOLDS, SPLIT};
use crate::costgen;
use crate::dataset::{
    fit_scaler, stratified_split_indices, ClassWeights, CostMatrix, CostVector, FeatureVector, Label,
    LabeledDataset,
};
use crate::error::{Error, Result};
use crate::eval::{self, Aggregate, RunResult};
use crate::io;
use crate::kernel::{Gram, DEFAULT_CACHE_BYTES};
use crate::par::{self, ExecMode};
use crate::reductions::{Algorithm, TrainOptions};

/// The test split of one run.
#[derive(Debug, Clone)]
pub struct TestData {
    pub features: Vec<FeatureVector>,
    pub labels: Vec<Label>,
    pub costs: Vec<CostVector>,
}

/// What one algorithm did in one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmRun {
    pub point: GridPoint,
    pub cv_score: f64,
    pub result: RunResult,
}

/// Everything a run needs: the training split as a [`RunData`], its CV
/// folds, and the test split.
pub struct PreparedRun {
    pub train: RunData,
    pub folds: Vec<Vec<usize>>,
    pub test: TestData,
}

/// The class-dependent matrix for `run`, before emphasis.
fn base_matrix(config: &ExperimentConfig, counts: &[usize], fixed: Option<&CostMatrix>, run: usize) -> Result<CostMatrix> {
    let stream = if config.cost.redraw { run as u64 } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, stream, COSTS));
    let m = match config.cost.source {
        CostKind::Matrix => fixed.cloned().ok_or_else(|| Error::Config("cost matrix not loaded".into()))?,
        CostKind::Inconsistent => costgen::gen_inconsistent(counts, &mut rng)?,
        CostKind::Consistent => costgen::gen_consistent(counts, &mut rng)?.0,
        CostKind::Naive => CostMatrix::naive(counts.len()),
    };
    if config.cost.balance_rows {
        costgen::balance_rows(&m, counts)
    } else {
        Ok(m)
    }
}

fn attach(matrix: &CostMatrix, labels: &[Label]) -> Result<Vec<CostVector>> {
    labels.iter().map(|&y| matrix.cost_vector(y)).collect()
}

/// Split, scale and cost one run. `emphasis` multiplies the emphasized
/// column.
pub fn prepare_run(
    config: &ExperimentConfig,
    data: &LabeledDataset,
    fixed: Option<&CostMatrix>,
    run: usize,
    emphasis: Option<f64>,
    mode: ExecMode,
) -> Result<PreparedRun> {
    let classes = data.classes;
    let counts = data.class_counts();
    if counts.contains(&0) {
        return Err(Error::DegenerateProblem("a class has no examples in the dataset".into()));
    }
    let (train_idx, test_idx) =
        stratified_split_indices(&data.labels, classes, config.split, derive_seed(config.seed, run as u64, SPLIT))?;
    if test_idx.is_empty() {
        return Err(Error::invalid("the test split is empty"));
    }
    let raw_train: Vec<FeatureVector> = train_idx.iter().map(|&i| data.features[i].clone()).collect();
    let scaler = fit_scaler(&raw_train)?;
    let train_features = scaler.apply_all(&raw_train);
    let test_features: Vec<FeatureVector> = test_idx.iter().map(|&i| scaler.apply(&data.features[i])).collect();
    let train_labels: Vec<Label> = train_idx.iter().map(|&i| data.labels[i]).collect();
    let test_labels: Vec<Label> = test_idx.iter().map(|&i| data.labels[i]).collect();

    let mut matrix = base_matrix(config, &counts, fixed, run)?;
    if let Some(u) = emphasis {
        let column = match config.cost.emphasize_class {
            Some(k) => Label::new(k, classes)?,
            None => costgen::least_frequent(&counts),
        };
        matrix = costgen::emphasize_column(&matrix, column, u)?;
    }
    let normalized = costgen::normalize_matrix_sum(&matrix)?;
    let weights = config
        .weighted_error
        .then(|| costgen::balanced_class_weights(&counts))
        .transpose()?;

    let train_rows: Vec<usize> = (0..train_labels.len()).collect();
    let folds = checked_folds(
        &train_rows,
        &train_labels,
        classes,
        config.folds,
        derive_seed(config.seed, run as u64, FOLDS),
    )?;
    let train = RunData {
        gram: Gram::with_options(config.kernel, train_features, DEFAULT_CACHE_BYTES, mode),
        costs: attach(&matrix, &train_labels)?,
        normalized_costs: attach(&normalized, &train_labels)?,
        labels: train_labels,
        matrix: matrix.clone(),
        weights,
        classes,
    };
    let test = TestData {
        costs: attach(&matrix, &test_labels)?,
        features: test_features,
        labels: test_labels,
    };
    Ok(PreparedRun { train, folds, test })
}

/// Test-set scores of `predictions`. G-mean is computed only with class
/// weights.
pub fn score(predictions: &[Label], test: &TestData, classes: usize, weights: Option<&ClassWeights>) -> Result<RunResult> {
    let test_error = eval::error_rate(predictions, &test.labels)?;
    Ok(RunResult {
        test_cost: eval::mean_cost(predictions, &test.costs)?,
        test_error,
        weighted_error: match weights {
            Some(w) => eval::weighted_error(predictions, &test.labels, w)?,
            None => test_error,
        },
        g_mean: weights.map(|_| eval::g_mean(predictions, &test.labels, classes)).transpose()?,
    })
}

/// Select, retrain on the whole training split and score on the test split.
pub fn run_algorithm(
    spec: AlgorithmSpec,
    prepared: &PreparedRun,
    grid: &[GridPoint],
    criterion: Criterion,
    options: &TrainOptions,
) -> Result<AlgorithmRun> {
    let data = &prepared.train;
    let selection = cv_select(spec, data, &prepared.folds, grid, criterion, options)?;
    let model = fit(spec, data, &data.all_rows(), selection.point, options)?;
    let predictions = model.predict_all(&prepared.test.features, options.mode);
    Ok(AlgorithmRun {
        point: selection.point,
        cv_score: selection.score,
        result: score(&predictions, &prepared.test, data.classes, data.weights.as_ref())?,
    })
}

fn load_matrix(config: &ExperimentConfig, classes: usize) -> Result<Option<CostMatrix>> {
    if config.cost.source != CostKind::Matrix {
        return Ok(None);
    }
    let path = config.cost.matrix.as_ref().ok_or_else(|| Error::Config("missing matrix path".into()))?;
    let m = io::read_cost_matrix(path)?;
    if m.classes() != classes {
        return Err(Error::InvalidCostMatrix(format!(
            "{} has {} classes, the dataset has {classes}",
            path.display(),
            m.classes()
        )));
    }
    Ok(Some(m))
}

/// Per-run outcomes, indexed `[run][algorithm]`.
pub fn run_all(
    config: &ExperimentConfig,
    data: &LabeledDataset,
    emphasis: Option<f64>,
    mode: ExecMode,
) -> Result<Vec<Vec<AlgorithmRun>>> {
    config.validate()?;
    let fixed = load_matrix(config, data.classes)?;
    let options = TrainOptions { mode, ..TrainOptions::default() };
    par::map_range(mode, config.runs, |run| {
        let prepared = prepare_run(config, data, fixed.as_ref(), run, emphasis, mode)?;
        config
            .algorithms
            .iter()
            .map(|&spec| {
                let grid = grid_for(spec, &config.lambda_grid, &config.alpha_grid);
                run_algorithm(spec, &prepared, &grid, criterion_for(spec, config), &options)
            })
            .collect()
    })
    .into_iter()
    .collect()
}

/// The full protocol on the configured dataset file.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let data = io::read_dataset(&config.dataset)?;
    run_experiment_on(config, &data, ExecMode::default())
}

/// The full protocol on `data`. With several emphasis factors every factor
/// is a separate experiment and metric names carry an `@u=` suffix.
pub fn run_experiment_on(config: &ExperimentConfig, data: &LabeledDataset, mode: ExecMode) -> Result<Report> {
    let names: Vec<String> = config.algorithms.iter().map(|a| a.name()).collect();
    let mut report = Report::new(names, config.runs, config.t_test_level);
    let factors: Vec<Option<f64>> = if config.cost.emphasize.is_empty() {
        vec![None]
    } else {
        config.cost.emphasize.iter().copied().map(Some).collect()
    };
    let several = factors.len() > 1;
    for u in factors {
        let runs = run_all(config, data, u, mode)?;
        let suffix = match (several, u) {
            (true, Some(u)) => format!("@u={u}"),
            _ => String::new(),
        };
        report.add_runs(&runs, &suffix, config.weighted_error, u)?;
    }
    report.finish()?;
    Ok(report)
}

/// One point of a test cost / test error trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub cost: Aggregate,
    pub error: Aggregate,
}

/// For each alpha on the grid, a soft algorithm with lambda chosen by CV
/// cost at that alpha, scored on the test splits of every run.
pub fn sweep_alpha(config: &ExperimentConfig, data: &LabeledDataset, algorithm: Algorithm, mode: ExecMode) -> Result<Vec<AlphaPoint>> {
    if !algorithm.is_cost_sensitive() {
        return Err(Error::invalid(format!("{algorithm} has no soft variant")));
    }
    let mut sweep_config = config.clone();
    sweep_config.algorithms = vec![AlgorithmSpec::soft(algorithm)];
    sweep_config.validate()?;
    let fixed = load_matrix(&sweep_config, data.classes)?;
    let spec = AlgorithmSpec::soft(algorithm);
    let options = TrainOptions { mode, ..TrainOptions::default() };
    let emphasis = config.cost.emphasize.first().copied();
    let per_run: Vec<Vec<RunResult>> = par::map_range(mode, config.runs, |run| {
        let prepared = prepare_run(&sweep_config, data, fixed.as_ref(), run, emphasis, mode)?;
        config
            .alpha_grid
            .iter()
            .map(|&a| {
                let grid = grid_for(spec, &config.lambda_grid, &[a]);
                run_algorithm(spec, &prepared, &grid, Criterion::Cost, &options).map(|r| r.result)
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    config
        .alpha_grid
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let cost: Vec<f64> = per_run.iter().map(|r| r[i].test_cost).collect();
            let error: Vec<f64> = per_run.iter().map(|r| r[i].test_error).collect();
            Ok(AlphaPoint { alpha, cost: eval::aggregate(&cost)?, error: eval::aggregate(&error)? })
        })
        .collect()
}
