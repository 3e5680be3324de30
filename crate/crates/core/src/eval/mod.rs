//! Test-set criteria, aggregation over runs and the paired one-tailed
//! t-test used to compare algorithms.

mod stats;

use serde::{Deserialize, Serialize};

pub use stats::{
    ln_gamma, paired_t_one_tailed, regularized_incomplete_beta, student_t_cdf, student_t_quantile, t_critical,
    Verdict,
};

use crate::dataset::{ClassWeights, CostVector, Label};
use crate::error::{Error, Result};

/// Test-set scores of one run. `g_mean` is absent when not requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub test_cost: f64,
    pub test_error: f64,
    pub weighted_error: f64,
    pub g_mean: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("{a} predictions for {b} examples")));
    }
    if a == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

/// Average of `c_n[prediction_n]`.
pub fn mean_cost(predictions: &[Label], costs: &[CostVector]) -> Result<f64> {
    check_lengths(predictions.len(), costs.len())?;
    let mut total = 0.0;
    for (p, c) in predictions.iter().zip(costs) {
        if p.index() >= c.classes() {
            return Err(Error::InvalidLabel { label: p.get(), classes: c.classes() });
        }
        total += c.cost(*p);
    }
    Ok(total / predictions.len() as f64)
}

pub fn error_rate(predictions: &[Label], labels: &[Label]) -> Result<f64> {
    check_lengths(predictions.len(), labels.len())?;
    let wrong = predictions.iter().zip(labels).filter(|(p, y)| p != y).count();
    Ok(wrong as f64 / predictions.len() as f64)
}

/// Average of `w_{y_n} [prediction_n != y_n]`.
pub fn weighted_error(predictions: &[Label], labels: &[Label], weights: &ClassWeights) -> Result<f64> {
    check_lengths(predictions.len(), labels.len())?;
    let mut total = 0.0;
    for (p, &y) in predictions.iter().zip(labels) {
        if *p != y {
            total += weights.get(y);
        }
    }
    Ok(total / predictions.len() as f64)
}

/// Per-class recall, in label order. Every class must occur in `labels`.
pub fn recalls(predictions: &[Label], labels: &[Label], classes: usize) -> Result<Vec<f64>> {
    check_lengths(predictions.len(), labels.len())?;
    let mut hits = vec![0usize; classes];
    let mut totals = vec![0usize; classes];
    for (p, &y) in predictions.iter().zip(labels) {
        totals[y.index()] += 1;
        if *p == y {
            hits[y.index()] += 1;
        }
    }
    if let Some(k) = totals.iter().position(|&t| t == 0) {
        return Err(Error::UndefinedRecall(k + 1));
    }
    Ok(hits.iter().zip(&totals).map(|(&h, &t)| h as f64 / t as f64).collect())
}

/// Geometric mean of the per-class recalls.
pub fn g_mean(predictions: &[Label], labels: &[Label], classes: usize) -> Result<f64> {
    let r = recalls(predictions, labels, classes)?;
    if r.contains(&0.0) {
        return Ok(0.0);
    }
    Ok(r.iter().product::<f64>().powf(1.0 / classes as f64))
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn aggregate(runs: &[f64]) -> Result<Aggregate> {
    let n = runs.len();
    if n < 2 {
        return Err(Error::invalid(format!("aggregation needs at least 2 runs, got {n}")));
    }
    let mean = runs.iter().sum::<f64>() / n as f64;
    let ss: f64 = runs.iter().map(|x| (x - mean).powi(2)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    Ok(Aggregate { mean, stderr: sd / (n as f64).sqrt(), count: n })
}
