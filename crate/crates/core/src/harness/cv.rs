use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmSpec, Criterion, ExperimentConfig, Variant};
use crate::dataset::{ClassWeights, CostMatrix, CostVector, Label};
use crate::error::{Error, Result};
use crate::eval;
use crate::kernel::Gram;
use crate::par;
use crate::reductions::{train, MulticlassModel, TrainOptions, TrainSet};
use crate::soft::{train_soft, SoftParams};

/// Scores within this distance count as tied during selection.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Bounded re-seeding when a fold loses a class.
const FOLD_RETRIES: u64 = 10;

/// One training split: the Gram over its points plus labels and costs by
/// Gram row.
#[derive(Debug, Clone)]
pub struct RunData {
    pub gram: Gram,
    pub labels: Vec<Label>,
    pub costs: Vec<CostVector>,
    /// The same rows under the sum-normalized matrix.
    pub normalized_costs: Vec<CostVector>,
    pub matrix: CostMatrix,
    pub weights: Option<ClassWeights>,
    pub classes: usize,
}

impl RunData {
    pub fn set<'a>(&'a self, rows: &'a [usize]) -> TrainSet<'a> {
        TrainSet {
            gram: &self.gram,
            rows,
            labels: &self.labels,
            costs: &self.costs,
            classes: self.classes,
        }
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.labels.len()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub lambda: f64,
    /// Blend parameter; soft algorithms only.
    pub alpha: Option<f64>,
}

/// The grid an algorithm is tuned over: lambda, times alpha when soft.
pub fn grid_for(spec: AlgorithmSpec, lambdas: &[f64], alphas: &[f64]) -> Vec<GridPoint> {
    match spec.variant {
        Variant::Soft => lambdas
            .iter()
            .flat_map(|&lambda| alphas.iter().map(move |&a| GridPoint { lambda, alpha: Some(a) }))
            .collect(),
        _ => lambdas.iter().map(|&lambda| GridPoint { lambda, alpha: None }).collect(),
    }
}

/// Soft algorithms follow the configured criterion, hard ones select by
/// cost and regular ones by (weighted) error.
pub fn criterion_for(spec: AlgorithmSpec, config: &ExperimentConfig) -> Criterion {
    match spec.variant {
        Variant::Soft => config.criterion,
        Variant::Hard => Criterion::Cost,
        Variant::Regular => Criterion::Error,
    }
}

/// Mean held-out scores across folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvScores {
    pub cost: f64,
    /// Weighted error when the run carries class weights.
    pub error: f64,
    pub normalized_cost: f64,
}

impl CvScores {
    pub fn score(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Cost => self.cost,
            Criterion::Error => self.error,
            Criterion::MaxErrorNormcost => self.error.max(self.normalized_cost),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub point: GridPoint,
    pub score: f64,
    pub scores: CvScores,
    pub grid: Vec<(GridPoint, CvScores)>,
}

/// Held-out rows per fold, stratified by class: each class is shuffled and
/// dealt round-robin, continuing where the previous class stopped.
pub fn stratified_folds(rows: &[usize], labels: &[Label], classes: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for k in 0..classes {
        let mut members: Vec<usize> = rows.iter().copied().filter(|&r| labels[r].index() == k).collect();
        members.shuffle(&mut rng);
        for r in members {
            out[next % folds].push(r);
            next += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    out
}

/// Stratified folds whose training parts all contain every class present in
/// `rows`, re-seeding a bounded number of times.
pub fn checked_folds(rows: &[usize], labels: &[Label], classes: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut present = vec![0usize; classes];
    for &r in rows {
        present[labels[r].index()] += 1;
    }
    for attempt in 0..FOLD_RETRIES {
        let f = stratified_folds(rows, labels, classes, folds, seed.wrapping_add(attempt));
        let ok = f.iter().all(|held| {
            let mut left = present.clone();
            for &r in held {
                left[labels[r].index()] -= 1;
            }
            left.iter().zip(&present).all(|(l, p)| *p == 0 || *l > 0)
        });
        if ok && f.iter().all(|h| !h.is_empty()) {
            return Ok(f);
        }
    }
    Err(Error::DegenerateProblem(format!(
        "no {folds}-fold split keeps every class in each training part"
    )))
}

/// Trains `spec` at `point` on `rows` of `data`.
pub fn fit(
    spec: AlgorithmSpec,
    data: &RunData,
    rows: &[usize],
    point: GridPoint,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    let set = data.set(rows);
    match spec.variant {
        Variant::Regular => train(spec.algorithm, &set, None, data.weights.as_ref(), point.lambda, options),
        Variant::Hard => train(spec.algorithm, &set, Some(&data.matrix), None, point.lambda, options),
        Variant::Soft => {
            let alpha = point.alpha.ok_or_else(|| Error::invalid("soft training needs alpha"))?;
            let params = SoftParams::new(alpha, data.weights.clone())?;
            train_soft(spec.algorithm, &set, Some(&data.matrix), &params, point.lambda, options)
        }
    }
}

fn held_out_scores(data: &RunData, model: &MulticlassModel, held: &[usize], options: &TrainOptions) -> Result<CvScores> {
    let predictions = model.predict_rows(&data.gram, held, options.mode);
    let pick = |v: &[CostVector]| held.iter().map(|&r| v[r].clone()).collect::<Vec<_>>();
    let labels: Vec<Label> = held.iter().map(|&r| data.labels[r]).collect();
    let error = match &data.weights {
        Some(w) => eval::weighted_error(&predictions, &labels, w)?,
        None => eval::error_rate(&predictions, &labels)?,
    };
    Ok(CvScores {
        cost: eval::mean_cost(&predictions, &pick(&data.costs))?,
        error,
        normalized_cost: eval::mean_cost(&predictions, &pick(&data.normalized_costs))?,
    })
}

/// Whether `b` should replace the incumbent `a`: strictly lower score, or a
/// tie broken toward larger alpha, then larger lambda.
fn better(b: (f64, GridPoint), a: (f64, GridPoint)) -> bool {
    if b.0 < a.0 - TIE_TOLERANCE {
        return true;
    }
    if (b.0 - a.0).abs() > TIE_TOLERANCE {
        return false;
    }
    let (ab, aa) = (b.1.alpha.unwrap_or(0.0), a.1.alpha.unwrap_or(0.0));
    ab > aa || (ab == aa && b.1.lambda > a.1.lambda)
}

/// K-fold selection over `grid`: every (grid point, fold) pair is an
/// independent work item; results are merged in grid order.
pub fn cv_select(
    spec: AlgorithmSpec,
    data: &RunData,
    folds: &[Vec<usize>],
    grid: &[GridPoint],
    criterion: Criterion,
    options: &TrainOptions,
) -> Result<Selection> {
    if grid.is_empty() {
        return Err(Error::invalid("empty parameter grid"));
    }
    let n = data.labels.len();
    let train_parts: Vec<Vec<usize>> = folds
        .iter()
        .map(|held| {
            let mut mask = vec![true; n];
            for &r in held {
                mask[r] = false;
            }
            (0..n).filter(|&r| mask[r]).collect()
        })
        .collect();
    let k = folds.len();
    let cells = par::map_range(options.mode, grid.len() * k, |i| {
        let (g, f) = (i / k, i % k);
        let model = fit(spec, data, &train_parts[f], grid[g], options)?;
        held_out_scores(data, &model, &folds[f], options)
    });
    let mut cells = cells.into_iter();
    let mut scored = Vec::with_capacity(grid.len());
    for &point in grid {
        let mut sum = CvScores { cost: 0.0, error: 0.0, normalized_cost: 0.0 };
        for _ in 0..k {
            let s = cells.next().expect("one cell per fold")?;
            sum.cost += s.cost;
            sum.error += s.error;
            sum.normalized_cost += s.normalized_cost;
        }
        let kf = k as f64;
        scored.push((point, CvScores { cost: sum.cost / kf, error: sum.error / kf, normalized_cost: sum.normalized_cost / kf }));
    }
    let mut best = 0;
    for i in 1..scored.len() {
        let cand = (scored[i].1.score(criterion), scored[i].0);
        let inc = (scored[best].1.score(criterion), scored[best].0);
        if better(cand, inc) {
            best = i;
        }
    }
    Ok(Selection {
        point: scored[best].0,
        score: scored[best].1.score(criterion),
        scores: scored[best].1,
        grid: scored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(v: &[usize]) -> Vec<Label> {
        v.iter().map(|&i| Label::from_index(i)).collect()
    }

    #[test]
    fn folds_partition_and_stratify() {
        let labels = l(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2]);
        let rows: Vec<usize> = (0..12).collect();
        let f = checked_folds(&rows, &labels, 3, 2, 9).unwrap();
        let mut all: Vec<usize> = f.concat();
        all.sort_unstable();
        assert_eq!(all, rows);
        for held in &f {
            assert!((5..=7).contains(&held.len()));
            assert_eq!(held.iter().filter(|&&r| labels[r].index() == 2).count(), 1);
        }
        let single = l(&[0, 0, 0, 1]);
        assert!(checked_folds(&[0, 1, 2, 3], &single, 2, 2, 0).is_err());
    }

    #[test]
    fn tie_breaks_prefer_large_alpha_then_large_lambda() {
        let p = |lambda, alpha| GridPoint { lambda, alpha: Some(alpha) };
        assert!(better((1.0, p(1.0, 0.5)), (1.0, p(4.0, 0.2))));
        assert!(better((1.0, p(4.0, 0.5)), (1.0, p(1.0, 0.5))));
        assert!(!better((1.0 + 1e-13, p(1.0, 0.1)), (1.0, p(1.0, 0.5))));
        assert!(better((0.5, p(1.0, 0.0)), (1.0, p(1.0, 1.0))));
        let grid = grid_for(AlgorithmSpec::soft(crate::reductions::Algorithm::Osr), &[1.0, 2.0], &[0.0, 1.0]);
        assert_eq!(grid.len(), 4);
    }
}
