//! Class re-weighting for consistent cost matrices, with a pairwise
//! cost-sensitive fallback when no consistent weighting exists.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::pairwise::{csovo_model, weighted_ovo_model};
use super::{MulticlassModel, TrainOptions, TrainSet};
use crate::dataset::{ClassWeights, CostMatrix, CostVector};
use crate::error::{Error, Result};

/// Singular values at or below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CszlBranch {
    /// Consistent matrix: weighted OVO with these class weights.
    Weighted(ClassWeights),
    /// Inconsistent matrix: pairwise cost-sensitive decomposition.
    Pairwise,
}

impl CszlBranch {
    pub fn is_weighted(&self) -> bool {
        matches!(self, CszlBranch::Weighted(_))
    }
}

/// Coefficient matrix with one row per pair `i < j`: `C(j,i)` in column `i`
/// and `-C(i,j)` in column `j`.
fn system(matrix: &CostMatrix) -> DMatrix<f64> {
    let k = matrix.classes();
    let pairs = k * (k - 1) / 2;
    // at least K rows so the SVD yields a full set of right singular vectors
    let mut a = DMatrix::zeros(pairs.max(k), k);
    let mut row = 0;
    for i in 0..k {
        for j in i + 1..k {
            a[(row, i)] = matrix.at(j, i);
            a[(row, j)] = -matrix.at(i, j);
            row += 1;
        }
    }
    a
}

/// Class weights `w` with `w_i C(j,i) = w_j C(i,j)` for every pair,
/// normalized to a maximum of 1, or `None` when the system has full column
/// rank or no elementwise-nonnegative null vector.
pub fn cszl_weights(matrix: &CostMatrix) -> Option<ClassWeights> {
    let k = matrix.classes();
    let a = system(matrix);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma = &svd.singular_values;
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Some(ClassWeights::uniform(k));
    }
    let rank = sigma.iter().filter(|&&s| s > RANK_TOLERANCE * largest).count();
    if rank >= k {
        return None;
    }
    let smallest = (0..sigma.len())
        .min_by(|&x, &y| sigma[x].total_cmp(&sigma[y]))
        .expect("nonempty spectrum");
    let mut v: Vec<f64> = v_t.row(smallest).iter().copied().collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if v.iter().any(|&x| x < -1e-9 * scale) {
        return None;
    }
    let mut w: Vec<f64> = v.iter().map(|&x| x.max(0.0) / scale).collect();
    refine_by_propagation(matrix, &mut w);
    ClassWeights::new(w).ok()
}

/// Recomputes weights exactly along pairs where both directions carry cost,
/// starting from the heaviest class, so exact ratios such as `1/1` survive
/// rounding in the SVD.
fn refine_by_propagation(matrix: &CostMatrix, w: &mut [f64]) {
    let k = w.len();
    let root = (0..k).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0);
    let mut seen = vec![false; k];
    let mut exact = w.to_vec();
    exact[root] = 1.0;
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        for b in 0..k {
            if seen[b] || b == a {
                continue;
            }
            let (ab, ba) = (matrix.at(a, b), matrix.at(b, a));
            if ab > 0.0 && ba > 0.0 {
                exact[b] = exact[a] * ba / ab;
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    let max = exact.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for (dst, &e) in w.iter_mut().zip(&exact) {
            *dst = e / max;
        }
    }
}

/// Weighted OVO when `matrix` is consistent, otherwise the pairwise
/// cost-sensitive decomposition on costs attached from `matrix`.
pub fn train_cszl(
    set: &TrainSet<'_>,
    matrix: &CostMatrix,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    if matrix.classes() != set.classes {
        return Err(Error::InvalidCostMatrix(format!(
            "matrix has {} classes, training set has {}",
            matrix.classes(),
            set.classes
        )));
    }
    match cszl_weights(matrix) {
        Some(weights) => {
            let inner = weighted_ovo_model(set, &weights, lambda, options)?;
            Ok(MulticlassModel::Cszl {
                branch: CszlBranch::Weighted(weights),
                inner,
            })
        }
        None => {
            let costs = set
                .labels
                .iter()
                .map(|&y| matrix.cost_vector(y))
                .collect::<Result<Vec<CostVector>>>()?;
            let attached = TrainSet { costs: &costs, ..*set };
            let inner = csovo_model(&attached, lambda, options)?;
            Ok(MulticlassModel::Cszl {
                branch: CszlBranch::Pairwise,
                inner,
            })
        }
    }
}
