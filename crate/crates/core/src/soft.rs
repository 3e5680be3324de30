//! Soft cost-sensitive classification: cost vectors blended with the
//! (optionally class-weighted) misclassification vector.

use serde::{Deserialize, Serialize};

use crate::dataset::{ClassWeights, CostMatrix, CostSensitiveDataset, CostVector, Label};
use crate::error::{Error, Result};
use crate::reductions::{train, Algorithm, MulticlassModel, TrainOptions, TrainSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftParams {
    pub alpha: f64,
    /// Present for the weighted-error blend.
    pub class_weights: Option<ClassWeights>,
}

impl SoftParams {
    pub fn new(alpha: f64, class_weights: Option<ClassWeights>) -> Result<Self> {
        let params = SoftParams { alpha, class_weights };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha {} is outside [0, 1]", self.alpha)));
        }
        Ok(())
    }

    fn error_weight(&self, y: Label) -> f64 {
        self.class_weights.as_ref().map_or(1.0, |w| w.get(y))
    }
}

/// `(1 - alpha) * c + alpha * w_y * [k != y]` for one entry.
fn blend_entry(cost: f64, alpha: f64, error_cost: f64) -> f64 {
    (1.0 - alpha) * cost + alpha * error_cost
}

pub fn blend_cost(c: &CostVector, params: &SoftParams) -> Result<CostVector> {
    params.validate()?;
    let y = c.intended();
    let w = params.error_weight(y);
    let costs = c
        .costs()
        .iter()
        .enumerate()
        .map(|(k, &v)| blend_entry(v, params.alpha, if k == y.index() { 0.0 } else { w }))
        .collect();
    CostVector::new(costs, y)
}

pub fn blend_costs(costs: &[CostVector], params: &SoftParams) -> Result<Vec<CostVector>> {
    costs.iter().map(|c| blend_cost(c, params)).collect()
}

pub fn soften_dataset(ds: &CostSensitiveDataset, params: &SoftParams) -> Result<CostSensitiveDataset> {
    Ok(CostSensitiveDataset {
        costs: blend_costs(&ds.costs, params)?,
        ..ds.clone()
    })
}

/// Row-wise [`blend_cost`] on a class-dependent matrix.
pub fn blend_matrix(matrix: &CostMatrix, params: &SoftParams) -> Result<CostMatrix> {
    params.validate()?;
    matrix.map_off_diagonal(|y, _, v| blend_entry(v, params.alpha, params.error_weight(Label::from_index(y))))
}

pub fn check_soft_algorithm(algorithm: Algorithm) -> Result<()> {
    if !algorithm.is_cost_sensitive() {
        return Err(Error::invalid(format!(
            "{algorithm} is not cost-sensitive and has no soft variant"
        )));
    }
    Ok(())
}

/// Trains a cost-sensitive `algorithm` on blended costs. CSZL blends
/// `matrix` and re-tests the blended matrix for consistency.
pub fn train_soft(
    algorithm: Algorithm,
    set: &TrainSet<'_>,
    matrix: Option<&CostMatrix>,
    params: &SoftParams,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    check_soft_algorithm(algorithm)?;
    let costs = blend_costs(set.costs, params)?;
    let blended_matrix = matrix.map(|m| blend_matrix(m, params)).transpose()?;
    let soft = TrainSet { costs: &costs, ..*set };
    train(algorithm, &soft, blended_matrix.as_ref(), None, lambda, options)
}
