#![allow(dead_code)]

use std::path::{Path, PathBuf};

use costblend::dataset::{CostMatrix, CostVector, FeatureVector, Label, LabeledDataset};
use costblend::kernel::{Gram, Kernel};
use costblend::reductions::TrainSet;
use rand::Rng;

pub fn fv(v: &[f64]) -> FeatureVector {
    FeatureVector::from_dense(v).unwrap()
}

/// Owned storage behind a [`TrainSet`] over every row.
pub struct Fixture {
    pub gram: Gram,
    pub rows: Vec<usize>,
    pub labels: Vec<Label>,
    pub costs: Vec<CostVector>,
    pub classes: usize,
}

impl Fixture {
    pub fn new(data: &LabeledDataset, costs: Vec<CostVector>) -> Self {
        Fixture {
            gram: Gram::new(Kernel::Perceptron, data.features.clone()),
            rows: (0..data.len()).collect(),
            labels: data.labels.clone(),
            costs,
            classes: data.classes,
        }
    }

    pub fn from_matrix(data: &LabeledDataset, matrix: &CostMatrix) -> Self {
        let costs = data.labels.iter().map(|&y| matrix.cost_vector(y).unwrap()).collect();
        Self::new(data, costs)
    }

    pub fn set(&self) -> TrainSet<'_> {
        self.set_with(&self.costs)
    }

    pub fn set_with<'a>(&'a self, costs: &'a [CostVector]) -> TrainSet<'a> {
        TrainSet {
            gram: &self.gram,
            rows: &self.rows,
            labels: &self.labels,
            costs,
            classes: self.classes,
        }
    }

    pub fn regular_costs(&self) -> Vec<CostVector> {
        self.labels.iter().map(|&y| CostVector::regular(y, self.classes).unwrap()).collect()
    }
}

/// Example-dependent costs: zero at the label, uniform on `[0, scale)`
/// elsewhere.
pub fn random_costs<R: Rng>(labels: &[Label], classes: usize, scale: f64, rng: &mut R) -> Vec<CostVector> {
    labels
        .iter()
        .map(|&y| {
            let c = (0..classes)
                .map(|k| if k == y.index() { 0.0 } else { scale * rng.random::<f64>() })
                .collect();
            CostVector::new(c, y).unwrap()
        })
        .collect()
}

pub fn write_temp(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}
