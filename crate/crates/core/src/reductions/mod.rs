//! Multiclass reductions onto the base learners: OVA, OVO and filter trees
//! for regular classification, and OSR, CSOVO, CSFT and CSZL for
//! cost-sensitive classification.
//!
//! Every reduction has a pure construction step (`*_specs`) that builds its
//! binary or one-sided sub-problems from labels and costs, and a training
//! step that solves them. The construction is exposed so the sibling
//! relations between algorithms can be checked exactly.

mod cszl;
mod osr;
mod pairwise;
mod tree;

use serde::{Deserialize, Serialize};

pub use cszl::{cszl_weights, train_cszl, CszlBranch};
pub use osr::{osr_specs, train_osr, train_ova, train_weighted_ova, ova_specs, OsrModel, OvaModel};
pub use pairwise::{
    csovo_specs, ovo_specs, train_csovo, train_ovo, train_weighted_ovo, OvoModel, PairModel,
};
pub use tree::{train_csft, train_csft_traced, train_ft, train_weighted_ft, TournamentTree, TreeChild, TreeModel};

use crate::dataset::{ClassWeights, CostMatrix, CostVector, FeatureVector, Label};
use crate::error::{Error, Result};
use crate::kernel::Gram;
use crate::learner::{train_weighted_binary, BinaryModel, BinarySpec, Probe, Sign, WeightedBinaryProblem};
use crate::par::{self, ExecMode};
use crate::solver::SolverOptions;

/// Training data as rows of a shared [`Gram`]. `labels` and `costs` are
/// indexed by Gram row; `costs` may be empty for regular algorithms.
#[derive(Debug, Clone, Copy)]
pub struct TrainSet<'a> {
    pub gram: &'a Gram,
    pub rows: &'a [usize],
    pub labels: &'a [Label],
    pub costs: &'a [CostVector],
    pub classes: usize,
}

impl<'a> TrainSet<'a> {
    pub fn label(&self, row: usize) -> Label {
        self.labels[row]
    }

    pub fn cost(&self, row: usize) -> &'a CostVector {
        &self.costs[row]
    }

    pub(crate) fn require_costs(&self) -> Result<()> {
        if self.costs.len() < self.gram.len() {
            return Err(Error::invalid("cost-sensitive training needs a cost vector for every row"));
        }
        Ok(())
    }

    pub(crate) fn require_classes(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::invalid(format!(
                "multiclass training needs at least 2 classes, got {}",
                self.classes
            )));
        }
        if self.rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(())
    }

    /// Regular algorithms need every class among the training rows.
    pub(crate) fn require_all_classes(&self) -> Result<()> {
        self.require_classes()?;
        let mut seen = vec![false; self.classes];
        for &r in self.rows {
            seen[self.labels[r].index()] = true;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::DegenerateProblem(format!(
                "class {} has no training examples",
                k + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainOptions {
    pub solver: SolverOptions,
    pub mode: ExecMode,
}

impl TrainOptions {
    pub fn sequential() -> Self {
        TrainOptions {
            solver: SolverOptions::default(),
            mode: ExecMode::Sequential,
        }
    }
}

/// Trains a spec, falling back to a constant model when only one sign carries
/// weight (`None` when neither does).
pub(crate) fn train_or_constant(
    gram: &Gram,
    spec: &BinarySpec,
    lambda: f64,
    options: &TrainOptions,
) -> Result<Option<BinaryModel>> {
    let (neg, pos) = spec.weight_by_sign();
    match (neg > 0.0, pos > 0.0) {
        (false, false) => Ok(None),
        (true, false) => Ok(Some(BinaryModel::constant(gram.kernel(), Sign::Negative))),
        (false, true) => Ok(Some(BinaryModel::constant(gram.kernel(), Sign::Positive))),
        (true, true) => train_weighted_binary(
            &WeightedBinaryProblem { gram, spec, lambda },
            &options.solver,
        )
        .map(Some),
    }
}

pub(crate) fn train_specs(
    gram: &Gram,
    specs: &[BinarySpec],
    lambda: f64,
    options: &TrainOptions,
) -> Result<Vec<Option<BinaryModel>>> {
    par::map_slice(options.mode, specs, |s| train_or_constant(gram, s, lambda, options))
        .into_iter()
        .collect()
}

/// The seven reductions. The first three ignore costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ova,
    Ovo,
    Ft,
    Osr,
    Csovo,
    Csft,
    Cszl,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Ova,
        Algorithm::Ovo,
        Algorithm::Ft,
        Algorithm::Osr,
        Algorithm::Csovo,
        Algorithm::Csft,
        Algorithm::Cszl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ova => "ova",
            Algorithm::Ovo => "ovo",
            Algorithm::Ft => "ft",
            Algorithm::Osr => "osr",
            Algorithm::Csovo => "csovo",
            Algorithm::Csft => "csft",
            Algorithm::Cszl => "cszl",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {name:?}")))
    }

    pub fn is_cost_sensitive(self) -> bool {
        !matches!(self, Algorithm::Ova | Algorithm::Ovo | Algorithm::Ft)
    }

    /// The regular algorithm a cost-sensitive one reduces to on 0/1 costs.
    pub fn regular_sibling(self) -> Algorithm {
        match self {
            Algorithm::Osr | Algorithm::Ova => Algorithm::Ova,
            Algorithm::Csovo | Algorithm::Cszl | Algorithm::Ovo => Algorithm::Ovo,
            Algorithm::Csft | Algorithm::Ft => Algorithm::Ft,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Trains `algorithm`. Regular algorithms use `weights` as per-class example
/// weights when given; cost-sensitive ones use `set.costs`, except CSZL,
/// which needs the class-dependent `matrix`.
pub fn train(
    algorithm: Algorithm,
    set: &TrainSet<'_>,
    matrix: Option<&CostMatrix>,
    weights: Option<&ClassWeights>,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    match (algorithm, weights) {
        (Algorithm::Ova, None) => train_ova(set, lambda, options),
        (Algorithm::Ova, Some(w)) => train_weighted_ova(set, w, lambda, options),
        (Algorithm::Ovo, None) => train_ovo(set, lambda, options),
        (Algorithm::Ovo, Some(w)) => train_weighted_ovo(set, w, lambda, options),
        (Algorithm::Ft, None) => train_ft(set, lambda, options),
        (Algorithm::Ft, Some(w)) => train_weighted_ft(set, w, lambda, options),
        (Algorithm::Osr, _) => train_osr(set, lambda, options),
        (Algorithm::Csovo, _) => train_csovo(set, lambda, options),
        (Algorithm::Csft, _) => train_csft(set, lambda, options),
        (Algorithm::Cszl, _) => {
            let matrix = matrix.ok_or_else(|| Error::invalid("cszl needs a class-dependent cost matrix"))?;
            train_cszl(set, matrix, lambda, options)
        }
    }
}

/// A trained multiclass classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MulticlassModel {
    Ova(OvaModel),
    Ovo(OvoModel),
    Tree(TreeModel),
    Osr(OsrModel),
    Cszl { branch: CszlBranch, inner: OvoModel },
}

impl MulticlassModel {
    pub fn classes(&self) -> usize {
        match self {
            MulticlassModel::Ova(m) => m.classes(),
            MulticlassModel::Ovo(m) => m.classes,
            MulticlassModel::Tree(m) => m.tree.classes(),
            MulticlassModel::Osr(m) => m.classes(),
            MulticlassModel::Cszl { inner, .. } => inner.classes,
        }
    }

    pub fn predict_probe(&self, probe: Probe<'_>) -> Label {
        match self {
            MulticlassModel::Ova(m) => m.predict(probe),
            MulticlassModel::Ovo(m) => m.predict(probe),
            MulticlassModel::Tree(m) => m.predict(probe),
            MulticlassModel::Osr(m) => m.predict(probe),
            MulticlassModel::Cszl { inner, .. } => inner.predict(probe),
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> Label {
        self.predict_probe(Probe::Point(x))
    }

    /// Prediction for row `row` of the Gram the model was trained on.
    pub fn predict_row(&self, gram: &Gram, row: usize) -> Label {
        self.predict_probe(Probe::Row(gram, row))
    }

    pub fn predict_all(&self, xs: &[FeatureVector], mode: ExecMode) -> Vec<Label> {
        par::map_slice(mode, xs, |x| self.predict(x))
    }

    pub fn predict_rows(&self, gram: &Gram, rows: &[usize], mode: ExecMode) -> Vec<Label> {
        par::map_slice(mode, rows, |&r| self.predict_row(gram, r))
    }
}

pub fn predict(model: &MulticlassModel, x: &FeatureVector) -> Label {
    model.predict(x)
}

/// Index of the first maximum (smallest label on ties).
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (k, v) in values.into_iter().enumerate() {
        if v > best_value {
            best = k;
            best_value = v;
        }
    }
    best
}

/// Index of the first minimum (smallest label on ties).
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> usize {
    argmax(values.into_iter().map(|v| -v))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::dataset::{CostMatrix, CostVector, Label};
    use crate::kernel::{Gram, Kernel};
    use crate::synth;

    /// Owned backing storage for a [`super::TrainSet`].
    pub struct Owned {
        pub gram: Gram,
        pub rows: Vec<usize>,
        pub labels: Vec<Label>,
        pub costs: Vec<CostVector>,
        pub classes: usize,
    }

    impl Owned {
        pub fn set(&self) -> super::TrainSet<'_> {
            super::TrainSet {
                gram: &self.gram,
                rows: &self.rows,
                labels: &self.labels,
                costs: &self.costs,
                classes: self.classes,
            }
        }

        pub fn with_matrix(mut self, matrix: &CostMatrix) -> Self {
            self.costs = self
                .labels
                .iter()
                .map(|&y| matrix.cost_vector(y).unwrap())
                .collect();
            self
        }
    }

    pub fn clusters(per_class: &[usize], spread: f64, seed: u64) -> Owned {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = synth::separated_clusters(per_class, spread, &mut rng);
        let classes = per_class.len();
        let ds = data.with_regular_costs();
        Owned {
            gram: Gram::new(Kernel::Perceptron, ds.features.clone()),
            rows: (0..ds.len()).collect(),
            labels: ds.labels,
            costs: ds.costs,
            classes,
        }
    }
}
