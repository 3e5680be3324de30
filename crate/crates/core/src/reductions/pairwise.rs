use serde::{Deserialize, Serialize};

use super::{argmax, train_specs, MulticlassModel, TrainOptions, TrainSet};
use crate::dataset::{ClassWeights, Label};
use crate::error::{Error, Result};
use crate::learner::{BinaryModel, BinarySpec, Probe, Sign};

/// Classifier for the pair `first < second`: a negative decision votes for
/// `first`, a positive one for `second`, zero abstains. `None` always abstains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub first: Label,
    pub second: Label,
    pub model: Option<BinaryModel>,
}

impl PairModel {
    pub fn vote(&self, probe: Probe<'_>) -> Option<Label> {
        let model = self.model.as_ref()?;
        match Sign::of(model.expansion.eval(probe))? {
            Sign::Negative => Some(self.first),
            Sign::Positive => Some(self.second),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvoModel {
    pub classes: usize,
    pub pairs: Vec<PairModel>,
}

impl OvoModel {
    /// Plurality vote over pair winners; ties (including no votes at all)
    /// go to the smallest label.
    pub fn predict(&self, probe: Probe<'_>) -> Label {
        let mut votes = vec![0u32; self.classes];
        for pair in &self.pairs {
            if let Some(winner) = pair.vote(probe) {
                votes[winner.index()] += 1;
            }
        }
        Label::from_index(argmax(votes.into_iter().map(f64::from)))
    }
}

/// All pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn class_pairs(classes: usize) -> Vec<(Label, Label)> {
    (0..classes)
        .flat_map(|i| (i + 1..classes).map(move |j| (Label::from_index(i), Label::from_index(j))))
        .collect()
}

/// One problem per pair: the two classes' rows, `first` negative, `second`
/// positive, weight `weights[y_n]` (1 without weights).
pub fn ovo_specs(set: &TrainSet<'_>, weights: Option<&ClassWeights>) -> Vec<((Label, Label), BinarySpec)> {
    class_pairs(set.classes)
        .into_iter()
        .map(|(i, j)| {
            let mut spec = BinarySpec::default();
            for &r in set.rows {
                let y = set.label(r);
                let sign = if y == i {
                    Sign::Negative
                } else if y == j {
                    Sign::Positive
                } else {
                    continue;
                };
                spec.push(r, sign, weights.map_or(1.0, |w| w.get(y)));
            }
            ((i, j), spec)
        })
        .collect()
}

/// One problem per pair over all rows: sign toward the cheaper of the two
/// classes, weight `|c_n[i] - c_n[j]|`; rows with zero weight are left out.
pub fn csovo_specs(set: &TrainSet<'_>) -> Result<Vec<((Label, Label), BinarySpec)>> {
    set.require_costs()?;
    Ok(class_pairs(set.classes)
        .into_iter()
        .map(|(i, j)| {
            let mut spec = BinarySpec::default();
            for &r in set.rows {
                let c = set.cost(r);
                let (ci, cj) = (c.cost(i), c.cost(j));
                let weight = (ci - cj).abs();
                if weight == 0.0 {
                    continue;
                }
                let sign = if ci < cj { Sign::Negative } else { Sign::Positive };
                spec.push(r, sign, weight);
            }
            ((i, j), spec)
        })
        .collect())
}

fn train_pairs(
    set: &TrainSet<'_>,
    specs: Vec<((Label, Label), BinarySpec)>,
    lambda: f64,
    options: &TrainOptions,
) -> Result<OvoModel> {
    let (pairs, specs): (Vec<_>, Vec<_>) = specs.into_iter().unzip();
    let models = train_specs(set.gram, &specs, lambda, options)?;
    Ok(OvoModel {
        classes: set.classes,
        pairs: pairs
            .into_iter()
            .zip(models)
            .map(|((first, second), model)| PairModel { first, second, model })
            .collect(),
    })
}

pub fn train_ovo(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<MulticlassModel> {
    set.require_all_classes()?;
    Ok(MulticlassModel::Ovo(train_pairs(set, ovo_specs(set, None), lambda, options)?))
}

pub(crate) fn weighted_ovo_model(
    set: &TrainSet<'_>,
    weights: &ClassWeights,
    lambda: f64,
    options: &TrainOptions,
) -> Result<OvoModel> {
    set.require_all_classes()?;
    if weights.classes() != set.classes {
        return Err(Error::invalid("one weight per class is required"));
    }
    train_pairs(set, ovo_specs(set, Some(weights)), lambda, options)
}

/// OVO where each example carries the weight of its class.
pub fn train_weighted_ovo(
    set: &TrainSet<'_>,
    weights: &ClassWeights,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    Ok(MulticlassModel::Ovo(weighted_ovo_model(set, weights, lambda, options)?))
}

pub(crate) fn csovo_model(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<OvoModel> {
    set.require_classes()?;
    train_pairs(set, csovo_specs(set)?, lambda, options)
}

pub fn train_csovo(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<MulticlassModel> {
    Ok(MulticlassModel::Ovo(csovo_model(set, lambda, options)?))
}
