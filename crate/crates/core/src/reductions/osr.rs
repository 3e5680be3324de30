use serde::{Deserialize, Serialize};

use super::{argmax, argmin, train_specs, MulticlassModel, TrainOptions, TrainSet};
use crate::dataset::{ClassWeights, Label};
use crate::error::{Error, Result};
use crate::learner::{
    train_one_sided, BinaryModel, BinarySpec, Direction, OneSidedProblem, OneSidedSpec, Probe,
    Regressor, Sign,
};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvaModel {
    pub models: Vec<BinaryModel>,
}

impl OvaModel {
    pub fn classes(&self) -> usize {
        self.models.len()
    }

    /// Class with the largest decision value.
    pub fn predict(&self, probe: Probe<'_>) -> Label {
        Label::from_index(argmax(self.models.iter().map(|m| m.expansion.eval(probe))))
    }
}

/// One problem per class `k`: class-`k` rows positive, the rest negative.
/// Example weight is `weights[y_n]`, or 1 without weights.
pub fn ova_specs(set: &TrainSet<'_>, weights: Option<&ClassWeights>) -> Vec<BinarySpec> {
    (0..set.classes)
        .map(|k| {
            let mut spec = BinarySpec::default();
            for &r in set.rows {
                let y = set.label(r);
                let sign = if y.index() == k {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
                spec.push(r, sign, weights.map_or(1.0, |w| w.get(y)));
            }
            spec
        })
        .collect()
}

pub fn train_ova(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<MulticlassModel> {
    train_ova_inner(set, None, lambda, options)
}

/// OVA where each example carries the weight of its class.
pub fn train_weighted_ova(
    set: &TrainSet<'_>,
    weights: &ClassWeights,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    if weights.classes() != set.classes {
        return Err(Error::invalid("one weight per class is required"));
    }
    train_ova_inner(set, Some(weights), lambda, options)
}

fn train_ova_inner(
    set: &TrainSet<'_>,
    weights: Option<&ClassWeights>,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    set.require_all_classes()?;
    let specs = ova_specs(set, weights);
    let models = train_specs(set.gram, &specs, lambda, options)?
        .into_iter()
        .map(|m| m.unwrap_or_else(|| BinaryModel::constant(set.gram.kernel(), Sign::Negative)))
        .collect();
    Ok(MulticlassModel::Ova(OvaModel { models }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsrModel {
    pub regressors: Vec<Regressor>,
}

impl OsrModel {
    pub fn classes(&self) -> usize {
        self.regressors.len()
    }

    /// Class with the smallest estimated cost.
    pub fn predict(&self, probe: Probe<'_>) -> Label {
        Label::from_index(argmin(self.regressors.iter().map(|r| r.expansion.eval(probe))))
    }
}

/// One problem per class `k`: targets `c_n[k]`, direction `Over` when `k` is
/// the (first) cheapest class of example `n`, `Under` otherwise.
pub fn osr_specs(set: &TrainSet<'_>) -> Result<Vec<OneSidedSpec>> {
    set.require_costs()?;
    Ok((0..set.classes)
        .map(|k| {
            let mut spec = OneSidedSpec::default();
            for &r in set.rows {
                let c = set.cost(r);
                spec.rows.push(r);
                spec.targets.push(c.costs()[k]);
                spec.directions.push(if c.cheapest().index() == k {
                    Direction::Over
                } else {
                    Direction::Under
                });
            }
            spec
        })
        .collect())
}

pub fn train_osr(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<MulticlassModel> {
    set.require_classes()?;
    let specs = osr_specs(set)?;
    let regressors = par::map_slice(options.mode, &specs, |spec| {
        train_one_sided(
            &OneSidedProblem {
                gram: set.gram,
                spec,
                lambda,
            },
            &options.solver,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(MulticlassModel::Osr(OsrModel { regressors }))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::clusters;
    use super::*;
    use crate::dataset::{CostMatrix, CostVector, FeatureVector};
    use crate::kernel::Kernel;
    use crate::learner::KernelExpansion;

    fn constant_regressor(v: f64) -> Regressor {
        Regressor {
            expansion: KernelExpansion::constant(Kernel::Perceptron, v),
            stats: Default::default(),
        }
    }

    #[test]
    fn ova_fits_separated_clusters() {
        let data = clusters(&[20, 20, 20], 0.3, 5);
        let model = train_ova(&data.set(), 0.25, &TrainOptions::default()).unwrap();
        for &r in &data.rows {
            assert_eq!(model.predict_row(&data.gram, r), data.labels[r]);
        }
    }

    #[test]
    fn ova_rejects_missing_class_and_single_class() {
        let mut data = clusters(&[5, 5], 0.3, 1);
        data.rows.retain(|&r| data.labels[r].index() == 0);
        assert!(matches!(
            train_ova(&data.set(), 1.0, &TrainOptions::default()),
            Err(Error::DegenerateProblem(_))
        ));
        let mut one = clusters(&[5], 0.3, 1);
        one.classes = 1;
        assert!(matches!(
            train_ova(&one.set(), 1.0, &TrainOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn ova_ties_go_to_the_smallest_label() {
        let flat = |b| BinaryModel {
            expansion: KernelExpansion::constant(Kernel::Perceptron, b),
            stats: Default::default(),
        };
        let m = OvaModel { models: vec![flat(0.3), flat(0.9), flat(-1.0)] };
        let x = FeatureVector::default();
        assert_eq!(m.predict(Probe::Point(&x)).get(), 2);
        let tie = OvaModel { models: vec![flat(0.5), flat(0.5)] };
        assert_eq!(tie.predict(Probe::Point(&x)).get(), 1);
    }

    #[test]
    fn osr_argmin_with_tie_break() {
        let m = OsrModel {
            regressors: vec![constant_regressor(4.0), constant_regressor(0.1), constant_regressor(0.1)],
        };
        assert_eq!(m.predict(Probe::Point(&FeatureVector::default())).get(), 2);
    }

    #[test]
    fn osr_directions_from_regular_costs_match_ova_signs() {
        let data = clusters(&[4, 3, 5], 0.3, 2);
        let set = data.set();
        let osr = osr_specs(&set).unwrap();
        let ova = ova_specs(&set, None);
        for (o, a) in osr.iter().zip(&ova) {
            assert_eq!(o.rows, a.rows);
            for (z, s) in o.directions.iter().zip(&a.signs) {
                assert_eq!(*z == Direction::Over, *s == Sign::Positive);
            }
        }
    }

    #[test]
    fn osr_direction_uses_first_cheapest_class() {
        let data = clusters(&[1, 1], 0.3, 2);
        let mut data = data;
        data.costs = vec![
            CostVector::new(vec![0.0, 30.0], Label::from_index(0)).unwrap(),
            CostVector::new(vec![0.0, 0.0], Label::from_index(1)).unwrap(),
        ];
        let specs = osr_specs(&data.set()).unwrap();
        assert_eq!(specs[0].directions, vec![Direction::Over, Direction::Over]);
        assert_eq!(specs[1].directions, vec![Direction::Under, Direction::Under]);
        assert_eq!(specs[1].targets, vec![30.0, 0.0]);
    }

    #[test]
    fn osr_prefers_cheap_class_on_asymmetric_costs() {
        let data = clusters(&[15, 15], 0.3, 9)
            .with_matrix(&CostMatrix::new(vec![vec![0.0, 30.0], vec![1.0, 0.0]]).unwrap());
        let model = train_osr(&data.set(), 0.25, &TrainOptions::default()).unwrap();
        // class-1 region predicted as class 1
        for &r in data.rows.iter().filter(|&&r| data.labels[r].index() == 0) {
            assert_eq!(model.predict_row(&data.gram, r).get(), 1);
        }
    }
}
