//! Examples, labels, cost vectors and cost matrices, plus feature scaling
//! and train/test splitting.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A class label in `1..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label(usize);

impl Label {
    pub fn new(value: usize, classes: usize) -> Result<Self> {
        if value == 0 || value > classes {
            return Err(Error::InvalidLabel {
                label: value,
                classes,
            });
        }
        Ok(Label(value))
    }

    /// Label for a zero-based class index.
    pub fn from_index(index: usize) -> Self {
        Label(index + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Zero-based class index.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sparse feature vector with 1-based, strictly increasing indices.
/// Indices that are not stored read as zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(entries: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (index, value) in entries {
            if index == 0 {
                return Err(Error::InvalidFeatures("feature indices are 1-based".into()));
            }
            if let Some(&last) = indices.last() {
                if index <= last {
                    return Err(Error::InvalidFeatures(format!(
                        "index {index} does not increase after {last}"
                    )));
                }
            }
            if !value.is_finite() {
                return Err(Error::InvalidFeatures(format!(
                    "value at index {index} is not finite"
                )));
            }
            indices.push(index);
            values.push(value);
        }
        Ok(FeatureVector { indices, values })
    }

    /// Builds a vector from dense values; entry `i` gets index `i + 1`.
    /// Zeros are not stored.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &v)| (i as u32 + 1, v)),
        )
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: u32) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    /// Largest stored index, or 0 for the empty vector.
    pub fn max_index(&self) -> u32 {
        self.indices.last().copied().unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }

    /// Squared Euclidean distance. Symmetric bit-for-bit in its arguments.
    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(u32::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(u32::MAX);
            let d = match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    a += 1;
                    self.values[a - 1]
                }
                std::cmp::Ordering::Greater => {
                    b += 1;
                    other.values[b - 1]
                }
                std::cmp::Ordering::Equal => {
                    a += 1;
                    b += 1;
                    self.values[a - 1] - other.values[b - 1]
                }
            };
            sum += d * d;
        }
        sum
    }
}

/// Per-example costs of predicting each class. The intended class costs 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostVector {
    costs: Vec<f64>,
    intended: Label,
}

impl CostVector {
    pub fn new(costs: Vec<f64>, intended: Label) -> Result<Self> {
        if intended.get() > costs.len() {
            return Err(Error::InvalidLabel {
                label: intended.get(),
                classes: costs.len(),
            });
        }
        if let Some(bad) = costs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidCostVector(format!(
                "entry {bad} is not a finite nonnegative cost"
            )));
        }
        if costs[intended.index()] != 0.0 {
            return Err(Error::InvalidCostVector(format!(
                "cost of the intended class {intended} must be 0"
            )));
        }
        Ok(CostVector { costs, intended })
    }

    /// The 0/1 misclassification vector for label `y`.
    pub fn regular(y: Label, classes: usize) -> Result<Self> {
        if y.get() > classes {
            return Err(Error::InvalidLabel {
                label: y.get(),
                classes,
            });
        }
        let costs = (0..classes)
            .map(|k| if k == y.index() { 0.0 } else { 1.0 })
            .collect();
        Ok(CostVector { costs, intended: y })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, k: Label) -> f64 {
        self.costs[k.index()]
    }

    pub fn intended(&self) -> Label {
        self.intended
    }

    pub fn classes(&self) -> usize {
        self.costs.len()
    }

    /// Smallest class index attaining the minimum cost.
    pub fn cheapest(&self) -> Label {
        let mut best = 0;
        for (k, &c) in self.costs.iter().enumerate() {
            if c < self.costs[best] {
                best = k;
            }
        }
        Label::from_index(best)
    }
}

/// Free-function form of [`CostVector::regular`].
pub fn regular_cost_vector(y: Label, classes: usize) -> Result<CostVector> {
    CostVector::regular(y, classes)
}

/// Class-dependent `K x K` costs, row = true class, column = prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    classes: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let classes = rows.len();
        if classes < 2 {
            return Err(Error::InvalidCostMatrix(
                "need at least two classes".into(),
            ));
        }
        let mut entries = Vec::with_capacity(classes * classes);
        for (y, row) in rows.into_iter().enumerate() {
            if row.len() != classes {
                return Err(Error::InvalidCostMatrix(format!(
                    "row {} has {} entries, expected {classes}",
                    y + 1,
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Self::from_flat(classes, entries)
    }

    pub(crate) fn from_flat(classes: usize, entries: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(entries.len(), classes * classes);
        for (pos, &v) in entries.iter().enumerate() {
            let (y, k) = (pos / classes, pos % classes);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidCostMatrix(format!(
                    "entry ({}, {}) = {v} is not a finite nonnegative cost",
                    y + 1,
                    k + 1
                )));
            }
            if y == k && v != 0.0 {
                return Err(Error::InvalidCostMatrix(format!(
                    "diagonal entry ({0}, {0}) = {v} must be 0",
                    y + 1
                )));
            }
        }
        Ok(CostMatrix { classes, entries })
    }

    /// All off-diagonal entries equal to one.
    pub fn naive(classes: usize) -> Self {
        let entries = (0..classes * classes)
            .map(|p| if p / classes == p % classes { 0.0 } else { 1.0 })
            .collect();
        CostMatrix { classes, entries }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Entry by zero-based (true, predicted) indices.
    pub fn at(&self, y: usize, k: usize) -> f64 {
        self.entries[y * self.classes + k]
    }

    pub fn get(&self, y: Label, k: Label) -> f64 {
        self.at(y.index(), k.index())
    }

    pub fn row(&self, y: Label) -> &[f64] {
        let start = y.index() * self.classes;
        &self.entries[start..start + self.classes]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.classes)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn cost_vector(&self, y: Label) -> Result<CostVector> {
        CostVector::new(self.row(y).to_vec(), y)
    }

    /// Applies `f(y, k, value)` to every off-diagonal entry.
    pub(crate) fn map_off_diagonal(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let k = self.classes;
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(p, &v)| if p / k == p % k { 0.0 } else { f(p / k, p % k, v) })
            .collect();
        Self::from_flat(k, entries)
    }
}

/// Nonnegative per-class weights with a positive maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights(Vec<f64>);

impl ClassWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(ClassWeights(weights))
    }

    pub fn uniform(classes: usize) -> Self {
        ClassWeights(vec![1.0; classes])
    }

    pub fn get(&self, y: Label) -> f64 {
        self.0[y.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn classes(&self) -> usize {
        self.0.len()
    }
}

/// Features with labels, no costs attached.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<FeatureVector>,
    pub labels: Vec<Label>,
    pub classes: usize,
}

impl LabeledDataset {
    pub fn new(features: Vec<FeatureVector>, labels: Vec<Label>, classes: usize) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature vectors but {} labels",
                features.len(),
                labels.len()
            )));
        }
        for &y in &labels {
            Label::new(y.get(), classes)?;
        }
        Ok(LabeledDataset {
            features,
            labels,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of examples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.labels, self.classes)
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        LabeledDataset {
            features: rows.iter().map(|&r| self.features[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            classes: self.classes,
        }
    }

    /// Cost vector of each example = row `y` of `matrix`.
    pub fn attach_costs(&self, matrix: &CostMatrix) -> Result<CostSensitiveDataset> {
        attach_costs_from_matrix(self, matrix)
    }

    /// Attaches regular 0/1 cost vectors.
    pub fn with_regular_costs(&self) -> CostSensitiveDataset {
        let costs = self
            .labels
            .iter()
            .map(|&y| CostVector::regular(y, self.classes).expect("validated label"))
            .collect();
        CostSensitiveDataset {
            features: self.features.clone(),
            labels: self.labels.clone(),
            costs,
            classes: self.classes,
        }
    }
}

/// Examples with features, labels and attached cost vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSensitiveDataset {
    pub features: Vec<FeatureVector>,
    pub labels: Vec<Label>,
    pub costs: Vec<CostVector>,
    pub classes: usize,
}

impl CostSensitiveDataset {
    pub fn new(
        features: Vec<FeatureVector>,
        labels: Vec<Label>,
        costs: Vec<CostVector>,
        classes: usize,
    ) -> Result<Self> {
        let labeled = LabeledDataset::new(features, labels, classes)?;
        if costs.len() != labeled.len() {
            return Err(Error::invalid("one cost vector per example is required"));
        }
        for (c, &y) in costs.iter().zip(&labeled.labels) {
            if c.intended() != y || c.classes() != classes {
                return Err(Error::InvalidCostVector(format!(
                    "cost vector for an example of class {y} does not match it"
                )));
            }
        }
        Ok(CostSensitiveDataset {
            features: labeled.features,
            labels: labeled.labels,
            costs,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.labels, self.classes)
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        CostSensitiveDataset {
            features: rows.iter().map(|&r| self.features[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            costs: rows.iter().map(|&r| self.costs[r].clone()).collect(),
            classes: self.classes,
        }
    }

    pub fn labeled(&self) -> LabeledDataset {
        LabeledDataset {
            features: self.features.clone(),
            labels: self.labels.clone(),
            classes: self.classes,
        }
    }
}

pub fn class_counts(labels: &[Label], classes: usize) -> Vec<usize> {
    let mut counts = vec![0; classes];
    for y in labels {
        counts[y.index()] += 1;
    }
    counts
}

pub fn attach_costs_from_matrix(
    data: &LabeledDataset,
    matrix: &CostMatrix,
) -> Result<CostSensitiveDataset> {
    if matrix.classes() != data.classes {
        return Err(Error::InvalidCostMatrix(format!(
            "matrix has {} classes, dataset has {}",
            matrix.classes(),
            data.classes
        )));
    }
    let costs = data
        .labels
        .iter()
        .map(|&y| matrix.cost_vector(y))
        .collect::<Result<Vec<_>>>()?;
    Ok(CostSensitiveDataset {
        features: data.features.clone(),
        labels: data.labels.clone(),
        costs,
        classes: data.classes,
    })
}

/// Per-feature min/max fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerState {
    ranges: Vec<(f64, f64)>,
}

impl ScalerState {
    pub fn dimension(&self) -> usize {
        self.ranges.len()
    }

    pub fn range(&self, index: u32) -> Option<(f64, f64)> {
        self.ranges.get(index as usize - 1).copied()
    }

    /// Maps each feature of `x` through `(v - min) / (max - min)`.
    /// Constant features and indices unseen in training map to 0; results
    /// are not clipped.
    pub fn apply(&self, x: &FeatureVector) -> FeatureVector {
        let scaled = self.ranges.iter().enumerate().map(|(j, &(lo, hi))| {
            let span = hi - lo;
            if span > 0.0 {
                (x.get(j as u32 + 1) - lo) / span
            } else {
                0.0
            }
        });
        let entries: Vec<(u32, f64)> = scaled
            .enumerate()
            .filter(|(_, v)| *v != 0.0)
            .map(|(j, v)| (j as u32 + 1, v))
            .collect();
        FeatureVector {
            indices: entries.iter().map(|e| e.0).collect(),
            values: entries.iter().map(|e| e.1).collect(),
        }
    }

    pub fn apply_all(&self, xs: &[FeatureVector]) -> Vec<FeatureVector> {
        xs.iter().map(|x| self.apply(x)).collect()
    }
}

pub fn fit_scaler(train: &[FeatureVector]) -> Result<ScalerState> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = train.iter().map(|x| x.max_index()).max().unwrap_or(0) as usize;
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
    let mut stored = vec![0usize; dim];
    for x in train {
        for (i, v) in x.entries() {
            let r = &mut ranges[i as usize - 1];
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
            stored[i as usize - 1] += 1;
        }
    }
    // implicit zeros participate in the range
    for (r, &n) in ranges.iter_mut().zip(&stored) {
        if n < train.len() {
            r.0 = r.0.min(0.0);
            r.1 = r.1.max(0.0);
        }
    }
    Ok(ScalerState { ranges })
}

pub fn apply_scaler(state: &ScalerState, x: &FeatureVector) -> FeatureVector {
    state.apply(x)
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "split fraction {fraction} must lie strictly between 0 and 1"
        )));
    }
    Ok(())
}

/// Random split of `0..n`: the first `ceil(fraction * n)` shuffled rows train.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    check_fraction(fraction)?;
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((fraction * n as f64).ceil() as usize).min(n);
    let test = rows.split_off(cut);
    Ok((rows, test))
}

/// Per-class split: each class with at least two examples keeps at least
/// one test example.
pub fn stratified_split_indices(
    labels: &[Label],
    classes: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    check_fraction(fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for k in 0..classes {
        let mut rows: Vec<usize> = (0..labels.len())
            .filter(|&r| labels[r].index() == k)
            .collect();
        rows.shuffle(&mut rng);
        let n = rows.len();
        let mut cut = ((fraction * n as f64).ceil() as usize).min(n);
        if n >= 2 && cut == n {
            cut = n - 1;
        }
        test.extend_from_slice(&rows[cut..]);
        train.extend_from_slice(&rows[..cut]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_train_test(
    data: &CostSensitiveDataset,
    fraction: f64,
    seed: u64,
) -> Result<(CostSensitiveDataset, CostSensitiveDataset)> {
    let (train, test) = split_indices(data.len(), fraction, seed)?;
    Ok((data.subset(&train), data.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::from_dense(values).unwrap()
    }

    #[test]
    fn regular_vectors() {
        let c = |y, k| regular_cost_vector(Label::new(y, k).unwrap(), k).unwrap();
        assert_eq!(c(1, 3).costs(), &[0.0, 1.0, 1.0]);
        assert_eq!(c(2, 2).costs(), &[1.0, 0.0]);
        assert_eq!(c(3, 4).costs(), &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            Label::new(4, 3),
            Err(Error::InvalidLabel { label: 4, classes: 3 })
        ));
        assert!(Label::new(0, 3).is_err());
    }

    #[test]
    fn feature_vector_validation() {
        assert!(FeatureVector::new([(2, 1.0), (2, 3.0)]).is_err());
        assert!(FeatureVector::new([(3, 1.0), (1, 3.0)]).is_err());
        assert!(FeatureVector::new([(0, 1.0)]).is_err());
        assert!(FeatureVector::new([(1, f64::NAN)]).is_err());
        let x = FeatureVector::new([(1, 1.0), (4, 2.0)]).unwrap();
        assert_eq!(x.get(4), 2.0);
        assert_eq!(x.get(2), 0.0);
        assert_eq!(x.max_index(), 4);
    }

    #[test]
    fn distances() {
        let a = fv(&[0.0, 0.0]);
        let b = fv(&[3.0, 4.0]);
        assert_eq!(a.squared_distance(&b), 25.0);
        let c = FeatureVector::new([(1, 1.0), (3, 2.0)]).unwrap();
        let d = FeatureVector::new([(2, 1.0), (3, 1.0)]).unwrap();
        assert_eq!(c.squared_distance(&d), 3.0);
        assert_eq!(c.dot(&d), 2.0);
    }

    #[test]
    fn cost_vector_rejects_nonzero_intended() {
        let y = Label::new(1, 2).unwrap();
        assert!(CostVector::new(vec![1.0, 0.0], y).is_err());
        assert!(CostVector::new(vec![0.0, -1.0], y).is_err());
        assert!(CostVector::new(vec![0.0, 2.0], y).is_ok());
    }

    #[test]
    fn matrix_rows_attach() {
        let data = LabeledDataset::new(
            vec![fv(&[1.0]), fv(&[2.0])],
            vec![Label::new(2, 3).unwrap(), Label::new(3, 3).unwrap()],
            3,
        )
        .unwrap();
        let ds = data.attach_costs(&CostMatrix::naive(3)).unwrap();
        assert_eq!(ds.costs[0].costs(), &[1.0, 0.0, 1.0]);
        let bad = CostMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.5]]);
        assert!(matches!(bad, Err(Error::InvalidCostMatrix(_))));
        let two = CostMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(data.attach_costs(&two).is_err());
    }

    #[test]
    fn scaler_examples() {
        let train = vec![fv(&[2.0, 5.0]), fv(&[6.0, 5.0])];
        let s = fit_scaler(&train).unwrap();
        assert_eq!(s.apply(&fv(&[4.0, 1.0])).get(1), 0.5);
        assert_eq!(s.apply(&fv(&[8.0, 1.0])).get(1), 1.5);
        // constant column
        assert_eq!(s.apply(&fv(&[8.0, 123.0])).get(2), 0.0);
        assert!(matches!(fit_scaler(&[]), Err(Error::EmptyDataset)));
    }

    #[test]
    fn scaler_counts_implicit_zeros() {
        let train = vec![
            FeatureVector::new([(1, 4.0)]).unwrap(),
            FeatureVector::new([(1, 2.0), (2, 8.0)]).unwrap(),
        ];
        let s = fit_scaler(&train).unwrap();
        assert_eq!(s.range(1), Some((2.0, 4.0)));
        assert_eq!(s.range(2), Some((0.0, 8.0)));
        // index beyond the training dimension maps to 0
        let x = FeatureVector::new([(1, 3.0), (5, 9.0)]).unwrap();
        let y = s.apply(&x);
        assert_eq!(y.get(1), 0.5);
        assert_eq!(y.get(5), 0.0);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let (a, b) = split_indices(100, 0.75, 7).unwrap();
        assert_eq!((a.len(), b.len()), (75, 25));
        let (c, d) = split_indices(4, 0.75, 1).unwrap();
        assert_eq!((c.len(), d.len()), (3, 1));
        assert_eq!(split_indices(100, 0.75, 7).unwrap().0, a);
        assert_ne!(split_indices(100, 0.75, 8).unwrap().0, a);
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(split_indices(10, 1.0, 0).is_err());
        assert!(split_indices(10, 0.0, 0).is_err());
    }

    #[test]
    fn stratified_keeps_every_class_in_test() {
        let labels: Vec<Label> = [1, 1, 2, 2, 2, 3, 3, 3, 3, 3]
            .iter()
            .map(|&y| Label::new(y, 3).unwrap())
            .collect();
        let (train, test) = stratified_split_indices(&labels, 3, 0.75, 3).unwrap();
        assert_eq!(train.len() + test.len(), 10);
        let test_counts = class_counts(
            &test.iter().map(|&r| labels[r]).collect::<Vec<_>>(),
            3,
        );
        assert!(test_counts.iter().all(|&c| c >= 1));
    }
}
