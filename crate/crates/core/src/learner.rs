//! Base learners: an example-weighted kernel SVM and one-sided kernel
//! regression, both trained through [`crate::solver`].

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::kernel::{Gram, Kernel};
use crate::solver::{self, SolverOptions};

/// Examples with weight below this are dropped before solving.
pub const MIN_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Positive => 1.0,
        }
    }

    pub fn of(decision: f64) -> Option<Sign> {
        if decision > 0.0 {
            Some(Sign::Positive)
        } else if decision < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

/// Rows of a [`Gram`] with a sign and a weight each. This is the part of a
/// binary problem that reductions construct; it carries no regularization.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinarySpec {
    pub rows: Vec<usize>,
    pub signs: Vec<Sign>,
    pub weights: Vec<f64>,
}

impl BinarySpec {
    pub fn push(&mut self, row: usize, sign: Sign, weight: f64) {
        self.rows.push(row);
        self.signs.push(sign);
        self.weights.push(weight);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Bit-level equality, distinguishing e.g. `0.0` from `-0.0`.
    pub fn bit_eq(&self, other: &BinarySpec) -> bool {
        self.rows == other.rows
            && self.signs == other.signs
            && self.weights.len() == other.weights.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Total weight carried by each sign.
    pub fn weight_by_sign(&self) -> (f64, f64) {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for (s, w) in self.signs.iter().zip(&self.weights) {
            if *w >= MIN_WEIGHT {
                match s {
                    Sign::Negative => neg += w,
                    Sign::Positive => pos += w,
                }
            }
        }
        (neg, pos)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedBinaryProblem<'a> {
    pub gram: &'a Gram,
    pub spec: &'a BinarySpec,
    pub lambda: f64,
}

/// Where a model is evaluated: a free point, or a row of the Gram the model
/// was trained on.
#[derive(Debug, Clone, Copy)]
pub enum Probe<'a> {
    Point(&'a FeatureVector),
    Row(&'a Gram, usize),
}

/// Dual kernel expansion `f(x) = sum_n coef_n k(x_n, x) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelExpansion {
    pub kernel: Kernel,
    pub support: Vec<FeatureVector>,
    /// Row of each support vector in the training Gram.
    pub support_rows: Vec<usize>,
    pub coef: Vec<f64>,
    pub bias: f64,
}

impl KernelExpansion {
    pub fn constant(kernel: Kernel, bias: f64) -> Self {
        KernelExpansion {
            kernel,
            support: Vec::new(),
            support_rows: Vec::new(),
            coef: Vec::new(),
            bias,
        }
    }

    pub fn value(&self, x: &FeatureVector) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(sv, c)| c * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Value at row `row` of the Gram the expansion was trained on.
    pub fn value_at(&self, gram: &Gram, row: usize) -> f64 {
        self.support_rows
            .iter()
            .zip(&self.coef)
            .map(|(&r, c)| c * gram.get(r, row))
            .sum::<f64>()
            + self.bias
    }

    pub fn eval(&self, probe: Probe<'_>) -> f64 {
        match probe {
            Probe::Point(x) => self.value(x),
            Probe::Row(gram, row) => self.value_at(gram, row),
        }
    }

    pub fn support_len(&self) -> usize {
        self.coef.len()
    }
}

/// Training diagnostics from the dual solve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub objective: f64,
    pub kkt_gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub expansion: KernelExpansion,
    pub stats: SolveStats,
}

impl BinaryModel {
    /// Model whose decision is the constant `sign`.
    pub fn constant(kernel: Kernel, sign: Sign) -> Self {
        BinaryModel {
            expansion: KernelExpansion::constant(kernel, sign.value()),
            stats: SolveStats::default(),
        }
    }

    pub fn decision(&self, x: &FeatureVector) -> f64 {
        self.expansion.value(x)
    }

    pub fn decision_at(&self, gram: &Gram, row: usize) -> f64 {
        self.expansion.value_at(gram, row)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "regularization must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Soft-margin SVM with per-example box `0 <= a_n <= weight_n / lambda`.
pub fn train_weighted_binary(
    problem: &WeightedBinaryProblem<'_>,
    options: &SolverOptions,
) -> Result<BinaryModel> {
    check_lambda(problem.lambda)?;
    let spec = problem.spec;
    if spec.signs.len() != spec.rows.len() || spec.weights.len() != spec.rows.len() {
        return Err(Error::invalid("rows, signs and weights differ in length"));
    }
    if let Some(w) = spec.weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::invalid(format!("weight {w} is not finite and nonnegative")));
    }
    let kept: Vec<usize> = (0..spec.len())
        .filter(|&n| spec.weights[n] >= MIN_WEIGHT)
        .collect();
    let (neg, pos) = spec.weight_by_sign();
    if neg == 0.0 || pos == 0.0 {
        return Err(Error::DegenerateProblem(
            "both signs need an example with positive weight".into(),
        ));
    }
    let rows: Vec<usize> = kept.iter().map(|&n| spec.rows[n]).collect();
    let signs: Vec<f64> = kept.iter().map(|&n| spec.signs[n].value()).collect();
    let upper: Vec<f64> = kept
        .iter()
        .map(|&n| spec.weights[n] / problem.lambda)
        .collect();
    let linear = vec![-1.0; rows.len()];
    let gram = problem.gram;
    let sol = solver::solve(
        |i, j| gram.get(rows[i], rows[j]),
        &signs,
        &linear,
        &upper,
        options,
    );
    Ok(BinaryModel {
        expansion: expansion_from(gram, &rows, &signs, &sol.alpha, -sol.rho),
        stats: SolveStats {
            objective: sol.objective,
            kkt_gap: sol.gap,
            iterations: sol.iterations,
        },
    })
}

fn expansion_from(gram: &Gram, rows: &[usize], signs: &[f64], alpha: &[f64], bias: f64) -> KernelExpansion {
    let mut support = Vec::new();
    let mut support_rows = Vec::new();
    let mut coef = Vec::new();
    for ((&r, &s), &a) in rows.iter().zip(signs).zip(alpha) {
        if a > 0.0 {
            support.push(gram.point(r).clone());
            support_rows.push(r);
            coef.push(a * s);
        }
    }
    KernelExpansion {
        kernel: gram.kernel(),
        support,
        support_rows,
        coef,
        bias,
    }
}

/// Direction of a one-sided hinge: `Over` penalizes `r(x) > target`,
/// `Under` penalizes `r(x) < target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Over,
    Under,
}

impl Direction {
    pub fn value(self) -> f64 {
        match self {
            Direction::Over => 1.0,
            Direction::Under => -1.0,
        }
    }
}

/// The construction part of a one-sided regression problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OneSidedSpec {
    pub rows: Vec<usize>,
    pub targets: Vec<f64>,
    pub directions: Vec<Direction>,
}

impl OneSidedSpec {
    pub fn bit_eq(&self, other: &OneSidedSpec) -> bool {
        self.rows == other.rows
            && self.directions == other.directions
            && self.targets.len() == other.targets.len()
            && self
                .targets
                .iter()
                .zip(&other.targets)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OneSidedProblem<'a> {
    pub gram: &'a Gram,
    pub spec: &'a OneSidedSpec,
    pub lambda: f64,
}

impl OneSidedProblem<'_> {
    /// Regressor values `r(x_n) = sum_m coef_m K(x_m, x_n) + bias` over the
    /// problem's own rows.
    fn fitted(&self, coef: &[f64], bias: f64) -> Vec<f64> {
        let rows = &self.spec.rows;
        rows.iter()
            .map(|&rn| {
                rows.iter()
                    .zip(coef)
                    .map(|(&rm, c)| c * self.gram.get(rm, rn))
                    .sum::<f64>()
                    + bias
            })
            .collect()
    }

    /// `sum_n max(0, z_n (r(x_n) - t_n))`.
    pub fn hinge_loss(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.spec.targets)
            .zip(&self.spec.directions)
            .map(|((r, t), z)| (z.value() * (r - t)).max(0.0))
            .sum()
    }

    /// Primal objective `hinge + lambda/2 * coef' K coef` for a regressor
    /// expanded over the problem's rows.
    pub fn objective(&self, coef: &[f64], bias: f64) -> f64 {
        let values = self.fitted(coef, bias);
        let norm: f64 = values
            .iter()
            .zip(coef)
            .map(|(v, c)| c * (v - bias))
            .sum();
        self.hinge_loss(&values) + self.lambda / 2.0 * norm
    }

    /// Subgradient of [`Self::objective`] with respect to `(coef, bias)`,
    /// taking the zero branch at exact kinks.
    pub fn subgradient(&self, coef: &[f64], bias: f64) -> (Vec<f64>, f64) {
        let rows = &self.spec.rows;
        let values = self.fitted(coef, bias);
        let active: Vec<f64> = values
            .iter()
            .zip(&self.spec.targets)
            .zip(&self.spec.directions)
            .map(|((r, t), z)| if z.value() * (r - t) > 0.0 { z.value() } else { 0.0 })
            .collect();
        let grad = rows
            .iter()
            .map(|&rj| {
                rows.iter()
                    .zip(&active)
                    .zip(coef)
                    .map(|((&rn, a), c)| {
                        let k = self.gram.get(rn, rj);
                        a * k + self.lambda * c * k
                    })
                    .sum()
            })
            .collect();
        (grad, active.iter().sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regressor {
    pub expansion: KernelExpansion,
    pub stats: SolveStats,
}

impl Regressor {
    pub fn value(&self, x: &FeatureVector) -> f64 {
        self.expansion.value(x)
    }

    pub fn value_at(&self, gram: &Gram, row: usize) -> f64 {
        self.expansion.value_at(gram, row)
    }
}

/// Minimizes `sum_n max(0, z_n (r(x_n) - t_n)) + lambda/2 ||r||^2` with a
/// free bias, via the dual with box `1/lambda`.
pub fn train_one_sided(problem: &OneSidedProblem<'_>, options: &SolverOptions) -> Result<Regressor> {
    check_lambda(problem.lambda)?;
    let spec = problem.spec;
    if spec.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if spec.targets.len() != spec.rows.len() || spec.directions.len() != spec.rows.len() {
        return Err(Error::invalid("rows, targets and directions differ in length"));
    }
    if let Some(t) = spec.targets.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::invalid(format!("target {t} is not a finite nonnegative cost")));
    }
    // With y = -z the one-sided dual is the standard form with p = -y t.
    let signs: Vec<f64> = spec.directions.iter().map(|z| -z.value()).collect();
    let linear: Vec<f64> = signs
        .iter()
        .zip(&spec.targets)
        .map(|(y, t)| -y * t)
        .collect();
    let upper = vec![1.0 / problem.lambda; spec.rows.len()];
    let gram = problem.gram;
    let rows = &spec.rows;
    let sol = solver::solve(|i, j| gram.get(rows[i], rows[j]), &signs, &linear, &upper, options);
    Ok(Regressor {
        expansion: expansion_from(gram, rows, &signs, &sol.alpha, -sol.rho),
        stats: SolveStats {
            objective: sol.objective,
            kkt_gap: sol.gap,
            iterations: sol.iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::from_dense(v).unwrap()
    }

    fn spec(signs: &[Sign], weights: &[f64]) -> BinarySpec {
        BinarySpec {
            rows: (0..signs.len()).collect(),
            signs: signs.to_vec(),
            weights: weights.to_vec(),
        }
    }

    use Sign::{Negative as N, Positive as P};

    #[test]
    fn separable_pair() {
        let gram = Gram::new(Kernel::Perceptron, vec![fv(&[0.0]), fv(&[1.0])]);
        let s = spec(&[N, P], &[1.0, 1.0]);
        let m = train_weighted_binary(
            &WeightedBinaryProblem { gram: &gram, spec: &s, lambda: 0.01 },
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(m.decision(&fv(&[0.0])) < 0.0);
        assert!(m.decision(&fv(&[1.0])) > 0.0);
        assert!(m.decision_at(&gram, 0) < 0.0 && m.decision_at(&gram, 1) > 0.0);
    }

    #[test]
    fn xor_is_fit_by_the_perceptron_kernel() {
        let pts = vec![fv(&[0.0, 0.0]), fv(&[1.0, 1.0]), fv(&[0.0, 1.0]), fv(&[1.0, 0.0])];
        let gram = Gram::new(Kernel::Perceptron, pts.clone());
        let s = spec(&[N, N, P, P], &[1.0; 4]);
        let m = train_weighted_binary(
            &WeightedBinaryProblem { gram: &gram, spec: &s, lambda: 0.25 },
            &SolverOptions::default(),
        )
        .unwrap();
        for (x, sign) in pts.iter().zip(&s.signs) {
            assert_eq!(Sign::of(m.decision(x)), Some(*sign));
        }
        assert!(m.stats.kkt_gap <= 1e-3);
    }

    #[test]
    fn degenerate_and_invalid_problems() {
        let gram = Gram::new(Kernel::Linear, vec![fv(&[0.0]), fv(&[1.0])]);
        let s = spec(&[N, P], &[1.0, 0.0]);
        let p = WeightedBinaryProblem { gram: &gram, spec: &s, lambda: 1.0 };
        assert!(matches!(
            train_weighted_binary(&p, &SolverOptions::default()),
            Err(Error::DegenerateProblem(_))
        ));
        let s = spec(&[N, P], &[1.0, 1.0]);
        let p = WeightedBinaryProblem { gram: &gram, spec: &s, lambda: 0.0 };
        assert!(matches!(
            train_weighted_binary(&p, &SolverOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn zero_weight_examples_are_ignored() {
        let pts = vec![fv(&[0.0]), fv(&[1.0]), fv(&[0.1])];
        let gram = Gram::new(Kernel::Perceptron, pts);
        let with = spec(&[N, P, P], &[1.0, 1.0, 0.0]);
        let without = BinarySpec { rows: vec![0, 1], signs: vec![N, P], weights: vec![1.0, 1.0] };
        let opts = SolverOptions::default();
        let a = train_weighted_binary(&WeightedBinaryProblem { gram: &gram, spec: &with, lambda: 0.5 }, &opts).unwrap();
        let b = train_weighted_binary(&WeightedBinaryProblem { gram: &gram, spec: &without, lambda: 0.5 }, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_expansion_is_its_bias() {
        let m = BinaryModel::constant(Kernel::Perceptron, Sign::Negative);
        assert_eq!(m.decision(&fv(&[3.0])), -1.0);
        let e = KernelExpansion::constant(Kernel::Linear, 2.5);
        assert_eq!(e.value(&fv(&[1.0, 1.0])), 2.5);
    }

    #[test]
    fn constant_targets_are_fit_exactly() {
        let pts: Vec<_> = (0..6).map(|i| fv(&[i as f64 * 0.3, 1.0 - i as f64 * 0.1])).collect();
        let gram = Gram::new(Kernel::Perceptron, pts);
        let spec = OneSidedSpec {
            rows: (0..6).collect(),
            targets: vec![0.7; 6],
            directions: vec![
                Direction::Over,
                Direction::Under,
                Direction::Over,
                Direction::Under,
                Direction::Under,
                Direction::Over,
            ],
        };
        let p = OneSidedProblem { gram: &gram, spec: &spec, lambda: 0.5 };
        let r = train_one_sided(&p, &SolverOptions::default()).unwrap();
        let values: Vec<f64> = (0..6).map(|n| r.value_at(&gram, n)).collect();
        assert!(p.hinge_loss(&values) <= 1e-6, "{values:?}");
    }

    #[test]
    fn over_estimation_only_is_already_satisfied() {
        let pts: Vec<_> = (0..4).map(|i| fv(&[i as f64])).collect();
        let gram = Gram::new(Kernel::Perceptron, pts);
        let spec = OneSidedSpec {
            rows: (0..4).collect(),
            targets: vec![5.0, 7.0, 9.0, 6.0],
            directions: vec![Direction::Over; 4],
        };
        let p = OneSidedProblem { gram: &gram, spec: &spec, lambda: 1.0 };
        assert_eq!(p.hinge_loss(&[0.0; 4]), 0.0);
        let r = train_one_sided(&p, &SolverOptions::default()).unwrap();
        let values: Vec<f64> = (0..4).map(|n| r.value_at(&gram, n)).collect();
        assert_eq!(p.hinge_loss(&values), 0.0);
    }
}
