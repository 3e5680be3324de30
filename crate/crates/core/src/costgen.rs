//! Benchmark cost structures: random inconsistent and consistent matrices,
//! column emphasis, row balancing and class weights from class counts.

use rand::Rng;

use crate::dataset::{ClassWeights, CostMatrix, Label};
use crate::error::{Error, Result};

fn check_counts(counts: &[usize]) -> Result<()> {
    if counts.len() < 2 {
        return Err(Error::invalid("cost generation needs at least two classes"));
    }
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(Error::invalid(format!("class {} has no examples", k + 1)));
    }
    Ok(())
}

/// Uniform draw from `[0, bound)`.
fn uniform<R: Rng + ?Sized>(rng: &mut R, bound: f64) -> f64 {
    rng.random::<f64>() * bound
}

/// Off-diagonal `(y, k)` drawn from `[0, counts[k] / counts[y]]`, unscaled.
pub(crate) fn raw_inconsistent<R: Rng + ?Sized>(counts: &[usize], rng: &mut R) -> Vec<Vec<f64>> {
    let k = counts.len();
    (0..k)
        .map(|y| {
            (0..k)
                .map(|j| {
                    if j == y {
                        0.0
                    } else {
                        uniform(rng, counts[j] as f64 / counts[y] as f64)
                    }
                })
                .collect()
        })
        .collect()
}

/// Random matrix with `C(y,k) ~ U[0, n_k / n_y]`, divided by its largest
/// entry.
pub fn gen_inconsistent<R: Rng + ?Sized>(counts: &[usize], rng: &mut R) -> Result<CostMatrix> {
    check_counts(counts)?;
    loop {
        let rows = raw_inconsistent(counts, rng);
        let max = rows.iter().flatten().copied().fold(0.0, f64::max);
        if max > 0.0 {
            let scaled = rows.into_iter().map(|r| r.into_iter().map(|v| v / max).collect()).collect();
            return CostMatrix::new(scaled);
        }
    }
}

/// Fills the upper triangle from the lower one so that
/// `C(k,y) = (w_k / w_y) C(y,k)` for `k < y`.
pub fn consistent_from_lower(weights: &ClassWeights, lower: &CostMatrix) -> Result<CostMatrix> {
    let k = lower.classes();
    if weights.classes() != k {
        return Err(Error::invalid("one weight per class is required"));
    }
    let w = weights.as_slice();
    if w.iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidWeights("consistent generation needs positive weights".into()));
    }
    let mut rows = vec![vec![0.0; k]; k];
    for y in 0..k {
        for j in 0..y {
            rows[y][j] = lower.at(y, j);
            rows[j][y] = w[j] / w[y] * lower.at(y, j);
        }
    }
    CostMatrix::new(rows)
}

/// Random consistent matrix and the weights that make it consistent. The
/// weights are sorted uniform draws, largest to the least frequent class
/// (count ties in label order); `C(y,k) ~ U[0, n_y / n_k]` for `y > k`.
pub fn gen_consistent<R: Rng + ?Sized>(counts: &[usize], rng: &mut R) -> Result<(CostMatrix, ClassWeights)> {
    check_counts(counts)?;
    let k = counts.len();
    let mut draws: Vec<f64> = loop {
        let d: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        if d.iter().all(|&x| x > 0.0) {
            break d;
        }
    };
    draws.sort_by(|a, b| b.total_cmp(a));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| (counts[c], c));
    let mut w = vec![0.0; k];
    for (rank, &class) in order.iter().enumerate() {
        w[class] = draws[rank];
    }
    let weights = ClassWeights::new(w)?;
    let mut lower = vec![vec![0.0; k]; k];
    for y in 0..k {
        for j in 0..y {
            lower[y][j] = uniform(rng, counts[y] as f64 / counts[j] as f64);
        }
    }
    let matrix = consistent_from_lower(&weights, &CostMatrix::new(lower)?)?;
    Ok((matrix, weights))
}

/// `w_y = (1 / n_y) / max_k (1 / n_k)`: the rarest class gets weight 1.
pub fn balanced_class_weights(counts: &[usize]) -> Result<ClassWeights> {
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(Error::invalid(format!("class {} has no examples", k + 1)));
    }
    let min = *counts.iter().min().ok_or_else(|| Error::invalid("no classes"))?;
    ClassWeights::new(counts.iter().map(|&c| min as f64 / c as f64).collect())
}

/// Multiplies the off-diagonal entries of column `k` by `u`.
pub fn emphasize_column(matrix: &CostMatrix, k: Label, u: f64) -> Result<CostMatrix> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::invalid(format!("emphasis {u} must be positive")));
    }
    if k.index() >= matrix.classes() {
        return Err(Error::InvalidLabel {
            label: k.get(),
            classes: matrix.classes(),
        });
    }
    matrix.map_off_diagonal(|_, j, v| if j == k.index() { v * u } else { v })
}

/// Smallest label among the classes with the fewest examples.
pub fn least_frequent(counts: &[usize]) -> Label {
    let k = (0..counts.len()).min_by_key(|&k| (counts[k], k)).unwrap_or(0);
    Label::from_index(k)
}

/// Divides row `y` by `n_y`.
pub fn balance_rows(matrix: &CostMatrix, counts: &[usize]) -> Result<CostMatrix> {
    if counts.len() != matrix.classes() {
        return Err(Error::invalid("one count per class is required"));
    }
    check_counts(counts)?;
    matrix.map_off_diagonal(|y, _, v| v / counts[y] as f64)
}

/// Scales `matrix` so its entries sum to `K (K - 1)`, the sum of the naive
/// matrix.
pub fn normalize_matrix_sum(matrix: &CostMatrix) -> Result<CostMatrix> {
    let k = matrix.classes() as f64;
    let sum = matrix.sum();
    if sum <= 0.0 {
        return Err(Error::invalid("cannot normalize an all-zero cost matrix"));
    }
    let factor = k * (k - 1.0) / sum;
    matrix.map_off_diagonal(|_, _, v| v * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::cszl_weights;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn inconsistent_shape() {
        let mut r = rng(1);
        for counts in [vec![5, 5], vec![100, 1], vec![30, 20, 10, 5]] {
            let m = gen_inconsistent(&counts, &mut r).unwrap();
            assert_eq!(m.max_entry(), 1.0);
            for y in 0..counts.len() {
                assert_eq!(m.at(y, y), 0.0);
            }
        }
        let raw = raw_inconsistent(&[100, 1], &mut r);
        assert!(raw[1][0] <= 100.0 && raw[0][1] <= 0.01);
    }

    #[test]
    fn inconsistent_entry_means() {
        let counts = [40, 10, 5];
        let mut r = rng(2);
        let mut sums = vec![vec![0.0; 3]; 3];
        let draws = 1000;
        for _ in 0..draws {
            let raw = raw_inconsistent(&counts, &mut r);
            for y in 0..3 {
                for k in 0..3 {
                    sums[y][k] += raw[y][k];
                }
            }
        }
        for y in 0..3 {
            for k in (0..3).filter(|&k| k != y) {
                let expected = counts[k] as f64 / (2.0 * counts[y] as f64);
                let mean = sums[y][k] / draws as f64;
                assert!((mean - expected).abs() <= 0.05 * expected, "({y},{k}) {mean} vs {expected}");
            }
        }
    }

    #[test]
    fn inconsistent_draws_fail_the_consistency_test() {
        let mut r = rng(3);
        for _ in 0..100 {
            let m = gen_inconsistent(&[50, 30, 20], &mut r).unwrap();
            assert!(cszl_weights(&m).is_none());
        }
    }

    #[test]
    fn rejects_empty_classes() {
        assert!(gen_inconsistent(&[3, 0], &mut rng(0)).is_err());
        assert!(gen_consistent(&[3], &mut rng(0)).is_err());
        assert!(balanced_class_weights(&[0, 2]).is_err());
    }

    #[test]
    fn two_class_consistent_example() {
        let w = ClassWeights::new(vec![0.2, 0.8]).unwrap();
        let lower = CostMatrix::new(vec![vec![0.0, 0.0], vec![0.5, 0.0]]).unwrap();
        let m = consistent_from_lower(&w, &lower).unwrap();
        assert_eq!(m.at(0, 1), 0.125);
        assert_eq!(m.at(1, 0), 0.5);
        let eq = consistent_from_lower(&ClassWeights::uniform(3), &CostMatrix::naive(3)).unwrap();
        assert_eq!(eq, CostMatrix::naive(3));
    }

    #[test]
    fn consistent_weights_follow_rarity() {
        let mut r = rng(4);
        for _ in 0..20 {
            let (m, w) = gen_consistent(&[50, 5, 20, 5], &mut r).unwrap();
            let w = w.as_slice();
            assert!(w[1] > w[2] && w[2] > w[0]);
            assert!(w[3] > w[2] && w[1] >= w[3]);
            let got = cszl_weights(&m).unwrap();
            let ratio: Vec<f64> = got.as_slice().iter().zip(w).map(|(a, b)| a / b).collect();
            assert!(ratio.iter().all(|x| (x / ratio[0] - 1.0).abs() < 1e-6), "{ratio:?}");
        }
    }

    #[test]
    fn balanced_weights() {
        assert_eq!(balanced_class_weights(&[100, 1]).unwrap().as_slice(), &[0.01, 1.0]);
        assert_eq!(balanced_class_weights(&[7, 7, 7]).unwrap().as_slice(), &[1.0; 3]);
        assert_eq!(balanced_class_weights(&[4, 2, 1]).unwrap().as_slice(), &[0.25, 0.5, 1.0]);
    }

    #[test]
    fn emphasis_examples() {
        let m = CostMatrix::naive(3);
        assert_eq!(emphasize_column(&m, Label::from_index(1), 1.0).unwrap(), m);
        let e = emphasize_column(&m, Label::from_index(0), 100.0).unwrap();
        assert_eq!((e.at(1, 0), e.at(2, 0), e.at(0, 0), e.at(0, 1)), (100.0, 100.0, 0.0, 1.0));
        assert!(emphasize_column(&m, Label::from_index(0), 0.0).is_err());
        assert_eq!(least_frequent(&[5, 2, 2]).get(), 2);
    }

    #[test]
    fn row_balancing_and_sum_normalization() {
        let m = CostMatrix::new(vec![vec![0.0, 6.0, 6.0], vec![1.0, 0.0, 1.0], vec![3.0, 3.0, 0.0]]).unwrap();
        let b = balance_rows(&m, &[3, 1, 3]).unwrap();
        assert_eq!(b.row(Label::from_index(0)), &[0.0, 2.0, 2.0]);
        assert_eq!(b.row(Label::from_index(1)), &[1.0, 0.0, 1.0]);
        assert_eq!(balance_rows(&m, &[1, 1, 1]).unwrap(), m);
        assert_eq!(normalize_matrix_sum(&CostMatrix::naive(4)).unwrap(), CostMatrix::naive(4));
        let n = normalize_matrix_sum(&CostMatrix::new(vec![vec![0.0, 1.0], vec![30.0, 0.0]]).unwrap()).unwrap();
        assert_eq!((n.at(0, 1), n.at(1, 0)), (2.0 / 31.0, 30.0 * (2.0 / 31.0)));
        let zero = CostMatrix::new(vec![vec![0.0; 2]; 2]).unwrap();
        assert!(normalize_matrix_sum(&zero).is_err());
    }

    proptest! {
        #[test]
        fn generators_are_valid_and_deterministic(seed in any::<u64>(), counts in prop::collection::vec(1usize..50, 2..6)) {
            let a = gen_inconsistent(&counts, &mut rng(seed)).unwrap();
            prop_assert_eq!(&a, &gen_inconsistent(&counts, &mut rng(seed)).unwrap());
            let (b, w) = gen_consistent(&counts, &mut rng(seed)).unwrap();
            prop_assert_eq!((&b, &w), (&gen_consistent(&counts, &mut rng(seed)).unwrap().0, &gen_consistent(&counts, &mut rng(seed)).unwrap().1));
            for m in [&a, &b] {
                for y in 0..counts.len() {
                    prop_assert_eq!(m.at(y, y), 0.0);
                    prop_assert!(m.row(Label::from_index(y)).iter().all(|&v| v >= 0.0));
                }
            }
            let n = normalize_matrix_sum(&a).unwrap();
            let k = counts.len() as f64;
            prop_assert!((n.sum() - k * (k - 1.0)).abs() <= 1e-12 * k * k);
        }

        #[test]
        fn emphasis_composes(seed in any::<u64>(), e1 in -8i32..8, e2 in -8i32..8, col in 0usize..3) {
            let m = gen_inconsistent(&[4, 3, 2], &mut rng(seed)).unwrap();
            let (u1, u2) = (2f64.powi(e1), 2f64.powi(e2));
            let k = Label::from_index(col);
            let twice = emphasize_column(&emphasize_column(&m, k, u1).unwrap(), k, u2).unwrap();
            prop_assert_eq!(twice, emphasize_column(&m, k, u1 * u2).unwrap());
        }
    }
}
