//! Two-variable decomposition solver for box-constrained kernel duals
//!
//! ```text
//! min_a  1/2 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_i <= C_i,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Working pairs are picked by maximal violation for the first index and
//! second-order gain for the second, the same selection LIBSVM uses. The
//! solver stops once the maximal KKT violation `m(a) - M(a)` drops below the
//! tolerance.

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    /// Iteration cap; `None` picks `max(10^7, 100 n)`.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-3,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// Offset such that the decision function is `sum a_i y_i K(x_i, x) - rho`.
    pub rho: f64,
    pub objective: f64,
    /// Maximal KKT violation at the returned point.
    pub gap: f64,
    pub iterations: usize,
}

/// Solves the dual. `kernel(i, j)` returns `K_ij`; `signs` are `+-1`.
pub fn solve<K>(
    kernel: K,
    signs: &[f64],
    linear: &[f64],
    upper: &[f64],
    options: &SolverOptions,
) -> DualSolution
where
    K: Fn(usize, usize) -> f64,
{
    let n = signs.len();
    assert_eq!(linear.len(), n);
    assert_eq!(upper.len(), n);
    let y = signs;
    let diag: Vec<f64> = (0..n).map(|i| kernel(i, i)).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = linear.to_vec();
    let max_iter = options.max_iterations.unwrap_or_else(|| (100 * n).max(10_000_000));
    let eps = options.tolerance;

    let mut row_i = vec![0.0; n];
    let mut row_j = vec![0.0; n];
    let fill_row = |i: usize, row: &mut [f64]| {
        for (t, r) in row.iter_mut().enumerate() {
            *r = y[i] * y[t] * kernel(i, t);
        }
    };
    let is_upper = |a: &[f64], t: usize| a[t] >= upper[t];
    let is_lower = |a: &[f64], t: usize| a[t] <= 0.0;

    let mut iterations = 0;
    let mut gap;
    loop {
        // first index: maximal violation among I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut first = None;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 {
                !is_upper(&alpha, t)
            } else {
                !is_lower(&alpha, t)
            };
            if in_up && v >= gmax {
                gmax = v;
                first = Some(t);
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut second = None;
        if let Some(i) = first {
            fill_row(i, &mut row_i);
            let mut best = f64::INFINITY;
            for t in 0..n {
                let in_low = if y[t] > 0.0 {
                    !is_lower(&alpha, t)
                } else {
                    !is_upper(&alpha, t)
                };
                if !in_low {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmax2 = gmax2.max(-v);
                let diff = gmax - v;
                if diff > 0.0 {
                    let quad = diag[i] + diag[t] - 2.0 * y[i] * y[t] * row_i[t];
                    let gain = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if gain <= best {
                        best = gain;
                        second = Some(t);
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if !gap.is_finite() {
            gap = 0.0;
        }
        let (i, j) = match (first, second) {
            (Some(i), Some(j)) if gap >= eps && iterations < max_iter => (i, j),
            _ => break,
        };
        iterations += 1;
        fill_row(j, &mut row_j);

        let (ci, cj) = (upper[i], upper[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * row_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * row_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += row_i[t] * di + row_j[t] * dj;
        }
    }

    let rho = offset(&alpha, &grad, y, upper);
    let objective = alpha
        .iter()
        .zip(&grad)
        .zip(linear)
        .map(|((a, g), p)| a * (g + p))
        .sum::<f64>()
        / 2.0;
    DualSolution {
        alpha,
        rho,
        objective,
        gap,
        iterations,
    }
}

/// Offset from free variables' KKT conditions (averaged), or the midpoint of
/// the feasible interval when none are free.
fn offset(alpha: &[f64], grad: &[f64], y: &[f64], upper: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= upper[t] {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        match (ub.is_finite(), lb.is_finite()) {
            (true, true) => (ub + lb) / 2.0,
            (true, false) => ub,
            (false, true) => lb,
            (false, false) => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_dual_has_closed_form() {
        // x = 0 (y=-1), x = 1 (y=+1), linear kernel, C large: a = 2, w = 2, b = -1
        let xs = [0.0, 1.0];
        let k = |i: usize, j: usize| xs[i] * xs[j];
        let sol = solve(k, &[-1.0, 1.0], &[-1.0, -1.0], &[100.0, 100.0], &SolverOptions::default());
        assert!((sol.alpha[0] - 2.0).abs() < 1e-9, "{:?}", sol);
        assert!((sol.alpha[1] - 2.0).abs() < 1e-9);
        assert!((sol.rho - 1.0).abs() < 1e-9);
        assert!((sol.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn box_constraint_binds() {
        let xs = [0.0, 1.0];
        let k = |i: usize, j: usize| xs[i] * xs[j];
        let sol = solve(k, &[-1.0, 1.0], &[-1.0, -1.0], &[0.5, 0.5], &SolverOptions::default());
        assert_eq!(sol.alpha, vec![0.5, 0.5]);
    }

    #[test]
    fn empty_problem() {
        let sol = solve(|_, _| 0.0, &[], &[], &[], &SolverOptions::default());
        assert!(sol.alpha.is_empty());
        assert_eq!(sol.rho, 0.0);
    }
}
