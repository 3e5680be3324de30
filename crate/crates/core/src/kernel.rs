//! Kernel functions and the shared Gram matrix.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureVector;
use crate::par::{self, ExecMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `k(x, x') = -||x - x'||_2`
    #[default]
    Perceptron,
    /// `k(x, x') = <x, x'>`
    Linear,
}

impl Kernel {
    pub fn eval(self, x: &FeatureVector, y: &FeatureVector) -> f64 {
        match self {
            Kernel::Perceptron => -x.squared_distance(y).sqrt(),
            Kernel::Linear => x.dot(y),
        }
    }
}

pub fn kernel_eval(kernel: Kernel, x: &FeatureVector, y: &FeatureVector) -> f64 {
    kernel.eval(x, y)
}

/// Default cap on the dense kernel cache: 512 MiB of `f64`s.
pub const DEFAULT_CACHE_BYTES: usize = 512 << 20;

/// Kernel values over a fixed set of points. Stored densely when `n^2`
/// entries fit under the cache cap; otherwise each lookup recomputes.
#[derive(Debug, Clone)]
pub struct Gram {
    kernel: Kernel,
    points: Arc<[FeatureVector]>,
    dense: Option<Arc<[f64]>>,
}

impl Gram {
    pub fn new(kernel: Kernel, points: Vec<FeatureVector>) -> Self {
        Self::with_options(kernel, points, DEFAULT_CACHE_BYTES, ExecMode::default())
    }

    pub fn with_options(
        kernel: Kernel,
        points: Vec<FeatureVector>,
        cache_bytes: usize,
        mode: ExecMode,
    ) -> Self {
        let n = points.len();
        let points: Arc<[FeatureVector]> = points.into();
        let dense = (n.saturating_mul(n).saturating_mul(8) <= cache_bytes).then(|| {
            let rows: Vec<Vec<f64>> = par::map_range(mode, n, |i| {
                (0..n).map(|j| kernel.eval(&points[i], &points[j])).collect()
            });
            rows.concat().into()
        });
        Gram {
            kernel,
            points,
            dense,
        }
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    pub fn point(&self, i: usize) -> &FeatureVector {
        &self.points[i]
    }

    pub fn points(&self) -> &[FeatureVector] {
        &self.points
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(d) => d[i * self.points.len() + j],
            None => self.kernel.eval(&self.points[i], &self.points[j]),
        }
    }
}
