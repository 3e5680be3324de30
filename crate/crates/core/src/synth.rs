//! Seeded synthetic datasets: Gaussian classes in the plane. Stand-ins for
//! benchmark data in tests, benches and the acceptance suite.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{FeatureVector, Label, LabeledDataset};

/// Isotropic Gaussian classes: class `k` has `counts[k]` points around
/// `centers[k]` with standard deviation `sds[k]`. Examples are grouped by
/// class in label order.
pub fn gaussian_classes<R: Rng + ?Sized>(
    centers: &[Vec<f64>],
    sds: &[f64],
    counts: &[usize],
    rng: &mut R,
) -> LabeledDataset {
    assert!(centers.len() == sds.len() && sds.len() == counts.len());
    let classes = centers.len();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for k in 0..classes {
        for _ in 0..counts[k] {
            let point: Vec<f64> = centers[k]
                .iter()
                .map(|c| {
                    let z: f64 = StandardNormal.sample(rng);
                    c + sds[k] * z
                })
                .collect();
            features.push(FeatureVector::from_dense(&point).expect("finite sample"));
            labels.push(Label::from_index(k));
        }
    }
    LabeledDataset::new(features, labels, classes).expect("labels in range")
}

/// Class centers evenly spaced on a circle whose adjacent centers are at
/// least 3 apart.
pub fn circle_centers(classes: usize) -> Vec<Vec<f64>> {
    let radius = if classes <= 2 {
        1.5
    } else {
        1.5 / (std::f64::consts::PI / classes as f64).sin()
    };
    (0..classes)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / classes as f64;
            vec![radius * t.cos(), radius * t.sin()]
        })
        .collect()
}

/// Well-separated clusters of common spread on [`circle_centers`].
pub fn separated_clusters<R: Rng + ?Sized>(counts: &[usize], spread: f64, rng: &mut R) -> LabeledDataset {
    let centers = circle_centers(counts.len());
    gaussian_classes(&centers, &vec![spread; counts.len()], counts, rng)
}

/// The two-class planar task with class standard deviations 4/5 and 1/2
/// and centers `sqrt(2)` apart.
pub fn two_gaussians<R: Rng + ?Sized>(per_class: usize, rng: &mut R) -> LabeledDataset {
    gaussian_classes(
        &[vec![0.0, 0.0], vec![1.0, 1.0]],
        &[0.8, 0.5],
        &[per_class, per_class],
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_and_determinism() {
        let a = separated_clusters(&[3, 4, 5], 0.3, &mut ChaCha8Rng::seed_from_u64(1));
        let b = separated_clusters(&[3, 4, 5], 0.3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        assert_eq!(a.class_counts(), vec![3, 4, 5]);
        let c = circle_centers(5);
        let d = ((c[0][0] - c[1][0]).powi(2) + (c[0][1] - c[1][1]).powi(2)).sqrt();
        assert!((d - 3.0).abs() < 1e-12);
    }
}
