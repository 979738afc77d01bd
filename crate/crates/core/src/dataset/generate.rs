use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, LabeledDataset};
use crate::error::{Error, Result};

pub const CORNER_INLIERS: usize = 180;
pub const CORNER_OUTLIERS: usize = 20;
/// Per-axis standard deviation of the inlier cloud.
pub const CORNER_SIGMA: f64 = 0.1;

/// Two-dimensional toy set: 180 inliers from an isotropic Gaussian centred
/// on the corner (1, 1) of the unit square followed by 20 outliers drawn
/// uniformly on the square. Every outlier sits in the left tail of both
/// marginals.
pub fn generate_corner_gaussian(seed: u64) -> LabeledDataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(1.0, CORNER_SIGMA).expect("valid sigma");
    let n = CORNER_INLIERS + CORNER_OUTLIERS;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..CORNER_INLIERS {
        x.push(normal.sample(&mut rng));
        y.push(normal.sample(&mut rng));
    }
    for _ in 0..CORNER_OUTLIERS {
        x.push(rng.random::<f64>());
        y.push(rng.random::<f64>());
    }
    let labels = (0..n).map(|i| i >= CORNER_INLIERS).collect();
    let data = Dataset::from_columns(vec![x, y]).expect("generated data is finite");
    LabeledDataset::new(data, labels).expect("label count matches")
}

/// n×d matrix of independent draws from U[0, 1).
pub fn generate_scaling(n: usize, d: usize, seed: u64) -> Result<Dataset<f64>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "scaling dataset needs n >= 1 and d >= 1, got n={n}, d={d}"
        )));
    }
    let len = n.checked_mul(d).ok_or(Error::Resource {
        needed: u64::MAX,
        limit: usize::MAX as u64,
    })?;
    let mut values = Vec::new();
    values.try_reserve_exact(len).map_err(|_| Error::Resource {
        needed: (len as u64).saturating_mul(8),
        limit: 0,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    values.extend((0..len).map(|_| rng.random::<f64>()));
    Dataset::from_column_major(values, n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_gaussian_shape() {
        let ds = generate_corner_gaussian(3);
        assert_eq!((ds.n(), ds.d()), (200, 2));
        assert_eq!(ds.outlier_count(), 20);
        for i in CORNER_INLIERS..200 {
            assert!((0.0..1.0).contains(&ds.data.get(i, 0)));
            assert!((0.0..1.0).contains(&ds.data.get(i, 1)));
        }
    }

    #[test]
    fn corner_gaussian_determinism() {
        assert_eq!(generate_corner_gaussian(11), generate_corner_gaussian(11));
        assert_ne!(
            generate_corner_gaussian(11).data,
            generate_corner_gaussian(12).data
        );
    }

    #[test]
    fn scaling_shapes() {
        let ds = generate_scaling(1000, 10, 7).unwrap();
        assert_eq!((ds.n(), ds.d()), (1000, 10));
        assert!(ds.values().iter().all(|v| (0.0..1.0).contains(v)));
        let one = generate_scaling(1, 1, 5).unwrap();
        assert!((0.0..1.0).contains(&one.get(0, 0)));
        assert_eq!(generate_scaling(20, 3, 9).unwrap(), generate_scaling(20, 3, 9).unwrap());
        assert!(generate_scaling(0, 3, 9).is_err());
    }
}
