//! Per-dimension tail ECDFs and skewness: the fitted state of the detector.
//!
//! A fitted dimension keeps its training column sorted ascending. Both tail
//! probabilities at a query `z` are then two binary searches:
//!
//! * left tail, `#{x <= z} / n`
//! * right tail, `#{x >= z} / n`
//!
//! The right tail uses a non-strict inequality, so it is not `1 - left`
//! whenever `z` coincides with training values.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::parallel::{check_workers, worker_partition};
use crate::scalar::Scalar;

pub const MODEL_FORMAT: &str = "ecod-model";
pub const MODEL_VERSION: u32 = 1;

/// Sample skewness with a biased third moment over an unbiased variance:
///
/// `(1/n) Σ (x - m)^3 / [(1/(n-1)) Σ (x - m)^2]^(3/2)`
///
/// Columns with fewer than two values or no spread have skewness 0.
pub fn skewness<T: Scalar>(column: &[T]) -> T {
    let n = column.len();
    if n < 2 {
        return T::zero();
    }
    let (lo, hi) = column
        .iter()
        .fold((column[0], column[0]), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo == hi {
        return T::zero();
    }
    let nf = T::from_usize_exact(n);
    let mean = column.iter().fold(T::zero(), |acc, &x| acc + x) / nf;
    let (m2, m3) = column.iter().fold((T::zero(), T::zero()), |(s2, s3), &x| {
        let dev = x - mean;
        let sq = dev * dev;
        (s2 + sq, s3 + sq * dev)
    });
    let var = m2 / (nf - T::one());
    if var == T::zero() {
        return T::zero();
    }
    (m3 / nf) / (var * var.sqrt())
}

/// Fitted state of one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DimensionModel<T> {
    skewness: T,
    sorted_values: Vec<T>,
}

impl<T: Scalar> DimensionModel<T> {
    pub fn fit(column: &[T]) -> Result<Self> {
        if column.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some(row) = column.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, column: 0 });
        }
        let mut sorted_values = column.to_vec();
        sorted_values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Ok(Self {
            skewness: skewness(column),
            sorted_values,
        })
    }

    pub fn skewness(&self) -> T {
        self.skewness
    }

    /// Negative skew selects the left tail; zero and positive select the right.
    pub fn use_left_tail(&self) -> bool {
        self.skewness < T::zero()
    }

    pub fn sorted_values(&self) -> &[T] {
        &self.sorted_values
    }

    pub fn n(&self) -> usize {
        self.sorted_values.len()
    }

    /// `#{x <= z}`
    #[inline]
    pub fn left_count(&self, z: T) -> usize {
        self.sorted_values.partition_point(|&x| x <= z)
    }

    /// `#{x >= z}`
    #[inline]
    pub fn right_count(&self, z: T) -> usize {
        self.n() - self.sorted_values.partition_point(|&x| x < z)
    }

    pub fn eval_left(&self, z: T) -> T {
        T::from_usize_exact(self.left_count(z)) / T::from_usize_exact(self.n())
    }

    pub fn eval_right(&self, z: T) -> T {
        T::from_usize_exact(self.right_count(z)) / T::from_usize_exact(self.n())
    }
}

/// The fitted detector: one [`DimensionModel`] per column.
#[derive(Clone, Debug, PartialEq)]
pub struct EcdfModel<T> {
    dims: Vec<DimensionModel<T>>,
    n_train: usize,
    prob_floor: T,
    column_names: Option<Vec<String>>,
}

impl<T: Scalar> EcdfModel<T> {
    pub fn fit(train: &Dataset<T>) -> Result<Self> {
        Self::fit_with_workers(train, 1)
    }

    /// Fits dimensions in parallel, split into contiguous groups per worker.
    /// The result does not depend on `workers`.
    pub fn fit_with_workers(train: &Dataset<T>, workers: usize) -> Result<Self> {
        check_workers(workers)?;
        let ranges = worker_partition(train.d(), workers);
        let groups: Vec<Result<Vec<DimensionModel<T>>>> = if ranges.len() <= 1 {
            vec![train.columns().map(DimensionModel::fit).collect()]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = ranges
                    .iter()
                    .map(|r| {
                        let r = r.clone();
                        s.spawn(move || {
                            r.map(|j| DimensionModel::fit(train.column(j)))
                                .collect::<Result<Vec<_>>>()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("fit worker panicked"))
                    .collect()
            })
        };
        let mut dims = Vec::with_capacity(train.d());
        for g in groups {
            dims.extend(g?);
        }
        let n_train = train.n();
        Ok(Self {
            dims,
            n_train,
            prob_floor: T::one() / T::from_usize_exact(n_train + 1),
            column_names: train.column_names().map(<[String]>::to_vec),
        })
    }

    pub fn dims(&self) -> &[DimensionModel<T>] {
        &self.dims
    }

    pub fn dim(&self, j: usize) -> &DimensionModel<T> {
        &self.dims[j]
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    /// Probability substituted for an empty tail, `1 / (n_train + 1)`.
    pub fn prob_floor(&self) -> T {
        self.prob_floor
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            scalar: T::NAME.into(),
            n_train: self.n_train,
            d: self.d(),
            prob_floor: self.prob_floor,
            column_names: self.column_names.clone(),
            dimensions: self.dims.clone(),
        };
        serde_json::to_string(&file).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ser = |e: serde_json::Error| Error::Serialization(e.to_string());
        let header: ModelHeader = serde_json::from_str(text).map_err(ser)?;
        if header.format != MODEL_FORMAT {
            return Err(Error::Serialization(format!(
                "not a model file (format `{}`)",
                header.format
            )));
        }
        if header.version != MODEL_VERSION {
            return Err(Error::VersionMismatch {
                found: header.version,
                expected: MODEL_VERSION,
            });
        }
        if header.scalar != T::NAME {
            return Err(Error::Serialization(format!(
                "model stores {} values, expected {}",
                header.scalar,
                T::NAME
            )));
        }
        let file: ModelFile<T> = serde_json::from_str(text).map_err(ser)?;
        let consistent = file.d == file.dimensions.len()
            && file.d > 0
            && file.n_train > 0
            && file.dimensions.iter().all(|dm| {
                dm.n() == file.n_train
                    && dm.sorted_values.windows(2).all(|w| w[0] <= w[1])
                    && dm.sorted_values.iter().all(|v| v.is_finite())
            })
            && file.prob_floor > T::zero()
            && file.prob_floor <= T::one() / T::from_usize_exact(file.n_train)
            && file.column_names.as_ref().is_none_or(|c| c.len() == file.d);
        if !consistent {
            return Err(Error::Serialization("inconsistent model file".into()));
        }
        Ok(Self {
            dims: file.dimensions,
            n_train: file.n_train,
            prob_floor: file.prob_floor,
            column_names: file.column_names,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Deserialize)]
struct ModelHeader {
    format: String,
    version: u32,
    scalar: String,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ModelFile<T> {
    format: String,
    version: u32,
    scalar: String,
    n_train: usize,
    d: usize,
    prob_floor: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    column_names: Option<Vec<String>>,
    dimensions: Vec<DimensionModel<T>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(values: &[f64]) -> DimensionModel<f64> {
        DimensionModel::fit(values).unwrap()
    }

    #[test]
    fn skewness_examples() {
        assert_eq!(skewness(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0.0);
        assert!((skewness(&[0.0f64, 0.0, 0.0, 1.0]) - 0.75).abs() < 1e-15);
        assert!((skewness(&[0.0f64, 1.0, 1.0, 1.0]) + 0.75).abs() < 1e-15);
        assert!((skewness(&[0.0f32, 0.0, 0.0, 1.0]) - 0.75).abs() < 1e-6);
    }

    #[test]
    fn degenerate_skewness() {
        assert_eq!(skewness(&[2.0, 2.0, 2.0]), 0.0);
        assert_eq!(skewness(&[0.1, 0.1, 0.1]), 0.0);
        assert_eq!(skewness(&[7.0]), 0.0);
        let dm = dim(&[2.0, 2.0, 2.0]);
        assert!(!dm.use_left_tail());
    }

    #[test]
    fn direction_follows_sign() {
        assert!(!dim(&[1.0, 2.0, 3.0, 4.0, 5.0]).use_left_tail());
        assert!(!dim(&[0.0, 0.0, 0.0, 1.0]).use_left_tail());
        assert!(dim(&[0.0, 1.0, 1.0, 1.0]).use_left_tail());
    }

    #[test]
    fn tail_examples() {
        let d = dim(&[3.0, 1.0, 2.0]);
        assert_eq!(d.eval_left(2.0), 2.0 / 3.0);
        assert_eq!(d.eval_left(0.0), 0.0);
        assert_eq!(d.eval_left(5.0), 1.0);
        assert_eq!(d.eval_right(2.0), 2.0 / 3.0);
        assert_eq!(d.eval_right(3.5), 0.0);
        let ties = dim(&[1.0, 1.0, 2.0]);
        assert_eq!(ties.eval_left(1.0), 2.0 / 3.0);
        assert_eq!(ties.eval_right(1.0), 1.0);
    }

    #[test]
    fn fit_sets_floor_and_names() {
        let ds = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 9.0]])
            .unwrap()
            .with_column_names(vec!["a".into(), "b".into()])
            .unwrap();
        let m = EcdfModel::fit(&ds).unwrap();
        assert_eq!(m.prob_floor(), 0.25);
        assert_eq!(m.n_train(), 3);
        assert_eq!(m.dim(0).sorted_values(), &[1.0, 2.0, 3.0]);
        assert_eq!(m.column_names().unwrap()[1], "b");
    }

    #[test]
    fn workers_do_not_change_fit() {
        let cols: Vec<Vec<f64>> = (0..7)
            .map(|j| (0..13).map(|i| ((i * 7 + j * 3) % 11) as f64 * 0.37).collect())
            .collect();
        let ds = Dataset::from_columns(cols).unwrap();
        let one = EcdfModel::fit(&ds).unwrap();
        for w in [2, 3, 8] {
            assert_eq!(one, EcdfModel::fit_with_workers(&ds, w).unwrap());
        }
        assert!(EcdfModel::fit_with_workers(&ds, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let ds = Dataset::from_columns(vec![vec![0.1, 0.7, 1.0 / 3.0, 2.5e-300]]).unwrap();
        let m = EcdfModel::fit(&ds).unwrap();
        let text = m.to_json().unwrap();
        assert_eq!(EcdfModel::<f64>::from_json(&text).unwrap(), m);
        let bumped = text.replace("\"version\":1", "\"version\":2");
        assert!(matches!(
            EcdfModel::<f64>::from_json(&bumped),
            Err(Error::VersionMismatch { found: 2, expected: 1 })
        ));
        assert!(EcdfModel::<f32>::from_json(&text).is_err());
    }
}
