//! Unsupervised outlier detection from per-dimension empirical CDFs.
//!
//! Every column of the training data is modelled by its empirical
//! distribution. A point is scored by how far into the tails of those
//! distributions it falls: the negative log tail probabilities are summed
//! over dimensions under an independence assumption, using the left tail,
//! the right tail, or the tail picked by each column's skewness, and the
//! largest of the three sums is the outlier score. Scores decompose into
//! per-dimension terms, which is what [`scoring::explain`] reports.
//!
//! The engine is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`, the type the file readers produce.
//!
//! ```
//! use ecod::{fit_score, Dataset, Variant};
//!
//! let data = Dataset::from_rows(&[
//!     vec![1.0, 10.0],
//!     vec![1.1, 10.2],
//!     vec![0.9, 10.1],
//!     vec![1.0, 9.9],
//!     vec![5.0, 12.0],
//! ])
//! .unwrap();
//! let report = fit_score(&data, Variant::Ecod).unwrap();
//! let top = report
//!     .final_scores()
//!     .iter()
//!     .enumerate()
//!     .max_by(|a, b| a.1.total_cmp(b.1))
//!     .unwrap()
//!     .0;
//! assert_eq!(top, 4);
//! ```

pub mod bench;
pub mod dataset;
pub mod ecdf;
pub mod error;
pub mod eval;
mod parallel;
mod scalar;
pub mod scoring;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use scoring::{explain, fit_score, score, Variant};

pub type Dataset = dataset::Dataset<f64>;
pub type LabeledDataset = dataset::LabeledDataset<f64>;
pub type DimensionModel = ecdf::DimensionModel<f64>;
pub type EcdfModel = ecdf::EcdfModel<f64>;
pub type ScoreReport = scoring::ScoreReport<f64>;
pub type Explanation = scoring::Explanation<f64>;

pub type Dataset32 = dataset::Dataset<f32>;
pub type EcdfModel32 = ecdf::EcdfModel<f32>;
pub type ScoreReport32 = scoring::ScoreReport<f32>;
