//! Outlier scores from tail probabilities.
//!
//! Each sample gets three negative-log aggregates over the dimensions:
//! left tails only, right tails only, and "auto" (left tail where the
//! training column has negative skewness, right tail otherwise). The ECOD
//! score is the largest of the three.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::ecdf::{DimensionModel, EcdfModel};
use crate::error::{Error, Result};
use crate::parallel::{check_workers, for_each_column_chunk, worker_partition};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    LeftOnly,
    RightOnly,
    /// Mean of the left-only and right-only scores.
    BothAveraged,
    /// Skewness-selected tail per dimension.
    Auto,
    /// Maximum of left-only, right-only and auto.
    Ecod,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::LeftOnly,
        Variant::RightOnly,
        Variant::BothAveraged,
        Variant::Auto,
        Variant::Ecod,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::LeftOnly => "left",
            Variant::RightOnly => "right",
            Variant::BothAveraged => "both",
            Variant::Auto => "auto",
            Variant::Ecod => "ecod",
        }
    }

    /// Label used in summary tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Variant::LeftOnly => "ECOD-L",
            Variant::RightOnly => "ECOD-R",
            Variant::BothAveraged => "ECOD-B",
            Variant::Auto => "ECOD-auto",
            Variant::Ecod => "ECOD",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" | "left-only" | "ecod-l" => Ok(Variant::LeftOnly),
            "right" | "r" | "right-only" | "ecod-r" => Ok(Variant::RightOnly),
            "both" | "b" | "avg" | "ecod-b" => Ok(Variant::BothAveraged),
            "auto" | "sc" => Ok(Variant::Auto),
            "ecod" | "max" => Ok(Variant::Ecod),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}`"))),
        }
    }
}

/// Which aggregate supplies a sample's per-dimension terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Left,
    Right,
    Auto,
    Average,
}

/// Scores for a batch of points.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport<T> {
    variant: Variant,
    n: usize,
    d: usize,
    final_scores: Vec<T>,
    left_only: Vec<T>,
    right_only: Vec<T>,
    auto: Vec<T>,
    /// Column-major n×d.
    per_dimension: Vec<T>,
    column_names: Option<Vec<String>>,
}

impl<T: Scalar> ScoreReport<T> {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Scores of the requested variant.
    pub fn final_scores(&self) -> &[T] {
        &self.final_scores
    }

    pub fn left_only(&self) -> &[T] {
        &self.left_only
    }

    pub fn right_only(&self) -> &[T] {
        &self.right_only
    }

    pub fn auto(&self) -> &[T] {
        &self.auto
    }

    /// Scores another variant would have produced for the same points.
    pub fn scores_for(&self, variant: Variant) -> Vec<T> {
        match variant {
            Variant::LeftOnly => self.left_only.clone(),
            Variant::RightOnly => self.right_only.clone(),
            Variant::Auto => self.auto.clone(),
            Variant::BothAveraged => average(&self.left_only, &self.right_only),
            Variant::Ecod => ecod_max(&self.left_only, &self.right_only, &self.auto),
        }
    }

    /// Dimensional score of sample `i` in dimension `j`. Summing over `j`
    /// gives the sample's final score.
    pub fn dimension_score(&self, i: usize, j: usize) -> T {
        assert!(i < self.n && j < self.d);
        self.per_dimension[j * self.n + i]
    }

    pub fn dimension_scores(&self, i: usize) -> Vec<T> {
        (0..self.d).map(|j| self.dimension_score(i, j)).collect()
    }

    /// All samples' scores in dimension `j`.
    pub fn dimension_column(&self, j: usize) -> &[T] {
        &self.per_dimension[j * self.n..(j + 1) * self.n]
    }

    pub fn column_name(&self, j: usize) -> String {
        self.column_names
            .as_ref()
            .map_or_else(|| j.to_string(), |c| c[j].clone())
    }

    /// CSV with columns `row,final,left_only,right_only,auto`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,final,left_only,right_only,auto")?;
        for i in 0..self.n {
            writeln!(
                w,
                "{},{},{},{},{}",
                i, self.final_scores[i], self.left_only[i], self.right_only[i], self.auto[i]
            )?;
        }
        w.flush()
    }
}

fn average<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let half = T::from_f64_lossy(0.5);
    a.iter().zip(b).map(|(&x, &y)| (x + y) * half).collect()
}

fn ecod_max<T: Scalar>(left: &[T], right: &[T], auto: &[T]) -> Vec<T> {
    left.iter()
        .zip(right)
        .zip(auto)
        .map(|((&l, &r), &a)| l.max(r).max(a))
        .collect()
}

/// Aggregate supplying the max, ties resolved auto, then right, then left.
fn winner<T: Scalar>(l: T, r: T, a: T) -> Source {
    let m = l.max(r).max(a);
    if a == m {
        Source::Auto
    } else if r == m {
        Source::Right
    } else {
        Source::Left
    }
}

#[inline]
fn neg_log_prob<T: Scalar>(count: usize, n: T, floor: T) -> T {
    let p = if count == 0 {
        floor
    } else {
        T::from_usize_exact(count) / n
    };
    -p.ln()
}

fn fill_terms<T: Scalar>(
    dm: &DimensionModel<T>,
    column: &[T],
    floor: T,
    left: &mut [T],
    right: &mut [T],
) {
    let n_train = T::from_usize_exact(dm.n());
    for ((&z, l), r) in column.iter().zip(left).zip(right) {
        *l = neg_log_prob(dm.left_count(z), n_train, floor);
        *r = neg_log_prob(dm.right_count(z), n_train, floor);
    }
}

/// Scores `points` against a fitted model on the calling thread.
pub fn score<T: Scalar>(
    model: &EcdfModel<T>,
    points: &Dataset<T>,
    variant: Variant,
) -> Result<ScoreReport<T>> {
    score_with_workers(model, points, variant, 1)
}

/// Scores `points`, computing tail probabilities for contiguous groups of
/// dimensions on `workers` threads. Per-sample sums always run over the
/// dimensions in index order, so the report is identical for any worker
/// count.
pub fn score_with_workers<T: Scalar>(
    model: &EcdfModel<T>,
    points: &Dataset<T>,
    variant: Variant,
    workers: usize,
) -> Result<ScoreReport<T>> {
    check_workers(workers)?;
    if points.d() != model.d() {
        return Err(Error::DimensionMismatch {
            expected: model.d(),
            actual: points.d(),
        });
    }
    let (n, d) = (points.n(), points.d());
    let floor = model.prob_floor();

    let mut left_terms = vec![T::zero(); n * d];
    let mut right_terms = vec![T::zero(); n * d];
    let ranges = worker_partition(d, workers);
    {
        // Pair the two buffers column by column so one job fills both.
        let mut pairs: Vec<(&mut [T], &mut [T])> = left_terms
            .chunks_exact_mut(n)
            .zip(right_terms.chunks_exact_mut(n))
            .collect();
        for_each_column_chunk(&mut pairs, 1, &ranges, |range, chunk| {
            for (j, (l, r)) in range.zip(chunk.iter_mut()) {
                fill_terms(model.dim(j), points.column(j), floor, l, r);
            }
        });
    }

    let mut left_only = vec![T::zero(); n];
    let mut right_only = vec![T::zero(); n];
    let mut auto = vec![T::zero(); n];
    for j in 0..d {
        let l = &left_terms[j * n..(j + 1) * n];
        let r = &right_terms[j * n..(j + 1) * n];
        let chosen = if model.dim(j).use_left_tail() { l } else { r };
        for i in 0..n {
            left_only[i] = left_only[i] + l[i];
            right_only[i] = right_only[i] + r[i];
            auto[i] = auto[i] + chosen[i];
        }
    }

    let (final_scores, sources): (Vec<T>, Vec<Source>) = match variant {
        Variant::LeftOnly => (left_only.clone(), vec![Source::Left; n]),
        Variant::RightOnly => (right_only.clone(), vec![Source::Right; n]),
        Variant::Auto => (auto.clone(), vec![Source::Auto; n]),
        Variant::BothAveraged => (average(&left_only, &right_only), vec![Source::Average; n]),
        Variant::Ecod => (
            ecod_max(&left_only, &right_only, &auto),
            (0..n)
                .map(|i| winner(left_only[i], right_only[i], auto[i]))
                .collect(),
        ),
    };

    // Reuse the left buffer for the per-dimension terms.
    let half = T::from_f64_lossy(0.5);
    let mut per_dimension = left_terms;
    for j in 0..d {
        let left_tail = model.dim(j).use_left_tail();
        let r = &right_terms[j * n..(j + 1) * n];
        let out = &mut per_dimension[j * n..(j + 1) * n];
        for i in 0..n {
            out[i] = match sources[i] {
                Source::Left => out[i],
                Source::Right => r[i],
                Source::Auto if left_tail => out[i],
                Source::Auto => r[i],
                Source::Average => (out[i] + r[i]) * half,
            };
        }
    }

    Ok(ScoreReport {
        variant,
        n,
        d,
        final_scores,
        left_only,
        right_only,
        auto,
        per_dimension,
        column_names: points
            .column_names()
            .or(model.column_names())
            .map(<[String]>::to_vec),
    })
}

/// Fits on `train` and scores the same rows.
pub fn fit_score<T: Scalar>(train: &Dataset<T>, variant: Variant) -> Result<ScoreReport<T>> {
    let model = EcdfModel::fit(train)?;
    score(&model, train, variant)
}

pub fn fit_score_with_workers<T: Scalar>(
    train: &Dataset<T>,
    variant: Variant,
    workers: usize,
) -> Result<ScoreReport<T>> {
    let model = EcdfModel::fit_with_workers(train, workers)?;
    score_with_workers(&model, train, variant, workers)
}

/// Empirical quantile without interpolation: the value at 0-based index
/// `ceil(p * n) - 1` of the ascending sort.
pub fn empirical_quantile<T: Scalar>(values: &[T], p: f64) -> T {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let k = ((p * values.len() as f64).ceil() as usize).clamp(1, values.len());
    sorted[k - 1]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionExplanation<T> {
    pub dim: usize,
    pub name: String,
    pub score: T,
    pub band: T,
    pub flagged: bool,
}

/// Data behind a dimensional outlier graph for one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Explanation<T> {
    pub sample: usize,
    pub variant: Variant,
    pub final_score: T,
    pub band_percentile: f64,
    pub dimensions: Vec<DimensionExplanation<T>>,
}

impl<T: Scalar> Explanation<T> {
    pub fn scores(&self) -> Vec<T> {
        self.dimensions.iter().map(|d| d.score).collect()
    }

    pub fn bands(&self) -> Vec<T> {
        self.dimensions.iter().map(|d| d.band).collect()
    }

    pub fn flags(&self) -> Vec<bool> {
        self.dimensions.iter().map(|d| d.flagged).collect()
    }

    pub fn flagged_dims(&self) -> Vec<usize> {
        self.dimensions
            .iter()
            .filter(|d| d.flagged)
            .map(|d| d.dim)
            .collect()
    }
}

/// Per-dimension scores of one sample against the `band_percentile`
/// quantile of every sample's score in that dimension. A dimension is
/// flagged when the sample reaches its band.
pub fn explain<T: Scalar>(
    report: &ScoreReport<T>,
    sample_index: usize,
    band_percentile: f64,
) -> Result<Explanation<T>> {
    if sample_index >= report.n() {
        return Err(Error::InvalidArgument(format!(
            "sample index {sample_index} out of range for n={}",
            report.n()
        )));
    }
    if !(band_percentile > 0.0 && band_percentile < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "band percentile must lie in (0, 1), got {band_percentile}"
        )));
    }
    let dimensions = (0..report.d())
        .map(|j| {
            let score = report.dimension_score(sample_index, j);
            let band = empirical_quantile(report.dimension_column(j), band_percentile);
            DimensionExplanation {
                dim: j,
                name: report.column_name(j),
                score,
                band,
                flagged: score >= band,
            }
        })
        .collect();
    Ok(Explanation {
        sample: sample_index,
        variant: report.variant(),
        final_score: report.final_scores()[sample_index],
        band_percentile,
        dimensions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five() -> EcdfModel<f64> {
        let ds = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]]).unwrap();
        EcdfModel::fit(&ds).unwrap()
    }

    fn point(x: f64) -> Dataset<f64> {
        Dataset::from_columns(vec![vec![x]]).unwrap()
    }

    #[test]
    fn hand_evaluated_point_at_minimum() {
        let r = score(&five(), &point(1.0), Variant::Ecod).unwrap();
        assert!((r.left_only()[0] - 1.6094379124341003).abs() < 1e-12);
        assert_eq!(r.right_only()[0], 0.0);
        assert_eq!(r.auto()[0], 0.0);
        assert_eq!(r.final_scores()[0], r.left_only()[0]);
        assert_eq!(r.dimension_scores(0), vec![r.left_only()[0]]);
    }

    #[test]
    fn hand_evaluated_midpoint() {
        let r = score(&five(), &point(3.0), Variant::Ecod).unwrap();
        let expected = -(0.6f64).ln();
        for v in [r.left_only()[0], r.right_only()[0], r.auto()[0], r.final_scores()[0]] {
            assert!((v - expected).abs() < 1e-12);
        }
        assert!((expected - 0.5108).abs() < 1e-4);
    }

    #[test]
    fn out_of_range_points_use_floor() {
        let m = five();
        let r = score(&m, &point(-10.0), Variant::LeftOnly).unwrap();
        assert!((r.left_only()[0] - 6.0f64.ln()).abs() < 1e-12);
        assert_eq!(r.right_only()[0], 0.0);
    }

    #[test]
    fn variants_select_aggregates() {
        let m = five();
        let p = point(1.0);
        let l = score(&m, &p, Variant::LeftOnly).unwrap();
        let b = score(&m, &p, Variant::BothAveraged).unwrap();
        assert_eq!(l.final_scores(), l.left_only());
        assert_eq!(b.final_scores()[0], (b.left_only()[0] + b.right_only()[0]) / 2.0);
        assert_eq!(b.scores_for(Variant::Ecod), vec![l.left_only()[0]]);
    }

    #[test]
    fn winner_tie_order() {
        assert_eq!(winner(1.0, 1.0, 1.0), Source::Auto);
        assert_eq!(winner(1.0, 1.0, 0.5), Source::Right);
        assert_eq!(winner(2.0, 1.0, 0.5), Source::Left);
    }

    #[test]
    fn single_row_scores_zero() {
        let ds = Dataset::from_rows(&[vec![3.0, -1.0, 8.0]]).unwrap();
        let r = fit_score(&ds, Variant::Ecod).unwrap();
        assert_eq!(r.final_scores(), &[0.0]);
        assert_eq!(r.left_only(), &[0.0]);
        assert_eq!(r.right_only(), &[0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let err = score(&five(), &Dataset::from_rows(&[vec![1.0, 2.0]]).unwrap(), Variant::Ecod)
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, actual: 2 }));
    }

    #[test]
    fn quantile_index_rule() {
        let v: Vec<f64> = (1..=200).map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 0.99), 198.0);
        assert_eq!(empirical_quantile(&v, 0.5), 100.0);
        assert_eq!(empirical_quantile(&[4.0, 1.0, 3.0], 0.01), 1.0);
    }

    #[test]
    fn explain_checks_arguments() {
        let r = score(&five(), &point(1.0), Variant::Ecod).unwrap();
        assert!(explain(&r, 1, 0.99).is_err());
        assert!(explain(&r, 0, 1.0).is_err());
        let e = explain(&r, 0, 0.99).unwrap();
        assert_eq!(e.dimensions.len(), 1);
        assert!(e.dimensions[0].flagged);
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("median".parse::<Variant>().is_err());
    }

    #[test]
    fn csv_layout() {
        let r = score(&five(), &point(3.0), Variant::Ecod).unwrap();
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("row,final,left_only,right_only,auto"));
        assert!(lines.next().unwrap().starts_with("0,0.51082"));
    }
}
