//! Numeric datasets: storage, file formats, synthetic generators and
//! train/test splitting.

mod arff;
mod csv;
mod generate;
mod split;

pub use self::arff::{load_arff, parse_arff, ArffOptions};
pub use self::csv::{load_csv, parse_csv, write_csv, CsvOptions, LabelColumn, LoadedCsv};
pub use self::generate::{generate_corner_gaussian, generate_scaling};
pub use self::split::{split, trial_seed, SplitSpec};
pub(crate) use self::split::split_with_seed;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense n×d matrix stored column-major, every value finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    values: Vec<T>,
    n: usize,
    d: usize,
    column_names: Option<Vec<String>>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from column-major storage (`values[j * n + i]`).
    pub fn from_column_major(values: Vec<T>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyData);
        }
        if values.len() != n * d {
            return Err(Error::Format(format!(
                "expected {} values for a {n}x{d} matrix, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos % n,
                column: pos / n,
            });
        }
        Ok(Self {
            values,
            n,
            d,
            column_names: None,
        })
    }

    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let d = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().position(|c| c.len() != n) {
            return Err(Error::Format(format!(
                "column {bad} has {} values, expected {n}",
                columns[bad].len()
            )));
        }
        Self::from_column_major(columns.concat(), n, d)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut values = vec![T::zero(); n * d];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Format(format!(
                    "row {i} has {} values, expected {d}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                values[j * n + i] = v;
            }
        }
        Self::from_column_major(values, n, d)
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.d {
            return Err(Error::Format(format!(
                "{} column names for {} columns",
                names.len(),
                self.d
            )));
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Display name of column `j`: its header name if known, else its index.
    pub fn column_name(&self, j: usize) -> String {
        match &self.column_names {
            Some(names) => names[j].clone(),
            None => j.to_string(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(i < self.n && j < self.d, "index ({i}, {j}) out of bounds");
        self.values[j * self.n + i]
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.values.chunks_exact(self.n)
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.d).map(|j| self.get(i, j)).collect()
    }

    /// Column-major backing storage.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        let m = rows.len();
        let mut values = Vec::with_capacity(m * self.d);
        for col in self.columns() {
            values.extend(rows.iter().map(|&i| col[i]));
        }
        Ok(Self {
            values,
            n: m,
            d: self.d,
            column_names: self.column_names.clone(),
        })
    }

    /// Column-wise concatenation of two datasets with the same row count.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Format(format!(
                "row counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        let column_names = match (&self.column_names, &other.column_names) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Ok(Self {
            values,
            n: self.n,
            d: self.d + other.d,
            column_names,
        })
    }

    /// Converts every value to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        Dataset {
            values: self
                .values
                .iter()
                .map(|v| U::from_f64_lossy(v.to_f64_lossy()))
                .collect(),
            n: self.n,
            d: self.d,
            column_names: self.column_names.clone(),
        }
    }
}

/// A dataset with one binary ground-truth flag per row (`true` = outlier).
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    pub data: Dataset<T>,
    pub labels: Vec<bool>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(data: Dataset<T>, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != data.n() {
            return Err(Error::Format(format!(
                "{} labels for {} rows",
                labels.len(),
                data.n()
            )));
        }
        Ok(Self { data, labels })
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn d(&self) -> usize {
        self.data.d()
    }

    pub fn outlier_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let k = self.outlier_count();
        k > 0 && k < self.labels.len()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        Ok(Self {
            data: self.data.select_rows(rows)?,
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_major_indexing() {
        let ds = Dataset::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!((ds.n(), ds.d()), (3, 2));
        assert_eq!(ds.values(), &[1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
        assert_eq!(ds.get(2, 1), 6.0);
        assert_eq!(ds.row(1), vec![3.0, 4.0]);
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        let err = Dataset::from_rows(&[vec![1.0, f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, column: 1 }));
        assert!(matches!(
            Dataset::<f64>::from_columns(vec![]),
            Err(Error::EmptyData)
        ));
        assert!(Dataset::from_columns(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn select_and_concat() {
        let a = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let b = Dataset::from_columns(vec![vec![4.0, 5.0, 6.0]]).unwrap();
        let ab = a.hconcat(&b).unwrap();
        assert_eq!(ab.d(), 2);
        let picked = ab.select_rows(&[2, 0]).unwrap();
        assert_eq!(picked.row(0), vec![3.0, 6.0]);
        assert_eq!(picked.row(1), vec![1.0, 4.0]);
    }

    #[test]
    fn labels_must_match_rows() {
        let ds = Dataset::from_columns(vec![vec![1.0, 2.0]]).unwrap();
        assert!(LabeledDataset::new(ds.clone(), vec![true]).is_err());
        let l = LabeledDataset::new(ds, vec![false, true]).unwrap();
        assert!(l.has_both_classes());
    }
}
