use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, LabeledDataset};
use crate::error::{Error, Result};

/// Which CSV column holds the ground-truth labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    /// Header name; requires `has_header`.
    Name(String),
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
}

/// Parsed CSV table. `labels` is present iff a label column was requested.
struct Table {
    data: Dataset<f64>,
    labels: Option<Vec<bool>>,
}

/// Reads a CSV file. Row numbers in errors count data rows from 0, column
/// numbers count file columns from 0.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<LoadedCsv> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, opts)
}

/// Result of [`load_csv`]: labeled exactly when a label column was given.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedCsv {
    Unlabeled(Dataset<f64>),
    Labeled(LabeledDataset<f64>),
}

impl LoadedCsv {
    pub fn into_dataset(self) -> Dataset<f64> {
        match self {
            LoadedCsv::Unlabeled(ds) => ds,
            LoadedCsv::Labeled(l) => l.data,
        }
    }

    pub fn into_labeled(self) -> Result<LabeledDataset<f64>> {
        match self {
            LoadedCsv::Labeled(l) => Ok(l),
            LoadedCsv::Unlabeled(_) => Err(Error::InvalidArgument(
                "dataset has no label column".into(),
            )),
        }
    }
}

pub fn parse_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<LoadedCsv> {
    let table = read_table(reader, opts)?;
    Ok(match table.labels {
        Some(labels) => LoadedCsv::Labeled(LabeledDataset::new(table.data, labels)?),
        None => LoadedCsv::Unlabeled(table.data),
    })
}

fn read_table<R: Read>(reader: R, opts: &CsvOptions) -> Result<Table> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let mut header: Option<Vec<String>> = None;
    if opts.has_header {
        match records.next() {
            Some(rec) => {
                let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
                header = Some(rec.iter().map(str::to_string).collect());
            }
            None => return Err(Error::EmptyData),
        }
    }

    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    let mut label_idx: Option<usize> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<bool> = Vec::new();

    for (row, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Parse {
                row,
                column: rec.len().min(w),
                message: format!("expected {w} fields, found {}", rec.len()),
            });
        }
        if columns.is_empty() {
            label_idx = resolve_label(opts.label_column.as_ref(), header.as_deref(), w)?;
            let features = w - usize::from(label_idx.is_some());
            if features == 0 {
                return Err(Error::Format("no feature columns".into()));
            }
            columns = vec![Vec::new(); features];
        }
        let mut feature = 0;
        for (column, field) in rec.iter().enumerate() {
            if Some(column) == label_idx {
                labels.push(parse_label(field).ok_or_else(|| Error::Parse {
                    row,
                    column,
                    message: format!("unknown label token `{field}`"),
                })?);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row, column });
            }
            columns[feature].push(v);
            feature += 1;
        }
    }

    if columns.is_empty() || columns[0].is_empty() {
        return Err(Error::EmptyData);
    }
    let mut data = Dataset::from_columns(columns)?;
    if let Some(names) = header {
        let names = names
            .into_iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != label_idx)
            .map(|(_, s)| s)
            .collect();
        data = data.with_column_names(names)?;
    }
    Ok(Table {
        data,
        labels: label_idx.map(|_| labels),
    })
}

fn resolve_label(
    label: Option<&LabelColumn>,
    header: Option<&[String]>,
    width: usize,
) -> Result<Option<usize>> {
    let idx = match label {
        None => return Ok(None),
        Some(LabelColumn::Last) => width - 1,
        Some(LabelColumn::Index(i)) => *i,
        Some(LabelColumn::Name(name)) => header
            .ok_or_else(|| {
                Error::InvalidArgument(format!("label column `{name}` given by name but the file has no header"))
            })?
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no column named `{name}`")))?,
    };
    if idx >= width {
        return Err(Error::InvalidArgument(format!(
            "label column {idx} out of range for {width} columns"
        )));
    }
    Ok(Some(idx))
}

/// Accepts `0`/`1` (also written as `0.0`/`1.0`) and `no`/`yes`.
fn parse_label(token: &str) -> Option<bool> {
    let t = token.trim_matches(|c| c == '"' || c == '\'');
    if t.eq_ignore_ascii_case("yes") {
        return Some(true);
    }
    if t.eq_ignore_ascii_case("no") {
        return Some(false);
    }
    match t.parse::<f64>() {
        Ok(1.0) => Some(true),
        Ok(0.0) => Some(false),
        _ => None,
    }
}

/// Writes a dataset as CSV with the shortest decimal form that reloads to
/// the same `f64`. Labels, when given, go in a trailing `label` column.
pub fn write_csv<W: Write>(
    writer: W,
    data: &Dataset<f64>,
    labels: Option<&[bool]>,
    header: bool,
) -> Result<()> {
    let mut w = ::csv::Writer::from_writer(writer);
    let ser = |e: ::csv::Error| Error::Serialization(e.to_string());
    if header {
        let mut names: Vec<String> = (0..data.d()).map(|j| data.column_name(j)).collect();
        if labels.is_some() {
            names.push("label".into());
        }
        w.write_record(&names).map_err(ser)?;
    }
    let mut fields = Vec::with_capacity(data.d() + 1);
    for i in 0..data.n() {
        fields.clear();
        fields.extend((0..data.d()).map(|j| data.get(i, j).to_string()));
        if let Some(l) = labels {
            fields.push(if l[i] { "1" } else { "0" }.to_string());
        }
        w.write_record(&fields).map_err(ser)?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(header: bool, label: Option<LabelColumn>) -> CsvOptions {
        CsvOptions {
            has_header: header,
            label_column: label,
        }
    }

    #[test]
    fn plain_body() {
        let ds = parse_csv("1,2\n3,4\n5,6".as_bytes(), &opts(false, None))
            .unwrap()
            .into_dataset();
        assert_eq!((ds.n(), ds.d()), (3, 2));
        assert_eq!(ds.row(2), vec![5.0, 6.0]);
    }

    #[test]
    fn label_by_index() {
        let l = parse_csv("1,0\n2,1".as_bytes(), &opts(false, Some(LabelColumn::Index(1))))
            .unwrap()
            .into_labeled()
            .unwrap();
        assert_eq!(l.data.column(0), &[1.0, 2.0]);
        assert_eq!(l.labels, vec![false, true]);
    }

    #[test]
    fn label_by_name_and_yes_no() {
        let body = "a,y,b\n1,no,2\n3,yes,4\n";
        let l = parse_csv(
            body.as_bytes(),
            &opts(true, Some(LabelColumn::Name("y".into()))),
        )
        .unwrap()
        .into_labeled()
        .unwrap();
        assert_eq!(l.data.column_names().unwrap(), &["a", "b"]);
        assert_eq!(l.labels, vec![false, true]);
        assert_eq!(l.data.row(1), vec![3.0, 4.0]);
    }

    #[test]
    fn bad_cell_reports_position() {
        let err = parse_csv("1,x".as_bytes(), &opts(false, None)).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_cell_is_non_finite() {
        let err = parse_csv("1,2\n3,NaN".as_bytes(), &opts(false, None)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, column: 1 }));
    }

    #[test]
    fn ragged_row() {
        let err = parse_csv("1,2\n3".as_bytes(), &opts(false, None)).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn unknown_label_token() {
        let err = parse_csv("1,2".as_bytes(), &opts(false, Some(LabelColumn::Last))).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 0, column: 1, .. }));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse_csv("".as_bytes(), &opts(false, None)),
            Err(Error::EmptyData)
        ));
        assert!(matches!(
            parse_csv("a,b\n".as_bytes(), &opts(true, None)),
            Err(Error::EmptyData)
        ));
    }
}
