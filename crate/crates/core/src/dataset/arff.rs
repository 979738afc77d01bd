//! Reader for the numeric subset of ARFF used by outlier-detection
//! benchmark collections: `numeric`/`real`/`integer` attributes plus a
//! single nominal label attribute.

use std::fs;
use std::path::Path;

use super::{Dataset, LabeledDataset};
use crate::error::{Error, Result};

const DEFAULT_POSITIVE: [&str; 3] = ["yes", "outlier", "anomaly"];

#[derive(Clone, Debug)]
pub struct ArffOptions {
    pub label_attribute: String,
    /// Nominal values mapped to "outlier". Compared case-insensitively.
    /// `None` means `yes`, `outlier` or `anomaly`.
    pub positive_values: Option<Vec<String>>,
    /// Numeric attributes to drop, e.g. row ids.
    pub ignore_attributes: Vec<String>,
}

impl ArffOptions {
    pub fn new(label_attribute: impl Into<String>) -> Self {
        Self {
            label_attribute: label_attribute.into(),
            positive_values: None,
            ignore_attributes: Vec::new(),
        }
    }

    fn is_positive(&self, value: &str) -> bool {
        match &self.positive_values {
            Some(vals) => vals.iter().any(|p| p.eq_ignore_ascii_case(value)),
            None => DEFAULT_POSITIVE.iter().any(|p| p.eq_ignore_ascii_case(value)),
        }
    }
}

#[derive(Debug)]
enum AttrKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug)]
struct Attribute {
    name: String,
    kind: AttrKind,
}

pub fn load_arff(path: impl AsRef<Path>, opts: &ArffOptions) -> Result<LabeledDataset<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_arff(&text, opts)
}

pub fn parse_arff(text: &str, opts: &ArffOptions) -> Result<LabeledDataset<f64>> {
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut lines = text.lines().map(str::trim);
    let mut in_data = false;

    for line in lines.by_ref() {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let (keyword, rest) = split_keyword(line);
        if keyword.eq_ignore_ascii_case("@relation") {
            continue;
        } else if keyword.eq_ignore_ascii_case("@attribute") {
            attrs.push(parse_attribute(rest)?);
        } else if keyword.eq_ignore_ascii_case("@data") {
            in_data = true;
            break;
        } else {
            return Err(Error::Format(format!("unexpected header line `{line}`")));
        }
    }
    if !in_data {
        return Err(Error::Format("missing @data section".into()));
    }

    let label_idx = attrs
        .iter()
        .position(|a| a.name == opts.label_attribute)
        .ok_or_else(|| {
            Error::Format(format!(
                "label attribute `{}` not declared",
                opts.label_attribute
            ))
        })?;
    let label_values = match &attrs[label_idx].kind {
        AttrKind::Nominal(vals) => vals.clone(),
        AttrKind::Numeric => {
            return Err(Error::UnsupportedAttribute {
                attribute: opts.label_attribute.clone(),
                kind: "numeric label (expected nominal)".into(),
            })
        }
    };

    let mut feature_of: Vec<Option<usize>> = Vec::with_capacity(attrs.len());
    let mut names = Vec::new();
    for (k, a) in attrs.iter().enumerate() {
        if k == label_idx || opts.ignore_attributes.contains(&a.name) {
            feature_of.push(None);
            continue;
        }
        if let AttrKind::Nominal(_) = a.kind {
            return Err(Error::UnsupportedAttribute {
                attribute: a.name.clone(),
                kind: "nominal".into(),
            });
        }
        feature_of.push(Some(names.len()));
        names.push(a.name.clone());
    }
    if names.is_empty() {
        return Err(Error::Format("no numeric attributes".into()));
    }

    let mut columns = vec![Vec::new(); names.len()];
    let mut labels = Vec::new();
    let mut row = 0;
    for line in lines {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('{') {
            return Err(Error::Format("sparse ARFF rows are not supported".into()));
        }
        let fields: Vec<&str> = line.split(',').map(|f| unquote(f.trim())).collect();
        if fields.len() != attrs.len() {
            return Err(Error::Parse {
                row,
                column: fields.len().min(attrs.len()),
                message: format!("expected {} values, found {}", attrs.len(), fields.len()),
            });
        }
        for (column, field) in fields.iter().enumerate() {
            if column == label_idx {
                if !label_values.iter().any(|v| v == field) {
                    return Err(Error::Parse {
                        row,
                        column,
                        message: format!("label value `{field}` not in declared set"),
                    });
                }
                labels.push(opts.is_positive(field));
            } else if let Some(f) = feature_of[column] {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row,
                    column,
                    message: format!("`{field}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite { row, column });
                }
                columns[f].push(v);
            }
        }
        row += 1;
    }
    if row == 0 {
        return Err(Error::EmptyData);
    }
    let data = Dataset::from_columns(columns)?.with_column_names(names)?;
    LabeledDataset::new(data, labels)
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(p) => (&line[..p], line[p..].trim_start()),
        None => (line, ""),
    }
}

fn unquote(s: &str) -> &str {
    let b = s.as_bytes();
    if b.len() >= 2 && (b[0] == b'\'' || b[0] == b'"') && b[b.len() - 1] == b[0] {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn parse_attribute(rest: &str) -> Result<Attribute> {
    let (name, ty) = if let Some(q @ ('\'' | '"')) = rest.chars().next() {
        let end = rest[1..]
            .find(q)
            .ok_or_else(|| Error::Format(format!("unterminated attribute name in `{rest}`")))?;
        (&rest[1..1 + end], rest[end + 2..].trim())
    } else {
        split_keyword(rest)
    };
    if name.is_empty() || ty.is_empty() {
        return Err(Error::Format(format!("malformed attribute `{rest}`")));
    }
    let kind = if let Some(body) = ty.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| Error::Format(format!("unterminated nominal set for `{name}`")))?;
        AttrKind::Nominal(
            body.split(',')
                .map(|v| unquote(v.trim()).to_string())
                .collect(),
        )
    } else {
        let lower = ty.to_ascii_lowercase();
        match lower.split_whitespace().next().unwrap_or("") {
            "numeric" | "real" | "integer" => AttrKind::Numeric,
            other => {
                return Err(Error::UnsupportedAttribute {
                    attribute: name.to_string(),
                    kind: other.to_string(),
                })
            }
        }
    };
    Ok(Attribute {
        name: name.to_string(),
        kind,
    })
}
