//! Text formats: `label idx:value ...` datasets and comma-separated cost
//! matrices.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::{CostMatrix, FeatureVector, Label, LabeledDataset};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses the sparse dataset format. Blank lines and lines starting with `#`
/// are skipped. The class count is the largest label seen.
pub fn parse_dataset(text: &str, origin: &Path) -> Result<LabeledDataset> {
    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line");
        let label: usize = label_tok
            .parse()
            .map_err(|_| parse_error(origin, lineno, format!("bad label '{label_tok}'")))?;
        if label == 0 {
            return Err(parse_error(origin, lineno, "labels must be positive"));
        }
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_error(origin, lineno, format!("expected idx:value, got '{tok}'")))?;
            let idx: u32 = idx
                .parse()
                .map_err(|_| parse_error(origin, lineno, format!("bad index '{idx}'")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| parse_error(origin, lineno, format!("bad value '{val}'")))?;
            entries.push((idx, val));
        }
        let x = FeatureVector::new(entries).map_err(|e| parse_error(origin, lineno, e.to_string()))?;
        features.push(x);
        raw_labels.push(label);
    }
    if raw_labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let classes = raw_labels.iter().copied().max().unwrap_or(0);
    let labels = raw_labels.into_iter().map(|y| Label::from_index(y - 1)).collect();
    LabeledDataset::new(features, labels, classes)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    parse_dataset(&read(path)?, path)
}

pub fn format_dataset(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for (x, y) in data.features.iter().zip(&data.labels) {
        write!(out, "{y}").unwrap();
        for (i, v) in x.entries() {
            write!(out, " {i}:{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<()> {
    write(path.as_ref(), &format_dataset(data))
}

/// Parses `K` rows of `K` comma-separated reals.
pub fn parse_cost_matrix(text: &str, origin: &Path) -> Result<CostMatrix> {
    let mut rows = Vec::new();
    let mut first_line = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_error(origin, lineno + 1, format!("bad cost '{}'", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        first_line.push(lineno + 1);
    }
    let k = rows.len();
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != k) {
        return Err(parse_error(
            origin,
            first_line[r],
            format!("row has {} entries, expected {k}", row.len()),
        ));
    }
    CostMatrix::new(rows).map_err(|e| match e {
        Error::InvalidCostMatrix(msg) => parse_error(origin, 0, msg),
        other => other,
    })
}

pub fn read_cost_matrix(path: impl AsRef<Path>) -> Result<CostMatrix> {
    let path = path.as_ref();
    parse_cost_matrix(&read(path)?, path)
}

pub fn format_cost_matrix(matrix: &CostMatrix) -> String {
    let mut out = String::new();
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_cost_matrix(path: impl AsRef<Path>, matrix: &CostMatrix) -> Result<()> {
    write(path.as_ref(), &format_cost_matrix(matrix))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}
