//! Text loaders for edge lists, feature CSVs, and label files.

use std::fs;
use std::path::Path;

use super::{Dataset, Graph};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// One edge per line as two whitespace-separated 0-based ids. Blank lines and
/// lines starting with `#` are skipped.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Vec<(usize, usize)>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize> {
            let tok = it
                .next()
                .ok_or_else(|| parse_err(path, lineno + 1, "expected two node ids"))?;
            tok.parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("invalid node id {tok:?}")))
        };
        let u = next()?;
        let v = next()?;
        if it.next().is_some() {
            return Err(parse_err(path, lineno + 1, "more than two fields"));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

/// Headerless numeric CSV, one row per node.
pub fn read_features(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut data = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split(',') {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("invalid number {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno + 1, "non-finite feature"));
            }
            data.push(v);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(
                    path,
                    lineno + 1,
                    format!("expected {c} columns, found {width}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

/// One non-negative integer label per line.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(lineno, l)| {
            let tok = l.trim();
            tok.parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("invalid label {tok:?}")))
        })
        .collect()
}

/// Loads a dataset. The node count comes from the feature file and the class
/// count is one more than the largest label.
pub fn load_dataset(
    edge_path: impl AsRef<Path>,
    feature_path: impl AsRef<Path>,
    label_path: impl AsRef<Path>,
) -> Result<Dataset> {
    let features = read_features(feature_path.as_ref())?;
    let labels = read_labels(label_path.as_ref())?;
    let edges = read_edge_list(edge_path.as_ref())?;
    let n = features.rows();
    if labels.len() != n {
        return Err(parse_err(
            label_path.as_ref(),
            labels.len(),
            format!("expected {n} labels to match feature rows, found {}", labels.len()),
        ));
    }
    let graph = Graph::from_edges(n, &edges)?;
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(graph, features, labels, num_classes)
}
