//! Readers and writers for the supported on-disk formats: svmlight/libsvm
//! sparse text (1-based indices on disk, 0-based in memory), dense CSV, and
//! one-line-per-instance label lists for multi-label targets.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Reads an svmlight file: `label idx:val idx:val ...` per line, indices
/// 1-based. Returns the feature matrix and the raw label tokens.
pub fn read_svmlight(path: impl AsRef<Path>) -> Result<(SparseMatrix, Vec<String>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut labels = Vec::new();
    let mut row_offsets = vec![0usize];
    let mut col_indices: Vec<usize> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut n_cols = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line has a first token");
        labels.push(label.to_string());

        let mut entries: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx_str, val_str) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx_str
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature index `{idx_str}`")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            let val: f64 = val_str
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature value `{val_str}`")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, "non-finite feature value"));
            }
            if val != 0.0 {
                entries.push((idx - 1, val));
            }
        }
        entries.sort_by_key(|&(c, _)| c);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(parse_err(lineno, "duplicate feature index"));
        }
        for (c, v) in entries {
            n_cols = n_cols.max(c + 1);
            col_indices.push(c);
            values.push(v);
        }
        row_offsets.push(values.len());
    }
    let n_rows = labels.len();
    Ok((
        SparseMatrix::from_parts_unchecked(n_rows, n_cols, row_offsets, col_indices, values),
        labels,
    ))
}

/// Writes svmlight, emitting 1-based indices.
pub fn write_svmlight(
    path: impl AsRef<Path>,
    matrix: &SparseMatrix,
    labels: &[String],
) -> Result<()> {
    assert_eq!(matrix.n_rows(), labels.len(), "one label per row");
    let mut out = BufWriter::new(File::create(path)?);
    for i in 0..matrix.n_rows() {
        write!(out, "{}", labels[i])?;
        let (cols, vals) = matrix.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            write!(out, " {}:{}", c + 1, v)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a dense CSV of numbers. With `has_header`, the first non-empty
/// line is skipped.
pub fn read_csv(path: impl AsRef<Path>, has_header: bool) -> Result<SparseMatrix> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n_cols: Option<usize> = None;
    let mut header_pending = has_header;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.trim();
        if content.is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let row: Vec<f64> = content
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(lineno, format!("non-numeric cell `{}`", cell.trim())))
            })
            .collect::<Result<_>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(lineno, "non-finite cell"));
        }
        match n_cols {
            None => n_cols = Some(row.len()),
            Some(n) if n != row.len() => {
                return Err(parse_err(
                    lineno,
                    format!("ragged row: {} cells, expected {n}", row.len()),
                ));
            }
            _ => {}
        }
        rows.push(row);
    }
    SparseMatrix::from_dense(&rows)
}

/// Writes a dense CSV. `{}` formatting keeps f64 round-trips lossless.
pub fn write_csv(path: impl AsRef<Path>, matrix: &SparseMatrix) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for row in matrix.to_dense() {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes dense rows (e.g. embedding coordinates) as CSV.
pub fn write_dense_csv(path: impl AsRef<Path>, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one numeric class value per line.
pub fn read_class_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.trim();
        if content.is_empty() {
            continue;
        }
        let v: f64 = content
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad class value `{content}`")))?;
        out.push(v);
    }
    Ok(out)
}

pub fn write_class_file(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a multi-label target file: one comma-separated list of 0-based
/// label indices per instance line; an empty list (`-` or blank token list)
/// produces a zero-label row. Label count is inferred as max index + 1
/// unless declared.
pub fn read_label_lists(
    path: impl AsRef<Path>,
    declared_labels: Option<usize>,
) -> Result<SparseMatrix> {
    let reader = BufReader::new(File::open(path)?);
    let mut per_row: Vec<Vec<usize>> = Vec::new();
    let mut max_label = 0usize;
    let mut any_label = false;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.trim();
        let mut labels: Vec<usize> = Vec::new();
        if !content.is_empty() && content != "-" {
            for tok in content.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let idx: usize = tok
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad label index `{tok}`")))?;
                if let Some(n) = declared_labels {
                    if idx >= n {
                        return Err(parse_err(
                            lineno,
                            format!("label index {idx} >= declared label count {n}"),
                        ));
                    }
                }
                labels.push(idx);
            }
        }
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(parse_err(lineno, "duplicate label index"));
        }
        if let Some(&m) = labels.last() {
            max_label = max_label.max(m);
            any_label = true;
        }
        per_row.push(labels);
    }
    let n_labels = declared_labels.unwrap_or(if any_label { max_label + 1 } else { 0 });
    let mut row_offsets = vec![0usize];
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    for labels in &per_row {
        for &l in labels {
            col_indices.push(l);
            values.push(1.0);
        }
        row_offsets.push(col_indices.len());
    }
    Ok(SparseMatrix::from_parts_unchecked(
        per_row.len(),
        n_labels,
        row_offsets,
        col_indices,
        values,
    ))
}

pub fn write_label_lists(path: impl AsRef<Path>, labels: &SparseMatrix) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for i in 0..labels.n_rows() {
        let (cols, _) = labels.row(i);
        let line: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}
