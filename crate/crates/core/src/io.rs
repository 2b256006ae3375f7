//! Delimited-text ingestion and emission.
//!
//! Format: UTF-8, comma-separated, one row per time step, optional single
//! header row (channel names). Labels and scores are single-column files.
//!
//! Data files (series, scores, labels) are written with Rust's shortest
//! round-tripping float formatting so a saved file reloads to bit-identical
//! values. Derived artifacts (curve and report CSVs) use
//! [`format_sig9`] — 9 significant digits — and are not meant to round-trip.
//! All writes go through a temporary file in the target directory followed
//! by an atomic rename, so a failed run never leaves a partial file behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::{LabelSeries, ScoreSeries, TimeSeries};

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// A parsed numeric table: optional header names plus data rows, with the
/// 1-based file line of each row retained for error reporting.
struct Table {
    header: Option<Vec<String>>,
    rows: Vec<(usize, Vec<f64>)>,
}

fn parse_table(path: &Path) -> Result<Table> {
    let content = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut width: Option<usize> = None;

    for (line_idx, raw_line) in content.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, (usize, &str)> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| c.parse::<f64>().map_err(|_| (i, *c)))
            .collect();
        match parsed {
            Ok(values) => {
                if let Some(found) = values.iter().position(|v| !v.is_finite()) {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!(
                            "non-finite value {:?} in column {}",
                            cells[found],
                            found + 1
                        ),
                    ));
                }
                match width {
                    None => width = Some(values.len()),
                    Some(w) if w != values.len() => {
                        return Err(parse_error(
                            path,
                            line_no,
                            format!("expected {w} columns, found {}", values.len()),
                        ));
                    }
                    Some(_) => {}
                }
                rows.push((line_no, values));
            }
            Err((col, cell)) => {
                // A non-numeric first line is a header; anywhere else it is
                // a malformed cell.
                if rows.is_empty() && header.is_none() {
                    header = Some(cells.iter().map(|c| (*c).to_string()).collect());
                } else {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("cannot parse {cell:?} in column {}", col + 1),
                    ));
                }
            }
        }
    }

    if rows.is_empty() {
        return Err(parse_error(path, 1, "no data rows"));
    }
    if let (Some(h), Some(w)) = (&header, width) {
        if h.len() != w {
            return Err(parse_error(
                path,
                1,
                format!("header has {} names but rows have {w} columns", h.len()),
            ));
        }
    }
    Ok(Table { header, rows })
}

fn single_column(path: &Path, table: &Table) -> Result<Vec<(usize, f64)>> {
    table
        .rows
        .iter()
        .map(|(line, values)| {
            if values.len() != 1 {
                Err(parse_error(
                    path,
                    *line,
                    format!("expected a single column, found {}", values.len()),
                ))
            } else {
                Ok((*line, values[0]))
            }
        })
        .collect()
}

/// Load a multivariate series; a non-numeric first row is taken as channel
/// names.
pub fn load_series(path: impl AsRef<Path>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let table = parse_table(path)?;
    let rows = table.rows.len();
    let cols = table.rows[0].1.len();
    let mut flat = Vec::with_capacity(rows * cols);
    for (_, values) in &table.rows {
        flat.extend_from_slice(values);
    }
    let values = ndarray::Array2::from_shape_vec((rows, cols), flat)
        .expect("row widths validated during parsing");
    TimeSeries::new(values, table.header)
}

/// Load a single-column 0/1 label file.
pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelSeries> {
    let path = path.as_ref();
    let table = parse_table(path)?;
    let mut labels = Vec::with_capacity(table.rows.len());
    for (line, value) in single_column(path, &table)? {
        if value == 0.0 {
            labels.push(0);
        } else if value == 1.0 {
            labels.push(1);
        } else {
            return Err(parse_error(
                path,
                line,
                format!("label must be 0 or 1, got {value}"),
            ));
        }
    }
    LabelSeries::new(labels)
}

/// Load a single-column score file; the series origin records the path.
pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoreSeries> {
    let path = path.as_ref();
    let table = parse_table(path)?;
    let scores: Vec<f64> = single_column(path, &table)?
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    ScoreSeries::new(scores, path.display().to_string())
}

/// Write `content` to `path` atomically: a temporary file in the same
/// directory is fully written, then renamed over the target.
pub fn write_text_atomic(path: impl AsRef<Path>, content: &str) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".partial-")
        .tempfile_in(dir)
        .map_err(|e| io_error(path, e))?;
    tmp.write_all(content.as_bytes())
        .and_then(|()| tmp.flush())
        .map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// Save a series, emitting a header row when channel names are present.
pub fn save_series(path: impl AsRef<Path>, series: &TimeSeries) -> Result<()> {
    let mut out = String::new();
    if let Some(names) = series.channel_names() {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for row in series.values().outer_iter() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to String cannot fail");
            first = false;
        }
        out.push('\n');
    }
    write_text_atomic(path, &out)
}

/// Save labels, one `0`/`1` per line.
pub fn save_labels(path: impl AsRef<Path>, labels: &LabelSeries) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 2);
    for &v in labels.as_slice() {
        out.push(if v == 1 { '1' } else { '0' });
        out.push('\n');
    }
    write_text_atomic(path, &out)
}

/// Save scores, one value per line in shortest round-tripping form.
pub fn save_scores(path: impl AsRef<Path>, scores: &ScoreSeries) -> Result<()> {
    let mut out = String::new();
    for v in scores.as_slice() {
        writeln!(out, "{v}").expect("writing to String cannot fail");
    }
    write_text_atomic(path, &out)
}

/// Format a value with 9 significant digits for derived (curve/report) CSVs.
pub fn format_sig9(value: f64) -> String {
    if value == 0.0 {
        "0".to_string()
    } else if value.is_finite() {
        format!("{value:.8e}")
    } else {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use tempfile::tempdir;

    #[test]
    fn labels_parse_simple_column() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        std::fs::write(&path, "0\n1\n1\n").unwrap();
        let labels = load_labels(&path).unwrap();
        assert_eq!(labels.as_slice(), &[0, 1, 1]);
    }

    #[test]
    fn series_with_header_and_two_rows() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("series.csv");
        std::fs::write(&path, "ch0,ch1\n1.5,2.5\n3.5,4.5\n").unwrap();
        let series = load_series(&path).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series.channels(), 2);
        assert_eq!(
            series.channel_names().unwrap(),
            &["ch0".to_string(), "ch1".to_string()]
        );
        assert_eq!(series.values()[[1, 0]], 3.5);
    }

    #[test]
    fn bad_cell_names_its_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1.0\nabc\n2.0\n").unwrap();
        match load_scores(&path).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("abc"), "{message}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn ragged_row_names_its_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("ragged.csv");
        std::fs::write(&path, "1,2\n3,4\n5\n").unwrap();
        match load_series(&path).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn label_outside_binary_rejected_with_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("l.csv");
        std::fs::write(&path, "0\n2\n").unwrap();
        match load_labels(&path).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn missing_file_reports_path() {
        let err = load_scores("/nonexistent/nowhere.csv").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn scores_round_trip_bit_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let original = ScoreSeries::new(
            vec![0.1 + 0.2, 1e-300, 123456.789, 1.0 / 3.0, -0.0],
            path.display().to_string(),
        )
        .unwrap();
        save_scores(&path, &original).unwrap();
        let reloaded = load_scores(&path).unwrap();
        assert_eq!(reloaded.as_slice(), original.as_slice());
    }

    #[test]
    fn labels_and_series_round_trip() {
        let dir = tempdir().unwrap();
        let labels_path = dir.path().join("labels.csv");
        let labels = LabelSeries::new(vec![0, 1, 1, 0, 1]).unwrap();
        save_labels(&labels_path, &labels).unwrap();
        assert_eq!(load_labels(&labels_path).unwrap(), labels);

        let series_path = dir.path().join("series.csv");
        let series = TimeSeries::new(
            array![[0.5, 1.0 / 7.0], [2.25, -3.125]],
            Some(vec!["a".into(), "b".into()]),
        )
        .unwrap();
        save_series(&series_path, &series).unwrap();
        assert_eq!(load_series(&series_path).unwrap(), series);
    }

    #[test]
    fn empty_file_is_an_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "").unwrap();
        assert!(matches!(
            load_scores(&path).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(0.840310123456), "8.40310123e-1");
        assert_eq!(format_sig9(f64::NEG_INFINITY), "-inf");
    }
}
