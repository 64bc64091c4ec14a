//! Dataset CSV serialization.
//!
//! Format: UTF-8, comma-separated, `\n` newlines, one header row with the
//! feature columns first and a final `label` column. Floats are written in
//! Rust's shortest round-trip decimal form, so `load_csv(save_csv(d)) == d`
//! bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let p = dataset.n_features();
    for j in 0..p {
        write!(out, "f{j},")?;
    }
    writeln!(out, "label")?;
    for i in 0..dataset.n_samples() {
        for v in dataset.row(i) {
            write!(out, "{v},")?;
        }
        writeln!(out, "{}", dataset.label(i))?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();

    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(&display, 1, "empty file, expected a header row"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let label_col = columns
        .iter()
        .position(|c| c.trim() == "label")
        .ok_or_else(|| parse_err(&display, 1, "missing `label` column"))?;
    let p = columns.len() - 1;
    if p == 0 {
        return Err(parse_err(&display, 1, "no feature columns before `label`"));
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (line_idx, line) in lines.enumerate() {
        let line_no = line_idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(parse_err(
                &display,
                line_no,
                format!("expected {} cells, found {}", columns.len(), cells.len()),
            ));
        }
        for (col, cell) in cells.iter().enumerate() {
            if col == label_col {
                match cell.trim() {
                    "0" => labels.push(0),
                    "1" => labels.push(1),
                    other => {
                        return Err(parse_err(
                            &display,
                            line_no,
                            format!("label outside {{0,1}}: `{other}`"),
                        ))
                    }
                }
            } else {
                let value: f64 = cell.trim().parse().map_err(|_| {
                    parse_err(
                        &display,
                        line_no,
                        format!(
                            "non-numeric feature cell `{cell}` in column `{}`",
                            columns[col]
                        ),
                    )
                })?;
                features.push(value);
            }
        }
    }
    Dataset::new(features, p, labels).map_err(|e| match e {
        Error::InvalidDataset(msg) => parse_err(&display, 0, msg),
        other => other,
    })
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}
