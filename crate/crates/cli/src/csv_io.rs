//! CSV input and output.

use std::path::Path;

use anyhow::{bail, Context, Result};
use covcp_core::{DataMatrix, ScoreCurve, ScreeningVector};

/// Reads an observation matrix: one row per observation, one column per
/// coordinate.
///
/// A first line whose fields are all non-numeric is treated as a header and
/// skipped. Error messages use 1-based line and column positions over the
/// raw file, header included.
pub fn read_matrix(path: &Path, delimiter: u8) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .delimiter(delimiter)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    let mut first_data_line = 1usize;
    for (index, record) in reader.records().enumerate() {
        let line = index + 1;
        let record =
            record.with_context(|| format!("{}: malformed line {line}", path.display()))?;
        let mut values = Vec::with_capacity(record.len());
        let mut bad: Option<(usize, String)> = None;
        for (col, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    bad = Some((col + 1, field.to_string()));
                    break;
                }
            }
        }
        match bad {
            None => {
                if rows.is_empty() {
                    width = values.len();
                    first_data_line = line;
                } else if values.len() != width {
                    bail!(
                        "{}: line {line} has {} fields, expected {width} (as on line {})",
                        path.display(),
                        values.len(),
                        first_data_line,
                    );
                }
                rows.push(values);
            }
            Some((col, field)) => {
                let header_like = record.iter().all(|f| f.parse::<f64>().is_err());
                if line == 1 && header_like {
                    continue;
                }
                bail!(
                    "{}: line {line}, column {col}: cannot read {field:?} as a finite number",
                    path.display(),
                );
            }
        }
    }

    DataMatrix::from_rows(&rows).with_context(|| format!("{}: invalid sample", path.display()))
}

/// Writes the score curve as `split,score` lines.
pub fn write_curve(path: &Path, curve: &ScoreCurve) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(["split", "score"])?;
    for (k, score) in curve.iter() {
        writer.write_record([k.to_string(), score.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes per-component screening statistics as `a,b,statistic` lines.
pub fn write_screening(path: &Path, scores: &ScreeningVector) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(["a", "b", "statistic"])?;
    for (index, value) in scores.iter() {
        writer.write_record([
            index.a().to_string(),
            index.b().to_string(),
            value.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes detected break-ratio estimates, one per line, for external
/// histogramming.
pub fn write_estimates(path: &Path, estimates: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(["estimate"])?;
    for estimate in estimates {
        writer.write_record([estimate.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
