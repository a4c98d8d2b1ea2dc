//! CSV ingestion and model files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use entpca_core::{persist, Dataset, DenseMatrix, PcaModel};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How items are laid out in a CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// One item per line (the usual layout of tabular datasets).
    #[default]
    ItemsAsRows,
    /// One item per column.
    ItemsAsColumns,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Read { path: path.to_owned(), source })
}

/// Parses a numeric CSV into rows of equal width.
///
/// Errors name the 1-based line of the offending record.
pub fn read_numeric_rows<R: Read>(reader: R, path: &Path, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let ingest = |line: u64, msg: String| Error::Ingest { path: path.to_owned(), line, msg };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            ingest(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(c, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(ingest(line, format!("field {} is not a finite number: {cell:?}", c + 1))),
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(ingest(line, format!("{} fields, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ingest(1, "no data rows".into()));
    }
    Ok(rows)
}

pub fn read_numeric_rows_from(path: &Path, has_header: bool) -> Result<Vec<Vec<f64>>> {
    read_numeric_rows(open(path)?, path, has_header)
}

/// Loads a dataset so that items end up as matrix columns, whatever the file
/// orientation.
pub fn load_csv(path: &Path, orientation: Orientation, has_header: bool) -> Result<Dataset> {
    let rows = read_numeric_rows_from(path, has_header)?;
    let width = rows[0].len();
    let matrix = match orientation {
        // each line is an item: it becomes a column
        Orientation::ItemsAsRows => DenseMatrix::from_col_major(width, rows.len(), rows.concat())?,
        Orientation::ItemsAsColumns => {
            let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
            DenseMatrix::from_rows(&refs)?
        }
    };
    Ok(Dataset::new(matrix)?)
}

pub fn save_model<W: Write>(model: &PcaModel, mut sink: W) -> std::io::Result<()> {
    sink.write_all(&persist::encode(model))?;
    sink.flush()
}

pub fn load_model<R: Read>(mut source: R, path: &Path) -> Result<PcaModel> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes).map_err(|source| Error::Read { path: path.to_owned(), source })?;
    Ok(persist::decode(&bytes)?)
}

pub fn save_model_file(model: &PcaModel, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(Error::Write)?;
    save_model(model, BufWriter::new(file)).map_err(Error::Write)
}

pub fn load_model_file(path: &Path) -> Result<PcaModel> {
    load_model(open(path)?, path)
}
