//! CSV ingestion and output.

use std::io::{Read, Write};
use std::path::Path;

use modesig_core::DataMatrix;

use crate::error::{io_err, CliError, Result};

/// Reads a numeric CSV file. Rows are reported 1-based as they appear in the
/// file, header included.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    parse_csv(file, has_header).map_err(|e| match e {
        CliError::EmptyFile { .. } => CliError::EmptyFile { path: path.into() },
        other => other,
    })
}

pub fn parse_csv(reader: impl Read, has_header: bool) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut d = 0;
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() + 1;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(source) => return Err(CliError::Csv { row: line, source }),
        }
        let row = record.position().map_or(line, |p| p.line());
        if d == 0 {
            d = record.len();
        } else if record.len() != d {
            return Err(CliError::RaggedRow {
                row,
                expected: d,
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(CliError::BadCell {
                        row,
                        column: j + 1,
                        cell: cell.to_string(),
                    })
                }
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::EmptyFile { path: "<input>".into() });
    }
    Ok(DataMatrix::new(values, d)?)
}

/// Writes rows without a header using the shortest round-trip float format.
pub fn write_csv(out: &mut impl Write, data: &DataMatrix) -> std::io::Result<()> {
    for row in data.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
