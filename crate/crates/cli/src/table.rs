//! Numeric CSV input and output.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug)]
pub struct CsvOptions {
    /// `None` detects a header from the first row.
    pub header: Option<bool>,
    pub delimiter: u8,
}

#[derive(Debug)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

pub fn read_table(path: &Path, opts: CsvOptions) -> CliResult<Table> {
    let file = File::open(path).map_err(CliError::io(path.display().to_string()))?;
    parse_table(file, opts).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_table(input: impl io::Read, opts: CsvOptions) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut header = None;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if i == 0 && opts.header.unwrap_or_else(|| parsed.iter().any(Result::is_err)) {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (j, v) in parsed.into_iter().enumerate() {
            match v {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(CliError::Data(format!(
                        "row {}, column {}: {:?} is not a finite number",
                        i + 1,
                        j + 1,
                        &record[j]
                    )))
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Data("no data rows".into()));
    }
    Ok(Table { header, rows })
}

/// Writes to `path`, or to stdout when `path` is `None` or `-`.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            let f = File::create(p).map_err(CliError::io(p.display().to_string()))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        _ => Ok(Box::new(io::BufWriter::new(io::stdout().lock()))),
    }
}

pub fn csv_writer(out: Box<dyn Write>, delimiter: u8) -> csv::Writer<Box<dyn Write>> {
    csv::WriterBuilder::new().delimiter(delimiter).from_writer(out)
}

pub fn fmt_row(values: &[f64]) -> Vec<String> {
    values.iter().map(f64::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const AUTO: CsvOptions = CsvOptions { header: None, delimiter: b',' };

    #[test]
    fn detects_header() {
        let t = parse_table("x,y\n1,2\n3,4\n".as_bytes(), AUTO).unwrap();
        assert_eq!(t.header.unwrap(), ["x", "y"]);
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let t = parse_table("1,2\n3,4\n".as_bytes(), AUTO).unwrap();
        assert!(t.header.is_none());
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn reports_bad_cell_position() {
        let opts = CsvOptions { header: Some(false), ..AUTO };
        let err = parse_table("1,2\n3,oops\n".as_bytes(), opts).unwrap_err();
        assert!(err.to_string().contains("row 2, column 2"), "{err}");
    }

    #[test]
    fn other_delimiters_and_empty_input() {
        let t = parse_table("1;2\n".as_bytes(), CsvOptions { delimiter: b';', ..AUTO }).unwrap();
        assert_eq!(t.rows, vec![vec![1.0, 2.0]]);
        assert!(parse_table("".as_bytes(), AUTO).is_err());
        assert!(parse_table("a,b\n".as_bytes(), AUTO).is_err());
    }
}
