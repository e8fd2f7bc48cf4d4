//! Table writers shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::CliError;

/// Buffered writer to `path`, or to standard output.
pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("cannot create {}", p.display()), e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

/// Twelve significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

/// `x` rounded to twelve significant digits.
pub fn round12(x: f64) -> f64 {
    fmt_f64(x).parse().unwrap_or(x)
}

/// Writes a numeric table with a header row (csv) or one object per row (json).
pub fn write_table(out: &mut dyn Write, format: Format, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(columns)?;
            for row in rows {
                w.write_record(row.iter().map(|&x| fmt_f64(x)))?;
            }
            w.flush().map_err(|e| CliError::Io("write failed".into(), e))?;
        }
        Format::Json => {
            for row in rows {
                let obj: Map<String, Value> = columns
                    .iter()
                    .zip(row)
                    .map(|(c, &x)| (c.to_string(), Value::from(round12(x))))
                    .collect();
                serde_json::to_writer(&mut *out, &obj)?;
                out.write_all(b"\n")
                    .map_err(|e| CliError::Io("write failed".into(), e))?;
            }
        }
    }
    out.flush().map_err(|e| CliError::Io("write failed".into(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_f64(0.5623351446188083), "5.62335144619e-1");
        assert_eq!(fmt_f64(20.0), "2.00000000000e1");
        assert_eq!(round12(0.5623351446188083), 0.562335144619);
    }

    #[test]
    fn csv_and_json_tables() {
        let rows = vec![vec![1.0, -0.25], vec![2.0, 1.0 / 3.0]];
        let mut buf = Vec::new();
        write_table(&mut buf, Format::Csv, &["a", "b"], &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "a,b\n1.00000000000e0,-2.50000000000e-1\n2.00000000000e0,3.33333333333e-1\n"
        );
        let mut buf = Vec::new();
        write_table(&mut buf, Format::Json, &["a", "b"], &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"a\":1.0,\"b\":-0.25}\n{\"a\":2.0,\"b\":0.333333333333}\n"
        );
    }
}
