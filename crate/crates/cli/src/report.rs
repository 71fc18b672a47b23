//! Output formatting and small CSV helpers shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use roofcast_core::catalog::CpuState;

use crate::error::{CliError, CliResult};

/// Six significant digits in scientific notation with a signed two-digit
/// exponent, e.g. `8.70736E+12`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.5E}");
    let (mantissa, exp) = s
        .split_once('E')
        .expect("`E` format always has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

pub fn opt_sci(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Collects rows, then writes them in one go.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
        w.write_record(&self.header)
            .map_err(|e| CliError::io(path, e))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

/// Creates `dir` if needed and returns the path of `name` inside it.
pub fn output_path(dir: &Path, name: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.join(name))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn state_label(state: &CpuState<f64>) -> (String, String) {
    (state.frequency.to_string(), state.cores.to_string())
}

/// A parsed CSV with a header. Row numbers in errors are file line numbers.
pub struct CsvTable {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

impl CsvTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::io(path, e))?;
        let header = rdr
            .headers()
            .map_err(|e| CliError::io(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| CliError::io(path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec.iter().map(str::to_string).collect()));
        }
        Ok(CsvTable {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Input(format!("{}: missing column `{name}`", self.path.display()))
        })
    }

    pub fn number(&self, line: u64, row: &[String], col: usize) -> CliResult<f64> {
        let cell = row.get(col).map(String::as_str).unwrap_or("");
        cell.parse().map_err(|_| {
            CliError::Input(format!(
                "{}: line {line}: `{cell}` in column `{}` is not a number",
                self.path.display(),
                self.header[col]
            ))
        })
    }

    pub fn text<'a>(&self, row: &'a [String], col: usize) -> &'a str {
        row.get(col).map(String::as_str).unwrap_or("")
    }

    /// `(state, value)` pairs from `freq`, `cores` and `value_column`.
    pub fn state_samples(&self, value_column: &str) -> CliResult<Vec<(CpuState<f64>, f64)>> {
        let (f, c, v) = (
            self.column("freq")?,
            self.column("cores")?,
            self.column(value_column)?,
        );
        self.rows
            .iter()
            .map(|(line, row)| {
                let frequency = self
                    .text(row, f)
                    .parse()
                    .map_err(|e: roofcast_core::Error| {
                        CliError::Input(format!("{}: line {line}: {e}", self.path.display()))
                    })?;
                let cores = self.text(row, c).parse().map_err(|_| {
                    CliError::Input(format!(
                        "{}: line {line}: cores `{}` is not a count",
                        self.path.display(),
                        self.text(row, c)
                    ))
                })?;
                Ok((CpuState { frequency, cores }, self.number(*line, row, v)?))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_matches_table_style() {
        assert_eq!(sci(8707363660800.0), "8.70736E+12");
        assert_eq!(sci(5.31661e11), "5.31661E+11");
        assert_eq!(sci(0.0214), "2.14000E-02");
        assert_eq!(sci(0.0), "0.00000E+00");
        assert_eq!(sci(-1.5), "-1.50000E+00");
        assert_eq!(sci(1e-120), "1.00000E-120");
    }

    #[test]
    fn sci_round_trips_to_six_digits() {
        for x in [1.0, 291.2, 56.768, 0.13, 2.46e9, 123456.7] {
            let back: f64 = sci(x).parse().unwrap();
            assert!((back / x - 1.0).abs() < 5e-6, "{x}");
        }
    }
}
