use std::path::Path;

use roofcast_core::{quality_metrics, relative_difference, square_error};

use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::report::{output_path, sci, CsvTable, Table};

/// Labels from the first column, values from `column` (default: the second).
fn series(path: &Path, column: Option<&str>) -> CliResult<Vec<(String, f64)>> {
    let t = CsvTable::read(path)?;
    let col = match column {
        Some(name) => t.column(name)?,
        None if t.header.len() >= 2 => 1,
        None => {
            return Err(CliError::Input(format!(
                "{}: need a label column and a value column",
                path.display()
            )))
        }
    };
    t.rows
        .iter()
        .map(|(line, row)| Ok((t.text(row, 0).to_string(), t.number(*line, row, col)?)))
        .collect()
}

pub struct ValidateArgs<'a> {
    pub predicted: &'a Path,
    pub reference: &'a Path,
    pub column: Option<&'a str>,
    pub tolerance: Option<f64>,
}

/// Row-paired `t_sim / t_prof - 1` differences and their summary.
pub fn run(ctx: &Ctx, a: &ValidateArgs) -> CliResult<Vec<String>> {
    let predicted = series(a.predicted, a.column)?;
    let reference = series(a.reference, a.column)?;
    if predicted.len() != reference.len() {
        return Err(CliError::Input(format!(
            "pairing error: {} predicted rows but {} reference rows",
            predicted.len(),
            reference.len()
        )));
    }
    if let Some(t) = a.tolerance {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::Input(format!("tolerance {t} must be >= 0")));
        }
    }
    let mut rows = Table::new(["label", "predicted", "reference", "difference"]);
    let mut diffs = Vec::with_capacity(predicted.len());
    let mut over = Vec::new();
    for ((pl, p), (rl, r)) in predicted.iter().zip(&reference) {
        if pl != rl {
            return Err(CliError::Input(format!(
                "pairing error: predicted row `{pl}` is paired with reference row `{rl}`"
            )));
        }
        let d = relative_difference(*p, *r)?;
        if a.tolerance.is_some_and(|t| d.abs() > t) {
            over.push((pl.clone(), d));
        }
        diffs.push(d);
        rows.push([pl.clone(), sci(*p), sci(*r), sci(d)]);
    }
    let m = quality_metrics(&diffs)?;
    let se = square_error(&diffs)?;
    let mut summary = Table::new(["metric", "value"]);
    for (k, v) in [
        ("square_error", se),
        ("max", m.max),
        ("min", m.min),
        ("mean", m.mean),
        ("stddev", m.stddev),
    ] {
        summary.push([k.to_string(), sci(v)]);
    }
    rows.write(&output_path(&ctx.out, "validation.csv")?)?;
    summary.write(&output_path(&ctx.out, "validation_summary.csv")?)?;

    let pct = |x: f64| format!("{:.2}%", x * 100.0);
    let lines = vec![format!(
        "{} pairs: max {} min {} mean {} stddev {} square error {}",
        diffs.len(),
        pct(m.max),
        pct(m.min),
        pct(m.mean),
        pct(m.stddev),
        pct(se)
    )];
    if let Some(t) = a.tolerance {
        if !over.is_empty() {
            let named: Vec<_> = over
                .iter()
                .map(|(l, d)| format!("row `{l}` differs by {}", pct(*d)))
                .collect();
            return Err(CliError::Tolerance(format!(
                "{} (tolerance {})",
                named.join(", "),
                pct(t)
            )));
        }
    }
    Ok(lines)
}
