use std::path::Path;

use roofcast_core::catalog::CpuState;
use roofcast_core::cpu::log_space;
use roofcast_core::{roofline_point, roofline_series};

use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::report::{output_path, sci, write_text, CsvTable, Table};
use crate::svg::{render, Plot, Series, Style};

pub struct RooflineArgs<'a> {
    pub cpu: &'a str,
    pub state: CpuState<f64>,
    pub points: Option<&'a Path>,
    pub min_intensity: f64,
    pub max_intensity: f64,
    pub steps: usize,
    pub peak: Option<f64>,
}

const LEVELS: [&str; 4] = ["ceiling_L1", "ceiling_L2", "ceiling_L3", "ceiling_DRAM"];

/// Points CSV: `label,intensity,gflops`.
fn read_points(path: &Path) -> CliResult<Vec<(String, f64, f64)>> {
    let t = CsvTable::read(path)?;
    let (l, i, g) = (
        t.column("label")?,
        t.column("intensity")?,
        t.column("gflops")?,
    );
    t.rows
        .iter()
        .map(|(line, row)| {
            Ok((
                t.text(row, l).to_string(),
                t.number(*line, row, i)?,
                t.number(*line, row, g)?,
            ))
        })
        .collect()
}

pub fn run(ctx: &Ctx, a: &RooflineArgs) -> CliResult<Vec<String>> {
    if !(a.min_intensity > 0.0 && a.max_intensity > a.min_intensity && a.steps >= 2) {
        return Err(CliError::Input(
            "intensity range needs 0 < min < max and at least 2 steps".into(),
        ));
    }
    let catalog = ctx.catalog()?;
    let spec = catalog.cpu(a.cpu)?;
    let grid = log_space(a.min_intensity, a.max_intensity, a.steps);
    let series = roofline_series(spec, &a.state, &grid, a.peak)?;

    let mut points = match a.points {
        Some(p) => read_points(p)?,
        None => Vec::new(),
    };
    if let [_, ..] = ctx.models.as_slice() {
        let model = ctx.dwarf_model()?;
        let time = roofcast_core::dwarf_time(&model, &a.state, spec)?;
        let w: f64 = time.loops.iter().map(|l| l.load.w).sum();
        let q: f64 = time.loops.iter().map(|l| l.load.q).sum();
        let p = roofline_point(w, q, time.total)?;
        points.push((model.name.clone(), p.intensity, p.performance / 1e9));
    }

    let mut ceilings = Table::new([
        "intensity",
        LEVELS[0],
        LEVELS[1],
        LEVELS[2],
        LEVELS[3],
        "peak",
    ]);
    for r in &series.rows {
        let mut row = vec![sci(r.intensity)];
        row.extend(r.ceilings.map(sci));
        row.push(sci(series.peak));
        ceilings.push(row);
    }
    let mut app = Table::new(["label", "intensity", "gflops"]);
    for (label, i, g) in &points {
        app.push([label.clone(), sci(*i), sci(*g)]);
    }

    if ctx.format.csv() {
        ceilings.write(&output_path(&ctx.out, "roofline.csv")?)?;
        if !points.is_empty() {
            app.write(&output_path(&ctx.out, "roofline_points.csv")?)?;
        }
    }
    if ctx.format.svg() {
        let mut plot = Plot {
            title: format!("Cache-aware roofline for {} {}", a.cpu, a.state),
            x_label: "Arithmetic intensity [FLOP/B]".into(),
            y_label: "Performance [GFLOP/s]".into(),
            series: LEVELS
                .iter()
                .enumerate()
                .map(|(k, name)| Series {
                    name: (*name).to_string(),
                    style: Style::Line,
                    points: series
                        .rows
                        .iter()
                        .map(|r| (r.intensity, r.ceilings[k]))
                        .collect(),
                })
                .collect(),
        };
        plot.series
            .extend(points.iter().map(|(label, i, g)| Series {
                name: label.clone(),
                style: Style::Markers,
                points: vec![(*i, *g)],
            }));
        write_text(&output_path(&ctx.out, "roofline.svg")?, &render(&plot))?;
    }
    let mut lines = vec![format!(
        "{} {}: peak {} GFLOP/s, {} intensities, {} application points",
        a.cpu,
        a.state,
        sci(series.peak),
        series.rows.len(),
        points.len()
    )];
    for (label, i, g) in &points {
        lines.push(format!("  {label}: I={} P={} GFLOP/s", sci(*i), sci(*g)));
    }
    Ok(lines)
}
