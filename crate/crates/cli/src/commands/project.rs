use std::fmt::Write;
use std::path::Path;

use roofcast_core::projection::{
    pareto_indices, sweep, ConfigPoint, ProjectionOptions, ProjectionResult,
};
use roofcast_core::{
    best_by, DwarfLibrary, DwarfModel, KernelSet, Policy, SweepGrid, WorkflowSpec,
};

use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::report::{output_path, read_text, sci, write_text, Table};
use crate::svg::{render, Plot, Series, Style};

pub const CAVEAT: &str = "CAVEAT: shared-resource saturation is not modeled. Node counts scale \
memory bandwidth and compute ideally, interconnect contention is ignored, and communication \
energy is assumed to be inside the package reading.";

/// Kernel sets are recognised by their `kernels` map; anything else is a CPU dwarf model.
fn load_library(paths: &[std::path::PathBuf]) -> CliResult<DwarfLibrary> {
    if paths.is_empty() {
        return Err(CliError::Input("project needs at least one --model".into()));
    }
    let mut lib = DwarfLibrary::default();
    for p in paths {
        let text = read_text(p)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        let duplicate = if value.get("kernels").is_some() {
            let set = KernelSet::from_json(&text)?;
            let name = set.name.clone();
            lib.gpu.insert(name.clone(), set).map(|_| name)
        } else {
            let model = DwarfModel::from_json(&text)?;
            let name = model.name.clone();
            lib.cpu.insert(name.clone(), model).map(|_| name)
        };
        if let Some(name) = duplicate {
            return Err(CliError::Input(format!(
                "{}: dwarf `{name}` is defined twice",
                p.display()
            )));
        }
    }
    Ok(lib)
}

fn config_cells(c: &ConfigPoint<f64>) -> [String; 6] {
    [
        c.grid_index.to_string(),
        c.cpu.clone().unwrap_or_default(),
        c.gpu.clone().unwrap_or_default(),
        c.nodes.map(|n| n.to_string()).unwrap_or_default(),
        c.frequency.map(|f| f.to_string()).unwrap_or_default(),
        c.cores.map(|n| n.to_string()).unwrap_or_default(),
    ]
}

const CONFIG_HEADER: [&str; 6] = ["grid_index", "cpu", "gpu", "nodes", "freq", "cores"];

fn bound_tags(r: &ProjectionResult<f64>) -> String {
    r.bindings
        .iter()
        .map(|b| {
            let side = b.bound.map_or("gpu", |s| s.as_str());
            format!("{}={side}", b.label)
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn flag(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub struct ProjectArgs<'a> {
    pub workflow: &'a Path,
    pub grid: Option<&'a Path>,
    pub options: ProjectionOptions,
    pub policy: Policy,
}

pub fn run(ctx: &Ctx, a: &ProjectArgs) -> CliResult<Vec<String>> {
    let catalog = ctx.catalog()?;
    let library = load_library(&ctx.models)?;
    let workflow = WorkflowSpec::from_path(a.workflow)?;
    let points = match a.grid {
        Some(g) => SweepGrid::from_path(g)?.points(),
        None => vec![ConfigPoint::unchanged()],
    };
    let outcome = sweep(&workflow, &points, &catalog, &library, &a.options)?;
    if outcome.results.is_empty() {
        let first = outcome
            .rejected
            .into_iter()
            .next()
            .expect("a non-empty grid with no results has rejections");
        return Err(first.error.into());
    }
    let results = &outcome.results;
    let front = pareto_indices(&results.iter().map(|r| (r.tts, r.ets)).collect::<Vec<_>>());
    let best = best_by(results, a.policy)?;

    let mut sweep_table = Table::new(
        CONFIG_HEADER
            .iter()
            .chain(&["tts_s", "ets_j", "bound", "cross_machine", "pareto", "best"])
            .copied(),
    );
    for (k, r) in results.iter().enumerate() {
        let mut row = config_cells(&r.config).to_vec();
        row.extend([
            sci(r.tts),
            sci(r.ets),
            bound_tags(r),
            flag(r.cross_machine()),
            flag(front.contains(&k)),
            if std::ptr::eq(r, best) {
                a.policy.as_str().to_string()
            } else {
                String::new()
            },
        ]);
        sweep_table.push(row);
    }
    let mut pareto_table = Table::new(
        CONFIG_HEADER
            .iter()
            .chain(&["tts_s", "ets_j", "bound", "cross_machine"])
            .copied(),
    );
    for &k in &front {
        let r = &results[k];
        let mut row = config_cells(&r.config).to_vec();
        row.extend([
            sci(r.tts),
            sci(r.ets),
            bound_tags(r),
            flag(r.cross_machine()),
        ]);
        pareto_table.push(row);
    }
    let mut rejected_table = Table::new(CONFIG_HEADER.iter().chain(&["error"]).copied());
    for rej in &outcome.rejected {
        let mut row = config_cells(&rej.config).to_vec();
        row.push(rej.error.to_string());
        rejected_table.push(row);
    }

    if ctx.format.csv() {
        sweep_table.write(&output_path(&ctx.out, "sweep.csv")?)?;
        pareto_table.write(&output_path(&ctx.out, "pareto.csv")?)?;
        rejected_table.write(&output_path(&ctx.out, "rejected.csv")?)?;
    }
    if ctx.format.svg() {
        let others: Vec<_> = results
            .iter()
            .enumerate()
            .filter(|(k, _)| !front.contains(k))
            .map(|(_, r)| (r.tts, r.ets))
            .collect();
        let plot = Plot {
            title: format!("{}: time vs energy to solution", workflow.name),
            x_label: "TTS [s]".into(),
            y_label: "ETS [J]".into(),
            series: vec![
                Series {
                    name: "pareto".into(),
                    style: Style::Line,
                    points: front
                        .iter()
                        .map(|&k| (results[k].tts, results[k].ets))
                        .collect(),
                },
                Series {
                    name: "dominated".into(),
                    style: Style::Markers,
                    points: others,
                },
            ],
        };
        write_text(&output_path(&ctx.out, "sweep.svg")?, &render(&plot))?;
    }

    let summary = summary(
        &workflow,
        a,
        results.len(),
        &outcome.rejected,
        front.len(),
        best,
    );
    write_text(&output_path(&ctx.out, "summary.txt")?, &summary)?;
    Ok(summary.lines().map(str::to_string).collect())
}

fn summary(
    workflow: &WorkflowSpec,
    a: &ProjectArgs,
    evaluated: usize,
    rejected: &[roofcast_core::projection::Rejected<f64>],
    front: usize,
    best: &ProjectionResult<f64>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CAVEAT}");
    let _ = writeln!(s);
    let _ = writeln!(s, "workflow: {}", workflow.name);
    let _ = writeln!(
        s,
        "timesteps: {}, {}",
        workflow.timesteps,
        if workflow.overlap {
            "overlapped"
        } else {
            "serial"
        }
    );
    let _ = writeln!(s, "comm mode: {}", a.options.comm_mode.as_str());
    let _ = writeln!(s, "energy mode: {}", a.options.energy_mode.as_str());
    let _ = writeln!(s, "policy: {}", a.policy.as_str());
    let _ = writeln!(
        s,
        "configurations: {evaluated} evaluated, {} rejected, {front} on the Pareto front",
        rejected.len()
    );
    let [idx, cpu, gpu, nodes, freq, cores] = config_cells(&best.config);
    let _ = writeln!(
        s,
        "best: grid_index={idx} cpu={cpu} gpu={gpu} nodes={nodes} freq={freq} cores={cores} tts={} s ets={} J",
        sci(best.tts),
        sci(best.ets)
    );
    if best.cross_machine() {
        let _ = writeln!(
            s,
            "note: the best configuration prices energy with another machine's benchmark"
        );
    }
    for r in rejected {
        let _ = writeln!(
            s,
            "rejected grid_index={}: {}",
            r.config.grid_index, r.error
        );
    }
    s
}
