use std::path::Path;

use roofcast_core::cpu::{ComputeFit, MemoryFit};
use roofcast_core::energy::{modeled_power, read_energy_fit_file, PowerFit};
use roofcast_core::{fit_compute_coefficients, fit_memory_coefficients};
use serde_json::json;

use super::Ctx;
use crate::error::CliResult;
use crate::report::{opt_sci, output_path, sci, state_label, write_text, CsvTable, Table};

fn states_json(states: &[roofcast_core::CpuState<f64>]) -> serde_json::Value {
    states
        .iter()
        .map(|s| {
            let freq = s
                .frequency
                .ghz()
                .map_or_else(|| json!("turbo"), |g| json!(g));
            json!({"freq": freq, "cores": s.cores})
        })
        .collect()
}

fn write_json(ctx: &Ctx, name: &str, value: &serde_json::Value) -> CliResult<()> {
    let path = output_path(&ctx.out, name)?;
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    write_text(&path, &(text + "\n"))
}

/// Samples CSV: `freq,cores,bandwidth_gbs`.
pub fn memory(ctx: &Ctx, cpu: &str, samples: &Path) -> CliResult<Vec<String>> {
    let catalog = ctx.catalog()?;
    let spec = catalog.cpu(cpu)?;
    let samples = CsvTable::read(samples)?.state_samples("bandwidth_gbs")?;
    let MemoryFit {
        v,
        x,
        y,
        z,
        residual_norm,
        states,
    } = fit_memory_coefficients(&samples, spec)?;
    write_json(
        ctx,
        "memory_fit.json",
        &json!({
            "cpu": cpu, "v": v, "x": x, "y": y, "z": z,
            "residual_norm_gbs": residual_norm,
            "states": states_json(&states),
        }),
    )?;
    Ok(vec![format!(
        "V={} X={} Y={} Z={} residual={} GB/s over {} states",
        sci(v),
        sci(x),
        sci(y),
        sci(z),
        sci(residual_norm),
        states.len()
    )])
}

/// Samples CSV: `freq,cores,gflops`.
pub fn compute(ctx: &Ctx, cpu: &str, samples: &Path, affine: bool) -> CliResult<Vec<String>> {
    let catalog = ctx.catalog()?;
    let spec = catalog.cpu(cpu)?;
    let samples = CsvTable::read(samples)?.state_samples("gflops")?;
    let ComputeFit {
        u,
        s,
        residual_norm,
        states,
    } = fit_compute_coefficients(&samples, spec, affine)?;
    write_json(
        ctx,
        "compute_fit.json",
        &json!({
            "cpu": cpu, "u": u, "s": s,
            "residual_norm_gflops": residual_norm,
            "states": states_json(&states),
        }),
    )?;
    Ok(vec![format!(
        "U={} S={} residual={} GFLOP/s over {} states",
        sci(u),
        s.map_or_else(|| "-".to_string(), sci),
        sci(residual_norm),
        states.len()
    )])
}

fn fit_json(f: &PowerFit<f64>, load: &str, idle: &str) -> serde_json::Value {
    json!({load: f.load, idle: f.idle_weight, "residual_norm_w": f.residual_norm, "points": f.points})
}

/// Samples CSV: `freq,cores,bench_pkg_w,measured_pkg_w,bench_dram_w,measured_dram_w`
/// with one `idle` row.
pub fn energy(ctx: &Ctx, samples: &Path) -> CliResult<Vec<String>> {
    let data = read_energy_fit_file::<f64>(samples)?;
    let fit = data.fit()?;
    let states: Vec<_> = data.rows.iter().map(|r| r.state).collect();
    write_json(
        ctx,
        "energy_fit.json",
        &json!({
            "pkg": fit_json(&fit.pkg, "u", "s"),
            "dram": fit.dram.as_ref().map(|d| fit_json(d, "x", "y")),
            "idle": {"pkg_w": data.idle.pkg_w, "dram_w": data.idle.dram_w},
            "states": states_json(&states),
        }),
    )?;
    let mut table = Table::new([
        "freq",
        "cores",
        "measured_pkg_w",
        "modeled_pkg_w",
        "measured_dram_w",
        "modeled_dram_w",
    ]);
    for r in &data.rows {
        let (freq, cores) = state_label(&r.state);
        let pkg = modeled_power(
            r.bench.pkg_w,
            data.idle.pkg_w,
            fit.pkg.load,
            fit.pkg.idle_weight,
        );
        let dram = fit
            .dram
            .as_ref()
            .filter(|_| r.measured_dram_w.is_some())
            .map(|d| modeled_power(r.bench.dram_w, data.idle.dram_w, d.load, d.idle_weight));
        table.push([
            freq,
            cores,
            sci(r.measured_pkg_w),
            sci(pkg),
            opt_sci(r.measured_dram_w),
            opt_sci(dram),
        ]);
    }
    table.write(&output_path(&ctx.out, "energy_fit.csv")?)?;
    let mut lines = vec![format!(
        "PKG U={} S={} residual={} W",
        sci(fit.pkg.load),
        sci(fit.pkg.idle_weight),
        sci(fit.pkg.residual_norm)
    )];
    if let Some(d) = &fit.dram {
        lines.push(format!(
            "DRAM X={} Y={} residual={} W",
            sci(d.load),
            sci(d.idle_weight),
            sci(d.residual_norm)
        ));
    }
    Ok(lines)
}
