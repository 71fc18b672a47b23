use std::path::Path;

use roofcast_core::catalog::CpuState;
use roofcast_core::cpu::DwarfTime;
use roofcast_core::gpu::{characterize, read_counters_file};
use roofcast_core::{roofline_point, KernelSet, MultinodeScenario};

use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::report::{opt_sci, output_path, sci, Table};

const GPU_HEADER: [&str; 13] = [
    "Kernel",
    "W [Flop]",
    "Q [Byte]",
    "T [s]",
    "W/Q",
    "W/T [GFLOP/s]",
    "T_i [s]",
    "T_m [s]",
    "T_cfl [s]",
    "T_cf [s]",
    "T_cd [s]",
    "T_ci [s]",
    "T_t [s]",
];

fn gpu_row(name: &str, w: f64, q: f64, t: f64, components: [f64; 7]) -> CliResult<Vec<String>> {
    let p = roofline_point(w, q, t)?;
    let mut row = vec![
        name.to_string(),
        sci(w),
        sci(q),
        sci(t),
        sci(p.intensity),
        sci(p.performance / 1e9),
    ];
    row.extend(components.map(sci));
    Ok(row)
}

/// Per-kernel table plus a SUM row. W counts two FLOP per FP instruction and
/// Q is the requested traffic, both scaled to `n` points.
pub fn gpu(ctx: &Ctx, gpu: &str, n: f64, counters: Option<&Path>) -> CliResult<Vec<String>> {
    let catalog = ctx.catalog()?;
    let spec = catalog.gpu(gpu)?;
    let set: KernelSet = match (ctx.models.as_slice(), counters) {
        ([model], None) => KernelSet::from_json(&crate::report::read_text(model)?)?,
        ([], Some(path)) => {
            let name = path
                .file_stem()
                .map_or_else(|| "kernels".into(), |s| s.to_string_lossy().into_owned());
            characterize(name, &read_counters_file(path)?)?
        }
        _ => {
            return Err(CliError::Input(
                "predict-gpu needs exactly one of --model or --counters".into(),
            ))
        }
    };
    let (kernels, total) = set.predict(spec, n)?;
    let mut table = Table::new(GPU_HEADER);
    let (mut sw, mut sq) = (0.0, 0.0);
    let mut sum = [0.0; 7];
    for (name, b) in &kernels {
        let c = &set.kernels[*name];
        let w = 2.0 * (c.i_f_n + c.i_d_n) * n;
        let q = c.g_r_n * n;
        sw += w;
        sq += q;
        for (s, v) in sum.iter_mut().zip(b.components()) {
            *s += v;
        }
        table.push(gpu_row(name, w, q, b.t_sim, b.components())?);
    }
    table.push(gpu_row("SUM", sw, sq, total, sum)?);
    table.write(&output_path(&ctx.out, "gpu_prediction.csv")?)?;
    Ok(vec![format!(
        "{} on {gpu} at N={}: T={} s over {} kernels",
        set.name,
        sci(n),
        sci(total),
        kernels.len()
    )])
}

fn cpu_table(time: &DwarfTime<f64>) -> Table {
    let mut table = Table::new([
        "Loop",
        "W [Flop]",
        "Q [Byte]",
        "t_flop [s/Flop]",
        "t_mop [s/Byte]",
        "compute [s]",
        "memory [s]",
        "T [s]",
        "bound",
    ]);
    let (mut w, mut q, mut c, mut m) = (0.0, 0.0, 0.0, 0.0);
    for l in &time.loops {
        w += l.load.w;
        q += l.load.q;
        c += l.time.compute_s;
        m += l.time.memory_s;
        table.push([
            l.name.clone(),
            sci(l.load.w),
            sci(l.load.q),
            opt_sci(l.t_flop),
            sci(l.t_mop),
            sci(l.time.compute_s),
            sci(l.time.memory_s),
            sci(l.time.time_s),
            l.time.bound.as_str().to_string(),
        ]);
    }
    table.push([
        "TOTAL".to_string(),
        sci(w),
        sci(q),
        String::new(),
        String::new(),
        sci(c),
        sci(m),
        sci(time.total),
        time.bound().as_str().to_string(),
    ]);
    table
}

pub fn cpu(ctx: &Ctx, cpu: &str, state: CpuState<f64>) -> CliResult<Vec<String>> {
    let catalog = ctx.catalog()?;
    let model = ctx.dwarf_model()?;
    let spec = catalog.cpu(cpu)?;
    let time = roofcast_core::dwarf_time(&model, &state, spec)?;
    cpu_table(&time).write(&output_path(&ctx.out, "cpu_prediction.csv")?)?;
    Ok(vec![format!(
        "{} on {cpu} {state}: T={} s ({}-bound) over {} loops",
        model.name,
        sci(time.total),
        time.bound().as_str(),
        time.loops.len()
    )])
}

pub fn multinode(ctx: &Ctx, scenario: &Path) -> CliResult<Vec<String>> {
    let catalog = ctx.catalog()?;
    let model = ctx.dwarf_model()?;
    let scenario = MultinodeScenario::from_path(scenario)?;
    let result = scenario.evaluate(&model, &catalog)?;
    let mut table = Table::new([
        "node",
        "W [Flop]",
        "Q [Byte]",
        "compute [s]",
        "comm [s]",
        "T [s]",
    ]);
    for n in &result.nodes {
        let w: f64 = n.compute.loops.iter().map(|l| l.load.w).sum();
        let q: f64 = n.compute.loops.iter().map(|l| l.load.q).sum();
        table.push([
            n.node_index.to_string(),
            sci(w),
            sci(q),
            sci(n.compute.total),
            sci(n.comm_s),
            sci(n.total),
        ]);
    }
    table.push([
        "MAX".to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        sci(result.total),
    ]);
    table.write(&output_path(&ctx.out, "multinode.csv")?)?;
    if let Some(first) = result.nodes.first() {
        cpu_table(&first.compute).write(&output_path(&ctx.out, "node_loops.csv")?)?;
    }
    Ok(vec![format!(
        "{} on {} x {} {} (comm {}): T={} s",
        model.name,
        scenario.nodes,
        scenario.cpu,
        scenario.state,
        scenario.mode.as_str(),
        sci(result.total)
    )])
}
