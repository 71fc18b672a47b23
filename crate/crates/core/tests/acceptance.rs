//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one `[PASS]` or `[FAIL]` line; the process exits
//! nonzero when any criterion fails.

// 3.14 s is a measured kernel time, not pi; the tables are plain tuple arrays.
#![allow(clippy::approx_constant, clippy::type_complexity)]

use std::panic::{catch_unwind, AssertUnwindSafe};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use roofcast_core::catalog::BenchPower;
use roofcast_core::cpu::{estimate_q, estimate_w};
use roofcast_core::energy::{energy_from_times, energy_single, PowerDraw, WorkflowEnergyInputs};
use roofcast_core::lsq::{nnls, Matrix};
use roofcast_core::multinode::{evaluate, partition};
use roofcast_core::projection::pareto_indices;
use roofcast_core::{
    energy_gpu, fit_compute_coefficients, fit_memory_coefficients, fit_pkg_coefficients,
    load_catalog_file, modeled_power, predict_kernel, quality_metrics, relative_difference,
    roofline_point, square_error, workflow_energy_no_overlap, workflow_energy_overlap, Catalog,
    CommMode, CommPattern, CpuState, DwarfModel, EnergyCoefficients, KernelSet,
};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");

fn catalog() -> Catalog {
    load_catalog_file(format!("{DATA}/catalog.json")).expect("catalog loads")
}

fn tco639() -> DwarfModel {
    DwarfModel::from_path(format!("{DATA}/sh_tco639.json")).expect("model loads")
}

fn acraneb2() -> KernelSet {
    let text = std::fs::read_to_string(format!("{DATA}/acraneb2.json")).expect("kernels read");
    KernelSet::from_json(&text).expect("kernels parse")
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

type Check = Result<String, String>;

/// A fixed-size proptest runner with no on-disk failure persistence.
fn prop_runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 1. Roofline arithmetic

/// (W, Q, T, W/Q, W/T) per kernel, as printed.
type RooflineRow = (f64, f64, f64, f64, f64);

const GEFORCE_ROWS: [RooflineRow; 7] = [
    (8.85e10, 4.25e9, 1.78, 20.8, 49.9),
    (7.05e10, 4.25e9, 1.44, 16.6, 48.9),
    (1.63e11, 6.32e9, 2.52, 25.8, 64.8),
    (4.67e9, 9.22e9, 0.244, 0.507, 19.1),
    (1.59e11, 5.31e9, 3.23, 29.9, 49.2),
    (1.49e11, 6.32e9, 2.39, 23.6, 62.5),
    (4.44e9, 8.23e9, 0.251, 0.539, 17.7),
];

const K20M_ROWS: [RooflineRow; 7] = [
    (8.85e10, 4.25e9, 1.93, 20.8, 45.9),
    (7.05e10, 4.25e9, 1.59, 16.6, 44.3),
    (1.63e11, 6.32e9, 2.11, 25.8, 77.3),
    (4.67e9, 1.12e10, 0.335, 0.419, 14.0),
    (1.59e11, 5.31e9, 3.60, 29.9, 44.2),
    (1.49e11, 6.32e9, 2.10, 23.6, 71.0),
    (4.44e9, 1.02e10, 0.356, 0.437, 12.5),
];

const FERMI_ROWS: [RooflineRow; 7] = [
    (8.85e10, 4.25e9, 1.83, 20.8, 48.5),
    (7.05e10, 4.25e9, 1.55, 16.6, 45.5),
    (1.63e11, 6.32e9, 2.34, 25.8, 69.8),
    (4.67e9, 8.12e9, 0.320, 0.576, 14.6),
    (1.59e11, 5.31e9, 3.12, 29.9, 50.9),
    (1.49e11, 6.32e9, 2.27, 23.6, 65.8),
    (4.44e9, 8.14e9, 0.322, 0.545, 13.8),
];

fn c1_roofline_arithmetic() -> Check {
    let sum = roofline_point(6.40e11_f64, 4.39e10, 11.9).map_err(|e| e.to_string())?;
    let gflops = sum.performance / 1e9;
    let sum_ok = (sum.intensity - 14.6).abs() <= 0.1 && (gflops - 54.0).abs() <= 0.5;
    let mut worst = 0.0_f64;
    let mut failing = Vec::new();
    for (gpu, rows) in [
        ("GeForce 970", GEFORCE_ROWS),
        ("Tesla K20m", K20M_ROWS),
        ("Tesla 2070-q", FERMI_ROWS),
    ] {
        for (k, (w, q, t, wq, wt)) in rows.into_iter().enumerate() {
            let p = roofline_point(w, q, t).map_err(|e| e.to_string())?;
            let err = rel(p.intensity, wq).max(rel(p.performance / 1e9, wt));
            worst = worst.max(err);
            if err > 0.01 {
                failing.push(format!("{gpu} row {k}"));
            }
        }
    }
    verdict(
        sum_ok && failing.is_empty(),
        format!(
            "SUM I={:.2} FLOP/B, W/T={:.2} GFLOP/s; 21 kernel rows, worst {:.2}%{}",
            sum.intensity,
            gflops,
            worst * 100.0,
            if failing.is_empty() {
                String::new()
            } else {
                format!(", outside 1%: {}", failing.join(", "))
            }
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. GPU model against a hand evaluation

/// Per-kernel seconds at N = 3.2e6 from a separate spreadsheet-style evaluation.
const GPU_ORACLE: [(&str, [f64; 7]); 3] = [
    (
        "GeForce 970",
        [
            0.8860774319244055,
            0.7201864882697141,
            1.259089490817262,
            0.12207903077115087,
            1.6128892212792272,
            1.1915448471543908,
            0.12545111035403614,
        ],
    ),
    (
        "Tesla K20m",
        [
            0.9646217452323799,
            0.7962124275290535,
            1.0583570011235448,
            0.16739677736231845,
            1.8018191260173166,
            1.0486518160402236,
            0.17811074753799905,
        ],
    ),
    (
        "Tesla 2070-q",
        [
            0.9121309490826812,
            0.7745168001347225,
            1.1705672716270148,
            0.16206157079939715,
            1.5591378664372346,
            1.1324100027912887,
            0.16352939578694486,
        ],
    ),
];

fn c2_gpu_oracle() -> Check {
    let cat = catalog();
    let set = acraneb2();
    let mut worst = 0.0_f64;
    let mut nonlinear = Vec::new();
    for (gpu_name, expected) in GPU_ORACLE {
        let gpu = cat.gpu(gpu_name).map_err(|e| e.to_string())?;
        for ((name, chars), oracle) in set.kernels.iter().zip(expected) {
            let at = |n: f64| predict_kernel(chars, gpu, n).map_err(|e| e.to_string());
            let (base, double, full) = (at(4e5)?, at(8e5)?, at(3.2e6)?);
            worst = worst.max(rel(full.t_sim, oracle));
            let exact = double.components() == base.components().map(|c| c * 2.0)
                && full.components() == base.components().map(|c| c * 8.0)
                && double.t_sim == base.t_sim * 2.0
                && full.t_sim == base.t_sim * 8.0;
            if !exact {
                nonlinear.push(format!("{gpu_name}/{name}"));
            }
        }
    }
    verdict(
        worst <= 1e-9 && nonlinear.is_empty(),
        format!(
            "21 kernel/device pairs, worst relative error {worst:.1e}; N-linearity {}",
            if nonlinear.is_empty() {
                "exact".to_string()
            } else {
                format!("broken for {}", nonlinear.join(", "))
            }
        ),
    )
}

fn stretch_kernel_report() {
    let cat = catalog();
    let gpu = cat.gpu("GeForce 970").expect("device in catalog");
    let set = acraneb2();
    let (kernels, total) = set.predict(gpu, 3.2e6).expect("prediction runs");
    for ((name, t), (printed_total, printed_other, _)) in kernels.iter().zip(KERNEL_DIFFERENCES) {
        println!(
            "       {name}: predicted {:.4} s; printed total {printed_total} s (ratio {:.3}), other column {printed_other} s (ratio {:.3})",
            t.t_sim,
            t.t_sim / printed_total,
            t.t_sim / printed_other
        );
    }
    println!(
        "       dwarf: predicted {total:.4} s; printed total 11.9 s (ratio {:.3}), other column 11.8 s (ratio {:.3})",
        total / 11.9,
        total / 11.8
    );
}

// ---------------------------------------------------------------------------
// 3. Difference metrics

/// (modelled total, profiled time, printed difference in %) per kernel,
/// GeForce 970 at 3.2e6 points.
const KERNEL_DIFFERENCES: [(f64, f64, f64); 7] = [
    (1.78, 1.84, -3.38),
    (1.44, 1.52, -4.90),
    (2.52, 2.50, 0.99),
    (0.244, 0.208, 17.59),
    (3.23, 3.14, 2.86),
    (2.39, 2.33, 2.25),
    (0.251, 0.235, 6.66),
];

/// (t_sim, t_prof, printed difference in %) per domain size.
const SIZE_DIFFERENCES: [(&str, [(f64, f64, f64); 10]); 3] = [
    (
        "GeForce 970",
        [
            (7.41e-3, 2.14e-2, -65.46),
            (2.96e-2, 3.25e-2, -8.95),
            (6.67e-2, 8.54e-2, -21.89),
            (1.19e-1, 1.29e-1, -7.97),
            (2.67e-1, 2.69e-1, -0.87),
            (4.74e-1, 4.84e-1, -2.04),
            (7.41e-1, 7.49e-1, -1.10),
            (2.96, 2.94, 0.62),
            (6.67, 6.61, 0.83),
            (11.9, 11.8, 0.70),
        ],
    ),
    (
        "Tesla K20m",
        [
            (7.52e-3, 3.40e-2, -77.89),
            (3.01e-2, 4.20e-2, -28.45),
            (6.76e-2, 9.33e-2, -27.49),
            (1.20e-1, 1.49e-1, -19.30),
            (2.71e-1, 3.11e-1, -13.08),
            (4.81e-1, 5.51e-1, -12.67),
            (7.52e-1, 8.56e-1, -12.21),
            (3.01, 3.34, -10.02),
            (6.76, 7.50, -9.76),
            (12.0, 13.3, -9.65),
        ],
    ),
    (
        "Tesla 2070-q",
        [
            (7.34e-3, 3.25e-2, -77.40),
            (2.94e-2, 4.69e-2, -37.35),
            (6.61e-2, 9.63e-2, -31.37),
            (1.17e-1, 1.58e-1, -25.65),
            (2.64e-1, 3.50e-1, -24.58),
            (4.70e-1, 6.05e-1, -22.31),
            (7.34e-1, 9.26e-1, -20.74),
            (2.94, 3.66, -19.64),
            (6.61, 8.22, -19.63),
            (11.7, 14.6, -19.43),
        ],
    ),
];

/// Half a unit in the last printed digit of a three-significant-digit value.
fn half_ulp3(x: f64) -> f64 {
    0.5 * 10f64.powi(x.abs().log10().floor() as i32 - 2)
}

/// Whether `printed` % lies in the range `a / b - 1` can take when `a` and
/// `b` are only known to three significant digits.
fn reachable(a: f64, b: f64, printed: f64) -> bool {
    let (da, db) = (half_ulp3(a), half_ulp3(b));
    let lo = ((a - da) / (b + db) - 1.0) * 100.0;
    let hi = ((a + da) / (b - db) - 1.0) * 100.0;
    (lo - 0.005..=hi + 0.005).contains(&printed)
}

fn c3_difference_metrics() -> Check {
    let mut off = Vec::new();
    let mut kernel_diffs = Vec::new();
    for (k, (total, other, printed)) in KERNEL_DIFFERENCES.into_iter().enumerate() {
        let d = relative_difference(total, other).map_err(|e| e.to_string())?;
        kernel_diffs.push(d);
        let gap = (d.abs() * 100.0 - printed.abs()).abs();
        if gap > 0.1 {
            off.push(format!("kernel row {k}: {:.2}% vs {printed}%", d * 100.0));
        }
    }
    let sq = square_error(&kernel_diffs).map_err(|e| e.to_string())? * 100.0;
    let sq_ok = (sq - 8.0).abs() <= 1.0;
    let mut size_rows = 0;
    for (gpu, rows) in SIZE_DIFFERENCES {
        for (k, (sim, prof, printed)) in rows.into_iter().enumerate() {
            size_rows += 1;
            let d = relative_difference(sim, prof).map_err(|e| e.to_string())? * 100.0;
            if (d - printed).abs() > 0.1 {
                off.push(format!("{gpu} size row {k}: {d:.2}% vs {printed}%"));
            }
        }
    }
    let rows = KERNEL_DIFFERENCES.len() + size_rows;
    verdict(
        sq_ok && off.is_empty(),
        format!(
            "square error {sq:.2}% (8 +/- 1); {}/{rows} rows within 0.1 pp{}",
            rows - off.len(),
            if off.is_empty() {
                String::new()
            } else {
                format!("; off: {}", off.join("; "))
            }
        ),
    )
}

fn rounding_consistency_report() {
    let mut total = 0;
    let mut consistent = 0;
    for (a, b, printed) in KERNEL_DIFFERENCES {
        total += 1;
        consistent += usize::from(reachable(a, b, printed));
    }
    for (_, rows) in SIZE_DIFFERENCES {
        for (a, b, printed) in rows {
            total += 1;
            consistent += usize::from(reachable(a, b, printed));
        }
    }
    println!(
        "       {consistent}/{total} printed differences are reachable from their three-digit inputs"
    );
}

// ---------------------------------------------------------------------------
// 4. Spectral-transform W and Q

/// Printed (W, Q) per loop; zero W for memory-only loops.
const TCO639_LOADS: [(f64, f64); 15] = [
    (8.70736e12, 4.65232e13),
    (8.70736e12, 1.04509e14),
    (0.0, 5.31661e11),
    (0.0, 5.31661e11),
    (0.0, 5.31661e11),
    (0.0, 5.31661e11),
    (0.0, 3.78742e11),
    (33228800000.0, 5.31661e11),
    (0.0, 7.31034e11),
    (0.0, 6.64576e11),
    (0.0, 5.31661e11),
    (0.0, 5.31661e11),
    (0.0, 5.31661e11),
    (0.0, 3.59536e11),
    (0.0, 3.59536e11),
];

/// Printed per-node (W, Q) at 2, 4 and 8 nodes, same loop order.
const TCO639_SHARES: [[(f64, f64); 3]; 15] = [
    [
        (4.35368e12, 2.32616e13),
        (2.17684e12, 1.16308e13),
        (1.08842e12, 5.8154e12),
    ],
    [
        (4.35368e12, 5.22547e13),
        (2.17684e12, 2.61273e13),
        (1.08842e12, 1.30637e13),
    ],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [
        (0.0, 1.89371e11),
        (0.0, 94685465600.0),
        (0.0, 47342732800.0),
    ],
    [
        (16614400000.0, 2.6583e11),
        (8307200000.0, 1.32915e11),
        (4153600000.0, 66457600000.0),
    ],
    [(0.0, 3.65517e11), (0.0, 1.82758e11), (0.0, 91379200000.0)],
    [(0.0, 3.32288e11), (0.0, 1.66144e11), (0.0, 83072000000.0)],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [(0.0, 2.6583e11), (0.0, 1.32915e11), (0.0, 66457600000.0)],
    [
        (0.0, 1.79768e11),
        (0.0, 89883904000.0),
        (0.0, 44941952000.0),
    ],
    [
        (0.0, 1.79768e11),
        (0.0, 89883904000.0),
        (0.0, 44941952000.0),
    ],
];

/// Agreement to the printed precision of six significant digits.
fn matches_printed(x: f64, printed: f64) -> bool {
    if printed == 0.0 {
        return x == 0.0;
    }
    let unit = 10f64.powi(printed.abs().log10().floor() as i32 - 5);
    (x - printed).abs() <= 0.5 * unit * (1.0 + 1e-9)
}

fn c4_sh_loads() -> Check {
    let model = tco639();
    let mut off = Vec::new();
    let mut loads = Vec::new();
    for (i, l) in model.loops.iter().enumerate() {
        let w = estimate_w(&l.spec, &model.problem).unwrap_or(0.0);
        let q = estimate_q(&l.spec, &model.problem, w)
            .map_err(|e| e.to_string())?
            .bytes;
        let (pw, pq) = TCO639_LOADS[i];
        // both dgemm traffic figures come from a two- or three-digit intensity
        let q_ok = if l.spec.intensity.is_some() {
            rel(q, pq) <= 0.005
        } else {
            matches_printed(q, pq)
        };
        if !matches_printed(w, pw) || !q_ok {
            off.push(format!("{} W={w:.6e} Q={q:.6e}", l.spec.name));
        }
        loads.push((w, q, l.spec.intensity.is_some()));
    }
    let mut share_off = Vec::new();
    for (i, (w, q, from_intensity)) in loads.iter().enumerate() {
        for (k, n) in [2u32, 4, 8].into_iter().enumerate() {
            let shares = partition(*w, *q, n).map_err(|e| e.to_string())?;
            let (pw, pq) = TCO639_SHARES[i][k];
            let even = shares.iter().all(|s| s == &shares[0])
                && shares[0].w * f64::from(n) == *w
                && shares[0].q * f64::from(n) == *q;
            let q_tol = if *from_intensity { 0.005 } else { 1e-5 };
            let w_ok = if pw == 0.0 {
                shares[0].w == 0.0
            } else {
                rel(shares[0].w, pw) <= 1e-5
            };
            if !even || !w_ok || rel(shares[0].q, pq) > q_tol {
                share_off.push(format!("{} at {n} nodes", model.loops[i].spec.name));
            }
        }
    }
    verdict(
        off.is_empty() && share_off.is_empty(),
        format!(
            "15 loops, {} at printed precision; 45 node shares, {} matching{}",
            15 - off.len(),
            45 - share_off.len(),
            if off.is_empty() && share_off.is_empty() {
                String::new()
            } else {
                format!("; off: {}", [off, share_off].concat().join("; "))
            }
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. Multinode scaling

fn c5_multinode_scaling() -> Check {
    let cat = catalog();
    let model = tco639();
    let mut detail = Vec::new();
    let mut ok = true;
    for (cpu, state) in [
        ("Xeon E5-2697v3", CpuState::new(2.6, 14)),
        ("Xeon E5-2697v3", CpuState::new(1.2, 1)),
    ] {
        let spec = cat.cpu(cpu).map_err(|e| e.to_string())?;
        let run = |n| {
            evaluate(
                &model,
                spec,
                state,
                n,
                &CommPattern::none(),
                CommMode::Additive,
            )
            .map(|r| r.total)
            .map_err(|e| e.to_string())
        };
        let single = run(1)?;
        for n in [1u32, 2, 4, 8] {
            let t = run(n)?;
            if t != single / f64::from(n) {
                ok = false;
                detail.push(format!("{state} n={n}: {t} vs {}", single / f64::from(n)));
            }
        }
        detail.push(format!("{state} T(1)={single:.4} s"));
    }
    verdict(
        ok,
        format!(
            "T(n) == T(1)/n bitwise for n in 1,2,4,8; {}",
            detail.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Energy validation on the second machine

/// cores, bench PKG W, bench DRAM W, seconds, model PKG J, model DRAM J, model total J.
const ENERGY_ROWS: [(u32, f64, f64, f64, f64, f64, f64); 4] = [
    (1, 44.89, 11.1, 139.9, 5898.49, 840.61, 6739.11),
    (2, 54.23, 14.51, 71.2, 3389.71, 518.67, 3908.38),
    (4, 73.93, 18.36, 36.9, 2180.61, 321.96, 2502.58),
    (8, 101.23, 19.89, 20.1, 1507.77, 186.88, 1694.66),
];

fn c6_energy_validation() -> Check {
    let coeffs = EnergyCoefficients {
        pkg_u: 0.58309038,
        pkg_s: 0.50242954,
        dram_x: 0.37420719,
        dram_y: 0.5,
    };
    let idle = BenchPower {
        pkg_w: 31.82,
        dram_w: 3.71,
    };
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for (cores, pkg, dram, t, e_pkg, e_dram, e_total) in ENERGY_ROWS {
        let power = PowerDraw::from_readings(
            BenchPower {
                pkg_w: pkg,
                dram_w: dram,
            },
            idle,
            Some(&coeffs),
        );
        let e = energy_from_times(t, t, &power);
        let err = rel(e.e_pkg, e_pkg)
            .max(rel(e.e_dram, e_dram))
            .max(rel(e.total, e_total));
        worst = worst.max(err);
        parts.push(format!("{cores}c {:.2}/{:.2} J", e.e_pkg, e.e_dram));
    }
    verdict(
        worst <= 0.005,
        format!("{}; worst {:.3}%", parts.join(", "), worst * 100.0),
    )
}

// ---------------------------------------------------------------------------
// 7. PKG coefficient fit

fn c7_pkg_fit() -> Check {
    let points: [(f64, f64); 3] = [(23.28, 19.08), (35.12, 19.58), (49.71, 20.21)];
    let fit = fit_pkg_coefficients(&points, 5.53).map_err(|e| e.to_string())?;
    let worst: f64 = points
        .iter()
        .map(|(b, m)| (modeled_power(*b, 5.53, fit.load, fit.idle_weight) - m).abs())
        .fold(0.0, f64::max);
    verdict(
        (fit.load - 0.0427544).abs() <= 1e-4
            && (fit.idle_weight - 3.27).abs() <= 0.01
            && worst < 0.01,
        format!(
            "U={:.7}, S={:.5}, worst residual {worst:.4} W",
            fit.load, fit.idle_weight
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. GPU energy

fn c8_gpu_energy() -> Check {
    let cat = catalog();
    let mut parts = Vec::new();
    let mut ok = true;
    for (gpu, printed) in [("Tesla K20m", 65.0), ("GeForce 970", 91.0)] {
        let p = cat.gpu_power(gpu).map_err(|e| e.to_string())?;
        let s = p
            .s_fraction
            .ok_or_else(|| format!("{gpu} has no power fraction"))?;
        let draw = energy_gpu(1.0, 0.0, s, p.power_limit_w).map_err(|e| e.to_string())?;
        ok &= rel(draw, printed) <= 0.01;
        parts.push(format!("{gpu} {draw:.2} W (printed {printed})"));
    }
    verdict(ok, parts.join(", "))
}

// ---------------------------------------------------------------------------
// 9. Workflow energy properties

fn c9_workflow_properties() -> Check {
    let mut runner = prop_runner(1000);
    let inputs = (
        0.0f64..1e6,
        0.0f64..1e6,
        0.0f64..1e4,
        0.0f64..1e4,
        0.0f64..500.0,
        0.0f64..500.0,
    );
    runner
        .run(&inputs, |(e1, e2, t1, t2, c1, c2)| {
            let i = WorkflowEnergyInputs {
                e1,
                e2,
                t1,
                t2,
                e1_const: c1,
                e2_const: c2,
            };
            prop_assert!(workflow_energy_no_overlap(&i) >= workflow_energy_overlap(&i));
            Ok(())
        })
        .map_err(|e| format!("dominance: {e}"))?;

    let mut runner = prop_runner(1000);
    let balance = (
        1.0f64..1e12,
        1e-12f64..1e-9,
        1.0f64..1e12,
        -1e-12f64..1e-12,
        0.0f64..500.0,
        0.0f64..500.0,
    );
    runner
        .run(&balance, |(w, t_flop, q, eps, pkg_idle, dram_idle)| {
            let t_mop = (w * t_flop + eps) / q;
            prop_assume!((w * t_flop - q * t_mop).abs() < 1e-12);
            let power = PowerDraw {
                pkg_w: 40.0,
                dram_w: 6.0,
                pkg_idle_w: pkg_idle,
                dram_idle_w: dram_idle,
            };
            let e = energy_single(w, q, t_flop, t_mop, &power);
            if e.e_const.abs() >= 1e-9 {
                return Err(TestCaseError::fail(format!("e_const {}", e.e_const)));
            }
            Ok(())
        })
        .map_err(|e| format!("balance continuity: {e}"))?;

    let i = WorkflowEnergyInputs {
        e1: 100.0,
        e2: 200.0,
        t1: 5.0,
        t2: 3.0,
        e1_const: 10.0,
        e2_const: 20.0,
    };
    let idle_free = WorkflowEnergyInputs {
        e1_const: 0.0,
        e2_const: 0.0,
        ..i
    };
    let instant = WorkflowEnergyInputs {
        t1: 0.0,
        t2: 0.0,
        ..i
    };
    let equal = WorkflowEnergyInputs { t2: 5.0, ..i };
    let trivial = workflow_energy_no_overlap(&i) == 430.0
        && workflow_energy_overlap(&i) == 340.0
        && workflow_energy_no_overlap(&idle_free) == 300.0
        && workflow_energy_no_overlap(&instant) == 300.0
        && workflow_energy_overlap(&equal) == 300.0;
    verdict(
        trivial,
        "1000 dominance cases, 1000 balance cases, trivial cases exact".to_string(),
    )
}

// ---------------------------------------------------------------------------
// 10. Validation metrics

const ENERGY_PAIRS: [(f64, f64); 9] = [
    (298.08, 305.5483945),
    (291.27, 295.5290953),
    (300.5533, 294.2090385),
    (1940.28, 1944.655154),
    (1937.2, 1867.5104),
    (1921.705, 1848.455974),
    (6740.8, 6784.060006),
    (6367.35, 6258.223867),
    (6871.2, 6453.66827),
];

fn c10_quality_metrics() -> Check {
    let diffs = ENERGY_PAIRS
        .iter()
        .map(|(measured, simulated)| relative_difference(*simulated, *measured))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let q = quality_metrics(&diffs).map_err(|e| e.to_string())?;
    let (max, min) = (
        format!("{:.2}", q.max * 100.0),
        format!("{:.2}", q.min * 100.0),
    );
    verdict(
        max == "6.08" && min == "0.23",
        format!("max {max}%, min {min}%"),
    )
}

// ---------------------------------------------------------------------------
// 11. Fit recovery

fn c11_fit_recovery() -> Check {
    let cat = catalog();
    let xeon = cat.cpu("Xeon E5-2697v3").map_err(|e| e.to_string())?;
    let states: Vec<_> = xeon.states().copied().collect();

    let mut runner = prop_runner(200);
    runner
        .run(&prop::array::uniform4(0.001f64..2.0), |c| {
            let samples: Vec<_> = states
                .iter()
                .map(|(s, v)| {
                    let b = v.bandwidths();
                    (*s, b[0] * c[0] + b[1] * c[1] + b[2] * c[2] + b[3] * c[3])
                })
                .collect();
            let fit = fit_memory_coefficients(&samples, xeon)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            for (got, want) in [fit.v, fit.x, fit.y, fit.z].into_iter().zip(c) {
                prop_assert!(rel(got, want) <= 1e-6, "{got} vs {want}");
            }
            Ok(())
        })
        .map_err(|e| format!("memory fit: {e}"))?;

    let mut runner = prop_runner(200);
    runner
        .run(&(0.001f64..2.0, -50.0f64..50.0), |(u, s)| {
            let linear: Vec<_> = states.iter().map(|(st, v)| (*st, v.perf * u)).collect();
            let fit = fit_compute_coefficients(&linear, xeon, false)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(rel(fit.u, u) <= 1e-6);
            let affine: Vec<_> = states.iter().map(|(st, v)| (*st, v.perf * u + s)).collect();
            let fit = fit_compute_coefficients(&affine, xeon, true)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(rel(fit.u, u) <= 1e-6);
            prop_assert!((fit.s.unwrap_or(f64::NAN) - s).abs() <= 1e-6 * s.abs().max(1.0));
            Ok(())
        })
        .map_err(|e| format!("compute fit: {e}"))?;

    let mut runner = prop_runner(500);
    let system = (1usize..12, 1usize..6).prop_flat_map(|(rows, cols)| {
        (
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, cols), rows),
            prop::collection::vec(-100.0f64..100.0, rows),
        )
    });
    runner
        .run(&system, |(rows, b)| {
            let a = Matrix::from_rows(&rows).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let sol = nnls(&a, &b).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(sol.x.iter().all(|x| *x >= 0.0), "{:?}", sol.x);
            Ok(())
        })
        .map_err(|e| format!("nnls sign: {e}"))?;

    Ok(format!(
        "{} grid states; 200 memory and 200 compute recoveries within 1e-6; 500 NNLS solves nonnegative",
        states.len()
    ))
}

// ---------------------------------------------------------------------------
// 12. Pareto front

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

fn c12_pareto() -> Check {
    let mut runner = prop_runner(1000);
    // a coarse lattice half the time so ties and duplicates show up
    let point = prop_oneof![
        (0.0f64..1e4, 0.0f64..1e6),
        (0u8..6, 0u8..6).prop_map(|(a, b)| (f64::from(a), f64::from(b))),
    ];
    runner
        .run(&prop::collection::vec(point, 1..60), |points| {
            let front = pareto_indices(&points);
            for &f in &front {
                prop_assert!(
                    !points.iter().any(|p| dominates(*p, points[f])),
                    "front member {f} is dominated"
                );
            }
            for i in (0..points.len()).filter(|i| !front.contains(i)) {
                prop_assert!(
                    front.iter().any(|&f| dominates(points[f], points[i])),
                    "non-member {i} is not dominated by the front"
                );
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 random sets agree with the pairwise domination check".to_string())
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("roofline arithmetic", c1_roofline_arithmetic),
        ("GPU model oracle equivalence", c2_gpu_oracle),
        ("difference metrics", c3_difference_metrics),
        ("spectral-transform W/Q", c4_sh_loads),
        ("multinode scaling", c5_multinode_scaling),
        ("energy validation", c6_energy_validation),
        ("PKG energy fit", c7_pkg_fit),
        ("GPU energy", c8_gpu_energy),
        ("workflow energy properties", c9_workflow_properties),
        ("validation metrics", c10_quality_metrics),
        ("fit recovery", c11_fit_recovery),
        ("Pareto correctness", c12_pareto),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] C{} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] C{} {name}: {detail}", k + 1);
            }
        }
        match k + 1 {
            2 => {
                println!("[INFO] C2 stretch, absolute kernel times (reported, not asserted):");
                stretch_kernel_report();
            }
            3 => {
                println!("[INFO] C3 rounding check:");
                rounding_consistency_report();
            }
            _ => {}
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
