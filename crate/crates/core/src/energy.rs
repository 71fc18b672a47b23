//! Energy-to-solution: RAPL-style PKG/DRAM regressions, single-node, GPU,
//! multinode and two-architecture workflow energy.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::catalog::{BenchPower, CpuState, EnergyBench, Frequency};
use crate::cpu::{DwarfTime, LoopTime};
use crate::error::{Error, Result};
use crate::lsq::{lstsq, Matrix};
use crate::scalar::Scalar;

/// PKG load/idle weights and DRAM load/idle weights of a dwarf.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct EnergyCoefficients<T> {
    pub pkg_u: T,
    pub pkg_s: T,
    pub dram_x: T,
    pub dram_y: T,
}

impl<T: Scalar> EnergyCoefficients<T> {
    pub fn validate(&self) -> Result<()> {
        let all = [self.pkg_u, self.pkg_s, self.dram_x, self.dram_y];
        if all.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation(
                "energy coefficients",
                "values must be finite",
            ));
        }
        if self.pkg_u < T::zero() || self.dram_x < T::zero() {
            return Err(Error::validation(
                "energy coefficients",
                "pkg_u and dram_x must be >= 0",
            ));
        }
        Ok(())
    }
}

/// Result of `bench * load + idle * idle_weight = measured`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit<T> {
    pub load: T,
    pub idle_weight: T,
    /// Euclidean norm of the residual, W.
    pub residual_norm: T,
    pub points: usize,
}

fn fit_power<T: Scalar>(points: &[(T, T)], idle: T) -> Result<PowerFit<T>> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    if points.iter().all(|(b, _)| *b == points[0].0) {
        return Err(Error::RankDeficient(
            "every bench power is equal, so load and idle weights are not separable".into(),
        ));
    }
    if idle == T::zero() {
        return Err(Error::RankDeficient("idle power is zero".into()));
    }
    let rows: Vec<Vec<T>> = points.iter().map(|(b, _)| vec![*b, idle]).collect();
    let rhs: Vec<T> = points.iter().map(|(_, m)| *m).collect();
    let sol = lstsq(&Matrix::from_rows(&rows)?, &rhs)?;
    if sol.rank < 2 {
        return Err(Error::RankDeficient(
            "bench power column is numerically proportional to idle".into(),
        ));
    }
    Ok(PowerFit {
        load: sol.x[0],
        idle_weight: sol.x[1],
        residual_norm: sol.residual_norm,
        points: points.len(),
    })
}

/// Least-squares `(U, S)` from `(bench, measured)` PKG watts and the idle PKG draw.
///
/// ```
/// use roofcast_core::energy::fit_pkg_coefficients;
/// let fit = fit_pkg_coefficients(&[(23.28, 19.08), (35.12, 19.58), (49.71, 20.21)], 5.53_f64).unwrap();
/// assert!((fit.load - 0.04275).abs() < 1e-4 && (fit.idle_weight - 3.27).abs() < 0.01);
/// ```
pub fn fit_pkg_coefficients<T: Scalar>(points: &[(T, T)], idle: T) -> Result<PowerFit<T>> {
    fit_power(points, idle)
}

/// Least-squares `(X, Y)` from `(bench, measured)` DRAM watts and the idle DRAM draw.
pub fn fit_dram_coefficients<T: Scalar>(points: &[(T, T)], idle: T) -> Result<PowerFit<T>> {
    fit_power(points, idle)
}

/// `bench * load_coeff + idle * idle_coeff`.
///
/// ```
/// let w = roofcast_core::energy::modeled_power(44.89_f64, 31.82, 0.58309038, 0.50242954);
/// assert!((w - 42.162).abs() < 1e-3);
/// ```
pub fn modeled_power<T: Scalar>(bench: T, idle: T, load_coeff: T, idle_coeff: T) -> T {
    bench * load_coeff + idle * idle_coeff
}

/// Loaded and idle PKG/DRAM draw of one node, in W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDraw<T> {
    pub pkg_w: T,
    pub dram_w: T,
    pub pkg_idle_w: T,
    pub dram_idle_w: T,
}

impl<T: Scalar> PowerDraw<T> {
    /// Bench readings at `state`, passed through `coeffs` when given.
    pub fn from_bench(
        bench: &EnergyBench<T>,
        state: &CpuState<T>,
        coeffs: Option<&EnergyCoefficients<T>>,
    ) -> Result<Self> {
        let loaded = bench.loaded_power(state)?;
        let idle = bench.idle_power(state.frequency)?;
        Ok(Self::from_readings(loaded, idle, coeffs))
    }

    pub fn from_readings(
        loaded: BenchPower<T>,
        idle: BenchPower<T>,
        coeffs: Option<&EnergyCoefficients<T>>,
    ) -> Self {
        let (pkg_w, dram_w) = match coeffs {
            Some(c) => (
                modeled_power(loaded.pkg_w, idle.pkg_w, c.pkg_u, c.pkg_s),
                modeled_power(loaded.dram_w, idle.dram_w, c.dram_x, c.dram_y),
            ),
            None => (loaded.pkg_w, loaded.dram_w),
        };
        PowerDraw {
            pkg_w,
            dram_w,
            pkg_idle_w: idle.pkg_w,
            dram_idle_w: idle.dram_w,
        }
    }

    /// Draw of the node while it waits, W.
    pub fn idle_w(&self) -> T {
        self.pkg_idle_w + self.dram_idle_w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown<T> {
    pub e_pkg: T,
    pub e_dram: T,
    pub e_const: T,
    pub total: T,
}

impl<T: Scalar> EnergyBreakdown<T> {
    pub fn new(e_pkg: T, e_dram: T, e_const: T) -> Self {
        EnergyBreakdown {
            e_pkg,
            e_dram,
            e_const,
            total: e_pkg + e_dram + e_const,
        }
    }
}

impl<T: Scalar> std::ops::Add for EnergyBreakdown<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(
            self.e_pkg + o.e_pkg,
            self.e_dram + o.e_dram,
            self.e_const + o.e_const,
        )
    }
}

/// Energy of one loop given its compute seconds `W*t_flop` and memory
/// seconds `Q*t_mop`. The idle term charges DRAM idle while compute runs
/// longer and PKG idle while memory runs longer.
///
/// ```
/// use roofcast_core::energy::{energy_from_times, PowerDraw};
/// let p = PowerDraw { pkg_w: 0.0, dram_w: 0.0, pkg_idle_w: 5.53, dram_idle_w: 1.31 };
/// assert!((energy_from_times(10.0_f64, 4.0, &p).e_const - 7.86).abs() < 1e-12);
/// ```
pub fn energy_from_times<T: Scalar>(
    compute_s: T,
    memory_s: T,
    power: &PowerDraw<T>,
) -> EnergyBreakdown<T> {
    let e_const = if compute_s > memory_s {
        power.dram_idle_w * (compute_s - memory_s)
    } else if memory_s > compute_s {
        power.pkg_idle_w * (memory_s - compute_s)
    } else {
        T::zero()
    };
    EnergyBreakdown::new(power.pkg_w * compute_s, power.dram_w * memory_s, e_const)
}

/// [`energy_from_times`] with `compute_s = W*t_flop` and `memory_s = Q*t_mop`.
pub fn energy_single<T: Scalar>(
    w: T,
    q: T,
    t_flop: T,
    t_mop: T,
    power: &PowerDraw<T>,
) -> EnergyBreakdown<T> {
    energy_from_times(w * t_flop, q * t_mop, power)
}

/// How the PKG and DRAM terms are timed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMode {
    /// PKG over `W*t_flop`, DRAM over `Q*t_mop`, plus the idle gap term.
    Literal,
    /// Both terms over the loop's full `max(W*t_flop, Q*t_mop)`.
    FullDuration,
}

impl EnergyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyMode::Literal => "literal",
            EnergyMode::FullDuration => "full-duration",
        }
    }
}

pub fn loop_energy<T: Scalar>(
    time: &LoopTime<T>,
    power: &PowerDraw<T>,
    mode: EnergyMode,
) -> EnergyBreakdown<T> {
    match mode {
        EnergyMode::Literal => energy_from_times(time.compute_s, time.memory_s, power),
        EnergyMode::FullDuration => energy_from_times(time.time_s, time.time_s, power),
    }
}

/// Sum of [`loop_energy`] over every loop of a dwarf run.
pub fn dwarf_energy<T: Scalar>(
    time: &DwarfTime<T>,
    power: &PowerDraw<T>,
    mode: EnergyMode,
) -> EnergyBreakdown<T> {
    time.loops
        .iter()
        .map(|l| loop_energy(&l.time, power, mode))
        .fold(
            EnergyBreakdown::new(T::zero(), T::zero(), T::zero()),
            |a, b| a + b,
        )
}

/// `T * (cpu_pkg_idle + s * power_limit)`.
///
/// ```
/// let e = roofcast_core::energy::energy_gpu(10.0_f64, 5.53, 0.5871, 155.0).unwrap();
/// assert!((e - 965.3).abs() < 0.2);
/// ```
pub fn energy_gpu<T: Scalar>(
    time_s: T,
    cpu_pkg_idle_w: T,
    s_fraction: T,
    power_limit_w: T,
) -> Result<T> {
    if !(s_fraction >= T::zero() && s_fraction <= T::one()) {
        return Err(Error::domain(format!(
            "GPU power fraction {s_fraction} is outside [0, 1]"
        )));
    }
    Ok(time_s * (cpu_pkg_idle_w + s_fraction * power_limit_w))
}

/// Sum of per-node totals.
pub fn energy_multinode<T: Scalar>(nodes: &[EnergyBreakdown<T>]) -> Result<T> {
    if nodes.is_empty() {
        return Err(Error::domain("no nodes to sum"));
    }
    Ok(nodes.iter().map(|n| n.total).sum())
}

/// Energies (J), times (s) and idle draws (W) of two architectures in a workflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkflowEnergyInputs<T> {
    pub e1: T,
    pub e2: T,
    pub t1: T,
    pub t2: T,
    pub e1_const: T,
    pub e2_const: T,
}

/// Serial run: each architecture idles while the other works.
///
/// ```
/// use roofcast_core::energy::{workflow_energy_no_overlap, WorkflowEnergyInputs};
/// let i = WorkflowEnergyInputs { e1: 100.0, e2: 200.0, t1: 5.0, t2: 3.0, e1_const: 10.0, e2_const: 20.0 };
/// assert_eq!(workflow_energy_no_overlap(&i), 430.0_f64);
/// ```
pub fn workflow_energy_no_overlap<T: Scalar>(i: &WorkflowEnergyInputs<T>) -> T {
    i.e1 + i.e1_const * i.t2 + i.e2 + i.e2_const * i.t1
}

/// Simultaneous run: the architecture that finishes first idles for the gap.
///
/// ```
/// use roofcast_core::energy::{workflow_energy_overlap, WorkflowEnergyInputs};
/// let i = WorkflowEnergyInputs { e1: 100.0, e2: 200.0, t1: 5.0, t2: 3.0, e1_const: 10.0, e2_const: 20.0 };
/// assert_eq!(workflow_energy_overlap(&i), 340.0_f64);
/// ```
pub fn workflow_energy_overlap<T: Scalar>(i: &WorkflowEnergyInputs<T>) -> T {
    let idle = if i.t1 < i.t2 {
        (i.t2 - i.t1) * i.e1_const
    } else if i.t1 > i.t2 {
        (i.t1 - i.t2) * i.e2_const
    } else {
        T::zero()
    };
    i.e1 + i.e2 + idle
}

/// One loaded reading of an energy-fit CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyFitRow<T> {
    pub state: CpuState<T>,
    pub bench: BenchPower<T>,
    pub measured_pkg_w: T,
    pub measured_dram_w: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFitData<T> {
    pub rows: Vec<EnergyFitRow<T>>,
    pub idle: BenchPower<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFit<T> {
    pub pkg: PowerFit<T>,
    /// Absent when the CSV has no measured DRAM column values.
    pub dram: Option<PowerFit<T>>,
}

impl<T: Scalar> EnergyFitData<T> {
    pub fn fit(&self) -> Result<EnergyFit<T>> {
        let pkg: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.bench.pkg_w, r.measured_pkg_w))
            .collect();
        let dram: Vec<_> = self
            .rows
            .iter()
            .filter_map(|r| r.measured_dram_w.map(|m| (r.bench.dram_w, m)))
            .collect();
        Ok(EnergyFit {
            pkg: fit_pkg_coefficients(&pkg, self.idle.pkg_w)?,
            dram: if dram.is_empty() {
                None
            } else {
                Some(fit_dram_coefficients(&dram, self.idle.dram_w)?)
            },
        })
    }
}

#[derive(Deserialize)]
struct FitCsvRow {
    freq: String,
    cores: String,
    bench_pkg_w: f64,
    #[serde(default)]
    measured_pkg_w: Option<f64>,
    bench_dram_w: f64,
    #[serde(default)]
    measured_dram_w: Option<f64>,
}

/// Reads `freq,cores,bench_pkg_w,measured_pkg_w,bench_dram_w,measured_dram_w`.
/// Exactly one row has `cores = idle` and carries the idle bench draws.
pub fn read_energy_fit<T: Scalar, R: Read>(reader: R) -> Result<EnergyFitData<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    let mut idle = None;
    for rec in rdr.deserialize::<FitCsvRow>() {
        let r = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(format!("line {line}"), e.to_string())
        })?;
        let line = rows.len() + usize::from(idle.is_some()) + 2;
        let at = || format!("line {line}");
        let bench = BenchPower {
            pkg_w: T::lit(r.bench_pkg_w),
            dram_w: T::lit(r.bench_dram_w),
        };
        if r.cores.eq_ignore_ascii_case("idle") {
            if idle.replace(bench).is_some() {
                return Err(Error::parse(at(), "more than one idle row"));
            }
            continue;
        }
        let frequency: Frequency<T> = r
            .freq
            .parse()
            .map_err(|e: Error| Error::parse(at(), e.to_string()))?;
        let cores = r.cores.parse().map_err(|_| {
            Error::parse(
                at(),
                format!("cores `{}` is not a count or `idle`", r.cores),
            )
        })?;
        let measured_pkg_w = r
            .measured_pkg_w
            .ok_or_else(|| Error::parse(at(), "measured_pkg_w is required on loaded rows"))?;
        rows.push(EnergyFitRow {
            state: CpuState { frequency, cores },
            bench,
            measured_pkg_w: T::lit(measured_pkg_w),
            measured_dram_w: r.measured_dram_w.map(T::lit),
        });
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData { needed: 2, got: 0 });
    }
    let idle = idle.ok_or_else(|| Error::parse("idle", "no row with cores = idle"))?;
    Ok(EnergyFitData { rows, idle })
}

pub fn read_energy_fit_file<T: Scalar>(path: impl AsRef<Path>) -> Result<EnergyFitData<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_energy_fit(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpu::loop_time;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const TABLE_FIT: [(f64, f64); 3] = [(23.28, 19.08), (35.12, 19.58), (49.71, 20.21)];

    #[test]
    fn pkg_fit_reproduces_measurements() {
        let fit = fit_pkg_coefficients(&TABLE_FIT, 5.53).unwrap();
        assert!((fit.load - 0.0427544).abs() < 1e-4);
        assert!((fit.idle_weight - 3.27).abs() < 0.01);
        for (b, m) in TABLE_FIT {
            assert!((modeled_power(b, 5.53, fit.load, fit.idle_weight) - m).abs() < 0.01);
        }
    }

    #[test]
    fn trivial_fits() {
        let id = fit_pkg_coefficients(&[(10.0, 10.0), (20.0, 20.0)], 5.0_f64).unwrap();
        assert_relative_eq!(id.load, 1.0, epsilon = 1e-12);
        assert!(id.idle_weight.abs() < 1e-12);
        let idle_only =
            fit_pkg_coefficients(&[(10.0, 5.0), (20.0, 5.0), (30.0, 5.0)], 5.0_f64).unwrap();
        assert!(idle_only.load.abs() < 1e-12);
        assert_relative_eq!(idle_only.idle_weight, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dram_fit_recovers_synthetic_weights() {
        let bench = [4.73, 5.42, 5.89, 7.21];
        let points: Vec<_> = bench.iter().map(|b| (*b, 0.4 * b + 0.25 * 1.37)).collect();
        let fit = fit_dram_coefficients(&points, 1.37_f64).unwrap();
        assert!((fit.load - 0.4).abs() < 1e-9 && (fit.idle_weight - 0.25).abs() < 1e-9);
        let same = fit_dram_coefficients(&[(4.0, 1.0), (4.0, 1.0)], 1.0_f64);
        assert!(matches!(same, Err(Error::RankDeficient(_))));
        assert!(matches!(
            fit_dram_coefficients(&[(4.0, 1.0)], 1.0_f64),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn modeled_power_examples() {
        assert_relative_eq!(
            modeled_power(44.89, 31.82, 0.58309, 0.50243),
            42.162,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            modeled_power(19.89, 3.71, 0.37421, 0.5),
            9.298,
            max_relative = 1e-4
        );
        assert_eq!(modeled_power(19.89, 3.71, 0.0, 0.0), 0.0);
    }

    #[test]
    fn single_node_examples() {
        let p = PowerDraw {
            pkg_w: 42.162,
            dram_w: 6.006,
            pkg_idle_w: 31.82,
            dram_idle_w: 1.31,
        };
        let e = energy_from_times(10.0, 4.0, &p);
        assert_relative_eq!(e.e_const, 7.86, max_relative = 1e-12);
        assert_eq!(energy_from_times(4.0, 4.0, &p).e_const, 0.0);
        let e = energy_from_times(139.9_f64, 139.9, &p);
        assert!((e.total - 6738.9).abs() < 0.5);
        assert_eq!(e.total, e.e_pkg + e.e_dram + e.e_const);
        let m = energy_from_times(2.0, 5.0, &p);
        assert_relative_eq!(m.e_const, 3.0 * 31.82, max_relative = 1e-12);
        assert_eq!(energy_single(2.0, 5.0, 1.0, 1.0, &p), m);
    }

    #[test]
    fn energy_modes() {
        let p = PowerDraw {
            pkg_w: 10.0,
            dram_w: 2.0,
            pkg_idle_w: 3.0,
            dram_idle_w: 1.0,
        };
        let t = loop_time(4.0, 10.0, 1.0, 1.0);
        let lit = loop_energy(&t, &p, EnergyMode::Literal);
        assert_eq!((lit.e_pkg, lit.e_dram, lit.e_const), (40.0, 20.0, 18.0));
        let full = loop_energy(&t, &p, EnergyMode::FullDuration);
        assert_eq!((full.e_pkg, full.e_dram, full.e_const), (100.0, 20.0, 0.0));
    }

    #[test]
    fn gpu_examples() {
        assert!((energy_gpu(10.0_f64, 5.53, 0.5871, 155.0).unwrap() - 965.3).abs() < 0.2);
        assert_relative_eq!(
            energy_gpu(1.0, 0.0, 0.2889, 225.0).unwrap(),
            65.0,
            max_relative = 0.01
        );
        assert_eq!(energy_gpu(0.0, 5.53, 0.5, 155.0).unwrap(), 0.0);
        assert!(energy_gpu(1.0, 5.53, 1.5, 155.0).is_err());
    }

    #[test]
    fn multinode_sum() {
        let b = EnergyBreakdown::new(60.0, 30.0, 10.0);
        assert_eq!(energy_multinode(&[b; 4]).unwrap(), 400.0);
        assert_eq!(energy_multinode(&[b]).unwrap(), 100.0);
        assert!(energy_multinode::<f64>(&[]).is_err());
    }

    #[test]
    fn workflow_trivial_cases() {
        let i = WorkflowEnergyInputs {
            e1: 100.0,
            e2: 200.0,
            t1: 5.0,
            t2: 3.0,
            e1_const: 10.0,
            e2_const: 20.0,
        };
        assert_eq!(workflow_energy_no_overlap(&i), 430.0);
        assert_eq!(workflow_energy_overlap(&i), 340.0);
        let idle_free = WorkflowEnergyInputs {
            e1_const: 0.0,
            e2_const: 0.0,
            ..i
        };
        assert_eq!(workflow_energy_no_overlap(&idle_free), 300.0);
        let instant = WorkflowEnergyInputs {
            t1: 0.0,
            t2: 0.0,
            ..i
        };
        assert_eq!(workflow_energy_no_overlap(&instant), 300.0);
        assert_eq!(workflow_energy_overlap(&instant), 300.0);
    }

    #[test]
    fn fit_csv() {
        let csv = "freq,cores,bench_pkg_w,measured_pkg_w,bench_dram_w,measured_dram_w\n\
                   2.4,idle,5.53,,1.31,\n\
                   2.4,1,23.28,19.08,4.73,3.15\n\
                   2.4,2,35.12,19.58,5.42,3.55\n\
                   2.4,4,49.71,20.21,7.21,3.6\n";
        let data = read_energy_fit::<f64, _>(csv.as_bytes()).unwrap();
        assert_eq!(data.rows.len(), 3);
        assert_eq!(data.idle.pkg_w, 5.53);
        let fit = data.fit().unwrap();
        assert!((fit.pkg.load - 0.0427544).abs() < 1e-4);
        assert!(fit.dram.is_some());

        let no_idle =
            "freq,cores,bench_pkg_w,measured_pkg_w,bench_dram_w,measured_dram_w\n2.4,1,1,1,1,1\n";
        assert!(read_energy_fit::<f64, _>(no_idle.as_bytes()).is_err());
        let header_only =
            "freq,cores,bench_pkg_w,measured_pkg_w,bench_dram_w,measured_dram_w\n2.4,idle,1,,1,\n";
        assert!(matches!(
            read_energy_fit::<f64, _>(header_only.as_bytes()),
            Err(Error::InsufficientData { .. })
        ));
        let bad = csv.replace("2.4,2,35.12", "2.4,2,x");
        match read_energy_fit::<f64, _>(bad.as_bytes()).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "line 4"),
            e => panic!("unexpected {e}"),
        }
    }

    proptest! {
        #[test]
        fn overlap_never_costs_more(e1 in 0.0f64..1e6, e2 in 0.0f64..1e6, t1 in 0.0f64..1e4, t2 in 0.0f64..1e4,
                                    c1 in 0.0f64..500.0, c2 in 0.0f64..500.0) {
            let i = WorkflowEnergyInputs { e1, e2, t1, t2, e1_const: c1, e2_const: c2 };
            prop_assert!(workflow_energy_no_overlap(&i) >= workflow_energy_overlap(&i));
        }

        #[test]
        fn single_energy_is_monotone(c in 0.0f64..100.0, m in 0.0f64..100.0, dc in 0.0f64..10.0,
                                     p in prop::array::uniform4(0.0f64..100.0)) {
            let pw = PowerDraw { pkg_w: p[0] + p[2], dram_w: p[1] + p[3], pkg_idle_w: p[2], dram_idle_w: p[3] };
            let base = energy_from_times(c, m, &pw).total;
            prop_assert!(energy_from_times(c + dc, m, &pw).total >= base - 1e-9);
            prop_assert!(energy_from_times(c, m + dc, &pw).total >= base - 1e-9);
            let hotter = PowerDraw { pkg_w: pw.pkg_w + dc, ..pw };
            prop_assert!(energy_from_times(c, m, &hotter).total >= base);
        }

        #[test]
        fn idle_term_vanishes_at_balance(t in 0.0f64..1e3, eps in -1e-13f64..1e-13) {
            let pw = PowerDraw { pkg_w: 40.0, dram_w: 6.0, pkg_idle_w: 31.82, dram_idle_w: 3.71 };
            let e = energy_from_times(t + eps, t, &pw);
            prop_assert!(e.e_const >= 0.0 && e.e_const < 1e-9);
        }
    }
}
