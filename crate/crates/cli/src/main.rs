//! `roofcast`: fits, predictions, sweeps and validation reports.

mod commands;
mod error;
mod manifest;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use roofcast_core::catalog::{CpuState, Frequency};
use roofcast_core::projection::ProjectionOptions;
use roofcast_core::{CommMode, EnergyMode, Policy};

use commands::{Ctx, Format};
use error::{CliError, CliResult};
use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "roofcast",
    version,
    about = "Roofline-based time and energy projection"
)]
struct Cli {
    /// Hardware catalog (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    catalog: Option<PathBuf>,
    /// Dwarf model or GPU kernel set (JSON). `project` takes several.
    #[arg(long, global = true, value_name = "PATH")]
    model: Vec<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Which outputs to write for commands that can plot.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CommModeArg {
    Overlap,
    Additive,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyModeArg {
    FullDuration,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    MinTts,
    MinEts,
    LexTtsEts,
    LexEtsTts,
}

#[derive(Subcommand)]
enum Command {
    /// Fit V, X, Y, Z from a `freq,cores,bandwidth_gbs` CSV.
    FitMemory {
        /// CPU name in the catalog.
        #[arg(long)]
        cpu: String,
        #[arg(long, value_name = "CSV")]
        samples: PathBuf,
    },
    /// Fit U (and S with --affine) from a `freq,cores,gflops` CSV.
    FitCompute {
        /// CPU name in the catalog.
        #[arg(long)]
        cpu: String,
        #[arg(long, value_name = "CSV")]
        samples: PathBuf,
        /// Also fit an intercept S in GFLOP/s.
        #[arg(long)]
        affine: bool,
    },
    /// Fit PKG and DRAM power coefficients.
    FitEnergy {
        /// Bench and measured PKG/DRAM watts, with one `idle` row.
        #[arg(long, value_name = "CSV")]
        samples: PathBuf,
    },
    /// Per-kernel GPU time breakdown, from --model or a counters CSV.
    PredictGpu {
        /// GPU name in the catalog.
        #[arg(long)]
        gpu: String,
        /// Domain size in points.
        #[arg(long)]
        n: f64,
        /// Profiler counters to characterize instead of --model.
        #[arg(long, value_name = "CSV")]
        counters: Option<PathBuf>,
    },
    /// Per-loop CPU time of a dwarf at one state.
    PredictCpu {
        /// CPU name in the catalog.
        #[arg(long)]
        cpu: String,
        /// GHz or `turbo`.
        #[arg(long)]
        freq: String,
        /// Active cores.
        #[arg(long)]
        cores: u32,
    },
    /// Per-node times of a multinode scenario file.
    PredictMultinode {
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
    },
    /// Cache-aware roofline ceilings plus application points.
    Roofline {
        /// CPU name in the catalog.
        #[arg(long)]
        cpu: String,
        /// GHz or `turbo`.
        #[arg(long)]
        freq: String,
        /// Active cores.
        #[arg(long)]
        cores: u32,
        /// `label,intensity,gflops` CSV.
        #[arg(long, value_name = "CSV")]
        points: Option<PathBuf>,
        /// Lowest plotted intensity, FLOP/B.
        #[arg(long, default_value_t = 0.01)]
        min_intensity: f64,
        /// Highest plotted intensity, FLOP/B.
        #[arg(long, default_value_t = 100.0)]
        max_intensity: f64,
        /// Log-spaced intensities between the two bounds.
        #[arg(long, default_value_t = 41)]
        steps: usize,
        /// Effective compute peak in GFLOP/s; defaults to the state's measured perf.
        #[arg(long)]
        peak: Option<f64>,
    },
    /// Sweep a workflow over a grid and report the Pareto front.
    Project {
        #[arg(long, value_name = "PATH")]
        workflow: PathBuf,
        /// Configurations to sweep; without it the workflow runs as written.
        #[arg(long, value_name = "PATH")]
        grid: Option<PathBuf>,
        /// Whether communication hides behind compute or adds to it.
        #[arg(long, value_enum)]
        comm_mode: CommModeArg,
        /// Time PKG and DRAM over the whole loop, or over their own parts.
        #[arg(long, value_enum)]
        energy_mode: EnergyModeArg,
        /// How the single best configuration is picked.
        #[arg(long, value_enum)]
        policy: PolicyArg,
    },
    /// Compare predicted and reference CSVs row by row.
    Validate {
        /// `label,value` rows of the prediction.
        #[arg(long, value_name = "CSV")]
        predicted: PathBuf,
        /// Measured rows in the same order.
        #[arg(long, value_name = "CSV")]
        reference: PathBuf,
        /// Value column; defaults to the second column.
        #[arg(long)]
        column: Option<String>,
        /// Largest allowed |difference| as a fraction, e.g. 0.05.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn state(freq: &str, cores: u32) -> CliResult<CpuState<f64>> {
    let frequency: Frequency<f64> = freq.parse()?;
    Ok(CpuState { frequency, cores })
}

fn manifest(cli: &Cli) -> RunManifest {
    let name = match &cli.command {
        Command::FitMemory { .. } => "fit-memory",
        Command::FitCompute { .. } => "fit-compute",
        Command::FitEnergy { .. } => "fit-energy",
        Command::PredictGpu { .. } => "predict-gpu",
        Command::PredictCpu { .. } => "predict-cpu",
        Command::PredictMultinode { .. } => "predict-multinode",
        Command::Roofline { .. } => "roofline",
        Command::Project { .. } => "project",
        Command::Validate { .. } => "validate",
    };
    let mut m = RunManifest::new(name, &cli.out);
    if let Some(c) = &cli.catalog {
        m.input("catalog", c);
    }
    for p in &cli.model {
        m.input("model", p);
    }
    m.option("format", format!("{:?}", cli.format).to_lowercase());
    match &cli.command {
        Command::FitMemory { cpu, samples } | Command::FitCompute { cpu, samples, .. } => {
            m.input("samples", samples).option("cpu", cpu);
        }
        Command::FitEnergy { samples } => {
            m.input("samples", samples);
        }
        Command::PredictGpu { gpu, n, counters } => {
            m.option("gpu", gpu).option("n", n);
            if let Some(c) = counters {
                m.input("counters", c);
            }
        }
        Command::PredictCpu { cpu, freq, cores } => {
            m.option("cpu", cpu)
                .option("freq", freq)
                .option("cores", cores);
        }
        Command::PredictMultinode { scenario } => {
            m.input("scenario", scenario);
        }
        Command::Roofline {
            cpu,
            freq,
            cores,
            points,
            ..
        } => {
            m.option("cpu", cpu)
                .option("freq", freq)
                .option("cores", cores);
            if let Some(p) = points {
                m.input("points", p);
            }
        }
        Command::Project {
            workflow,
            grid,
            comm_mode,
            energy_mode,
            policy,
        } => {
            m.input("workflow", workflow);
            if let Some(g) = grid {
                m.input("grid", g);
            }
            m.option("comm_mode", comm(*comm_mode).as_str())
                .option("energy_mode", energy(*energy_mode).as_str())
                .option("policy", policy_of(*policy).as_str());
        }
        Command::Validate {
            predicted,
            reference,
            tolerance,
            ..
        } => {
            m.input("predicted", predicted)
                .input("reference", reference);
            if let Some(t) = tolerance {
                m.option("tolerance", t);
            }
        }
    }
    m
}

fn comm(a: CommModeArg) -> CommMode {
    match a {
        CommModeArg::Overlap => CommMode::Overlap,
        CommModeArg::Additive => CommMode::Additive,
    }
}

fn energy(a: EnergyModeArg) -> EnergyMode {
    match a {
        EnergyModeArg::FullDuration => EnergyMode::FullDuration,
        EnergyModeArg::Literal => EnergyMode::Literal,
    }
}

fn policy_of(a: PolicyArg) -> Policy {
    match a {
        PolicyArg::MinTts => Policy::MinTts,
        PolicyArg::MinEts => Policy::MinEts,
        PolicyArg::LexTtsEts => Policy::LexTtsEts,
        PolicyArg::LexEtsTts => Policy::LexEtsTts,
    }
}

fn run(cli: Cli) -> CliResult<Vec<String>> {
    let manifest = manifest(&cli);
    manifest.check()?;
    let ctx = Ctx {
        catalog: cli.catalog,
        models: cli.model,
        out: cli.out,
        format: cli.format,
    };
    let lines = match cli.command {
        Command::FitMemory { cpu, samples } => commands::fit::memory(&ctx, &cpu, &samples),
        Command::FitCompute {
            cpu,
            samples,
            affine,
        } => commands::fit::compute(&ctx, &cpu, &samples, affine),
        Command::FitEnergy { samples } => commands::fit::energy(&ctx, &samples),
        Command::PredictGpu { gpu, n, counters } => {
            commands::predict::gpu(&ctx, &gpu, n, counters.as_deref())
        }
        Command::PredictCpu { cpu, freq, cores } => {
            commands::predict::cpu(&ctx, &cpu, state(&freq, cores)?)
        }
        Command::PredictMultinode { scenario } => commands::predict::multinode(&ctx, &scenario),
        Command::Roofline {
            cpu,
            freq,
            cores,
            points,
            min_intensity,
            max_intensity,
            steps,
            peak,
        } => commands::roofline::run(
            &ctx,
            &commands::roofline::RooflineArgs {
                cpu: &cpu,
                state: state(&freq, cores)?,
                points: points.as_deref(),
                min_intensity,
                max_intensity,
                steps,
                peak,
            },
        ),
        Command::Project {
            workflow,
            grid,
            comm_mode,
            energy_mode,
            policy,
        } => commands::project::run(
            &ctx,
            &commands::project::ProjectArgs {
                workflow: &workflow,
                grid: grid.as_deref(),
                options: ProjectionOptions {
                    comm_mode: comm(comm_mode),
                    energy_mode: energy(energy_mode),
                },
                policy: policy_of(policy),
            },
        ),
        Command::Validate {
            predicted,
            reference,
            column,
            tolerance,
        } => commands::validate::run(
            &ctx,
            &commands::validate::ValidateArgs {
                predicted: &predicted,
                reference: &reference,
                column: column.as_deref(),
                tolerance,
            },
        ),
    };
    // the manifest is written even when a tolerance check fails, since the
    // reports it describes were still produced
    match lines {
        Ok(lines) => {
            manifest.write()?;
            Ok(lines)
        }
        Err(e @ CliError::Tolerance(_)) => {
            manifest.write()?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("roofcast: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
