use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bisect_core::certificates::{
    build_dual_certificate, certificate_condition, mangasarian_unique_check, verify_dual,
};
use bisect_core::constructions::{construct_tight_instance, regular_planted};
use bisect_core::distance::{distance_stats, nonrecovery_certificate};
use bisect_core::experiments::{run_phase_diagram, write_phase_csv, PhaseConfig, PhaseEnvelope};
use bisect_core::metric::{
    lp_recovery_verdict, objective_tolerance, solve_metric_lp, MetricOptions,
};
use bisect_core::oracle::{exact_for_instance, exact_min_bisection, DEFAULT_CAP};
use bisect_core::regularity::{regularize_bipartite_add, regularize_subgraph};
use bisect_core::sampling::sample_sbm;
use bisect_core::thresholds::{emit_curves, write_curves_csv, CurveFamily, Grid};
use bisect_core::{bisection_cost, Bisection, Error, Graph, PlantedInstance};

#[derive(Parser)]
#[command(
    name = "bisectlp",
    version,
    about = "Metric LP relaxation of minimum bisection on planted instances"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Full-size phase diagram (n = 100, 20 trials, 0.05 grid). Takes hours.
    #[arg(long, global = true)]
    full: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    AddBipartite,
    SubGeneral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    VeryDense,
    Dense,
    Log,
}

#[derive(Args)]
struct Input {
    /// Edge list: header `n m`, then one `i j` per line.
    #[arg(long)]
    graph: PathBuf,
    /// Planted partition: one line of `n` labels in {0, 1}.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample or construct a planted instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.8)]
        p: f64,
        #[arg(long, default_value_t = 0.2)]
        q: f64,
        /// Regular sides with the given within and cross degrees, e.g. `3,1`.
        #[arg(long, value_delimiter = ',', conflicts_with = "tight")]
        regular: Option<Vec<usize>>,
        /// Worst-case instance with the given degrees, e.g. `3,1`.
        #[arg(long, value_delimiter = ',')]
        tight: Option<Vec<usize>>,
        /// Where to write the planted partition.
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// Minimum bisection by enumeration.
    Exact {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Solve the relaxation and classify the planted bisection.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = MetricOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = MetricOptions::default().batch)]
        batch: usize,
        #[arg(long, overrides_with = "no_probe")]
        probe: bool,
        #[arg(long)]
        no_probe: bool,
    },
    /// Dual certificate and uniqueness check for a regular instance.
    Certify {
        #[command(flatten)]
        input: Input,
    },
    /// Extend or trim a graph to a regular one.
    Regularize {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        d: usize,
    },
    /// Distance statistics, and the non-recovery certificate with a partition.
    Distances {
        #[command(flatten)]
        input: Input,
    },
    /// Sampled boundary curves.
    Thresholds {
        #[arg(long, value_enum, default_value = "very-dense")]
        family: Family,
        /// `α` for the dense family.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Monte Carlo recovery phase diagram.
    Phase {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Rerun the configuration stored in a JSON result file.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn open(p: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(p).with_context(|| format!("opening {}", p.display()))?,
    ))
}

fn read_graph(p: &Path) -> Result<Graph> {
    Graph::read_edge_list(open(p)?).with_context(|| format!("reading {}", p.display()))
}

fn read_instance(input: &Input) -> Result<PlantedInstance> {
    let g = read_graph(&input.graph)?;
    let Some(part) = &input.partition else {
        bail!(Error::InvalidParameter("--partition is required".into()));
    };
    let b =
        Bisection::read_line(open(part)?).with_context(|| format!("reading {}", part.display()))?;
    Ok(PlantedInstance::new(g, b.side().to_vec())?)
}

fn write_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if g.threads > 0 {
        rayon_threads(g.threads)?;
    }
    match cli.command {
        Command::Gen {
            n,
            p,
            q,
            regular,
            tight,
            partition_out,
        } => {
            if let Some(d) = regular.as_ref().or(tight.as_ref()).filter(|d| d.len() != 2) {
                bail!(Error::InvalidParameter(format!(
                    "expected two degrees, got {d:?}"
                )));
            }
            let inst = match (regular, tight) {
                (Some(d), _) => regular_planted(n, d[0], d[1])?,
                (_, Some(d)) => construct_tight_instance(n, d[0], d[1])?.instance,
                _ => sample_sbm(n, p, q, g.seed)?,
            };
            let mut w = output(&g.out)?;
            inst.graph().write_edge_list(&mut w)?;
            w.flush()?;
            if let Some(path) = partition_out {
                std::fs::write(&path, inst.planted().to_line())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Exact { input, cap } => {
            let r = match &input.partition {
                Some(_) => exact_for_instance(&read_instance(&input)?, cap)?,
                None => exact_min_bisection(&read_graph(&input.graph)?, cap)?,
            };
            write_json(
                &g.out,
                &json!({
                    "optimal_cost": r.optimal_cost,
                    "num_optimizers": r.num_optimizers,
                    "recovered": r.planted_is_unique_optimum,
                }),
            )?;
        }
        Command::Solve {
            input,
            tol,
            batch,
            probe: _,
            no_probe,
        } => {
            let inst = read_instance(&input)?;
            let opts = MetricOptions {
                tol,
                batch,
                ..MetricOptions::default()
            };
            let value = if no_probe {
                let r = solve_metric_lp(inst.graph(), &opts)?;
                let planted = bisection_cost(inst.graph(), inst.planted())? as f64;
                let verdict = if (r.objective - planted).abs() <= objective_tolerance(planted) {
                    "PlantedOptimal"
                } else {
                    "BelowPlanted"
                };
                json!({
                    "objective": r.objective,
                    "verdict": verdict,
                    "rounds": r.rounds,
                    "constraints_added": r.constraints_added,
                    "runtime_ms": r.runtime_ms,
                })
            } else {
                let v = lp_recovery_verdict(&inst, &opts)?;
                json!({
                    "objective": v.lp_value,
                    "verdict": v.kind,
                    "rounds": v.rounds,
                    "constraints_added": v.constraints_added,
                    "runtime_ms": v.runtime_ms,
                })
            };
            write_json(&g.out, &value)?;
        }
        Command::Certify { input } => {
            let inst = read_instance(&input)?;
            let cert = build_dual_certificate(&inst)?;
            let rep = verify_dual(&cert, &inst, 1e-8);
            let unique = if rep.passed && inst.n() >= 8 {
                Some(mangasarian_unique_check(&inst, &cert)?)
            } else {
                None
            };
            write_json(
                &g.out,
                &json!({
                    "omega_bar": cert.omega_bar,
                    "condition_holds": certificate_condition(cert.n, cert.d_in, cert.d_out),
                    "dual_residual": rep.max_residual,
                    "unique": unique,
                }),
            )?;
        }
        Command::Regularize { input, mode, d } => {
            let graph = read_graph(&input.graph)?;
            let result = match mode {
                Mode::AddBipartite => {
                    let inst = read_instance(&input)?;
                    regularize_bipartite_add(&graph, inst.side(), d)?
                }
                Mode::SubGeneral => regularize_subgraph(&graph, d)?,
            };
            let Some(h) = result else {
                bail!(Error::Solver(format!(
                    "no {d}-regular graph of the requested kind exists"
                )));
            };
            let mut w = output(&g.out)?;
            h.write_edge_list(&mut w)?;
            w.flush()?;
        }
        Command::Distances { input } => {
            let graph = read_graph(&input.graph)?;
            let s = distance_stats(&graph);
            let mut value = json!({
                "rho_max": s.rho_max,
                "rho_avg": s.rho_avg,
                "c": s.c,
                "b": s.b,
            });
            if input.partition.is_some() && s.c.is_some() {
                let cert = nonrecovery_certificate(&read_instance(&input)?)?;
                value["applies"] = json!(cert.applies);
            }
            write_json(&g.out, &value)?;
        }
        Command::Thresholds {
            family,
            alpha,
            start,
            stop,
            step,
        } => {
            let (family, lo, hi) = match family {
                Family::VeryDense => (CurveFamily::VeryDense, 0.5, 1.0),
                Family::Dense => (CurveFamily::Dense { alpha }, 0.0, 0.99),
                Family::Log => (CurveFamily::Log, 0.0, 20.0),
            };
            let grid = Grid {
                start: start.unwrap_or(lo),
                stop: stop.unwrap_or(hi),
                step,
            };
            let curves = emit_curves(family, grid)?;
            let mut w = output(&g.out)?;
            if g.format == Some(Format::Json) {
                serde_json::to_writer_pretty(&mut w, &curves)?;
                writeln!(w)?;
            } else {
                write_curves_csv(&curves, &mut w)?;
            }
            w.flush()?;
        }
        Command::Phase { n, trials, replay } => {
            let cfg = match replay {
                Some(path) => PhaseEnvelope::read(open(&path)?)?.config,
                None => {
                    let mut cfg = if g.full {
                        PhaseConfig::full(g.seed)
                    } else {
                        PhaseConfig::desk(g.seed)
                    };
                    cfg.n = n.unwrap_or(cfg.n);
                    cfg.trials = trials.unwrap_or(cfg.trials);
                    cfg
                }
            };
            let cfg = PhaseConfig {
                threads: g.threads,
                ..cfg
            };
            log::info!(
                "phase diagram: {} cells, {} trials each",
                cfg.cells().len(),
                cfg.trials
            );
            let cells = run_phase_diagram(&cfg)?;
            let mut w = output(&g.out)?;
            if g.format == Some(Format::Json) {
                PhaseEnvelope::new(cfg, cells).write(&mut w)?;
                writeln!(w)?;
            } else {
                write_phase_csv(&cells, &mut w)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn rayon_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::SolverStall { .. } | Error::Solver(_) | Error::PlantedNotOptimal { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
