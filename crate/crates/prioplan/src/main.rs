use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use prioplan::bench::{read_csv, run_suite, summarize_rows, write_csv, BenchConfig, BenchRow};
use prioplan::formats::{
    endpoints_from_json, events_from_json, load_instance, read_json, read_map, solution_to_json, write_json, EndpointsJson,
    EventJson, RoadmapJson, SimOutcomeJson,
};
use prioplan::layout;
use prioplan::plot::plot_summary;
use prioplan::wallclock::WallClock;
use prioplan_core::cost::SyntheticCosts;
use prioplan_core::environments::{bundled_with_radius, EnvironmentName, DEFAULT_RADIUS};
use prioplan_core::instances::{generate_in, validate_instance, GenSpec, TaskMode};
use prioplan_core::prioritized::{pp, rpp, Outcome, PlannerConfig, Solver};
use prioplan_core::roadmap::{check_rpp_solvable, validate_infrastructure};
use prioplan_core::sim::{run_ad, run_clad, run_sd, SimConfig};

#[derive(Parser)]
#[command(name = "prioplan", version, about = "Prioritized multi-robot trajectory planning on roadmaps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Env {
    EmptyHall,
    Corridor,
    Warehouse,
}

impl From<Env> for EnvironmentName {
    fn from(e: Env) -> Self {
        match e {
            Env::EmptyHall => EnvironmentName::EmptyHall,
            Env::Corridor => EnvironmentName::Corridor,
            Env::Warehouse => EnvironmentName::Warehouse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    FreeFormed,
    Infrastructure,
}

impl From<Mode> for TaskMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FreeFormed => TaskMode::FreeFormed,
            Mode::Infrastructure => TaskMode::Infrastructure,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Central {
    Pp,
    Rpp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decentral {
    SdPp,
    SdRpp,
    AdPp,
    AdRpp,
    CladPp,
}

impl From<Decentral> for Solver {
    fn from(d: Decentral) -> Self {
        match d {
            Decentral::SdPp => Solver::SdPp,
            Decentral::SdRpp => Solver::SdRpp,
            Decentral::AdPp => Solver::AdPp,
            Decentral::AdRpp => Solver::AdRpp,
            Decentral::CladPp => Solver::CladPp,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a bundled environment and a suite of random instances.
    Generate {
        #[arg(long, value_enum)]
        env: Env,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        robots: usize,
        #[arg(long, default_value_t = 25)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        /// Layout root.
        #[arg(long)]
        out: PathBuf,
    },
    /// Report malformed robots of an instance.
    Validate { instance: PathBuf },
    /// Check that an endpoint set forms a valid infrastructure.
    CheckInfra {
        /// PGM map (with JSON sidecar).
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        roadmap: PathBuf,
        #[arg(long)]
        endpoints: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
    },
    /// Check the sufficient condition under which the revised planners cannot fail.
    CheckSolvable { instance: PathBuf },
    /// Run a centralized planner.
    Solve {
        #[arg(long, value_enum)]
        alg: Central,
        instance: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
        /// Solution JSON; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a decentralized variant in the discrete-event simulator.
    Simulate {
        #[arg(long, value_enum)]
        alg: Decentral,
        instance: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
        #[arg(long, default_value_t = 0.0)]
        latency: f64,
        /// Broadcast loss probability (closed loop only).
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Closed-loop end time, seconds.
        #[arg(long, default_value_t = 60.0)]
        end_time: f64,
        #[arg(long, default_value_t = 1.0)]
        rebroadcast: f64,
        /// Closed-loop event script.
        #[arg(long)]
        events: Option<PathBuf>,
        /// Synthetic plan and check costs in seconds, e.g. `0.1,0.01`, or
        /// `calibrated` for effort-dependent costs; wall-clock when absent.
        #[arg(long, value_parser = parse_costs)]
        costs: Option<SyntheticCosts>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite described by a TOML file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Also render charts into this directory.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Render charts from a runs CSV written by `bench`.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_costs(s: &str) -> Result<SyntheticCosts, String> {
    if s == "calibrated" {
        return Ok(SyntheticCosts::calibrated());
    }
    let (a, b) = s.split_once(',').ok_or("expected PLAN,CHECK or `calibrated`")?;
    let p = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let c = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    if !(p >= 0.0 && c >= 0.0) {
        return Err("costs must be non-negative".into());
    }
    Ok(SyntheticCosts::uniform(p, c))
}

fn emit<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Generate { env, mode, robots, count, seed, radius, out } => {
            let name: EnvironmentName = env.into();
            let e = bundled_with_radius(name, radius)?;
            layout::write_environment(&out, &e)?;
            let spec = GenSpec { count, radius, ..GenSpec::new(name, mode.into(), robots, seed) };
            let insts = generate_in(&e, &spec)?;
            let paths = layout::write_suite(&out, name.as_str(), mode.into(), robots, &insts)?;
            println!("wrote {} instances to {}", paths.len(), layout::suite_dir(&out, name.as_str(), mode.into(), robots).display());
            Ok(true)
        }
        Cmd::Validate { instance } => {
            let inst = load_instance(&instance)?;
            let v = validate_instance(&inst);
            for m in &v {
                println!("{m}");
            }
            if v.is_empty() {
                println!("ok: {} robots", inst.robots().len());
            }
            Ok(v.is_empty())
        }
        Cmd::CheckInfra { map, roadmap, endpoints, radius } => {
            let ws = read_map(&map)?;
            let rm = read_json::<RoadmapJson>(&roadmap)?.to_roadmap()?;
            let pts = endpoints_from_json(&read_json::<EndpointsJson>(&endpoints)?);
            let rep = validate_infrastructure(&ws, &rm, &pts, radius)?;
            for (a, b) in &rep.failing_pairs {
                println!("endpoints {a} and {b} are not connected");
            }
            println!("{}: {} endpoints", if rep.valid { "valid" } else { "invalid" }, rep.endpoint_count);
            Ok(rep.valid)
        }
        Cmd::CheckSolvable { instance } => {
            let inst = load_instance(&instance)?;
            let rep = check_rpp_solvable(&inst)?;
            for r in rep.per_robot.iter().filter(|r| !r.has_path) {
                println!("robot {} has no path avoiding the others' starts and goals", r.robot);
            }
            println!("{}", if rep.solvable { "solvable" } else { "not guaranteed" });
            Ok(rep.solvable)
        }
        Cmd::Solve { alg, instance, dt, out } => {
            let inst = load_instance(&instance)?;
            let cfg = PlannerConfig { dt, horizon_steps: None };
            let res = match alg {
                Central::Pp => pp(&inst, &cfg, &mut WallClock)?,
                Central::Rpp => rpp(&inst, &cfg, &mut WallClock)?,
            };
            match res {
                Outcome::Solved(sol) => {
                    eprintln!("solved in {:.4e} s", sol.runtime);
                    emit(out.as_deref(), &solution_to_json(&inst, &sol))?;
                    Ok(true)
                }
                Outcome::Failed(f) => {
                    eprintln!("robot {} failed ({:?})", f.robot, f.reason);
                    Ok(false)
                }
            }
        }
        Cmd::Simulate { alg, instance, dt, latency, loss, seed, end_time, rebroadcast, events, costs, out } => {
            let inst = load_instance(&instance)?;
            let solver: Solver = alg.into();
            let cfg = SimConfig {
                latency,
                loss,
                seed,
                end_time,
                rebroadcast_period: rebroadcast,
                dt,
                ..SimConfig::new(solver)
            };
            let evs = match &events {
                Some(p) if solver == Solver::CladPp => events_from_json(&read_json::<Vec<EventJson>>(p)?)?,
                Some(_) => bail!("event scripts need --alg clad-pp"),
                None => Vec::new(),
            };
            let result = match costs {
                Some(mut c) => simulate(&inst, &cfg, &evs, &mut c),
                None => simulate(&inst, &cfg, &evs, &mut WallClock),
            }?;
            eprintln!(
                "{}: {} after {:.4e} s, {} messages",
                solver.label(),
                if result.succeeded() { "success" } else { "failure" },
                result.time_to_solution,
                result.messages
            );
            emit(out.as_deref(), &SimOutcomeJson::new(&inst, &result))?;
            Ok(result.succeeded())
        }
        Cmd::Bench { config, plots } => {
            let cfg = BenchConfig::load(&config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let (rows, summary) = run_suite(&cfg, base)?;
            if cfg.output.is_none() {
                let mut w = csv::Writer::from_writer(std::io::stdout());
                for s in &summary {
                    w.serialize(s)?;
                }
                w.flush()?;
            }
            eprintln!("{} runs", rows.len());
            if let Some(dir) = plots {
                let files = plot_summary(&summary, &dir)?;
                eprintln!("{} charts in {}", files.len(), dir.display());
            }
            Ok(true)
        }
        Cmd::Plot { input, out } => {
            let rows: Vec<BenchRow> = read_csv(&input)?;
            if rows.is_empty() {
                bail!("{} has no rows", input.display());
            }
            let summary = summarize_rows(&rows)?;
            write_csv(&out.join("summary.csv"), &summary)?;
            let files = plot_summary(&summary, &out)?;
            eprintln!("{} charts in {}", files.len(), out.display());
            Ok(true)
        }
    }
}

fn simulate<C: prioplan_core::cost::CostModel>(
    inst: &prioplan_core::problem::ProblemInstance,
    cfg: &SimConfig,
    events: &[prioplan_core::sim::ExternalEvent],
    costs: &mut C,
) -> Result<prioplan_core::sim::SimOutcome> {
    Ok(match cfg.variant {
        Solver::SdPp | Solver::SdRpp => run_sd(inst, cfg, costs)?,
        Solver::CladPp => run_clad(inst, cfg, events, costs)?,
        _ => run_ad(inst, cfg, costs)?,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()).context("prioplan") {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
