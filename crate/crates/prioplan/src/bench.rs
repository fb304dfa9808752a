//! Benchmark suites: configuration, execution, CSV output and aggregation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use prioplan_core::cost::{CostModel, Effort, SyntheticCosts};
use prioplan_core::environments::{bundled_with_radius, EnvironmentName, DEFAULT_RADIUS};
use prioplan_core::instances::{generate_in, GenSpec, TaskMode};
use prioplan_core::metrics::{attach_speedups, prolongation, summarize, MeanSe, RunRecord, RunStatus};
use prioplan_core::prioritized::{arrival_times, pp, rpp, verify_solution, PlannerConfig, Solution, Solver};
use prioplan_core::problem::ProblemInstance;
use prioplan_core::sim::{run_ad, run_sd, SimConfig};
use serde::{Deserialize, Serialize};

use crate::layout::load_suite;
use crate::wallclock::WallClock;

/// Suite description, read from TOML. See the README for the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub environments: Vec<String>,
    pub modes: Vec<String>,
    pub robots: Vec<usize>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    /// Per-run limit in seconds of wall-clock time.
    #[serde(default = "default_timeout")]
    pub timeout: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Message latency of the decentralized runs, seconds.
    #[serde(default)]
    pub latency: f64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    /// Load instances from this layout root instead of generating them.
    #[serde(default)]
    pub instances_dir: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Synthetic compute costs; wall-clock measurement when absent.
    #[serde(default)]
    pub costs: Option<CostTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostTable {
    pub plan: f64,
    pub check: f64,
    /// Per-robot plan cost overrides, keyed by robot id.
    #[serde(default)]
    pub plan_by_robot: BTreeMap<String, f64>,
    /// Size-dependent terms, all zero by default.
    #[serde(default)]
    pub per_expansion: f64,
    #[serde(default)]
    pub per_expansion_region: f64,
    #[serde(default)]
    pub per_lattice: f64,
    #[serde(default)]
    pub per_region: f64,
}

impl CostTable {
    /// The calibrated table of the core crate.
    pub fn calibrated() -> Self {
        let c = SyntheticCosts::calibrated();
        Self {
            plan: c.default_plan,
            check: c.default_check,
            plan_by_robot: BTreeMap::new(),
            per_expansion: c.effort.per_expansion,
            per_expansion_region: c.effort.per_expansion_region,
            per_lattice: c.effort.per_lattice,
            per_region: c.effort.per_region,
        }
    }

    fn effort(&self) -> Effort {
        Effort {
            per_expansion: self.per_expansion,
            per_expansion_region: self.per_expansion_region,
            per_lattice: self.per_lattice,
            per_region: self.per_region,
        }
    }
}

fn default_instances() -> usize {
    25
}
fn default_timeout() -> f64 {
    60.0
}
fn default_dt() -> f64 {
    0.5
}
fn default_radius() -> f64 {
    DEFAULT_RADIUS
}
fn default_algorithms() -> Vec<String> {
    Solver::ALL_BENCHMARKED.iter().map(|s| s.label().to_string()).collect()
}

pub fn parse_solver(s: &str) -> Result<Solver> {
    Solver::from_label(&s.to_ascii_uppercase()).ok_or_else(|| anyhow!("unknown algorithm {s:?}"))
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    fn check(&self) -> Result<()> {
        for e in &self.environments {
            EnvironmentName::parse(e).ok_or_else(|| anyhow!("unknown environment {e:?}"))?;
        }
        for m in &self.modes {
            TaskMode::parse(m).ok_or_else(|| anyhow!("unknown mode {m:?}"))?;
        }
        for a in &self.algorithms {
            let s = parse_solver(a)?;
            if s == Solver::CladPp || s == Solver::SequentialOracle {
                bail!("{a} is not part of the benchmark");
            }
        }
        if self.robots.iter().any(|&n| n == 0) || self.instances == 0 {
            bail!("robot counts and instance count must be positive");
        }
        if !(self.timeout > 0.0) || !(self.dt > 0.0) || !(self.radius > 0.0) {
            bail!("timeout, dt and radius must be positive");
        }
        if let Some(c) = &self.costs {
            let e = c.effort();
            let all = [c.plan, c.check, e.per_expansion, e.per_expansion_region, e.per_lattice, e.per_region];
            if all.iter().chain(c.plan_by_robot.values()).any(|v| !(*v >= 0.0)) {
                bail!("costs must be non-negative");
            }
            for k in c.plan_by_robot.keys() {
                k.parse::<usize>().map_err(|_| anyhow!("cost key {k:?} is not a robot id"))?;
            }
        }
        Ok(())
    }

    pub fn solvers(&self) -> Vec<Solver> {
        self.algorithms.iter().map(|a| parse_solver(a).expect("checked")).collect()
    }

    fn synthetic(&self) -> Option<SyntheticCosts> {
        self.costs.as_ref().map(|c| {
            let mut s = SyntheticCosts::uniform(c.plan, c.check).with_effort(c.effort());
            for (k, &v) in &c.plan_by_robot {
                s = s.with_plan(k.parse().expect("checked"), v);
            }
            s
        })
    }
}

/// One CSV row: one algorithm on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub environment: String,
    pub mode: String,
    pub robots: usize,
    pub instance: usize,
    /// `solved`, `unsolved` or `timeout`.
    pub status: String,
    pub runtime: f64,
    pub messages: Option<usize>,
    pub prolongation: Option<f64>,
    pub sum_arrival: Option<f64>,
    pub speedup: Option<f64>,
}

fn status_str(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Solved => "solved",
        RunStatus::Unsolved => "unsolved",
        RunStatus::Timeout => "timeout",
    }
}

fn parse_status(s: &str) -> Result<RunStatus> {
    Ok(match s {
        "solved" => RunStatus::Solved,
        "unsolved" => RunStatus::Unsolved,
        "timeout" => RunStatus::Timeout,
        _ => bail!("unknown run status {s:?}"),
    })
}

impl BenchRow {
    fn new(env: &str, mode: &str, n: usize, r: &RunRecord) -> Self {
        Self {
            algorithm: r.solver.label().to_string(),
            environment: env.to_string(),
            mode: mode.to_string(),
            robots: n,
            instance: r.instance,
            status: status_str(r.status).to_string(),
            runtime: r.runtime,
            messages: r.messages,
            prolongation: r.prolongation,
            sum_arrival: r.sum_arrival,
            speedup: r.speedup,
        }
    }

    pub fn record(&self) -> Result<RunRecord> {
        Ok(RunRecord {
            solver: parse_solver(&self.algorithm)?,
            instance: self.instance,
            status: parse_status(&self.status)?,
            runtime: self.runtime,
            messages: self.messages,
            prolongation: self.prolongation,
            sum_arrival: self.sum_arrival,
            speedup: self.speedup,
        })
    }
}

/// Aggregate of one algorithm in one (environment, mode, n) cell. Metric
/// means are over the instances solved by every algorithm of the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub algorithm: String,
    pub environment: String,
    pub mode: String,
    pub robots: usize,
    pub coverage: f64,
    pub solved: usize,
    pub unsolved: usize,
    pub timeout: usize,
    pub common: usize,
    pub runtime_mean: Option<f64>,
    pub runtime_se: Option<f64>,
    pub speedup_mean: Option<f64>,
    pub speedup_se: Option<f64>,
    pub messages_mean: Option<f64>,
    pub messages_se: Option<f64>,
    pub prolongation_mean: Option<f64>,
    pub prolongation_se: Option<f64>,
}

pub type SuiteResult = Vec<CellSummary>;

/// Groups rows by cell and summarizes; the result is sorted and does not
/// depend on row order.
pub fn summarize_rows(rows: &[BenchRow]) -> Result<SuiteResult> {
    let mut cells: BTreeMap<(String, String, usize), Vec<RunRecord>> = BTreeMap::new();
    for row in rows {
        cells
            .entry((row.environment.clone(), row.mode.clone(), row.robots))
            .or_default()
            .push(row.record()?);
    }
    let mut out = Vec::new();
    for ((env, mode, n), recs) in cells {
        let common = prioplan_core::metrics::common_solved(&recs).len();
        for s in summarize(&recs) {
            let split = |m: Option<MeanSe>| (m.map(|m| m.mean), m.map(|m| m.se));
            let (runtime_mean, runtime_se) = split(s.runtime);
            let (speedup_mean, speedup_se) = split(s.speedup);
            let (messages_mean, messages_se) = split(s.messages);
            let (prolongation_mean, prolongation_se) = split(s.prolongation);
            out.push(CellSummary {
                algorithm: s.solver.label().to_string(),
                environment: env.clone(),
                mode: mode.clone(),
                robots: n,
                coverage: s.coverage.fraction(),
                solved: s.coverage.solved,
                unsolved: s.coverage.unsolved,
                timeout: s.coverage.timeout,
                common,
                runtime_mean,
                runtime_se,
                speedup_mean,
                speedup_se,
                messages_mean,
                messages_se,
                prolongation_mean,
                prolongation_se,
            });
        }
    }
    Ok(out)
}

pub fn write_csv<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for it in items {
        w.serialize(it)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

/// Where compute time comes from during a run.
#[derive(Debug, Clone)]
pub enum Clock {
    Wall,
    Synthetic(SyntheticCosts),
}

fn record_from(
    solver: Solver,
    index: usize,
    inst: &ProblemInstance,
    dt: f64,
    sol: Option<&Solution>,
    runtime: f64,
    messages: Option<usize>,
) -> RunRecord {
    let mut rec = RunRecord {
        solver,
        instance: index,
        status: RunStatus::Unsolved,
        runtime,
        messages,
        prolongation: None,
        sum_arrival: None,
        speedup: None,
    };
    let Some(sol) = sol else { return rec };
    let defects = verify_solution(inst, sol);
    if !defects.is_empty() {
        log::error!("{} produced an invalid solution on instance {index}: {defects:?}", solver.label());
        return rec;
    }
    rec.status = RunStatus::Solved;
    rec.prolongation = prolongation(sol, inst, dt).ok();
    rec.sum_arrival = arrival_times(inst, sol).ok().map(|a| a.iter().sum());
    rec
}

fn run_with<C: CostModel>(solver: Solver, index: usize, inst: &ProblemInstance, dt: f64, latency: f64, costs: &mut C) -> Result<RunRecord> {
    let pcfg = PlannerConfig { dt, horizon_steps: None };
    if solver.is_decentralized() {
        let mut scfg = SimConfig::new(solver);
        scfg.dt = dt;
        scfg.latency = latency;
        let out = match solver {
            Solver::SdPp | Solver::SdRpp => run_sd(inst, &scfg, costs)?,
            _ => run_ad(inst, &scfg, costs)?,
        };
        Ok(record_from(solver, index, inst, dt, out.solution.as_ref(), out.time_to_solution, Some(out.messages)))
    } else {
        let out = match solver {
            Solver::Pp => pp(inst, &pcfg, costs)?,
            Solver::Rpp => rpp(inst, &pcfg, costs)?,
            _ => bail!("{} is not benchmarked", solver.label()),
        };
        let runtime = match &out {
            prioplan_core::prioritized::Outcome::Solved(s) => s.runtime,
            prioplan_core::prioritized::Outcome::Failed(_) => 0.0,
        };
        Ok(record_from(solver, index, inst, dt, out.solution(), runtime, None))
    }
}

/// Runs one algorithm on one instance under a wall-clock limit. A run that
/// exceeds the limit is abandoned and reported as a timeout.
pub fn run_one(solver: Solver, index: usize, inst: &ProblemInstance, dt: f64, latency: f64, clock: &Clock, timeout: f64) -> Result<RunRecord> {
    let (tx, rx) = mpsc::channel();
    let inst = inst.clone();
    let clock = clock.clone();
    thread::spawn(move || {
        let r = match clock {
            Clock::Wall => run_with(solver, index, &inst, dt, latency, &mut WallClock),
            Clock::Synthetic(mut c) => run_with(solver, index, &inst, dt, latency, &mut c),
        };
        let _ = tx.send(r);
    });
    match rx.recv_timeout(Duration::from_secs_f64(timeout)) {
        Ok(r) => r,
        Err(mpsc::RecvTimeoutError::Timeout) => {
            log::warn!("{} on instance {index} timed out after {timeout} s", solver.label());
            Ok(RunRecord {
                solver,
                instance: index,
                status: RunStatus::Timeout,
                runtime: timeout,
                messages: None,
                prolongation: None,
                sum_arrival: None,
                speedup: None,
            })
        }
        Err(mpsc::RecvTimeoutError::Disconnected) => bail!("worker for {} panicked", solver.label()),
    }
}

/// Runs every configured algorithm on a list of instances belonging to one
/// cell and returns the rows with speed-ups attached.
pub fn run_cell(cfg: &BenchConfig, env: &str, mode: &str, n: usize, insts: &[ProblemInstance]) -> Result<Vec<BenchRow>> {
    let clock = match cfg.synthetic() {
        Some(c) => Clock::Synthetic(c),
        None => Clock::Wall,
    };
    let mut recs = Vec::new();
    for (j, inst) in insts.iter().enumerate() {
        for solver in cfg.solvers() {
            recs.push(run_one(solver, j, inst, cfg.dt, cfg.latency, &clock, cfg.timeout)?);
        }
    }
    attach_speedups(&mut recs);
    Ok(recs.iter().map(|r| BenchRow::new(env, mode, n, r)).collect())
}

/// Instances of one cell, loaded from the configured layout or generated.
pub fn cell_instances(cfg: &BenchConfig, base: &Path, env: EnvironmentName, mode: TaskMode, n: usize) -> Result<Vec<ProblemInstance>> {
    if let Some(dir) = &cfg.instances_dir {
        let mut v = load_suite(&base.join(dir), env.as_str(), mode, n)?;
        v.truncate(cfg.instances);
        return Ok(v);
    }
    let e = bundled_with_radius(env, cfg.radius)?;
    let spec = GenSpec {
        count: cfg.instances,
        radius: cfg.radius,
        ..GenSpec::new(env, mode, n, cfg.seed.wrapping_add(n as u64))
    };
    Ok(generate_in(&e, &spec)?)
}

/// Runs the whole suite. `base` resolves relative paths in the config.
pub fn run_suite(cfg: &BenchConfig, base: &Path) -> Result<(Vec<BenchRow>, SuiteResult)> {
    let mut rows = Vec::new();
    for e in &cfg.environments {
        let env = EnvironmentName::parse(e).expect("checked");
        for m in &cfg.modes {
            let mode = TaskMode::parse(m).expect("checked");
            for &n in &cfg.robots {
                let insts = match cell_instances(cfg, base, env, mode, n) {
                    Ok(v) => v,
                    Err(err) => {
                        log::warn!("skipping {e}/{m}/n{n}: {err:#}");
                        continue;
                    }
                };
                log::info!("{e}/{m}/n{n}: {} instances", insts.len());
                rows.extend(run_cell(cfg, e, m, n, &insts)?);
            }
        }
    }
    let summary = summarize_rows(&rows)?;
    if let Some(out) = &cfg.output {
        let out = base.join(out);
        write_csv(&out.join("runs.csv"), &rows)?;
        write_csv(&out.join("summary.csv"), &summary)?;
    }
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
environments = ["empty-hall"]
modes = ["infrastructure"]
robots = [1, 3]
instances = 3
seed = 4
timeout = 30.0

[costs]
plan = 0.2
check = 0.01
"#;

    #[test]
    fn shipped_config_matches_calibrated_table() {
        let cfg = BenchConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/desk.toml")).unwrap();
        assert_eq!(cfg.costs, Some(CostTable::calibrated()));
        assert_eq!(cfg.solvers().len(), 6);
    }

    #[test]
    fn small_suite_covers_and_round_trips() {
        let cfg = BenchConfig::from_toml(SMALL).unwrap();
        let (rows, summary) = run_suite(&cfg, Path::new(".")).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 6);
        for cell in &summary {
            assert_eq!(cell.solved + cell.unsolved + cell.timeout, 3);
            assert_eq!(cell.coverage, 1.0, "{} n={}", cell.algorithm, cell.robots);
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("runs.csv");
        write_csv(&p, &rows).unwrap();
        let back: Vec<BenchRow> = read_csv(&p).unwrap();
        assert_eq!(back, rows);
        assert_eq!(summarize_rows(&back).unwrap(), summary);
        let mut shuffled = back.clone();
        shuffled.reverse();
        assert_eq!(summarize_rows(&shuffled).unwrap(), summary);
    }

    #[test]
    fn rejects_unknown_keys_and_names() {
        assert!(BenchConfig::from_toml("environments=[\"mars\"]\nmodes=[]\nrobots=[1]").is_err());
        assert!(BenchConfig::from_toml("environments=[]\nmodes=[]\nrobots=[1]\nfoo=1").is_err());
        assert!(BenchConfig::from_toml("environments=[]\nmodes=[]\nrobots=[1]\nalgorithms=[\"CLAD-PP\"]").is_err());
    }

    #[test]
    fn slow_run_times_out() {
        let env = prioplan_core::environments::bundled(EnvironmentName::Warehouse).unwrap();
        let spec = GenSpec { count: 1, ..GenSpec::new(env.name, TaskMode::Infrastructure, 12, 1) };
        let inst = generate_in(&env, &spec).unwrap().pop().unwrap();
        let r = run_one(Solver::AdRpp, 0, &inst, 0.5, 0.0, &Clock::Wall, 1e-9).unwrap();
        assert_eq!(r.status, RunStatus::Timeout);
    }
}
