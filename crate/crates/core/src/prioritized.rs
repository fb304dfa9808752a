//! Centralized prioritized planners: classical (PP), revised (RPP) and the
//! sequential "wait until everyone is parked, then go" construction used as
//! an oracle for RPP.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{CostModel, Work};
use crate::error::CoreError;
use crate::geometry::{Disc, RegionSet};
use crate::planner::{best_traj_with_stats, edge_steps, PlanQuery, DEFAULT_DT};
use crate::problem::ProblemInstance;
use crate::roadmap::{shortest_path, start_goal_exclusions};
use crate::trajectory::{first_conflict, AnnouncedRegion, Trajectory, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Solver {
    Pp,
    Rpp,
    SequentialOracle,
    SdPp,
    SdRpp,
    AdPp,
    AdRpp,
    CladPp,
}

impl Solver {
    pub const ALL_BENCHMARKED: [Solver; 6] = [Solver::Pp, Solver::Rpp, Solver::SdPp, Solver::SdRpp, Solver::AdPp, Solver::AdRpp];

    pub fn label(self) -> &'static str {
        match self {
            Solver::Pp => "PP",
            Solver::Rpp => "RPP",
            Solver::SequentialOracle => "SEQ",
            Solver::SdPp => "SD-PP",
            Solver::SdRpp => "SD-RPP",
            Solver::AdPp => "AD-PP",
            Solver::AdRpp => "AD-RPP",
            Solver::CladPp => "CLAD-PP",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        let s = s.to_ascii_uppercase();
        [
            Solver::Pp,
            Solver::Rpp,
            Solver::SequentialOracle,
            Solver::SdPp,
            Solver::SdRpp,
            Solver::AdPp,
            Solver::AdRpp,
            Solver::CladPp,
        ]
        .into_iter()
        .find(|v| v.label() == s)
    }

    /// Whether robots avoid the start regions of lower-priority robots.
    pub fn revised(self) -> bool {
        matches!(self, Solver::Rpp | Solver::SequentialOracle | Solver::SdRpp | Solver::AdRpp)
    }

    pub fn is_decentralized(self) -> bool {
        matches!(self, Solver::SdPp | Solver::SdRpp | Solver::AdPp | Solver::AdRpp | Solver::CladPp)
    }

    /// Centralized counterpart used for speed-up ratios.
    pub fn centralized(self) -> Solver {
        match self {
            Solver::SdPp | Solver::AdPp | Solver::CladPp => Solver::Pp,
            Solver::SdRpp | Solver::AdRpp => Solver::Rpp,
            other => other,
        }
    }
}

/// Conflict-free joint solution; trajectories are in priority order.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trajectories: Vec<(usize, Arc<Trajectory>)>,
    pub solver: Solver,
    /// Seconds: compute time charged by the cost model for centralized
    /// solvers, virtual time-to-solution for decentralized ones.
    pub runtime: f64,
}

impl Solution {
    pub fn trajectory_of(&self, robot: usize) -> Option<&Trajectory> {
        self.trajectories.iter().find(|(id, _)| *id == robot).map(|(_, t)| &**t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// The robot has a static path but no trajectory was found within the
    /// search horizon.
    NoTrajectoryWithinHorizon,
    /// Not even a static path avoiding the blocked regions exists.
    NoStaticPath,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Failure {
    /// Id of the robot that failed.
    pub robot: usize,
    /// Iteration (0-based priority position) in which it failed.
    pub phase: usize,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Solved(Solution),
    Failed(Failure),
}

impl Outcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Outcome::Solved(s) => Some(s),
            Outcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            Outcome::Solved(_) => None,
            Outcome::Failed(f) => Some(f),
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Outcome::Solved(_))
    }
}

/// Discretization shared by every planner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    pub dt: f64,
    /// Fixed horizon in steps; `None` derives it per query.
    pub horizon_steps: Option<usize>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            horizon_steps: None,
        }
    }
}

/// Start bodies of every robot after priority position `i`.
pub fn lower_priority_starts(inst: &ProblemInstance, i: usize) -> RegionSet {
    let rm = inst.roadmap();
    RegionSet::from_discs(
        inst.robots()[i + 1..]
            .iter()
            .map(|r| Disc { center: rm.vertex(r.start), radius: r.radius })
            .collect(),
    )
}

pub(crate) fn classify_failure(inst: &ProblemInstance, i: usize, blocked: &RegionSet) -> Result<FailureReason, CoreError> {
    let r = &inst.robots()[i];
    Ok(match shortest_path(inst.roadmap(), r.start, r.goal, r.radius, blocked)? {
        Some(_) => FailureReason::NoTrajectoryWithinHorizon,
        None => FailureReason::NoStaticPath,
    })
}

fn sequential<C: CostModel>(inst: &ProblemInstance, cfg: &PlannerConfig, costs: &mut C, revised: bool) -> Result<Outcome, CoreError> {
    inst.ensure_valid()?;
    let solver = if revised { Solver::Rpp } else { Solver::Pp };
    let mut dynamic: Vec<AnnouncedRegion> = Vec::with_capacity(inst.robots().len());
    let mut runtime = 0.0;
    for (i, robot) in inst.robots().iter().enumerate() {
        let blocked = if revised { lower_priority_starts(inst, i) } else { RegionSet::new() };
        let mut q = PlanQuery::new(inst.roadmap(), robot.radius, robot.speed, robot.start, robot.goal, &dynamic, &blocked);
        q.dt = cfg.dt;
        q.max_steps = cfg.horizon_steps;
        let (found, cost) = costs.charge(robot.id, || match best_traj_with_stats(&q) {
            Ok((t, stats)) => (Ok(t), Work::Plan { expansions: stats.expansions, regions: dynamic.len(), lattice: stats.lattice }),
            Err(e) => (Err(e), Work::Plan { expansions: 0, regions: 0, lattice: 0 }),
        });
        runtime += cost;
        match found? {
            Some(tr) => dynamic.push(AnnouncedRegion::new(robot.id, robot.radius, Arc::new(tr))?),
            None => {
                return Ok(Outcome::Failed(Failure {
                    robot: robot.id,
                    phase: i,
                    reason: classify_failure(inst, i, &blocked)?,
                }))
            }
        }
    }
    Ok(Outcome::Solved(Solution {
        trajectories: dynamic.into_iter().map(|d| (d.robot, d.trajectory)).collect(),
        solver,
        runtime,
    }))
}

/// Classical prioritized planning: robot `i` avoids the trajectories of
/// robots `0..i` and nothing else.
pub fn pp<C: CostModel>(inst: &ProblemInstance, cfg: &PlannerConfig, costs: &mut C) -> Result<Outcome, CoreError> {
    sequential(inst, cfg, costs, false)
}

/// Revised prioritized planning: as [`pp`], and robot `i` additionally never
/// enters the start region of any lower-priority robot.
pub fn rpp<C: CostModel>(inst: &ProblemInstance, cfg: &PlannerConfig, costs: &mut C) -> Result<Outcome, CoreError> {
    sequential(inst, cfg, costs, true)
}

/// Builds the sequential solution: robot `i` waits at its start until every
/// higher-priority robot has arrived, then follows its shortest path avoiding
/// lower-priority starts and higher-priority goals at full speed. Waiting
/// and edge traversals are quantized to the planner's lattice, so RPP's
/// search space always contains this trajectory.
pub fn sequential_oracle(inst: &ProblemInstance, cfg: &PlannerConfig) -> Result<Outcome, CoreError> {
    inst.ensure_valid()?;
    let rm = inst.roadmap();
    let mut trajectories = Vec::with_capacity(inst.robots().len());
    let mut release = 0.0f64;
    for (i, robot) in inst.robots().iter().enumerate() {
        let blocked = start_goal_exclusions(inst, i);
        let Some(path) = shortest_path(rm, robot.start, robot.goal, robot.radius, &blocked)? else {
            return Ok(Outcome::Failed(Failure {
                robot: robot.id,
                phase: i,
                reason: FailureReason::NoStaticPath,
            }));
        };
        let wait_steps = libm::ceil(release / cfg.dt - 1e-9).max(0.0) as usize;
        let mut step = 0;
        let mut wps = vec![Waypoint::new(rm.vertex(robot.start), 0.0)];
        if wait_steps > 0 && path.vertices.len() > 1 {
            step = wait_steps;
            wps.push(Waypoint::new(rm.vertex(robot.start), step as f64 * cfg.dt));
        }
        for w in path.vertices.windows(2) {
            let (a, b) = (rm.vertex(w[0]), rm.vertex(w[1]));
            let k = edge_steps(a.dist(b), robot.speed, cfg.dt);
            for j in 1..=k {
                wps.push(Waypoint::new(a.lerp(b, j as f64 / k as f64), (step + j) as f64 * cfg.dt));
            }
            step += k;
        }
        let tr = Trajectory::new(wps)?;
        release = release.max(tr.arrival_time(rm.vertex(robot.goal))?);
        trajectories.push((robot.id, Arc::new(tr)));
    }
    Ok(Outcome::Solved(Solution {
        trajectories,
        solver: Solver::SequentialOracle,
        runtime: 0.0,
    }))
}

/// Problems found by an independent post-hoc check of a solution.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionDefect {
    Missing { robot: usize },
    WrongStart { robot: usize },
    NotSatisfying { robot: usize },
    TooFast { robot: usize, speed: f64 },
    Conflict { a: usize, b: usize, t: f64 },
}

/// Checks starts, goals, speed limits and pairwise conflicts.
pub fn verify_solution(inst: &ProblemInstance, sol: &Solution) -> Vec<SolutionDefect> {
    let mut out = Vec::new();
    let mut regions = Vec::new();
    for (i, robot) in inst.robots().iter().enumerate() {
        let Some(tr) = sol.trajectories.iter().find(|(id, _)| *id == robot.id).map(|(_, t)| t.clone()) else {
            out.push(SolutionDefect::Missing { robot: robot.id });
            continue;
        };
        if tr.start_pos().dist(inst.start_point(i)) > 1e-6 || tr.start_time() != 0.0 {
            out.push(SolutionDefect::WrongStart { robot: robot.id });
        }
        if tr.arrival_time(inst.goal_point(i)).is_err() {
            out.push(SolutionDefect::NotSatisfying { robot: robot.id });
        }
        let speed = tr.max_speed();
        if speed > robot.speed + 1e-9 {
            out.push(SolutionDefect::TooFast { robot: robot.id, speed });
        }
        regions.push(AnnouncedRegion { robot: robot.id, radius: robot.radius, trajectory: tr });
    }
    for a in 0..regions.len() {
        for b in a + 1..regions.len() {
            if let Some(t) = first_conflict(&regions[a], &regions[b]) {
                out.push(SolutionDefect::Conflict { a: regions[a].robot, b: regions[b].robot, t });
            }
        }
    }
    out
}

/// Per-robot arrival times in priority order.
pub fn arrival_times(inst: &ProblemInstance, sol: &Solution) -> Result<Vec<f64>, CoreError> {
    inst.robots()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            sol.trajectory_of(r.id)
                .ok_or(CoreError::UnsolvedInstance)?
                .arrival_time(inst.goal_point(i))
        })
        .collect()
}
