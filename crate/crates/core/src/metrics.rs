//! Solution quality and benchmark aggregation.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::CoreError;
use crate::planner::edge_steps;
use crate::prioritized::{arrival_times, Solution, Solver};
use crate::problem::ProblemInstance;

/// Duration of robot `i`'s shortest roadmap route ignoring all other robots,
/// quantized to whole steps of `dt` like the planners' motions.
pub fn static_duration(inst: &ProblemInstance, i: usize, dt: f64) -> Option<f64> {
    let rm = inst.roadmap();
    let r = inst.robots()[i];
    let mut best = alloc::vec![usize::MAX; rm.len()];
    let mut heap = BinaryHeap::new();
    best[r.start] = 0;
    heap.push(Reverse((0usize, r.start)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if v == r.goal {
            return Some(d as f64 * dt);
        }
        if d > best[v] {
            continue;
        }
        for &(u, len) in rm.neighbors(v) {
            let nd = d + edge_steps(len, r.speed, dt);
            if nd < best[u] {
                best[u] = nd;
                heap.push(Reverse((nd, u)));
            }
        }
    }
    None
}

/// Normalized excess of summed arrival times over the summed ignore-others
/// durations.
pub fn prolongation(sol: &Solution, inst: &ProblemInstance, dt: f64) -> Result<f64, CoreError> {
    let arrivals = arrival_times(inst, sol)?;
    let reference = (0..inst.robots().len())
        .map(|i| static_duration(inst, i, dt).ok_or(CoreError::UnsolvedInstance))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(prolongation_from_times(&arrivals, &reference))
}

pub fn prolongation_from_times(arrivals: &[f64], reference: &[f64]) -> f64 {
    let excess: f64 = arrivals.iter().zip(reference).map(|(a, r)| a - r).sum();
    let base: f64 = reference.iter().sum();
    if base == 0.0 {
        return 0.0;
    }
    excess / base
}

pub fn speedup(central: f64, decentral: f64) -> Result<f64, CoreError> {
    if !(central > 0.0) || !(decentral > 0.0) {
        return Err(CoreError::NonpositiveRuntime { central, decentral });
    }
    Ok(central / decentral)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(k)`; zero for a single sample.
    pub se: f64,
    pub k: usize,
}

pub fn mean_se(xs: &[f64]) -> Option<MeanSe> {
    let k = xs.len();
    if k == 0 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    let se = if k == 1 {
        0.0
    } else {
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1) as f64;
        libm::sqrt(var) / libm::sqrt(k as f64)
    };
    Some(MeanSe { mean, se, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Solved,
    Unsolved,
    Timeout,
}

/// One algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub solver: Solver,
    pub instance: usize,
    pub status: RunStatus,
    /// Seconds; charged cost for centralized solvers, virtual
    /// time-to-solution for decentralized ones.
    pub runtime: f64,
    pub messages: Option<usize>,
    pub prolongation: Option<f64>,
    pub sum_arrival: Option<f64>,
    pub speedup: Option<f64>,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.status == RunStatus::Solved
    }
}

/// Fills `speedup` of solved decentralized records from the solved record of
/// their centralized counterpart on the same instance.
pub fn attach_speedups(records: &mut [RunRecord]) {
    let central: BTreeMap<(Solver, usize), f64> = records
        .iter()
        .filter(|r| r.solved() && !r.solver.is_decentralized())
        .map(|r| ((r.solver, r.instance), r.runtime))
        .collect();
    for r in records.iter_mut() {
        if !r.solver.is_decentralized() || !r.solved() {
            continue;
        }
        r.speedup = central
            .get(&(r.solver.centralized(), r.instance))
            .and_then(|&c| speedup(c, r.runtime).ok());
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Coverage {
    pub solved: usize,
    pub unsolved: usize,
    pub timeout: usize,
}

impl Coverage {
    pub fn total(&self) -> usize {
        self.solved + self.unsolved + self.timeout
    }

    pub fn fraction(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        self.solved as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSummary {
    pub solver: Solver,
    pub coverage: Coverage,
    pub runtime: Option<MeanSe>,
    pub speedup: Option<MeanSe>,
    pub messages: Option<MeanSe>,
    pub prolongation: Option<MeanSe>,
}

/// Instances solved by every solver that appears in `records`.
pub fn common_solved(records: &[RunRecord]) -> BTreeSet<usize> {
    let solvers: BTreeSet<Solver> = records.iter().map(|r| r.solver).collect();
    let instances: BTreeSet<usize> = records.iter().map(|r| r.instance).collect();
    instances
        .into_iter()
        .filter(|&i| {
            solvers
                .iter()
                .all(|&s| records.iter().any(|r| r.solver == s && r.instance == i && r.solved()))
        })
        .collect()
}

/// Per-solver coverage over all records and metric means over the
/// common-solved subset. Input order does not matter.
pub fn summarize(records: &[RunRecord]) -> Vec<AlgoSummary> {
    let common = common_solved(records);
    let solvers: BTreeSet<Solver> = records.iter().map(|r| r.solver).collect();
    solvers
        .into_iter()
        .map(|s| {
            let mut mine: Vec<&RunRecord> = records.iter().filter(|r| r.solver == s).collect();
            mine.sort_by_key(|r| r.instance);
            let mut coverage = Coverage::default();
            for r in &mine {
                match r.status {
                    RunStatus::Solved => coverage.solved += 1,
                    RunStatus::Unsolved => coverage.unsolved += 1,
                    RunStatus::Timeout => coverage.timeout += 1,
                }
            }
            let pick = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Option<MeanSe> {
                let xs: Vec<f64> = mine
                    .iter()
                    .filter(|r| r.solved() && common.contains(&r.instance))
                    .filter_map(|r| f(r))
                    .collect();
                mean_se(&xs)
            };
            AlgoSummary {
                solver: s,
                coverage,
                runtime: pick(&|r| Some(r.runtime)),
                speedup: pick(&|r| r.speedup),
                messages: pick(&|r| r.messages.map(|m| m as f64)),
                prolongation: pick(&|r| r.prolongation),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_cases() {
        assert_eq!(prolongation_from_times(&[6.0, 4.0], &[4.0, 4.0]), 0.25);
        assert_eq!(prolongation_from_times(&[3.0], &[3.0]), 0.0);
        assert_eq!(speedup(10.0, 5.0).unwrap(), 2.0);
        assert_eq!(speedup(4.0, 4.0).unwrap(), 1.0);
        assert_eq!(speedup(4.0, 8.0).unwrap(), 0.5);
        assert!(speedup(0.0, 1.0).is_err());
    }

    #[test]
    fn standard_error() {
        let m = mean_se(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        let sd = libm::sqrt(5.0 / 3.0);
        assert!((m.se - sd / 2.0).abs() < 1e-12);
        assert_eq!(mean_se(&[7.0]).unwrap().se, 0.0);
        assert!(mean_se(&[]).is_none());
    }

    fn rec(solver: Solver, instance: usize, status: RunStatus, runtime: f64) -> RunRecord {
        RunRecord {
            solver,
            instance,
            status,
            runtime,
            messages: None,
            prolongation: Some(instance as f64),
            sum_arrival: None,
            speedup: None,
        }
    }

    #[test]
    fn summary_uses_common_subset() {
        let mut rs = alloc::vec![
            rec(Solver::Pp, 0, RunStatus::Solved, 2.0),
            rec(Solver::Pp, 1, RunStatus::Solved, 2.0),
            rec(Solver::AdPp, 0, RunStatus::Solved, 1.0),
            rec(Solver::AdPp, 1, RunStatus::Timeout, 9.0),
        ];
        attach_speedups(&mut rs);
        assert_eq!(rs[2].speedup, Some(2.0));
        let sum = summarize(&rs);
        let pp = sum.iter().find(|s| s.solver == Solver::Pp).unwrap();
        assert_eq!(pp.coverage, Coverage { solved: 2, unsolved: 0, timeout: 0 });
        assert_eq!(pp.prolongation.unwrap().k, 1);
        let ad = sum.iter().find(|s| s.solver == Solver::AdPp).unwrap();
        assert_eq!(ad.coverage.total(), 2);
        assert_eq!(ad.speedup.unwrap().mean, 2.0);
    }
}
