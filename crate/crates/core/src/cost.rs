//! Compute-time accounting. Planners and the simulator never read a clock
//! directly; they ask a [`CostModel`] how long a piece of work took.

use alloc::collections::BTreeMap;

/// Kind and size of the work done by one `Find-consistent` call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Work {
    /// Only a consistency check, against `regions` stored trajectories.
    Check { regions: usize },
    /// A full trajectory search over a lattice of `lattice` states that
    /// expanded `expansions` of them while avoiding `regions` announced
    /// trajectories.
    Plan { expansions: usize, regions: usize, lattice: usize },
}

pub trait CostModel {
    /// Runs `task` on behalf of robot `robot` (its id) and returns the result
    /// together with the compute time charged for it, in seconds.
    fn charge<R>(&mut self, robot: usize, task: impl FnOnce() -> (R, Work)) -> (R, f64);
}

/// Size-dependent part of a synthetic cost, in seconds per unit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Effort {
    /// Per expanded search state.
    pub per_expansion: f64,
    /// Per expanded state and avoided trajectory (the conflict checks).
    pub per_expansion_region: f64,
    /// Per lattice state (allocation and initialization).
    pub per_lattice: f64,
    /// Per trajectory compared against in a consistency check.
    pub per_region: f64,
}

impl Effort {
    fn plan(&self, expansions: usize, regions: usize, lattice: usize) -> f64 {
        self.per_expansion * expansions as f64
            + self.per_expansion_region * (expansions * regions) as f64
            + self.per_lattice * lattice as f64
    }
}

/// Deterministic costs, so that simulated runtimes are reproducible.
/// A call is charged its per-robot base cost plus the [`Effort`] terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCosts {
    pub default_plan: f64,
    pub default_check: f64,
    pub plan: BTreeMap<usize, f64>,
    pub check: BTreeMap<usize, f64>,
    pub effort: Effort,
}

impl SyntheticCosts {
    pub fn uniform(plan: f64, check: f64) -> Self {
        Self {
            default_plan: plan,
            default_check: check,
            plan: BTreeMap::new(),
            check: BTreeMap::new(),
            effort: Effort::default(),
        }
    }

    /// Every piece of work is free; all computation happens at time zero.
    pub fn zero() -> Self {
        Self::uniform(0.0, 0.0)
    }

    pub fn with_plan(mut self, robot: usize, cost: f64) -> Self {
        self.plan.insert(robot, cost);
        self
    }

    pub fn with_check(mut self, robot: usize, cost: f64) -> Self {
        self.check.insert(robot, cost);
        self
    }

    /// Least-squares fit of measured release-build compute times of the
    /// planners here (desktop x86-64), so that simulated runtimes keep the
    /// relative cost of cheap checks, short searches and long searches.
    pub fn calibrated() -> Self {
        Self::uniform(2.4e-4, 3.2e-7).with_effort(Effort {
            per_expansion: 7.8e-7,
            per_expansion_region: 6.7e-7,
            per_lattice: 1.6e-9,
            per_region: 7.2e-7,
        })
    }

    pub fn with_effort(mut self, effort: Effort) -> Self {
        self.effort = effort;
        self
    }

    pub fn cost_of(&self, robot: usize, work: Work) -> f64 {
        match work {
            Work::Plan { expansions, regions, lattice } => {
                self.plan.get(&robot).copied().unwrap_or(self.default_plan) + self.effort.plan(expansions, regions, lattice)
            }
            Work::Check { regions } => {
                self.check.get(&robot).copied().unwrap_or(self.default_check) + self.effort.per_region * regions as f64
            }
        }
    }
}

impl CostModel for SyntheticCosts {
    fn charge<R>(&mut self, robot: usize, task: impl FnOnce() -> (R, Work)) -> (R, f64) {
        let (r, work) = task();
        (r, self.cost_of(robot, work))
    }
}

impl<C: CostModel + ?Sized> CostModel for &mut C {
    fn charge<R>(&mut self, robot: usize, task: impl FnOnce() -> (R, Work)) -> (R, f64) {
        (**self).charge(robot, task)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_overrides_defaults() {
        let mut c = SyntheticCosts::uniform(1.0, 0.1).with_plan(2, 5.0);
        assert_eq!(c.charge(2, || ((), Work::Plan { expansions: 40, regions: 2, lattice: 100 })).1, 5.0);
        assert_eq!(c.charge(1, || ((), Work::Plan { expansions: 0, regions: 2, lattice: 100 })).1, 1.0);
        assert_eq!(c.charge(2, || ((), Work::Check { regions: 3 })).1, 0.1);
    }

    #[test]
    fn effort_terms_add_to_base() {
        let c = SyntheticCosts::uniform(1.0, 0.1).with_effort(Effort {
            per_expansion: 0.5,
            per_expansion_region: 0.25,
            per_lattice: 0.125,
            per_region: 0.25,
        });
        assert_eq!(c.cost_of(0, Work::Plan { expansions: 4, regions: 2, lattice: 8 }), 6.0);
        assert_eq!(c.cost_of(0, Work::Check { regions: 2 }), 0.6);
    }
}
