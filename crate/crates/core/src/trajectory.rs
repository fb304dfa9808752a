//! Space-time trajectories, pairwise conflict detection and the trajectory
//! store each robot keeps about higher-priority robots.
//!
//! Conflict detection is exact: on every interval where both robots move
//! with constant velocity the squared distance is a quadratic in time, and
//! its roots give the first instant the bodies overlap.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::geometry::{Point, EPS_GEOM};

/// Tolerance for "is at the goal".
pub const GOAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub pos: Point,
    pub t: f64,
}

impl Waypoint {
    pub const fn new(pos: Point, t: f64) -> Self {
        Self { pos, t }
    }
}

/// Piecewise-linear trajectory. Before the first waypoint and after the last
/// one the position is held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    waypoints: Vec<Waypoint>,
}

impl Trajectory {
    /// Waypoint times must be finite, non-negative and strictly increasing.
    pub fn new(waypoints: Vec<Waypoint>) -> Result<Self, CoreError> {
        let Some(first) = waypoints.first() else {
            return Err(CoreError::InvalidTrajectory("no waypoints".into()));
        };
        if !(first.t >= 0.0) || !first.t.is_finite() {
            return Err(CoreError::InvalidTrajectory(format!("start time {} is invalid", first.t)));
        }
        for w in waypoints.windows(2) {
            if !(w[1].t > w[0].t) || !w[1].t.is_finite() {
                return Err(CoreError::InvalidTrajectory(format!(
                    "times not strictly increasing at t = {}",
                    w[1].t
                )));
            }
        }
        if waypoints.iter().any(|w| !w.pos.x.is_finite() || !w.pos.y.is_finite()) {
            return Err(CoreError::InvalidTrajectory("non-finite position".into()));
        }
        Ok(Self { waypoints })
    }

    /// A robot standing still at `p` from time `t0` on.
    pub fn stationary(p: Point, t0: f64) -> Self {
        Self {
            waypoints: alloc::vec![Waypoint::new(p, t0)],
        }
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn start_time(&self) -> f64 {
        self.waypoints[0].t
    }

    /// Time of the last waypoint; the position is constant afterwards.
    pub fn end_time(&self) -> f64 {
        self.waypoints[self.waypoints.len() - 1].t
    }

    pub fn start_pos(&self) -> Point {
        self.waypoints[0].pos
    }

    pub fn end_pos(&self) -> Point {
        self.waypoints[self.waypoints.len() - 1].pos
    }

    pub fn position_at(&self, t: f64) -> Point {
        position_in(&self.waypoints, t)
    }

    /// Highest per-segment speed.
    pub fn max_speed(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| w[0].pos.dist(w[1].pos) / (w[1].t - w[0].t))
            .fold(0.0, f64::max)
    }

    /// Earliest waypoint time after which the trajectory stays at `goal`.
    pub fn arrival_time(&self, goal: Point) -> Result<f64, CoreError> {
        if self.end_pos().dist(goal) > GOAL_TOL {
            return Err(CoreError::NotSatisfying);
        }
        let mut k = self.waypoints.len() - 1;
        while k > 0 && self.waypoints[k - 1].pos.dist(goal) <= GOAL_TOL {
            k -= 1;
        }
        Ok(self.waypoints[k].t)
    }

    /// Total distance traveled.
    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].pos.dist(w[1].pos)).sum()
    }

    /// This trajectory up to time `t` (exclusive of anything later), used
    /// when the tail is replaced by a new plan.
    pub fn prefix_until(&self, t: f64) -> Vec<Waypoint> {
        let mut out: Vec<Waypoint> = self.waypoints.iter().copied().take_while(|w| w.t < t).collect();
        if out.is_empty() || out[out.len() - 1].t < t {
            out.push(Waypoint::new(self.position_at(t), t));
        }
        out
    }
}

pub(crate) fn position_in(wps: &[Waypoint], t: f64) -> Point {
    let k = wps.partition_point(|w| w.t <= t);
    if k == 0 {
        wps[0].pos
    } else if k == wps.len() {
        wps[k - 1].pos
    } else {
        let (a, b) = (wps[k - 1], wps[k]);
        a.pos.lerp(b.pos, (t - a.t) / (b.t - a.t))
    }
}

/// Earliest `s` in `[0, dt)` at which `|d0 + v s| < reach`, or `None`.
fn first_overlap_in_interval(d0: Point, v: Point, dt: f64, reach: f64) -> Option<f64> {
    let c = d0.norm_sq() - reach * reach;
    if c < 0.0 {
        return Some(0.0);
    }
    let a = v.norm_sq();
    if a == 0.0 {
        return None;
    }
    let b = d0.dot(v);
    if b >= 0.0 {
        // moving apart (or tangentially) from a non-overlapping state
        return None;
    }
    let disc = b * b - a * c;
    if disc <= 0.0 {
        return None;
    }
    let s1 = (-b - libm::sqrt(disc)) / a;
    (s1 < dt).then_some(s1.max(0.0))
}

/// Earliest time in `[lo, hi]` at which the two bodies overlap. `hi` may be
/// infinite; both motions are constant after their last waypoint, so the
/// sweep stops at the later of the two end times.
pub(crate) fn earliest_overlap(a: &[Waypoint], ra: f64, b: &[Waypoint], rb: f64, lo: f64, hi: f64) -> Option<f64> {
    if hi < lo {
        return None;
    }
    let reach = ra + rb - EPS_GEOM;
    let end = a[a.len() - 1].t.max(b[b.len() - 1].t);
    let hi = if hi > end { end.max(lo) } else { hi };
    let mut ia = a.partition_point(|w| w.t <= lo);
    let mut ib = b.partition_point(|w| w.t <= lo);
    let mut t0 = lo;
    let mut pa0 = position_in(a, lo);
    let mut pb0 = position_in(b, lo);
    if t0 >= hi {
        return ((pa0 - pb0).norm_sq() < reach * reach).then_some(lo);
    }
    while t0 < hi {
        let mut t1 = hi;
        if ia < a.len() {
            t1 = t1.min(a[ia].t);
        }
        if ib < b.len() {
            t1 = t1.min(b[ib].t);
        }
        let pa1 = if ia < a.len() && a[ia].t == t1 {
            ia += 1;
            a[ia - 1].pos
        } else {
            position_in(a, t1)
        };
        let pb1 = if ib < b.len() && b[ib].t == t1 {
            ib += 1;
            b[ib - 1].pos
        } else {
            position_in(b, t1)
        };
        let dt = t1 - t0;
        if dt > 0.0 {
            let d0 = pa0 - pb0;
            let v = ((pa1 - pa0) - (pb1 - pb0)) * (1.0 / dt);
            if let Some(s) = first_overlap_in_interval(d0, v, dt, reach) {
                return Some(t0 + s);
            }
        }
        t0 = t1;
        pa0 = pa1;
        pb0 = pb1;
    }
    // the final static configuration, held forever
    ((pa0 - pb0).norm_sq() < reach * reach).then_some(t0)
}

/// A robot's announced occupancy of space-time: its body radius moving along
/// a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnouncedRegion {
    pub robot: usize,
    pub radius: f64,
    pub trajectory: Arc<Trajectory>,
}

impl AnnouncedRegion {
    pub fn new(robot: usize, radius: f64, trajectory: Arc<Trajectory>) -> Result<Self, CoreError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(CoreError::InvalidRadius(radius));
        }
        Ok(Self { robot, radius, trajectory })
    }
}

/// Earliest time the two bodies overlap, considering times where both
/// trajectories are defined (from the later start time on, forever).
pub fn first_conflict(a: &AnnouncedRegion, b: &AnnouncedRegion) -> Option<f64> {
    first_conflict_from(&a.trajectory, a.radius, &b.trajectory, b.radius, 0.0)
}

/// As [`first_conflict`], ignoring everything before `from`.
pub fn first_conflict_from(a: &Trajectory, ra: f64, b: &Trajectory, rb: f64, from: f64) -> Option<f64> {
    let lo = a.start_time().max(b.start_time()).max(from);
    earliest_overlap(&a.waypoints, ra, &b.waypoints, rb, lo, f64::INFINITY)
}

/// Per-robot view of the latest announced regions of higher-priority robots,
/// at most one per robot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryStore {
    entries: BTreeMap<usize, AnnouncedRegion>,
}

impl TrajectoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any previous entry of the same robot. Returns the old one.
    pub fn insert(&mut self, region: AnnouncedRegion) -> Option<AnnouncedRegion> {
        self.entries.insert(region.robot, region)
    }

    pub fn remove(&mut self, robot: usize) -> Option<AnnouncedRegion> {
        self.entries.remove(&robot)
    }

    pub fn get(&self, robot: usize) -> Option<&AnnouncedRegion> {
        self.entries.get(&robot)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn regions(&self) -> impl Iterator<Item = &AnnouncedRegion> {
        self.entries.values()
    }

    /// Latest end time over all stored trajectories (0 when empty).
    pub fn latest_end(&self) -> f64 {
        self.regions().map(|r| r.trajectory.end_time()).fold(0.0, f64::max)
    }

    /// Sum of stored trajectory end times.
    pub fn sum_of_ends(&self) -> f64 {
        self.regions().map(|r| r.trajectory.end_time()).sum()
    }
}

/// True iff a body of radius `r` following `tr` never overlaps any stored
/// region.
pub fn consistent(tr: &Trajectory, r: f64, store: &TrajectoryStore) -> bool {
    consistent_from(tr, r, store, 0.0)
}

/// As [`consistent`], only considering times from `from` on.
pub fn consistent_from(tr: &Trajectory, r: f64, store: &TrajectoryStore, from: f64) -> bool {
    store
        .regions()
        .all(|e| first_conflict_from(tr, r, &e.trajectory, e.radius, from).is_none())
}
