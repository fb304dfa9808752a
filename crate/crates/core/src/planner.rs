//! Optimal single-robot trajectory search over roadmap x discretized time.
//!
//! Moves are "wait one step at the current vertex" and "traverse an edge of
//! length `L` in `ceil(L / (v dt))` steps at uniform speed". Every move is
//! checked analytically against every dynamic region; the robot may only
//! stop at the goal if holding there forever is conflict free. The search is
//! A* ordered lexicographically by (arrival time, distance traveled) with the
//! static distance field as heuristic.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::CoreError;
use crate::geometry::{point_avoids_regions, segment_avoids_regions, Disc, RegionSet};
use crate::roadmap::{distance_field, shortest_path, Roadmap};
use crate::trajectory::{earliest_overlap, AnnouncedRegion, Trajectory, Waypoint};

/// Default time step, seconds.
pub const DEFAULT_DT: f64 = 0.5;

/// Number of steps needed to traverse `length` at `speed` with step `dt`.
pub fn edge_steps(length: f64, speed: f64, dt: f64) -> usize {
    (libm::ceil(length / (speed * dt) - 1e-9) as usize).max(1)
}

/// Quantized duration of a vertex path.
pub fn path_steps(rm: &Roadmap, path: &[usize], speed: f64, dt: f64) -> usize {
    path.windows(2)
        .map(|w| edge_steps(rm.vertex(w[0]).dist(rm.vertex(w[1])), speed, dt))
        .sum()
}

/// Single-robot planning request.
#[derive(Debug, Clone)]
pub struct PlanQuery<'a> {
    pub roadmap: &'a Roadmap,
    pub radius: f64,
    pub speed: f64,
    pub start: usize,
    pub goal: usize,
    /// Absolute time at which the robot is at `start`.
    pub start_time: f64,
    /// Regions of robots to avoid while moving.
    pub dynamic: &'a [AnnouncedRegion],
    /// Static regions the body must never overlap.
    pub blocked: &'a RegionSet,
    pub dt: f64,
    /// Horizon in steps after `start_time`; `None` uses [`default_horizon_steps`].
    pub max_steps: Option<usize>,
}

impl<'a> PlanQuery<'a> {
    pub fn new(
        roadmap: &'a Roadmap,
        radius: f64,
        speed: f64,
        start: usize,
        goal: usize,
        dynamic: &'a [AnnouncedRegion],
        blocked: &'a RegionSet,
    ) -> Self {
        Self {
            roadmap,
            radius,
            speed,
            start,
            goal,
            start_time: 0.0,
            dynamic,
            blocked,
            dt: DEFAULT_DT,
            max_steps: None,
        }
    }

    fn validate(&self) -> Result<(), CoreError> {
        let bad = |m: alloc::string::String| Err(CoreError::InvalidQuery(m));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.radius > 0.0) || !(self.speed > 0.0) {
            return bad(format!("radius {} and speed {} must be positive", self.radius, self.speed));
        }
        if !(self.start_time >= 0.0) || !self.start_time.is_finite() {
            return bad(format!("start time {} is invalid", self.start_time));
        }
        let n = self.roadmap.len();
        if self.start >= n || self.goal >= n {
            return bad(format!("start {} / goal {} not in roadmap of {} vertices", self.start, self.goal, n));
        }
        if !point_avoids_regions(self.roadmap.vertex(self.start), self.radius, self.blocked) {
            return bad(format!("start overlaps a blocked region"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: usize,
    pub horizon_steps: usize,
    /// Vertices times time layers of the searched lattice.
    pub lattice: usize,
}

/// Horizon used when the query does not set one: the summed remaining
/// durations of all dynamic regions, plus twice the quantized duration of
/// the static path to the goal (the longer of the path avoiding only
/// `blocked` and the one also avoiding the regions' final positions), plus
/// ten steps. Long enough for "wait until everyone is parked, then go".
/// `None` when no static path exists.
pub fn default_horizon_steps(q: &PlanQuery<'_>) -> Option<usize> {
    let rm = q.roadmap;
    let plain = shortest_path(rm, q.start, q.goal, q.radius, q.blocked).ok()??;
    let mut steps = path_steps(rm, &plain.vertices, q.speed, q.dt);
    let mut parked = q.blocked.clone();
    for d in q.dynamic {
        parked.push(Disc { center: d.trajectory.end_pos(), radius: d.radius });
    }
    if let Ok(Some(p)) = shortest_path(rm, q.start, q.goal, q.radius, &parked) {
        steps = steps.max(path_steps(rm, &p.vertices, q.speed, q.dt));
    }
    let pending: f64 = q
        .dynamic
        .iter()
        .map(|d| (d.trajectory.end_time() - q.start_time).max(0.0))
        .sum();
    let pending_steps = libm::ceil(pending / q.dt - 1e-9).max(0.0) as usize;
    Some(pending_steps + 2 * steps + 10)
}

#[derive(Clone, Copy, PartialEq)]
struct OpenEntry {
    f_time: f64,
    f_dist: f64,
    h_time: f64,
    vertex: usize,
    step: usize,
}

impl Eq for OpenEntry {}

impl Ord for OpenEntry {
    // BinaryHeap is a max-heap; reverse everything for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f_time
            .total_cmp(&self.f_time)
            .then_with(|| other.f_dist.total_cmp(&self.f_dist))
            .then_with(|| other.h_time.total_cmp(&self.h_time))
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.step.cmp(&self.step))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PARENT: u32 = u32::MAX;

/// Minimum-arrival-time (then minimum-distance) trajectory, or `None` if none
/// exists within the horizon.
pub fn best_traj(q: &PlanQuery<'_>) -> Result<Option<Trajectory>, CoreError> {
    best_traj_with_stats(q).map(|(t, _)| t)
}

pub fn best_traj_with_stats(q: &PlanQuery<'_>) -> Result<(Option<Trajectory>, SearchStats), CoreError> {
    q.validate()?;
    let rm = q.roadmap;
    let n = rm.len();
    let mut stats = SearchStats::default();
    // a goal inside a blocked region is a plain failure, not a bad query
    if !point_avoids_regions(rm.vertex(q.goal), q.radius, q.blocked) {
        return Ok((None, stats));
    }
    let h_dist = distance_field(rm, q.goal, q.radius, q.blocked)?;
    if !h_dist[q.start].is_finite() {
        return Ok((None, stats));
    }
    let max_steps = match q.max_steps {
        Some(m) => m,
        None => match default_horizon_steps(q) {
            Some(m) => m,
            None => return Ok((None, stats)),
        },
    };
    stats.horizon_steps = max_steps;

    let vs = rm.vertices();
    let vertex_ok: Vec<bool> = vs.iter().map(|&p| point_avoids_regions(p, q.radius, q.blocked)).collect();
    // per adjacency slot: allowed and step count
    let moves: Vec<Vec<(usize, f64, usize)>> = (0..n)
        .map(|u| {
            rm.neighbors(u)
                .iter()
                .filter(|&&(w, _)| {
                    vertex_ok[w] && h_dist[w].is_finite() && segment_avoids_regions(vs[u], vs[w], q.radius, q.blocked)
                })
                .map(|&(w, len)| (w, len, edge_steps(len, q.speed, q.dt)))
                .collect()
        })
        .collect();

    let time_of = |step: usize| q.start_time + step as f64 * q.dt;
    let motion_free = |a: Waypoint, b: Waypoint| {
        let seg = [a, b];
        q.dynamic.iter().all(|d| {
            earliest_overlap(&seg, q.radius, d.trajectory.waypoints(), d.radius, a.t, b.t).is_none()
        })
    };
    let hold_free = |p: Waypoint| {
        let seg = [p];
        q.dynamic.iter().all(|d| {
            earliest_overlap(&seg, q.radius, d.trajectory.waypoints(), d.radius, p.t, f64::INFINITY).is_none()
        })
    };

    let layers = max_steps + 1;
    let total = n * layers;
    stats.lattice = total;
    // seen[idx] = parent + 1 (0: unseen); distances only meaningful when seen
    let mut parent = vec![0u32; total];
    let mut g_dist = vec![0.0f64; total];
    let mut closed = vec![false; total];
    if total >= NO_PARENT as usize {
        return Err(CoreError::InvalidQuery(format!("search space of {total} nodes is too large")));
    }
    let idx = |v: usize, s: usize| s * n + v;
    let h_time = |v: usize| (h_dist[v] / q.speed - 1e-9).max(0.0);

    let mut open = BinaryHeap::new();
    let root = idx(q.start, 0);
    parent[root] = NO_PARENT;
    open.push(OpenEntry {
        f_time: time_of(0) + h_time(q.start),
        f_dist: h_dist[q.start],
        h_time: h_time(q.start),
        vertex: q.start,
        step: 0,
    });

    while let Some(OpenEntry { vertex: u, step: s, .. }) = open.pop() {
        let ui = idx(u, s);
        if closed[ui] {
            continue;
        }
        closed[ui] = true;
        stats.expansions += 1;
        let here = Waypoint::new(vs[u], time_of(s));
        if u == q.goal && hold_free(here) {
            return Ok((Some(reconstruct(q, &parent, n, ui)), stats));
        }
        let gd = g_dist[ui];
        let mut relax = |w: usize, s2: usize, dist: f64, open: &mut BinaryHeap<OpenEntry>| {
            let wi = idx(w, s2);
            if closed[wi] {
                return;
            }
            let fresh = parent[wi] == 0;
            if fresh || dist < g_dist[wi] {
                parent[wi] = ui as u32 + 1;
                g_dist[wi] = dist;
                open.push(OpenEntry {
                    f_time: time_of(s2) + h_time(w),
                    f_dist: dist + h_dist[w],
                    h_time: h_time(w),
                    vertex: w,
                    step: s2,
                });
            }
        };
        if s < max_steps && motion_free(here, Waypoint::new(vs[u], time_of(s + 1))) {
            relax(u, s + 1, gd, &mut open);
        }
        for &(w, len, k) in &moves[u] {
            let s2 = s + k;
            if s2 > max_steps {
                continue;
            }
            if motion_free(here, Waypoint::new(vs[w], time_of(s2))) {
                relax(w, s2, gd + len, &mut open);
            }
        }
    }
    Ok((None, stats))
}

fn reconstruct(q: &PlanQuery<'_>, parent: &[u32], n: usize, goal_idx: usize) -> Trajectory {
    let mut chain = vec![goal_idx];
    let mut cur = goal_idx;
    while parent[cur] != NO_PARENT {
        cur = parent[cur] as usize - 1;
        chain.push(cur);
    }
    chain.reverse();
    let vs = q.roadmap.vertices();
    let time_of = |step: usize| q.start_time + step as f64 * q.dt;
    let mut wps = vec![Waypoint::new(vs[chain[0] % n], time_of(chain[0] / n))];
    for pair in chain.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (va, sa) = (a % n, a / n);
        let (vb, sb) = (b % n, b / n);
        let k = sb - sa;
        for j in 1..=k {
            let p = vs[va].lerp(vs[vb], j as f64 / k as f64);
            wps.push(Waypoint::new(p, time_of(sa + j)));
        }
    }
    Trajectory::new(wps).expect("lattice times are strictly increasing")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Workspace};
    use crate::roadmap::build_grid_roadmap;
    use alloc::sync::Arc;

    fn hall() -> Roadmap {
        let w = Workspace::empty(6.0, 4.0, 0.1, Point::default()).unwrap();
        build_grid_roadmap(&w, 1.0, 0.4).unwrap()
    }

    #[test]
    fn free_space_follows_static_shortest_path() {
        let rm = hall();
        let s = rm.vertex_at(Point::new(0.5, 0.5)).unwrap();
        let g = rm.vertex_at(Point::new(5.5, 2.5)).unwrap();
        let blocked = RegionSet::new();
        let q = PlanQuery::new(&rm, 0.4, 1.0, s, g, &[], &blocked);
        let tr = best_traj(&q).unwrap().unwrap();
        let field = distance_field(&rm, g, 0.4, &blocked).unwrap();
        let arrival = tr.arrival_time(rm.vertex(g)).unwrap();
        assert!(arrival + 1e-9 >= field[s]);
        assert!(arrival - field[s] <= q.dt + 1e-9 + 2.0 * q.dt, "{arrival} vs {}", field[s]);
        assert!(tr.max_speed() <= 1.0 + 1e-9);
    }

    #[test]
    fn start_equals_goal() {
        let rm = hall();
        let blocked = RegionSet::new();
        let q = PlanQuery::new(&rm, 0.4, 1.0, 3, 3, &[], &blocked);
        let tr = best_traj(&q).unwrap().unwrap();
        assert_eq!(tr.waypoints().len(), 1);
    }

    #[test]
    fn waits_for_crossing_robot() {
        let rm = hall();
        let s = rm.vertex_at(Point::new(0.5, 1.5)).unwrap();
        let g = rm.vertex_at(Point::new(5.5, 1.5)).unwrap();
        // another robot sits in the way until t = 3 and then leaves upward
        let other = Trajectory::new(vec![
            Waypoint::new(Point::new(2.5, 1.5), 0.0),
            Waypoint::new(Point::new(2.5, 1.5), 3.0),
            Waypoint::new(Point::new(2.5, 3.5), 5.0),
        ])
        .unwrap();
        let dynamic = [AnnouncedRegion::new(9, 0.4, Arc::new(other)).unwrap()];
        let blocked = RegionSet::new();
        let q = PlanQuery::new(&rm, 0.4, 1.0, s, g, &dynamic, &blocked);
        let tr = best_traj(&q).unwrap().unwrap();
        assert!(crate::trajectory::first_conflict(
            &AnnouncedRegion::new(1, 0.4, Arc::new(tr.clone())).unwrap(),
            &dynamic[0]
        )
        .is_none());
        assert!(tr.arrival_time(rm.vertex(g)).unwrap() >= 5.0);
    }

    #[test]
    fn rejects_invalid_query() {
        let rm = hall();
        let blocked = RegionSet::new();
        let mut q = PlanQuery::new(&rm, 0.4, 1.0, 0, 1, &[], &blocked);
        q.dt = 0.0;
        assert!(matches!(best_traj(&q), Err(CoreError::InvalidQuery(_))));
        let blocked = RegionSet::from_discs(vec![Disc { center: rm.vertex(0), radius: 0.4 }]);
        let q = PlanQuery::new(&rm, 0.4, 1.0, 0, 1, &[], &blocked);
        assert!(matches!(best_traj(&q), Err(CoreError::InvalidQuery(_))));
    }

    #[test]
    fn edge_quantization() {
        assert_eq!(edge_steps(1.0, 1.0, 0.5), 2);
        assert_eq!(edge_steps(core::f64::consts::SQRT_2, 1.0, 0.5), 3);
        assert_eq!(edge_steps(1.0, 2.0, 0.5), 1);
        assert_eq!(edge_steps(1e-6, 1.0, 0.5), 1);
    }
}
