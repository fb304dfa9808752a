//! Independent reference checks used by several test targets. Nothing here
//! calls into the library's own conflict or search code.
#![allow(dead_code)]

use prioplan_core::geometry::Point;
use prioplan_core::trajectory::{Trajectory, Waypoint};

/// Position at `t`, holding the end points outside the time span.
pub fn pos(w: &[Waypoint], t: f64) -> Point {
    if t <= w[0].t {
        return w[0].pos;
    }
    for s in w.windows(2) {
        if t <= s[1].t {
            let u = (t - s[0].t) / (s[1].t - s[0].t);
            return Point::new(s[0].pos.x + u * (s[1].pos.x - s[0].pos.x), s[0].pos.y + u * (s[1].pos.y - s[0].pos.y));
        }
    }
    w[w.len() - 1].pos
}

/// Smallest centre distance over `[lo, hi]`, solved per linear piece.
pub fn closest_approach(a: &[Waypoint], b: &[Waypoint], lo: f64, hi: f64) -> f64 {
    let mut ts: Vec<f64> = a.iter().chain(b).map(|w| w.t).filter(|&t| t > lo && t < hi).collect();
    ts.push(lo);
    ts.push(hi);
    ts.sort_by(f64::total_cmp);
    let mut best = f64::INFINITY;
    for k in 0..ts.len() {
        let t0 = ts[k];
        let d0 = pos(a, t0) - pos(b, t0);
        best = best.min(d0.norm());
        if k + 1 == ts.len() || ts[k + 1] <= t0 {
            continue;
        }
        let t1 = ts[k + 1];
        let d1 = pos(a, t1) - pos(b, t1);
        let v = d1 - d0;
        let vv = v.dot(v);
        if vv > 0.0 {
            let u = (-d0.dot(v) / vv).clamp(0.0, 1.0);
            best = best.min(Point::new(d0.x + u * v.x, d0.y + u * v.y).norm());
        }
    }
    best
}

/// First sampled time in `[lo, hi]` at which the bodies overlap.
pub fn sampled_conflict(a: &[Waypoint], ra: f64, b: &[Waypoint], rb: f64, lo: f64, hi: f64, step: f64) -> Option<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n)
        .map(|k| (lo + k as f64 * step).min(hi))
        .find(|&t| pos(a, t).dist(pos(b, t)) < ra + rb - 1e-9)
}

/// Dense check of every pair over the union of their time spans and a tail
/// after everyone has stopped.
pub fn dense_violations(items: &[(f64, &Trajectory)], step: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (a, b) = (items[i].1.waypoints(), items[j].1.waypoints());
            let lo = a[0].t.max(b[0].t);
            let hi = a[a.len() - 1].t.max(b[b.len() - 1].t) + 1.0;
            if let Some(t) = sampled_conflict(a, items[i].0, b, items[j].0, lo, hi, step) {
                out.push((i, j, t));
            }
        }
    }
    out
}

/// Exhaustive earliest arrival step on the roadmap x time-step lattice:
/// every state (vertex, step) reachable by waiting or traversing edges is
/// enumerated layer by layer. A goal state counts only if holding the goal
/// forever is collision-free.
pub fn brute_force_arrival(
    rm: &prioplan_core::roadmap::Roadmap,
    start: usize,
    goal: usize,
    r: f64,
    speed: f64,
    dt: f64,
    max_steps: usize,
    others: &[(f64, &Trajectory)],
) -> Option<usize> {
    let n = rm.len();
    let free = |a: Waypoint, b: Waypoint| {
        others.iter().all(|(ro, o)| closest_approach(&[a, b], o.waypoints(), a.t, b.t) >= r + ro - 1e-9)
    };
    let holds = |v: usize, t: f64| {
        others.iter().all(|(ro, o)| {
            let w = o.waypoints();
            let hold = [Waypoint::new(rm.vertex(v), t)];
            closest_approach(&hold, w, t, w[w.len() - 1].t.max(t)) >= r + ro - 1e-9
        })
    };
    let mut reach = vec![vec![false; n]; max_steps + 1];
    reach[0][start] = true;
    for s in 0..=max_steps {
        for v in 0..n {
            if !reach[s][v] {
                continue;
            }
            let t = s as f64 * dt;
            let here = Waypoint::new(rm.vertex(v), t);
            if v == goal && holds(v, t) {
                return Some(s);
            }
            if s < max_steps && free(here, Waypoint::new(rm.vertex(v), t + dt)) {
                reach[s + 1][v] = true;
            }
            for &(w, len) in rm.neighbors(v) {
                let k = ((len / (speed * dt) - 1e-9).ceil() as usize).max(1);
                if s + k <= max_steps && free(here, Waypoint::new(rm.vertex(w), (s + k) as f64 * dt)) {
                    reach[s + k][w] = true;
                }
            }
        }
    }
    None
}
