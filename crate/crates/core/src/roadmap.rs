//! Roadmap graph, static shortest paths, valid-infrastructure validation and
//! the sufficient solvability check for revised prioritized planning.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::CoreError;
use crate::geometry::{point_avoids_regions, segment_avoids_regions, Disc, Point, RegionSet, Workspace};
use crate::problem::ProblemInstance;

/// Tolerance used when matching coordinates to roadmap vertices.
pub const VERTEX_SNAP_TOL: f64 = 1e-6;

/// Undirected graph over workspace points with Euclidean edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    vertices: Vec<Point>,
    adjacency: Vec<Vec<(usize, f64)>>,
    clearance: f64,
}

/// Sequence of roadmap vertices with its total length.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl Roadmap {
    /// Builds a roadmap from explicit vertices and undirected edges.
    /// `clearance` is the largest body radius the edges are declared
    /// admissible for. Duplicate edges and self loops are dropped.
    pub fn from_edges(vertices: Vec<Point>, edges: &[(usize, usize)], clearance: f64) -> Result<Self, CoreError> {
        if vertices.is_empty() {
            return Err(CoreError::EmptyRoadmap);
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertices.len() {
                    return Err(CoreError::InvalidVertex(v));
                }
            }
            if a == b || adjacency[a].iter().any(|&(n, _)| n == b) {
                continue;
            }
            let len = vertices[a].dist(vertices[b]);
            adjacency[a].push((b, len));
            adjacency[b].push((a, len));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(n, _)| n);
        }
        Ok(Self {
            vertices,
            adjacency,
            clearance,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Neighbors of `v` with edge lengths, sorted by neighbor index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    /// Each undirected edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            for &(b, _) in list {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, l)| l)
    }

    /// Vertex within `VERTEX_SNAP_TOL` of `p`.
    pub fn vertex_at(&self, p: Point) -> Option<usize> {
        self.vertices.iter().position(|v| v.dist(p) <= VERTEX_SNAP_TOL)
    }

    /// Closest vertex to `p`; ties go to the lower index.
    pub fn nearest_vertex(&self, p: Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = v.dist(p);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Connected component label per vertex (labels are 0..k in order of
    /// first appearance).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        for s in 0..self.len() {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adjacency[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().iter().copied().max().map_or(0, |m| m + 1)
    }

    fn check_vertex(&self, v: usize) -> Result<(), CoreError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(CoreError::InvalidVertex(v))
        }
    }
}

/// Grid-sampled roadmap: vertices at `origin + spacing * (k + 1/2)` wherever a
/// body of radius `r_max` fits, 8-connected edges kept when the swept body is
/// free.
pub fn build_grid_roadmap(w: &Workspace, spacing: f64, r_max: f64) -> Result<Roadmap, CoreError> {
    if !(spacing > 0.0) {
        return Err(CoreError::InvalidConfig(alloc::format!("spacing must be positive, got {spacing}")));
    }
    if !(r_max > 0.0) {
        return Err(CoreError::InvalidRadius(r_max));
    }
    let extent = w.max_corner() - w.origin();
    let nx = libm::floor(extent.x / spacing + 1e-9) as usize;
    let ny = libm::floor(extent.y / spacing + 1e-9) as usize;
    let mut index = vec![usize::MAX; nx * ny];
    let mut vertices = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let p = w.origin() + Point::new((i as f64 + 0.5) * spacing, (j as f64 + 0.5) * spacing);
            if w.disc_free(p, r_max) {
                index[j * nx + i] = vertices.len();
                vertices.push(p);
            }
        }
    }
    if vertices.is_empty() {
        return Err(CoreError::EmptyRoadmap);
    }
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let a = index[j * nx + i];
            if a == usize::MAX {
                continue;
            }
            // forward half of the 8-neighborhood; the other half is symmetric
            for (di, dj) in [(1i64, 0i64), (-1, 1), (0, 1), (1, 1)] {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 0 || nj < 0 || ni >= nx as i64 || nj >= ny as i64 {
                    continue;
                }
                let b = index[nj as usize * nx + ni as usize];
                if b != usize::MAX && w.swept_disc_free(vertices[a], vertices[b], r_max) {
                    edges.push((a, b));
                }
            }
        }
    }
    Roadmap::from_edges(vertices, &edges, r_max)
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    cost: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // min-heap on (cost, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const COST_TIE: f64 = 1e-12;

/// Dijkstra over the vertices/edges admitted by the two predicates. Among
/// equal-cost predecessors the lower vertex index wins.
pub(crate) fn dijkstra(
    rm: &Roadmap,
    source: usize,
    vertex_ok: &dyn Fn(usize) -> bool,
    edge_ok: &dyn Fn(usize, usize) -> bool,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = rm.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    if !vertex_ok(source) {
        return (dist, pred);
    }
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { cost: 0.0, vertex: source });
    while let Some(HeapEntry { cost, vertex: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(w, len) in rm.neighbors(u) {
            if done[w] || !vertex_ok(w) || !edge_ok(u, w) {
                continue;
            }
            let cand = cost + len;
            let better = cand < dist[w] - COST_TIE
                || (cand <= dist[w] + COST_TIE && pred[w].is_some_and(|p| u < p));
            if better {
                if cand < dist[w] {
                    dist[w] = cand;
                }
                pred[w] = Some(u);
                heap.push(HeapEntry { cost: dist[w], vertex: w });
            }
        }
    }
    (dist, pred)
}

fn reconstruct(pred: &[Option<usize>], dist: &[f64], from: usize, to: usize) -> Option<Path> {
    if !dist[to].is_finite() {
        return None;
    }
    let mut vertices = vec![to];
    let mut cur = to;
    while cur != from {
        cur = pred[cur]?;
        vertices.push(cur);
    }
    vertices.reverse();
    Some(Path {
        vertices,
        length: dist[to],
    })
}

/// Minimum-length path from `from` to `to` for a body of radius `r` that
/// never overlaps `blocked`, checked at every vertex and along every
/// traversed edge.
pub fn shortest_path(rm: &Roadmap, from: usize, to: usize, r: f64, blocked: &RegionSet) -> Result<Option<Path>, CoreError> {
    rm.check_vertex(from)?;
    rm.check_vertex(to)?;
    let vs = rm.vertices();
    let vertex_ok = |v: usize| point_avoids_regions(vs[v], r, blocked);
    let edge_ok = |a: usize, b: usize| segment_avoids_regions(vs[a], vs[b], r, blocked);
    let (dist, pred) = dijkstra(rm, from, &vertex_ok, &edge_ok);
    Ok(reconstruct(&pred, &dist, from, to))
}

/// Exact static distance from every vertex to `goal` under the same
/// admissibility rules as [`shortest_path`]; `f64::INFINITY` when
/// unreachable.
pub fn distance_field(rm: &Roadmap, goal: usize, r: f64, blocked: &RegionSet) -> Result<Vec<f64>, CoreError> {
    rm.check_vertex(goal)?;
    let vs = rm.vertices();
    let vertex_ok = |v: usize| point_avoids_regions(vs[v], r, blocked);
    let edge_ok = |a: usize, b: usize| segment_avoids_regions(vs[a], vs[b], r, blocked);
    Ok(dijkstra(rm, goal, &vertex_ok, &edge_ok).0)
}

/// Result of [`validate_infrastructure`]. `failing_pairs` holds endpoint
/// indices `(a, b)` with `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfrastructureReport {
    pub valid: bool,
    pub failing_pairs: Vec<(usize, usize)>,
    pub endpoint_count: usize,
}

/// Checks that every pair of endpoints is connected through vertices and
/// edges with `r` clearance to obstacles and `2r` clearance to every other
/// endpoint.
pub fn validate_infrastructure(
    w: &Workspace,
    rm: &Roadmap,
    endpoints: &[Point],
    r: f64,
) -> Result<InfrastructureReport, CoreError> {
    if !(r > 0.0) {
        return Err(CoreError::InvalidRadius(r));
    }
    let ids = endpoints
        .iter()
        .map(|&p| rm.vertex_at(p).ok_or(CoreError::EndpointNotOnRoadmap { x: p.x, y: p.y }))
        .collect::<Result<Vec<_>, _>>()?;
    let vs = rm.vertices();
    let vertex_clear: Vec<bool> = vs.iter().map(|&p| w.disc_free(p, r)).collect();
    let edge_clear: Vec<Vec<bool>> = (0..rm.len())
        .map(|a| {
            rm.neighbors(a)
                .iter()
                .map(|&(b, _)| w.swept_disc_free(vs[a], vs[b], r))
                .collect()
        })
        .collect();
    let mut failing_pairs = Vec::new();
    for a in 0..ids.len() {
        for b in a + 1..ids.len() {
            let others = RegionSet::from_discs(
                ids.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != a && k != b)
                    .map(|(_, &v)| Disc { center: vs[v], radius: r })
                    .collect(),
            );
            let vertex_ok = |v: usize| vertex_clear[v] && point_avoids_regions(vs[v], r, &others);
            let edge_ok = |u: usize, v: usize| {
                let k = rm.neighbors(u).iter().position(|&(n, _)| n == v);
                k.is_some_and(|k| edge_clear[u][k]) && segment_avoids_regions(vs[u], vs[v], r, &others)
            };
            let (dist, _) = dijkstra(rm, ids[a], &vertex_ok, &edge_ok);
            if !dist[ids[b]].is_finite() {
                failing_pairs.push((a, b));
            }
        }
    }
    Ok(InfrastructureReport {
        valid: failing_pairs.is_empty(),
        failing_pairs,
        endpoint_count: endpoints.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotSolvability {
    pub robot: usize,
    pub has_path: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvabilityReport {
    pub per_robot: Vec<RobotSolvability>,
    pub solvable: bool,
}

/// Start bodies of robots after position `i` and goal bodies of robots before
/// it, i.e. the regions robot `i` must avoid on its fallback path.
pub fn start_goal_exclusions(inst: &ProblemInstance, i: usize) -> RegionSet {
    let rm = inst.roadmap();
    let mut set = RegionSet::new();
    for (j, robot) in inst.robots().iter().enumerate() {
        if j > i {
            set.push(Disc { center: rm.vertex(robot.start), radius: robot.radius });
        } else if j < i {
            set.push(Disc { center: rm.vertex(robot.goal), radius: robot.radius });
        }
    }
    set
}

/// For every robot, whether a static path exists that avoids the start
/// bodies of all lower-priority robots and the goal bodies of all
/// higher-priority robots. If all exist, revised prioritized planning with a
/// complete single-robot planner cannot fail.
pub fn check_rpp_solvable(inst: &ProblemInstance) -> Result<SolvabilityReport, CoreError> {
    inst.ensure_valid()?;
    let mut per_robot = Vec::with_capacity(inst.robots().len());
    for (i, robot) in inst.robots().iter().enumerate() {
        let blocked = start_goal_exclusions(inst, i);
        let has_path = shortest_path(inst.roadmap(), robot.start, robot.goal, robot.radius, &blocked)?.is_some();
        per_robot.push(RobotSolvability { robot: robot.id, has_path });
    }
    let solvable = per_robot.iter().all(|r| r.has_path);
    Ok(SolvabilityReport { per_robot, solvable })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_roadmap() -> (Workspace, Roadmap) {
        let w = Workspace::empty(10.0, 10.0, 0.1, Point::default()).unwrap();
        let rm = build_grid_roadmap(&w, 1.0, 0.4).unwrap();
        (w, rm)
    }

    #[test]
    fn grid_roadmap_on_empty_hall() {
        let (_, rm) = open_roadmap();
        assert_eq!(rm.len(), 100);
        assert_eq!(rm.component_count(), 1);
        assert!((0..rm.len()).all(|v| rm.degree(v) <= 8));
        assert_eq!(rm.degree(rm.vertex_at(Point::new(4.5, 4.5)).unwrap()), 8);
        for (a, b) in rm.edges() {
            assert!((rm.edge_length(a, b).unwrap() - rm.vertex(a).dist(rm.vertex(b))).abs() < 1e-9);
            assert_eq!(rm.edge_length(a, b), rm.edge_length(b, a));
        }
    }

    #[test]
    fn fully_occupied_grid_has_no_roadmap() {
        let w = Workspace::new(vec![true; 100], 10, 10, 1.0, Point::default()).unwrap();
        assert_eq!(build_grid_roadmap(&w, 1.0, 0.4), Err(CoreError::EmptyRoadmap));
    }

    #[test]
    fn wall_splits_roadmap_in_two() {
        let rows = ["....#.....", "....#.....", "....#.....", "....#....."];
        let w = Workspace::from_ascii(&rows, 1.0, 10).unwrap();
        let rm = build_grid_roadmap(&w, 1.0, 0.4).unwrap();
        assert_eq!(rm.component_count(), 2);
    }

    #[test]
    fn trivial_path() {
        let (_, rm) = open_roadmap();
        let p = shortest_path(&rm, 7, 7, 0.4, &RegionSet::new()).unwrap().unwrap();
        assert_eq!(p.vertices, vec![7]);
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn corridor_sealed_by_blocked_disc() {
        let verts: Vec<Point> = (0..6).map(|k| Point::new(k as f64, 0.0)).collect();
        let edges: Vec<(usize, usize)> = (0..5).map(|k| (k, k + 1)).collect();
        let rm = Roadmap::from_edges(verts, &edges, 0.4).unwrap();
        let blocked = RegionSet::from_discs(vec![Disc::new(Point::new(3.0, 0.0), 0.4).unwrap()]);
        assert_eq!(shortest_path(&rm, 0, 5, 0.4, &blocked).unwrap(), None);
        assert!(shortest_path(&rm, 0, 2, 0.4, &blocked).unwrap().is_some());
    }

    #[test]
    fn distance_field_basics() {
        let (_, rm) = open_roadmap();
        let goal = rm.vertex_at(Point::new(5.5, 5.5)).unwrap();
        let field = distance_field(&rm, goal, 0.4, &RegionSet::new()).unwrap();
        assert_eq!(field[goal], 0.0);
        for &(n, len) in rm.neighbors(goal) {
            assert!((field[n] - len).abs() < 1e-12);
        }
    }

    #[test]
    fn infrastructure_with_single_endpoint_is_valid() {
        let (w, rm) = open_roadmap();
        let rep = validate_infrastructure(&w, &rm, &[Point::new(0.5, 0.5)], 0.4).unwrap();
        assert!(rep.valid);
        assert_eq!(rep.endpoint_count, 1);
    }

    #[test]
    fn endpoint_off_roadmap_is_an_error() {
        let (w, rm) = open_roadmap();
        let err = validate_infrastructure(&w, &rm, &[Point::new(0.3, 0.5)], 0.4).unwrap_err();
        assert!(matches!(err, CoreError::EndpointNotOnRoadmap { .. }));
    }

    #[test]
    fn corner_endpoints_in_open_hall_are_valid() {
        let (w, rm) = open_roadmap();
        let eps = [
            Point::new(0.5, 0.5),
            Point::new(9.5, 0.5),
            Point::new(0.5, 9.5),
            Point::new(9.5, 9.5),
        ];
        assert!(validate_infrastructure(&w, &rm, &eps, 0.4).unwrap().valid);
    }

    #[test]
    fn endpoint_blocking_corridor_invalidates() {
        // e1 and e2 in rooms joined by a corridor that e3 sits in
        let rows = ["..#####..", ".........", "..#####.."];
        let w = Workspace::from_ascii(&rows, 1.0, 10).unwrap();
        let rm = build_grid_roadmap(&w, 1.0, 0.4).unwrap();
        let eps = [Point::new(0.5, 1.5), Point::new(8.5, 1.5), Point::new(4.5, 1.5)];
        let rep = validate_infrastructure(&w, &rm, &eps, 0.4).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.failing_pairs, vec![(0, 1)]);
    }
}
