//! Bundled desk-scale environments. Maps are drawn at 1 m blocks and
//! rasterized at 0.1 m; roadmaps are 1 m grids.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::geometry::{Point, Workspace};
use crate::roadmap::{build_grid_roadmap, validate_infrastructure, Roadmap};

pub const DEFAULT_RADIUS: f64 = 0.4;
pub const ROADMAP_SPACING: f64 = 1.0;
const SUBDIV: usize = 10;
const ENDPOINT_TARGET: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EnvironmentName {
    EmptyHall,
    Corridor,
    Warehouse,
}

impl EnvironmentName {
    pub const ALL: [EnvironmentName; 3] = [EnvironmentName::EmptyHall, EnvironmentName::Corridor, EnvironmentName::Warehouse];

    pub fn as_str(self) -> &'static str {
        match self {
            EnvironmentName::EmptyHall => "empty-hall",
            EnvironmentName::Corridor => "corridor",
            EnvironmentName::Warehouse => "warehouse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == s)
    }

    /// Map drawing, top row first; `#` is an obstacle block.
    pub fn ascii(self) -> &'static [&'static str] {
        match self {
            EnvironmentName::EmptyHall => &EMPTY_HALL,
            EnvironmentName::Corridor => &CORRIDOR,
            EnvironmentName::Warehouse => &WAREHOUSE,
        }
    }
}

const EMPTY_HALL: [&str; 15] = ["...................."; 15];

// two 8 m rooms joined by a 4 m long, 2 m wide hallway
const CORRIDOR: [&str; 15] = [
    "........####........",
    "........####........",
    "........####........",
    "........####........",
    "........####........",
    "........####........",
    "....................",
    "....................",
    "........####........",
    "........####........",
    "........####........",
    "........####........",
    "........####........",
    "........####........",
    "........####........",
];

// shelf rows with 2 m aisles and 3 m cross-aisles at both ends
const WAREHOUSE: [&str; 15] = [
    "....................",
    "....................",
    "...##############...",
    "....................",
    "....................",
    "...##############...",
    "....................",
    "....................",
    "...##############...",
    "....................",
    "....................",
    "...##############...",
    "....................",
    "....................",
    "....................",
];

#[derive(Debug, Clone)]
pub struct Environment {
    pub name: EnvironmentName,
    pub workspace: Arc<Workspace>,
    pub roadmap: Arc<Roadmap>,
    /// Endpoint set forming a valid infrastructure for `radius`.
    pub endpoints: Vec<Point>,
    pub radius: f64,
}

pub fn bundled(name: EnvironmentName) -> Result<Environment, CoreError> {
    bundled_with_radius(name, DEFAULT_RADIUS)
}

pub fn bundled_with_radius(name: EnvironmentName, radius: f64) -> Result<Environment, CoreError> {
    let ws = Workspace::from_ascii(name.ascii(), 1.0, SUBDIV)?;
    let rm = build_grid_roadmap(&ws, ROADMAP_SPACING, radius)?;
    let endpoints = generate_endpoints(&ws, &rm, radius, ENDPOINT_TARGET)?;
    Ok(Environment {
        name,
        workspace: Arc::new(ws),
        roadmap: Arc::new(rm),
        endpoints,
        radius,
    })
}

/// Greedy farthest-point sampling over the vertices of the largest roadmap
/// component, then removal of the endpoint involved in the most failing
/// pairs until the set is a valid infrastructure.
pub fn generate_endpoints(ws: &Workspace, rm: &Roadmap, radius: f64, target: usize) -> Result<Vec<Point>, CoreError> {
    if rm.is_empty() {
        return Err(CoreError::EmptyRoadmap);
    }
    let labels = rm.component_labels();
    let mut sizes = alloc::vec![0usize; rm.len()];
    for &l in &labels {
        sizes[l] += 1;
    }
    let big = (0..sizes.len()).max_by_key(|&l| (sizes[l], core::cmp::Reverse(l))).unwrap_or(0);
    let cand: Vec<usize> = (0..rm.len())
        .filter(|&v| labels[v] == big && ws.disc_free(rm.vertex(v), radius))
        .collect();
    if cand.is_empty() {
        return Ok(Vec::new());
    }
    let mut chosen = alloc::vec![cand[0]];
    let mut gap: Vec<f64> = cand.iter().map(|&v| rm.vertex(v).dist(rm.vertex(cand[0]))).collect();
    while chosen.len() < target.min(cand.len()) {
        let (k, &d) = gap
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("non-empty");
        if d < 2.0 * radius {
            break;
        }
        let v = cand[k];
        chosen.push(v);
        for (g, &c) in gap.iter_mut().zip(&cand) {
            *g = g.min(rm.vertex(c).dist(rm.vertex(v)));
        }
    }
    let mut pts: Vec<Point> = chosen.iter().map(|&v| rm.vertex(v)).collect();
    loop {
        let rep = validate_infrastructure(ws, rm, &pts, radius)?;
        if rep.valid {
            return Ok(pts);
        }
        let mut hits = alloc::vec![0usize; pts.len()];
        for &(a, b) in &rep.failing_pairs {
            hits[a] += 1;
            hits[b] += 1;
        }
        let worst = (0..pts.len()).max_by_key(|&k| (hits[k], k)).expect("non-empty");
        pts.remove(worst);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sets_are_valid_and_large_enough() {
        for name in EnvironmentName::ALL {
            let env = bundled(name).unwrap();
            assert!(env.endpoints.len() >= 20, "{} has {}", name.as_str(), env.endpoints.len());
            assert_eq!(env.roadmap.component_count(), 1, "{}", name.as_str());
            let rep = validate_infrastructure(&env.workspace, &env.roadmap, &env.endpoints, env.radius).unwrap();
            assert!(rep.valid);
        }
    }

    #[test]
    fn names_round_trip() {
        for name in EnvironmentName::ALL {
            assert_eq!(EnvironmentName::parse(name.as_str()), Some(name));
        }
    }
}
