//! Problem instances: workspace, roadmap and an ordered robot list.
//! The position in the list is the priority, index 0 being the highest.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::geometry::{Point, Workspace, EPS_GEOM};
use crate::roadmap::Roadmap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robot {
    pub id: usize,
    pub radius: f64,
    pub speed: f64,
    /// Roadmap vertex of the start position.
    pub start: usize,
    /// Roadmap vertex of the goal position.
    pub goal: usize,
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    workspace: Arc<Workspace>,
    roadmap: Arc<Roadmap>,
    robots: Vec<Robot>,
}

impl ProblemInstance {
    pub fn new(workspace: Arc<Workspace>, roadmap: Arc<Roadmap>, robots: Vec<Robot>) -> Self {
        Self {
            workspace,
            roadmap,
            robots,
        }
    }

    /// Builds an instance from world coordinates, snapping each start and
    /// goal to the roadmap vertex at that position.
    pub fn from_points(
        workspace: Arc<Workspace>,
        roadmap: Arc<Roadmap>,
        robots: &[(usize, f64, f64, Point, Point)],
    ) -> Result<Self, CoreError> {
        let mut out = Vec::with_capacity(robots.len());
        for &(id, radius, speed, s, g) in robots {
            let snap = |p: Point| {
                roadmap
                    .vertex_at(p)
                    .ok_or(CoreError::EndpointNotOnRoadmap { x: p.x, y: p.y })
            };
            out.push(Robot {
                id,
                radius,
                speed,
                start: snap(s)?,
                goal: snap(g)?,
            });
        }
        Ok(Self::new(workspace, roadmap, out))
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn roadmap(&self) -> &Roadmap {
        &self.roadmap
    }

    pub fn shared_workspace(&self) -> Arc<Workspace> {
        self.workspace.clone()
    }

    pub fn shared_roadmap(&self) -> Arc<Roadmap> {
        self.roadmap.clone()
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn start_point(&self, i: usize) -> Point {
        self.roadmap.vertex(self.robots[i].start)
    }

    pub fn goal_point(&self, i: usize) -> Point {
        self.roadmap.vertex(self.robots[i].goal)
    }

    /// Same problem with robots reordered; `order[k]` is the old index of the
    /// robot that gets priority `k`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            workspace: self.workspace.clone(),
            roadmap: self.roadmap.clone(),
            robots: order.iter().map(|&k| self.robots[k]).collect(),
        }
    }

    /// The first `k` robots only.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            workspace: self.workspace.clone(),
            roadmap: self.roadmap.clone(),
            robots: self.robots[..k.min(self.robots.len())].to_vec(),
        }
    }

    /// Human-readable invariant violations; empty when the instance is
    /// well-formed.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let rm = &self.roadmap;
        for (i, r) in self.robots.iter().enumerate() {
            if !(r.radius > 0.0) || !r.radius.is_finite() {
                out.push(format!("robot {}: radius {} is not positive", r.id, r.radius));
            }
            if !(r.speed > 0.0) || !r.speed.is_finite() {
                out.push(format!("robot {}: speed {} is not positive", r.id, r.speed));
            }
            if r.radius > rm.clearance() + EPS_GEOM {
                out.push(format!(
                    "robot {}: radius {} exceeds roadmap clearance {}",
                    r.id,
                    r.radius,
                    rm.clearance()
                ));
            }
            for (what, v) in [("start", r.start), ("goal", r.goal)] {
                if v >= rm.len() {
                    out.push(format!("robot {}: {what} is not on the roadmap", r.id));
                } else if r.radius > 0.0 && !self.workspace.disc_free(rm.vertex(v), r.radius) {
                    out.push(format!("robot {}: {what} body is not in free space", r.id));
                }
            }
            if self.robots[..i].iter().any(|o| o.id == r.id) {
                out.push(format!("robot id {} is used twice", r.id));
            }
        }
        for i in 0..self.robots.len() {
            for j in i + 1..self.robots.len() {
                let (a, b) = (&self.robots[i], &self.robots[j]);
                let gap = a.radius + b.radius - EPS_GEOM;
                if a.start < rm.len() && b.start < rm.len() && rm.vertex(a.start).dist(rm.vertex(b.start)) < gap {
                    out.push(format!("robots {} and {} have overlapping starts", a.id, b.id));
                }
                if a.goal < rm.len() && b.goal < rm.len() && rm.vertex(a.goal).dist(rm.vertex(b.goal)) < gap {
                    out.push(format!("robots {} and {} have overlapping goals", a.id, b.id));
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), CoreError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CoreError::MalformedInstance(v.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadmap::build_grid_roadmap;

    fn hall() -> (Arc<Workspace>, Arc<Roadmap>) {
        let w = Workspace::empty(6.0, 4.0, 0.1, Point::default()).unwrap();
        let rm = build_grid_roadmap(&w, 1.0, 0.4).unwrap();
        (Arc::new(w), Arc::new(rm))
    }

    #[test]
    fn shared_start_is_one_violation() {
        let (w, rm) = hall();
        let inst = ProblemInstance::new(
            w,
            rm,
            alloc::vec![
                Robot { id: 1, radius: 0.4, speed: 1.0, start: 0, goal: 5 },
                Robot { id: 2, radius: 0.4, speed: 1.0, start: 0, goal: 11 },
            ],
        );
        assert_eq!(inst.violations().len(), 1);
        assert!(inst.ensure_valid().is_err());
    }

    #[test]
    fn off_roadmap_start_is_one_violation() {
        let (w, rm) = hall();
        let n = rm.len();
        let inst = ProblemInstance::new(w, rm, alloc::vec![Robot { id: 1, radius: 0.4, speed: 1.0, start: n + 3, goal: 5 }]);
        assert_eq!(inst.violations().len(), 1);
    }

    #[test]
    fn permutation_reorders_priorities() {
        let (w, rm) = hall();
        let inst = ProblemInstance::new(
            w,
            rm,
            alloc::vec![
                Robot { id: 1, radius: 0.4, speed: 1.0, start: 0, goal: 5 },
                Robot { id: 2, radius: 0.4, speed: 1.0, start: 2, goal: 11 },
            ],
        );
        let p = inst.permuted(&[1, 0]);
        assert_eq!(p.robots()[0].id, 2);
        assert!(p.violations().is_empty());
    }
}
