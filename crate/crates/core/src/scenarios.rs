//! Small hand-built problems that exhibit specific behaviours of the
//! planners. Robot ids are 1-based and listed in priority order.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::geometry::{Point, Workspace};
use crate::problem::ProblemInstance;
use crate::roadmap::{build_grid_roadmap, Roadmap};

pub const RADIUS: f64 = 0.4;

type Spec = (usize, f64, f64, Point, Point);

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Explicit roadmap from a list of polylines; shared points become shared
/// vertices.
fn polylines(lines: &[&[(f64, f64)]]) -> Result<Roadmap, CoreError> {
    let mut vs: Vec<Point> = Vec::new();
    let mut edges = Vec::new();
    let id = |q: Point, vs: &mut Vec<Point>| match vs.iter().position(|v| v.dist(q) < 1e-9) {
        Some(k) => k,
        None => {
            vs.push(q);
            vs.len() - 1
        }
    };
    for line in lines {
        for w in line.windows(2) {
            let a = id(p(w[0].0, w[0].1), &mut vs);
            let b = id(p(w[1].0, w[1].1), &mut vs);
            edges.push((a, b));
        }
    }
    Roadmap::from_edges(vs, &edges, RADIUS)
}

fn build(ws: Workspace, rm: Roadmap, robots: &[Spec]) -> Result<ProblemInstance, CoreError> {
    let inst = ProblemInstance::from_points(Arc::new(ws), Arc::new(rm), robots)?;
    inst.ensure_valid()?;
    Ok(inst)
}

/// Two robots swapping ends of a one-lane corridor.
pub fn corridor_swap() -> Result<ProblemInstance, CoreError> {
    let ws = Workspace::empty(10.0, 2.0, 0.1, p(0.0, 0.0))?;
    let line: Vec<(f64, f64)> = (1..=9).map(|x| (x as f64, 1.0)).collect();
    let rm = polylines(&[&line])?;
    build(ws, rm, &[(1, RADIUS, 1.0, p(1.0, 1.0), p(9.0, 1.0)), (2, RADIUS, 1.0, p(9.0, 1.0), p(1.0, 1.0))])
}

/// Robot 1's shortest route runs through robot 2's start and ends on the
/// junction robot 2 has to cross, so once parked it seals robot 2 in.
pub fn type_a() -> Result<ProblemInstance, CoreError> {
    let ws = Workspace::empty(10.0, 8.0, 0.1, p(-3.0, -3.0))?;
    let rm = polylines(&[
        &[(-2.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)],
        &[(0.0, 0.0), (0.0, -1.0), (0.0, -2.0), (1.0, -2.0), (2.0, -2.0), (3.0, -2.0), (3.0, -1.0), (3.0, 0.0), (4.0, 0.0), (5.0, 0.0)],
        &[
            (-2.0, 0.0),
            (-2.0, 1.0),
            (-2.0, 2.0),
            (-2.0, 3.0),
            (-2.0, 4.0),
            (-1.0, 4.0),
            (0.0, 4.0),
            (1.0, 4.0),
            (2.0, 4.0),
            (3.0, 4.0),
            (3.0, 3.0),
            (3.0, 2.0),
            (3.0, 1.0),
            (3.0, 0.0),
        ],
    ])?;
    build(ws, rm, &[(1, RADIUS, 1.0, p(-2.0, 0.0), p(3.0, 0.0)), (2, RADIUS, 1.0, p(0.0, 0.0), p(5.0, 0.0))])
}

/// A fast robot runs over a slow one sharing its lane.
pub fn type_b() -> Result<ProblemInstance, CoreError> {
    let ws = Workspace::empty(12.0, 5.0, 0.1, p(0.0, -2.0))?;
    let lane: Vec<(f64, f64)> = (2..=10).map(|x| (x as f64, 0.0)).collect();
    let rm = polylines(&[&lane, &[(3.0, 0.0), (3.0, 1.0), (3.0, 2.0), (4.0, 2.0), (5.0, 2.0), (5.0, 1.0), (5.0, 0.0)]])?;
    build(ws, rm, &[(1, RADIUS, 2.0, p(2.0, 0.0), p(10.0, 0.0)), (2, RADIUS, 1.0, p(4.0, 0.0), p(8.0, 0.0))])
}

/// The lower-priority start sits on the only route of robot 1; robot 2 could
/// simply step aside, but the revised planner forbids entering its start.
pub fn rpp_limitation() -> Result<ProblemInstance, CoreError> {
    let ws = Workspace::empty(8.0, 4.0, 0.1, p(-1.0, -1.0))?;
    let line: Vec<(f64, f64)> = (0..=6).map(|x| (x as f64, 0.0)).collect();
    let rm = polylines(&[&line, &[(3.0, 0.0), (3.0, 1.0), (3.0, 2.0)]])?;
    build(ws, rm, &[(1, RADIUS, 1.0, p(0.0, 0.0), p(6.0, 0.0)), (2, RADIUS, 1.0, p(3.0, 0.0), p(3.0, 2.0))])
}

/// Open grid where avoiding robot 2's start forces robot 1 onto a longer
/// route than plain prioritized planning would take.
pub fn start_avoid_detour() -> Result<ProblemInstance, CoreError> {
    let ws = Workspace::empty(10.0, 5.0, 0.1, p(0.0, 0.0))?;
    let rm = build_grid_roadmap(&ws, 1.0, RADIUS)?;
    build(ws, rm, &[(1, RADIUS, 1.0, p(0.5, 2.5), p(9.5, 2.5)), (2, RADIUS, 1.0, p(5.5, 2.5), p(5.5, 0.5))])
}

fn hall10() -> Result<(Workspace, Roadmap), CoreError> {
    let ws = Workspace::empty(10.0, 10.0, 0.1, p(0.0, 0.0))?;
    let rm = build_grid_roadmap(&ws, 1.0, RADIUS)?;
    Ok((ws, rm))
}

/// Robots 1 and 3 cross paths; robot 2 is unaffected by both. With a slow
/// planner on robot 2 the synchronized variant has to wait for it before
/// robot 3 can resolve its conflict.
pub fn slow_bystander() -> Result<ProblemInstance, CoreError> {
    let (ws, rm) = hall10()?;
    build(
        ws,
        rm,
        &[
            (1, RADIUS, 1.0, p(0.5, 5.5), p(9.5, 5.5)),
            (2, RADIUS, 1.0, p(0.5, 0.5), p(2.5, 0.5)),
            (3, RADIUS, 1.0, p(5.5, 0.5), p(5.5, 9.5)),
        ],
    )
}

/// Robot 3 crosses a hall in which robots 1 and 2 park on its straight line.
pub fn two_conflict() -> Result<ProblemInstance, CoreError> {
    let (ws, rm) = hall10()?;
    build(
        ws,
        rm,
        &[
            (1, RADIUS, 1.0, p(2.5, 2.5), p(2.5, 5.5)),
            (2, RADIUS, 1.0, p(7.5, 2.5), p(7.5, 5.5)),
            (3, RADIUS, 1.0, p(0.5, 5.5), p(9.5, 5.5)),
        ],
    )
}

/// Four robots on the corners of a diamond heading for the opposite corner;
/// all straight lines meet in the centre at the same time.
pub fn superconflict() -> Result<ProblemInstance, CoreError> {
    let ws = Workspace::empty(11.0, 11.0, 0.1, p(-0.5, -0.5))?;
    let rm = build_grid_roadmap(&ws, 1.0, RADIUS)?;
    build(
        ws,
        rm,
        &[
            (1, RADIUS, 1.0, p(5.0, 1.0), p(5.0, 9.0)),
            (2, RADIUS, 1.0, p(9.0, 5.0), p(1.0, 5.0)),
            (3, RADIUS, 1.0, p(5.0, 9.0), p(5.0, 1.0)),
            (4, RADIUS, 1.0, p(1.0, 5.0), p(9.0, 5.0)),
        ],
    )
}
