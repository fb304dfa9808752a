//! On-disk formats: PGM occupancy maps with a JSON sidecar, and JSON for
//! roadmaps, endpoints, trajectories, instances, solutions, simulation
//! outcomes and closed-loop event scripts.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use prioplan_core::environments::DEFAULT_RADIUS;
use prioplan_core::geometry::{Point, Workspace};
use prioplan_core::prioritized::{Solution, Solver};
use prioplan_core::problem::ProblemInstance;
use prioplan_core::roadmap::Roadmap;
use prioplan_core::sim::{EventKind, ExternalEvent, MessageRecord, SimOutcome, SimStatus};
use prioplan_core::trajectory::{Trajectory, Waypoint};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    pub resolution: f64,
    pub origin: [f64; 2],
}

/// Sidecar next to a map image: same stem, `.json` extension.
pub fn sidecar_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("json")
}

/// Loads a P2 or P5 map. Pixels at least half dark are obstacles; the first
/// image row is the top of the map.
pub fn read_map(pgm: &Path) -> Result<Workspace> {
    let meta: MapMeta = read_json(&sidecar_path(pgm))?;
    let img = image::open(pgm)
        .with_context(|| format!("decoding {}", pgm.display()))?
        .to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut occ = vec![false; w * h];
    for (x, y, px) in img.enumerate_pixels() {
        let j = h - 1 - y as usize;
        occ[j * w + x as usize] = px.0[0] <= 127;
    }
    Ok(Workspace::new(occ, w, h, meta.resolution, Point::new(meta.origin[0], meta.origin[1]))?)
}

/// Writes a map as binary (P5) or plain (P2) PGM plus its sidecar.
pub fn write_map(pgm: &Path, ws: &Workspace, plain: bool) -> Result<()> {
    if let Some(dir) = pgm.parent() {
        fs::create_dir_all(dir)?;
    }
    let (w, h) = (ws.width(), ws.height());
    let mut px = Vec::with_capacity(w * h);
    for row in (0..h).rev() {
        for i in 0..w {
            px.push(if ws.is_occupied(i, row) { 0u8 } else { 255u8 });
        }
    }
    let file = fs::File::create(pgm).with_context(|| format!("creating {}", pgm.display()))?;
    let enc = if plain { SampleEncoding::Ascii } else { SampleEncoding::Binary };
    PnmEncoder::new(std::io::BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(enc))
        .write_image(&px, w as u32, h as u32, ExtendedColorType::L8)?;
    let o = ws.origin();
    write_json(
        &sidecar_path(pgm),
        &MapMeta {
            resolution: ws.resolution(),
            origin: [o.x, o.y],
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapJson {
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    /// Largest body radius the edges admit; absent means the default radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
}

impl RoadmapJson {
    pub fn from_roadmap(rm: &Roadmap) -> Self {
        Self {
            vertices: rm.vertices().iter().map(|p| [p.x, p.y]).collect(),
            edges: rm.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            clearance: Some(rm.clearance()),
        }
    }

    pub fn to_roadmap(&self) -> Result<Roadmap> {
        let vs = self.vertices.iter().map(|v| Point::new(v[0], v[1])).collect();
        let es: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(Roadmap::from_edges(vs, &es, self.clearance.unwrap_or(DEFAULT_RADIUS))?)
    }
}

pub type EndpointsJson = Vec<[f64; 2]>;

pub fn endpoints_to_json(pts: &[Point]) -> EndpointsJson {
    pts.iter().map(|p| [p.x, p.y]).collect()
}

pub fn endpoints_from_json(js: &EndpointsJson) -> Vec<Point> {
    js.iter().map(|p| Point::new(p[0], p[1])).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub robot: usize,
    pub radius: f64,
    pub waypoints: Vec<[f64; 3]>,
}

impl TrajectoryJson {
    pub fn new(robot: usize, radius: f64, tr: &Trajectory) -> Self {
        Self {
            robot,
            radius,
            waypoints: tr.waypoints().iter().map(|w| [w.pos.x, w.pos.y, w.t]).collect(),
        }
    }

    pub fn to_trajectory(&self) -> Result<Trajectory> {
        let wps = self
            .waypoints
            .iter()
            .map(|w| Waypoint::new(Point::new(w[0], w[1]), w[2]))
            .collect();
        Ok(Trajectory::new(wps)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotJson {
    pub id: usize,
    pub radius: f64,
    pub speed: f64,
    pub start: [f64; 2],
    pub goal: [f64; 2],
}

/// Instance file; `map` and `roadmap` are paths relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub map: String,
    pub roadmap: String,
    pub robots: Vec<RobotJson>,
}

impl InstanceJson {
    pub fn new(map: String, roadmap: String, inst: &ProblemInstance) -> Self {
        let robots = inst
            .robots()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (s, g) = (inst.start_point(i), inst.goal_point(i));
                RobotJson {
                    id: r.id,
                    radius: r.radius,
                    speed: r.speed,
                    start: [s.x, s.y],
                    goal: [g.x, g.y],
                }
            })
            .collect();
        Self { map, roadmap, robots }
    }

    pub fn resolve(&self, ws: Arc<Workspace>, rm: Arc<Roadmap>) -> Result<ProblemInstance> {
        let robots: Vec<_> = self
            .robots
            .iter()
            .map(|r| {
                (
                    r.id,
                    r.radius,
                    r.speed,
                    Point::new(r.start[0], r.start[1]),
                    Point::new(r.goal[0], r.goal[1]),
                )
            })
            .collect();
        Ok(ProblemInstance::from_points(ws, rm, &robots)?)
    }
}

/// Reads an instance together with the map and roadmap it references.
pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let js: InstanceJson = read_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let ws = read_map(&base.join(&js.map))?;
    let rm: RoadmapJson = read_json(&base.join(&js.roadmap))?;
    js.resolve(Arc::new(ws), Arc::new(rm.to_roadmap()?))
}

pub type SolutionJson = Vec<TrajectoryJson>;

pub fn solution_to_json(inst: &ProblemInstance, sol: &Solution) -> SolutionJson {
    inst.robots()
        .iter()
        .filter_map(|r| sol.trajectory_of(r.id).map(|t| TrajectoryJson::new(r.id, r.radius, t)))
        .collect()
}

pub fn solution_from_json(js: &SolutionJson, solver: Solver, runtime: f64) -> Result<Solution> {
    let trajectories = js
        .iter()
        .map(|t| Ok((t.robot, Arc::new(t.to_trajectory()?))))
        .collect::<Result<_>>()?;
    Ok(Solution {
        trajectories,
        solver,
        runtime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageJson {
    /// Priority position of the sender, 0 highest.
    pub sender: usize,
    pub t_send: f64,
    pub t_deliver: f64,
    pub dropped: bool,
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcomeJson {
    pub variant: String,
    pub success: bool,
    /// Robot whose planning failed; absent on success or for an end-state
    /// conflict in the closed loop.
    pub failed_robot: Option<usize>,
    pub time_to_solution: f64,
    pub messages: usize,
    pub replans: Vec<usize>,
    pub rounds: Option<usize>,
    pub log: Vec<MessageJson>,
    pub solution: Option<SolutionJson>,
}

impl SimOutcomeJson {
    pub fn new(inst: &ProblemInstance, out: &SimOutcome) -> Self {
        let failed_robot = match out.status {
            SimStatus::Failure { robot } if robot != usize::MAX => Some(robot),
            _ => None,
        };
        Self {
            variant: out.variant.label().to_string(),
            success: out.succeeded(),
            failed_robot,
            time_to_solution: out.time_to_solution,
            messages: out.messages,
            replans: out.replans.clone(),
            rounds: out.rounds,
            log: out.log.iter().map(message_json).collect(),
            solution: out.solution.as_ref().map(|s| solution_to_json(inst, s)),
        }
    }
}

fn message_json(m: &MessageRecord) -> MessageJson {
    MessageJson {
        sender: m.sender,
        t_send: m.t_send,
        t_deliver: m.t_deliver,
        dropped: m.dropped,
        periodic: m.periodic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKindJson {
    Retask,
    Divergence,
}

/// One entry of a closed-loop event script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventJson {
    pub time: f64,
    pub robot: usize,
    pub kind: EventKindJson,
    /// New goal for a retask, observed position for a divergence.
    pub position: [f64; 2],
}

pub fn events_from_json(js: &[EventJson]) -> Result<Vec<ExternalEvent>> {
    js.iter()
        .map(|e| {
            if !(e.time >= 0.0) {
                bail!("event time {} must be non-negative", e.time);
            }
            let p = Point::new(e.position[0], e.position[1]);
            Ok(ExternalEvent {
                time: e.time,
                robot: e.robot,
                kind: match e.kind {
                    EventKindJson::Retask => EventKind::Retask(p),
                    EventKindJson::Divergence => EventKind::Divergence(p),
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use prioplan_core::scenarios;

    #[test]
    fn map_round_trips_in_both_encodings() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::from_ascii(&["..#.", "#...", "...."], 1.0, 3).unwrap();
        for plain in [true, false] {
            let p = dir.path().join(if plain { "a.pgm" } else { "b.pgm" });
            write_map(&p, &ws, plain).unwrap();
            let head = fs::read(&p).unwrap();
            assert_eq!(&head[..2], if plain { b"P2" } else { b"P5" });
            assert_eq!(read_map(&p).unwrap(), ws);
        }
    }

    #[test]
    fn gray_threshold_is_half() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.pgm");
        fs::write(&p, "P2\n3 1\n255\n127 128 0\n").unwrap();
        write_json(&sidecar_path(&p), &MapMeta { resolution: 0.5, origin: [0.0, 0.0] }).unwrap();
        let ws = read_map(&p).unwrap();
        assert!(ws.is_occupied(0, 0));
        assert!(!ws.is_occupied(1, 0));
        assert!(ws.is_occupied(2, 0));
    }

    #[test]
    fn instance_and_solution_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = scenarios::slow_bystander().unwrap();
        write_map(&dir.path().join("maps/m.pgm"), inst.workspace(), false).unwrap();
        write_json(&dir.path().join("roadmaps/m.json"), &RoadmapJson::from_roadmap(inst.roadmap())).unwrap();
        let js = InstanceJson::new("../maps/m.pgm".into(), "../roadmaps/m.json".into(), &inst);
        let path = dir.path().join("instances/i0.json");
        write_json(&path, &js).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back.robots(), inst.robots());
        assert_eq!(back.roadmap().vertices(), inst.roadmap().vertices());
        assert_eq!(back.roadmap().edges(), inst.roadmap().edges());

        let cfg = prioplan_core::prioritized::PlannerConfig::default();
        let mut c = prioplan_core::cost::SyntheticCosts::zero();
        let out = prioplan_core::prioritized::pp(&inst, &cfg, &mut c).unwrap();
        let sol = out.solution().unwrap();
        let js = solution_to_json(&inst, sol);
        let again = solution_from_json(&js, Solver::Pp, sol.runtime).unwrap();
        assert_eq!(&again, sol);
    }

    #[test]
    fn event_script_parses() {
        let text = r#"[{"time": 1.0, "robot": 2, "kind": "retask", "position": [2.0, 8.0]},
                       {"time": 2.5, "robot": 4, "kind": "divergence", "position": [2.2, 3.9]}]"#;
        let js: Vec<EventJson> = serde_json::from_str(text).unwrap();
        let evs = events_from_json(&js).unwrap();
        assert_eq!(evs[0].kind, EventKind::Retask(Point::new(2.0, 8.0)));
        assert_eq!(evs[1].robot, 4);
    }
}
