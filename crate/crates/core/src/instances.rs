//! Random instance generation in free-formed and infrastructure task modes.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environments::{bundled_with_radius, Environment, EnvironmentName};
use crate::error::CoreError;
use crate::problem::{ProblemInstance, Robot};

pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskMode {
    FreeFormed,
    Infrastructure,
}

impl TaskMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskMode::FreeFormed => "free-formed",
            TaskMode::Infrastructure => "infrastructure",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [TaskMode::FreeFormed, TaskMode::Infrastructure].into_iter().find(|m| m.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub environment: EnvironmentName,
    pub mode: TaskMode,
    pub robots: usize,
    pub count: usize,
    pub seed: u64,
    pub radius: f64,
    pub speed: f64,
}

impl GenSpec {
    pub fn new(environment: EnvironmentName, mode: TaskMode, robots: usize, seed: u64) -> Self {
        Self {
            environment,
            mode,
            robots,
            count: 25,
            seed,
            radius: crate::environments::DEFAULT_RADIUS,
            speed: 1.0,
        }
    }

    fn check(&self) -> Result<(), CoreError> {
        if self.robots == 0 || self.count == 0 {
            return Err(CoreError::InvalidConfig(String::from("robot count and instance count must be at least 1")));
        }
        if !(self.radius > 0.0) || !(self.speed > 0.0) {
            return Err(CoreError::InvalidConfig(String::from("radius and speed must be positive")));
        }
        Ok(())
    }
}

/// Builds the bundled environment named in `spec` and generates from it.
pub fn generate(spec: &GenSpec) -> Result<Vec<ProblemInstance>, CoreError> {
    spec.check()?;
    let env = bundled_with_radius(spec.environment, spec.radius)?;
    generate_in(&env, spec)
}

/// Generates `spec.count` instances; a pure function of `env` and `spec`.
pub fn generate_in(env: &Environment, spec: &GenSpec) -> Result<Vec<ProblemInstance>, CoreError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|_| match spec.mode {
            TaskMode::FreeFormed => free_formed(env, spec, &mut rng),
            TaskMode::Infrastructure => infrastructure(env, spec, &mut rng),
        })
        .collect()
}

fn free_formed(env: &Environment, spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<ProblemInstance, CoreError> {
    let rm = &env.roadmap;
    let ws = &env.workspace;
    let usable: Vec<usize> = (0..rm.len()).filter(|&v| ws.disc_free(rm.vertex(v), spec.radius)).collect();
    if usable.len() < 2 {
        return Err(CoreError::PlacementFailed(spec.robots));
    }
    let gap = 2.0 * spec.radius;
    let mut starts: Vec<usize> = Vec::new();
    let mut goals: Vec<usize> = Vec::new();
    let mut attempts = 0;
    while goals.len() < spec.robots {
        attempts += 1;
        if attempts > MAX_PLACEMENT_ATTEMPTS {
            return Err(CoreError::PlacementFailed(spec.robots));
        }
        let s = usable[rng.gen_range(0..usable.len())];
        let g = usable[rng.gen_range(0..usable.len())];
        let far = |set: &[usize], v: usize| set.iter().all(|&o| rm.vertex(o).dist(rm.vertex(v)) >= gap);
        if s != g && far(&starts, s) && far(&goals, g) {
            starts.push(s);
            goals.push(g);
        }
    }
    Ok(assemble(env, spec, &starts, &goals))
}

fn infrastructure(env: &Environment, spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<ProblemInstance, CoreError> {
    let needed = 2 * spec.robots;
    if needed > env.endpoints.len() {
        return Err(CoreError::InsufficientEndpoints {
            needed,
            available: env.endpoints.len(),
        });
    }
    let rm = &env.roadmap;
    let picked: Vec<usize> = env
        .endpoints
        .choose_multiple(rng, needed)
        .map(|&p| rm.vertex_at(p).ok_or(CoreError::EndpointNotOnRoadmap { x: p.x, y: p.y }))
        .collect::<Result<_, _>>()?;
    Ok(assemble(env, spec, &picked[..spec.robots], &picked[spec.robots..]))
}

fn assemble(env: &Environment, spec: &GenSpec, starts: &[usize], goals: &[usize]) -> ProblemInstance {
    let robots = starts
        .iter()
        .zip(goals)
        .enumerate()
        .map(|(k, (&start, &goal))| Robot {
            id: k + 1,
            radius: spec.radius,
            speed: spec.speed,
            start,
            goal,
        })
        .collect();
    ProblemInstance::new(env.workspace.clone(), env.roadmap.clone(), robots)
}

/// Human-readable invariant violations; empty for a well-formed instance.
pub fn validate_instance(inst: &ProblemInstance) -> Vec<String> {
    inst.violations()
}

/// `count` random priority orders (Fisher-Yates), deterministic under `seed`.
pub fn random_permutations(n: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect()
}
