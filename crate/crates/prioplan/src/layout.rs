//! Versioned artifact tree:
//!
//! ```text
//! <root>/layout.json                      {"version": 1}
//! <root>/maps/<env>.pgm, <env>.json
//! <root>/roadmaps/<env>.json
//! <root>/endpoints/<env>.json
//! <root>/instances/<env>/<mode>/n<k>/i<j>.json
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use prioplan_core::environments::Environment;
use prioplan_core::instances::TaskMode;
use prioplan_core::problem::ProblemInstance;
use serde::{Deserialize, Serialize};

use crate::formats::{endpoints_to_json, load_instance, read_json, write_json, write_map, InstanceJson, RoadmapJson};

pub const LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct LayoutFile {
    version: u32,
}

pub fn map_path(root: &Path, env: &str) -> PathBuf {
    root.join("maps").join(format!("{env}.pgm"))
}

pub fn roadmap_path(root: &Path, env: &str) -> PathBuf {
    root.join("roadmaps").join(format!("{env}.json"))
}

pub fn endpoints_path(root: &Path, env: &str) -> PathBuf {
    root.join("endpoints").join(format!("{env}.json"))
}

pub fn suite_dir(root: &Path, env: &str, mode: TaskMode, n: usize) -> PathBuf {
    root.join("instances").join(env).join(mode.as_str()).join(format!("n{n}"))
}

pub fn instance_path(root: &Path, env: &str, mode: TaskMode, n: usize, j: usize) -> PathBuf {
    suite_dir(root, env, mode, n).join(format!("i{j}.json"))
}

fn stamp(root: &Path) -> Result<()> {
    let p = root.join("layout.json");
    if p.exists() {
        check_version(root)
    } else {
        write_json(&p, &LayoutFile { version: LAYOUT_VERSION })
    }
}

pub fn check_version(root: &Path) -> Result<()> {
    let f: LayoutFile = read_json(&root.join("layout.json"))?;
    if f.version != LAYOUT_VERSION {
        bail!("{} uses layout version {}, expected {}", root.display(), f.version, LAYOUT_VERSION);
    }
    Ok(())
}

/// Writes map, roadmap and endpoint set of an environment.
pub fn write_environment(root: &Path, env: &Environment) -> Result<()> {
    stamp(root)?;
    let name = env.name.as_str();
    write_map(&map_path(root, name), &env.workspace, false)?;
    write_json(&roadmap_path(root, name), &RoadmapJson::from_roadmap(&env.roadmap))?;
    write_json(&endpoints_path(root, name), &endpoints_to_json(&env.endpoints))
}

/// Writes instances `i0..` of one suite; map and roadmap must already exist.
pub fn write_suite(root: &Path, env: &str, mode: TaskMode, n: usize, insts: &[ProblemInstance]) -> Result<Vec<PathBuf>> {
    stamp(root)?;
    // instance files sit four levels below the root
    let map = format!("../../../../maps/{env}.pgm");
    let roadmap = format!("../../../../roadmaps/{env}.json");
    insts
        .iter()
        .enumerate()
        .map(|(j, inst)| {
            let p = instance_path(root, env, mode, n, j);
            write_json(&p, &InstanceJson::new(map.clone(), roadmap.clone(), inst))?;
            Ok(p)
        })
        .collect()
}

/// Loads all instances of one suite in index order.
pub fn load_suite(root: &Path, env: &str, mode: TaskMode, n: usize) -> Result<Vec<ProblemInstance>> {
    check_version(root)?;
    let dir = suite_dir(root, env, mode, n);
    let mut found: Vec<(usize, PathBuf)> = Vec::new();
    for entry in fs::read_dir(&dir).with_context(|| format!("listing {}", dir.display()))? {
        let p = entry?.path();
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if p.extension().is_some_and(|e| e == "json") {
            if let Some(j) = stem.strip_prefix('i').and_then(|s| s.parse().ok()) {
                found.push((j, p));
            }
        }
    }
    found.sort();
    found.iter().map(|(_, p)| load_instance(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use prioplan_core::environments::{bundled, EnvironmentName};
    use prioplan_core::instances::{generate_in, GenSpec};

    #[test]
    fn suite_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let env = bundled(EnvironmentName::Warehouse).unwrap();
        write_environment(dir.path(), &env).unwrap();
        let spec = GenSpec { count: 3, ..GenSpec::new(env.name, TaskMode::Infrastructure, 4, 5) };
        let insts = generate_in(&env, &spec).unwrap();
        write_suite(dir.path(), "warehouse", TaskMode::Infrastructure, 4, &insts).unwrap();
        let back = load_suite(dir.path(), "warehouse", TaskMode::Infrastructure, 4).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in insts.iter().zip(&back) {
            assert_eq!(a.robots(), b.robots());
            assert_eq!(a.workspace(), b.workspace());
        }
    }

    #[test]
    fn foreign_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_json(&dir.path().join("layout.json"), &LayoutFile { version: 99 }).unwrap();
        assert!(check_version(dir.path()).is_err());
    }
}
