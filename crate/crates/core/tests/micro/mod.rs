//! Random micro-problems on small grid maps.
#![allow(dead_code)]

use prioplan_core::geometry::Workspace;
use prioplan_core::roadmap::{build_grid_roadmap, Roadmap};
use prioplan_core::trajectory::{Trajectory, Waypoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Grid map of at most `max_cells` cells, about 15% blocked, whose roadmap
/// has at least two vertices.
pub fn random_map(rng: &mut ChaCha8Rng, max_cells: usize) -> (Workspace, Roadmap) {
    loop {
        let w = rng.gen_range(2..=6);
        let h = rng.gen_range(2..=6);
        if w * h > max_cells {
            continue;
        }
        let occ: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.15)).collect();
        let ascii: Vec<String> = (0..h).map(|j| (0..w).map(|i| if occ[j * w + i] { '#' } else { '.' }).collect()).collect();
        let rows: Vec<&str> = ascii.iter().map(String::as_str).collect();
        let ws = Workspace::from_ascii(&rows, 1.0, 5).unwrap();
        if let Ok(rm) = build_grid_roadmap(&ws, 1.0, 0.4) {
            if rm.len() >= 2 {
                return (ws, rm);
            }
        }
    }
}

/// Lattice walk of another robot on the same roadmap.
pub fn lattice_walk(rng: &mut ChaCha8Rng, rm: &Roadmap, steps: usize) -> Trajectory {
    let mut v = rng.gen_range(0..rm.len());
    let mut s = 0usize;
    let mut wps = vec![Waypoint::new(rm.vertex(v), 0.0)];
    while s < steps {
        let nb = rm.neighbors(v);
        if nb.is_empty() || rng.gen_bool(0.3) {
            s += 1;
        } else {
            let (w, len) = nb[rng.gen_range(0..nb.len())];
            s += ((len / 0.5 - 1e-9).ceil() as usize).max(1);
            v = w;
        }
        wps.push(Waypoint::new(rm.vertex(v), s as f64 * 0.5));
    }
    Trajectory::new(wps).unwrap()
}
