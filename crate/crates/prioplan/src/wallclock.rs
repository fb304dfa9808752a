use std::time::Instant;

use prioplan_core::cost::{CostModel, Work};

/// Charges the measured wall-clock time of each piece of work.
#[derive(Debug, Clone, Copy, Default)]
pub struct WallClock;

impl CostModel for WallClock {
    fn charge<R>(&mut self, _robot: usize, task: impl FnOnce() -> (R, Work)) -> (R, f64) {
        let t0 = Instant::now();
        let (r, _) = task();
        // a zero charge would make speed-up ratios undefined
        (r, t0.elapsed().as_secs_f64().max(1e-9))
    }
}
