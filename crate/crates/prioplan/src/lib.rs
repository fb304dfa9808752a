//! File formats, benchmark runner, plotting and the wall-clock cost model
//! on top of `prioplan-core`.

pub mod bench;
pub mod formats;
pub mod layout;
pub mod plot;
pub mod wallclock;

pub use prioplan_core as core;
