//! Prioritized multi-robot trajectory coordination on roadmaps.
//!
//! Centralized planners (classical and revised prioritized planning), a
//! discrete-event simulator for the synchronized, asynchronous and
//! closed-loop decentralized variants, instance generation and metrics.
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in
//! the `prioplan` crate.
#![no_std]

extern crate alloc;

pub mod cost;
pub mod environments;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod metrics;
pub mod planner;
pub mod prioritized;
pub mod problem;
pub mod roadmap;
pub mod scenarios;
pub mod sim;
pub mod trajectory;

pub use error::CoreError;
