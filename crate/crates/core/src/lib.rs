//! Random spanning trees on the complete graph with two-valued random edge
//! weights: disorder sampling, exact and contracted samplers, repeat-time
//! statistics, exact oracles, branching-process couplings and sweeps.

pub mod branching;
pub mod component_sampling;
pub mod contracted;
pub mod disorder;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod oracles;
pub mod samplers;
pub mod seeds;
pub mod tree;
pub mod union_find;
pub mod wilson;

pub use error::{Error, Result};
