//! Learning Boolean DNF rule sets by column generation, with human-provided
//! rules folded in as penalties, templates, or hard constraints.

pub mod bitset;
pub mod dataset;
pub mod experiments;
pub mod par;
pub mod ruledsl;
pub mod solver;
pub mod colgen;
pub mod metrics;
