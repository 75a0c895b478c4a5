//! Coded Layer scheduling for multi-layer wireless networks.

pub mod capacity_bounds;
pub mod channel_sim;
pub mod cli;
pub mod coloring;
pub mod network_model;
pub mod route_expansion;
pub mod topology_gen;
