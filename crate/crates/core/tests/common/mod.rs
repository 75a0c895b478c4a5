//! Shared fixtures for the integration tests.

#![allow(dead_code)]

pub mod enumerate;

use clsched::network_model::LayeredNetwork;
use clsched::route_expansion::{expand, RouteExpandedGraph};
use clsched::topology_gen::gen_random;

/// Small seeded random network with every pair routable.
pub fn random_network(layer_sizes: &[usize], p: f64, seed: u64) -> LayeredNetwork {
    gen_random(layer_sizes, p, seed).expect("random generator finds a routable network")
}

/// Layer-size shapes used by the random corpora, at most 12 nodes each.
pub const SHAPES: [&[usize]; 6] = [&[2, 2], &[3, 3], &[2, 2, 2], &[3, 2, 3], &[2, 3, 2], &[2, 2, 2, 2]];

/// The first `count` seeded random networks, cycling through [`SHAPES`].
pub fn random_corpus(count: usize, first_seed: u64) -> Vec<LayeredNetwork> {
    (0..count)
        .map(|k| {
            let shape = SHAPES[k % SHAPES.len()];
            random_network(shape, 0.6, first_seed + k as u64)
        })
        .collect()
}

/// Random networks whose route-expanded graph has at most `max_nodes` nodes,
/// drawn with edge probabilities from sparse to complete.
pub fn small_expanded(count: usize, max_nodes: usize) -> Vec<(LayeredNetwork, RouteExpandedGraph)> {
    const SMALL: [&[usize]; 6] = [&[2, 2], &[3, 3], &[4, 4], &[2, 2, 2], &[2, 1, 2], &[3, 1, 3]];
    const DENSITY: [f64; 4] = [0.4, 0.6, 0.8, 1.0];
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let shape = SMALL[seed as usize % SMALL.len()];
        let p = DENSITY[(seed as usize / SMALL.len()) % DENSITY.len()];
        seed += 1;
        let Ok(net) = gen_random(shape, p, 10_000 + seed) else {
            continue;
        };
        let g = expand(&net);
        if g.len() <= max_nodes {
            out.push((net, g));
        }
    }
    out
}
