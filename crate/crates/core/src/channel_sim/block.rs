//! Multi-block simulation with relay functions.
//!
//! Sources draw a fresh message every block. A relay transmits a function of
//! what it reconstructed in earlier blocks, chosen by a [`RelayStrategy`].
//! Every block is compared against each pair running the same strategy
//! alone on its induced subgraph.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bits::BitSignal;
use super::simulate::{deterministic_simulate, isolated_receive, Reconstruction, Snapshot};
use super::SimError;
use crate::coloring::ColorAssignment;
use crate::network_model::{LayeredNetwork, NodeId, PairId};
use crate::route_expansion::{ExpandedNode, RouteExpandedGraph};

/// Signal received at every base node in each instant of one block.
type InstantSignals = Vec<BTreeMap<NodeId, BitSignal>>;

/// Received signals a relay may read when choosing what to send.
///
/// Only blocks before the current one are visible. Raw instants are visible
/// only for colors in the node's receive set, and not at all in the isolated
/// reference run, where instants do not exist.
pub struct ReceiveView<'a> {
    node: ExpandedNode,
    label: String,
    current: usize,
    combined: &'a [BTreeMap<ExpandedNode, BitSignal>],
    instants: Option<(&'a [InstantSignals], crate::coloring::ColorSet)>,
}

impl ReceiveView<'_> {
    fn arity(&self, detail: String) -> SimError {
        SimError::StrategyArity { node: self.label.clone(), detail }
    }

    /// Block the relay is transmitting in.
    pub fn current_block(&self) -> usize {
        self.current
    }

    /// Reconstructed signal of this node in an earlier block.
    pub fn combined(&self, block: usize) -> Result<BitSignal, SimError> {
        if block >= self.current {
            return Err(self.arity(format!("block {block} is not before block {}", self.current)));
        }
        self.combined[block].get(&self.node).copied().ok_or_else(|| self.arity(format!("no signal in block {block}")))
    }

    /// Raw signal heard in instant `color` of an earlier block.
    pub fn instant(&self, block: usize, color: usize) -> Result<BitSignal, SimError> {
        let Some((instants, receive)) = self.instants else {
            return Err(self.arity("raw instants are not defined in the isolated run".into()));
        };
        if block >= self.current {
            return Err(self.arity(format!("block {block} is not before block {}", self.current)));
        }
        if !receive.contains(color) {
            return Err(self.arity(format!("color {color} is not in the receive set")));
        }
        Ok(instants[block][color][&self.node.base])
    }
}

/// Relay function applied by every non-source node.
pub trait RelayStrategy {
    /// Signal `node` sends for its pair in `block`.
    fn transmit(&self, node: ExpandedNode, block: usize, view: &ReceiveView<'_>) -> Result<BitSignal, SimError>;
}

/// Forwards the signal reconstructed in the previous block, and zero in the
/// first block.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityForward {
    pub q: u32,
}

impl RelayStrategy for IdentityForward {
    fn transmit(&self, _node: ExpandedNode, block: usize, view: &ReceiveView<'_>) -> Result<BitSignal, SimError> {
        match block {
            0 => Ok(BitSignal::zero(self.q)),
            b => view.combined(b - 1),
        }
    }
}

/// Per-receiver comparison for one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRecord {
    pub block: usize,
    pub receivers: Vec<Reconstruction>,
}

impl BlockRecord {
    pub fn all_equal(&self) -> bool {
        self.receivers.iter().all(Reconstruction::equal)
    }
}

/// Outcome of [`block_simulate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockTrace {
    pub seed: u64,
    pub q: u32,
    pub blocks: Vec<BlockRecord>,
}

impl BlockTrace {
    pub fn all_equal(&self) -> bool {
        self.blocks.iter().all(BlockRecord::all_equal)
    }
}

/// Runs `num_blocks` blocks of `a` on `net` with source messages drawn from
/// `seed` and relays following `strategy`.
pub fn block_simulate(
    net: &LayeredNetwork,
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    q: u32,
    num_blocks: usize,
    strategy: &dyn RelayStrategy,
    seed: u64,
) -> Result<BlockTrace, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coded_combined: Vec<BTreeMap<ExpandedNode, BitSignal>> = Vec::new();
    let mut coded_instants: Vec<Vec<BTreeMap<NodeId, BitSignal>>> = Vec::new();
    let mut alone_combined: Vec<BTreeMap<ExpandedNode, BitSignal>> = Vec::new();
    let mut blocks = Vec::with_capacity(num_blocks);

    for block in 0..num_blocks {
        let mut coded = Snapshot::new();
        let mut alone = Snapshot::new();
        for idx in 0..g.len() {
            let node = g.node(idx);
            if g.layer_of(idx) == 0 {
                let message = BitSignal::random(q, &mut rng);
                coded.insert(node, message);
                alone.insert(node, message);
                continue;
            }
            let label = g.label(idx);
            let view = ReceiveView {
                node,
                label: label.clone(),
                current: block,
                combined: &coded_combined,
                instants: Some((&coded_instants, a.colors[idx].receive)),
            };
            coded.insert(node, strategy.transmit(node, block, &view)?);
            let view = ReceiveView { node, label, current: block, combined: &alone_combined, instants: None };
            alone.insert(node, strategy.transmit(node, block, &view)?);
        }

        let trace = deterministic_simulate(net, g, a, q, &coded)?;
        let mut isolated: BTreeMap<PairId, BTreeMap<NodeId, BitSignal>> = BTreeMap::new();
        for p in net.pairs() {
            if net.is_routable(p) {
                isolated.insert(p, isolated_receive(net, q, p, &alone)?);
            }
        }

        let mut combined = BTreeMap::new();
        let mut reference = BTreeMap::new();
        let mut receivers = Vec::with_capacity(trace.reconstructions.len());
        for r in trace.reconstructions {
            let y = isolated[&r.node.pair][&r.node.base];
            combined.insert(r.node, r.reconstructed);
            reference.insert(r.node, y);
            receivers.push(Reconstruction { isolated: y, ..r });
        }
        let raw = trace.instants.iter().map(|i| i.signals.iter().map(|s| (s.node, s.received)).collect()).collect();
        coded_combined.push(combined);
        coded_instants.push(raw);
        alone_combined.push(reference);
        blocks.push(BlockRecord { block, receivers });
    }
    Ok(BlockTrace { seed, q, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::tdma;
    use crate::network_model::ChannelGain;
    use crate::route_expansion::expand;

    fn two_relay() -> LayeredNetwork {
        let layers = vec![
            vec!["S1".into(), "S2".into(), "S3".into()],
            vec!["A".into(), "B".into()],
            vec!["D1".into(), "D2".into(), "D3".into()],
        ];
        let edges = [
            ("S1", "A", 2),
            ("S2", "A", 3),
            ("S2", "B", 1),
            ("S3", "B", 2),
            ("A", "D1", 3),
            ("A", "D2", 1),
            ("B", "D2", 2),
            ("B", "D3", 3),
        ]
        .iter()
        .map(|&(a, b, n)| (a.to_string(), b.to_string(), ChannelGain::Deterministic(n)))
        .collect();
        LayeredNetwork::from_parts(layers, edges, None).unwrap()
    }

    #[test]
    fn identity_forward_matches_isolated_runs() {
        let net = two_relay();
        let g = expand(&net);
        let a = tdma(&g).unwrap();
        let trace = block_simulate(&net, &g, &a, 3, 4, &IdentityForward { q: 3 }, 5).unwrap();
        assert_eq!(trace.blocks.len(), 4);
        assert!(trace.all_equal());
        let d1 = trace.blocks[2].receivers.iter().find(|r| r.label == "D1:1").unwrap();
        assert_eq!(d1.reconstructed, d1.isolated);
    }

    struct PeekFuture;

    impl RelayStrategy for PeekFuture {
        fn transmit(&self, _node: ExpandedNode, block: usize, view: &ReceiveView<'_>) -> Result<BitSignal, SimError> {
            view.combined(block)
        }
    }

    struct RawInstant;

    impl RelayStrategy for RawInstant {
        fn transmit(&self, _node: ExpandedNode, block: usize, view: &ReceiveView<'_>) -> Result<BitSignal, SimError> {
            if block == 0 {
                return Ok(BitSignal::zero(3));
            }
            view.instant(block - 1, 0)
        }
    }

    #[test]
    fn strategies_cannot_read_undeclared_signals() {
        let net = two_relay();
        let g = expand(&net);
        let a = tdma(&g).unwrap();
        assert!(matches!(block_simulate(&net, &g, &a, 3, 2, &PeekFuture, 1), Err(SimError::StrategyArity { .. })));
        assert!(matches!(block_simulate(&net, &g, &a, 3, 2, &RawInstant, 1), Err(SimError::StrategyArity { .. })));
    }
}
