//! Route-expanded graphs.
//!
//! Every node `V_i` of a network is replaced by one copy `V_{i,j}` per pair
//! `j` in its index set `J_{V_i}`. The copies of one node form a super-node,
//! and two copies are joined exactly when their base nodes are joined. Nodes
//! with an empty index set are dropped, so a pair whose source cannot reach
//! its destination leaves no trace in the expansion and is reported as
//! unroutable.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::network_model::{LayeredNetwork, NodeId, PairId};

/// A copy `V_{i,j}` of base node `V_i` dedicated to pair `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExpandedNode {
    pub base: NodeId,
    pub pair: PairId,
}

/// All copies of one base node, in pair order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperNode {
    pub base: NodeId,
    /// Indices into [`RouteExpandedGraph::nodes`].
    pub members: Vec<usize>,
}

/// The route-expanded graph of a network.
///
/// Nodes are stored in `(layer, base, pair)` order and are addressed by their
/// position in that order throughout the crate.
#[derive(Debug, Clone)]
pub struct RouteExpandedGraph {
    net: LayeredNetwork,
    nodes: Vec<ExpandedNode>,
    index: HashMap<ExpandedNode, usize>,
    layer_of: Vec<usize>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    supernodes: BTreeMap<NodeId, SuperNode>,
    unroutable: Vec<PairId>,
}

/// Builds the route-expanded graph of `net`.
pub fn expand(net: &LayeredNetwork) -> RouteExpandedGraph {
    let mut nodes = Vec::new();
    let mut layer_of = Vec::new();
    for (l, layer) in net.layers().iter().enumerate() {
        for &base in layer {
            for pair in net.pair_index_set(base) {
                nodes.push(ExpandedNode { base, pair });
                layer_of.push(l);
            }
        }
    }
    let index: HashMap<ExpandedNode, usize> = nodes.iter().enumerate().map(|(i, &node)| (node, i)).collect();

    let mut supernodes: BTreeMap<NodeId, SuperNode> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        supernodes
            .entry(node.base)
            .or_insert_with(|| SuperNode { base: node.base, members: Vec::new() })
            .members
            .push(i);
    }

    let mut in_edges = vec![Vec::new(); nodes.len()];
    let mut out_edges = vec![Vec::new(); nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        for succ in net.out_neighbors(node.base) {
            if let Some(sn) = supernodes.get(succ) {
                for &k in &sn.members {
                    out_edges[i].push(k);
                    in_edges[k].push(i);
                }
            }
        }
    }
    for list in in_edges.iter_mut() {
        list.sort_unstable();
    }

    let unroutable = net.pairs().filter(|&p| !net.is_routable(p)).collect();
    RouteExpandedGraph { net: net.clone(), nodes, index, layer_of, in_edges, out_edges, supernodes, unroutable }
}

impl RouteExpandedGraph {
    /// The network this graph was expanded from.
    pub fn network(&self) -> &LayeredNetwork {
        &self.net
    }

    /// Expanded nodes in `(layer, base, pair)` order.
    pub fn nodes(&self) -> &[ExpandedNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: usize) -> ExpandedNode {
        self.nodes[idx]
    }

    /// Position of `node` in the graph order.
    pub fn index_of(&self, node: ExpandedNode) -> Option<usize> {
        self.index.get(&node).copied()
    }

    pub fn layer_of(&self, idx: usize) -> usize {
        self.layer_of[idx]
    }

    /// Indices of all expanded nodes in base layer `l`.
    pub fn layer_nodes(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.layer_of[i] == l)
    }

    /// Expanded in-neighbors of every pair.
    pub fn in_neighbors(&self, idx: usize) -> &[usize] {
        &self.in_edges[idx]
    }

    pub fn out_neighbors(&self, idx: usize) -> &[usize] {
        &self.out_edges[idx]
    }

    /// Number of expanded edges.
    pub fn num_edges(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    /// The set `N_{i,j}`: in-neighbors of `idx` carrying the same pair.
    pub fn pair_neighbors(&self, idx: usize) -> Vec<usize> {
        let pair = self.nodes[idx].pair;
        self.in_edges[idx].iter().copied().filter(|&k| self.nodes[k].pair == pair).collect()
    }

    pub fn supernodes(&self) -> impl Iterator<Item = &SuperNode> {
        self.supernodes.values()
    }

    pub fn supernode(&self, base: NodeId) -> Option<&SuperNode> {
        self.supernodes.get(&base)
    }

    /// Members of the super-node containing `idx`, including `idx` itself.
    pub fn mates(&self, idx: usize) -> &[usize] {
        &self.supernodes[&self.nodes[idx].base].members
    }

    /// Pairs whose source cannot reach their destination.
    pub fn unroutable_pairs(&self) -> &[PairId] {
        &self.unroutable
    }

    /// Human-readable label `base:pair`.
    pub fn label(&self, idx: usize) -> String {
        let node = self.nodes[idx];
        format!("{}:{}", self.net.name(node.base), node.pair)
    }

    /// Text dump: one `base:pair@layer` line per node (layers counted from
    /// one), a blank line, then one `from -> to` line per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.nodes.len() {
            let _ = writeln!(out, "{}@{}", self.label(i), self.layer_of[i] + 1);
        }
        out.push('\n');
        for i in 0..self.nodes.len() {
            for &k in &self.out_edges[i] {
                let _ = writeln!(out, "{} -> {}", self.label(i), self.label(k));
            }
        }
        out
    }
}
