//! Layered multi-source multi-destination networks.
//!
//! A [`LayeredNetwork`] is a directed acyclic graph whose nodes are split into
//! layers `V_1..V_L`. Every edge joins layer `l` to layer `l + 1`, the first
//! layer holds the sources `S_1..S_K` and the last layer holds the
//! destinations `D_1..D_K`. Pair `j` is the source/destination couple
//! `(S_j, D_j)`.
//!
//! Besides construction and validation this module derives the structural
//! objects the rest of the crate is built on: routes, induced subgraphs
//! `G_ij`, the per-node pair index sets `J_V`, degrees and the route-adjacency
//! graph.

mod descriptor;

pub use descriptor::{parse_descriptor, write_descriptor, DescriptorError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node identifier. Identifiers are assigned layer by layer in input
/// order, so comparing ids also orders nodes by layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One-based identifier of a source/destination pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairId(pub u32);

impl PairId {
    /// Builds a pair id from a zero-based index.
    pub fn from_index(index: usize) -> Self {
        PairId(index as u32 + 1)
    }

    /// Zero-based position of the pair.
    pub fn index(self) -> usize {
        debug_assert!(self.0 >= 1, "pair ids are one-based");
        self.0 as usize - 1
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Gain of a single link.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelGain {
    /// Linear deterministic gain `n`: the top `n` bits of the transmitted
    /// vector reach the receiver.
    Deterministic(u32),
    /// Opaque complex Gaussian gain identified by a label. Gaussian gains are
    /// never instantiated numerically.
    Gaussian(String),
}

impl fmt::Display for ChannelGain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelGain::Deterministic(n) => write!(f, "{n}"),
            ChannelGain::Gaussian(label) => write!(f, "h:{label}"),
        }
    }
}

/// Channel model a network is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    Deterministic,
    Gaussian,
}

/// Topology family a generator produced. Bounds that depend on the family are
/// only applied to networks that carry the tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `K x 2 x ... x 2 x K` network with `relay_layers` middle layers.
    K22k { k: u32, relay_layers: u32 },
    /// Single-layer `(K, m)` folded chain.
    FoldedSingle { k: u32, m: u32 },
    /// Two-layer `(K, m)` folded chain.
    FoldedTwoLayer { k: u32, m: u32 },
    /// `L`-nested folded chain with `3^L` pairs.
    Nested { levels: u32 },
    /// Seeded random layered network.
    Random { seed: u64 },
}

/// Validation errors raised while building a network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("network needs at least two layers, got {0}")]
    TooFewLayers(usize),
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("first layer has {sources} nodes but last layer has {destinations}")]
    LayerMismatch { sources: usize, destinations: usize },
    #[error("node {0:?} appears more than once")]
    DuplicateNode(String),
    #[error("edge refers to unknown node {0:?}")]
    UnknownNode(String),
    #[error("edge {from:?} -> {to:?} does not join adjacent layers")]
    CrossLayerEdge { from: String, to: String },
    #[error("edge {from:?} -> {to:?} is listed twice")]
    DuplicateEdge { from: String, to: String },
    #[error("gain given for nonexistent edge {from:?} -> {to:?}")]
    DanglingGain { from: String, to: String },
    #[error("edge {from:?} -> {to:?} has no gain")]
    MissingGain { from: String, to: String },
    #[error("network mixes deterministic and Gaussian gains")]
    MixedGainKinds,
    #[error("pair {0} is out of range")]
    BadPair(u32),
}

/// Vertex and edge set of a subgraph of a network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subgraph {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// In/out degrees of every node and their overall maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degrees {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
    pub d_max: usize,
}

/// Bipartite graph joining `S_i` to `D_j` whenever a route exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteAdjacency {
    pub num_pairs: usize,
    /// `(source pair, destination pair)` couples joined by a route.
    pub edges: BTreeSet<(PairId, PairId)>,
}

impl RouteAdjacency {
    /// Number of destinations reachable from source `i`.
    pub fn source_degree(&self, i: PairId) -> usize {
        self.edges.iter().filter(|(s, _)| *s == i).count()
    }
}

/// A validated layered network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredNetwork {
    names: Vec<String>,
    layer_of: Vec<usize>,
    layers: Vec<Vec<NodeId>>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    gains: BTreeMap<(NodeId, NodeId), ChannelGain>,
    family: Option<Family>,
    /// Vertex set of `G_jj` for every pair, indexed by pair index.
    own_subgraph_nodes: Vec<BTreeSet<NodeId>>,
}

/// Builds a network from named layers, an edge list and a gain map.
///
/// The first layer lists the sources in pair order and the last layer lists
/// the destinations in the same order. Every edge needs exactly one gain and
/// every gain must belong to a listed edge.
pub fn build_network(
    layers: Vec<Vec<String>>,
    edges: Vec<(String, String)>,
    gains: BTreeMap<(String, String), ChannelGain>,
) -> Result<LayeredNetwork, NetworkError> {
    let edge_set: BTreeSet<&(String, String)> = edges.iter().collect();
    if let Some((from, to)) = gains.keys().find(|key| !edge_set.contains(key)) {
        return Err(NetworkError::DanglingGain { from: from.clone(), to: to.clone() });
    }
    let mut gained = Vec::with_capacity(edges.len());
    for (from, to) in edges {
        let gain = gains
            .get(&(from.clone(), to.clone()))
            .cloned()
            .ok_or_else(|| NetworkError::MissingGain { from: from.clone(), to: to.clone() })?;
        gained.push((from, to, gain));
    }
    LayeredNetwork::from_parts(layers, gained, None)
}

impl LayeredNetwork {
    /// Builds a network from named layers and edges that carry their gains.
    pub fn from_parts(
        layers: Vec<Vec<String>>,
        edges: Vec<(String, String, ChannelGain)>,
        family: Option<Family>,
    ) -> Result<Self, NetworkError> {
        if layers.len() < 2 {
            return Err(NetworkError::TooFewLayers(layers.len()));
        }
        if let Some(l) = layers.iter().position(|layer| layer.is_empty()) {
            return Err(NetworkError::EmptyLayer(l + 1));
        }
        let sources = layers[0].len();
        let destinations = layers[layers.len() - 1].len();
        if sources != destinations {
            return Err(NetworkError::LayerMismatch { sources, destinations });
        }

        let mut names = Vec::new();
        let mut layer_of = Vec::new();
        let mut by_name = BTreeMap::new();
        let mut id_layers = Vec::with_capacity(layers.len());
        for (l, layer) in layers.into_iter().enumerate() {
            let mut ids = Vec::with_capacity(layer.len());
            for name in layer {
                let id = NodeId(names.len() as u32);
                if by_name.insert(name.clone(), id).is_some() {
                    return Err(NetworkError::DuplicateNode(name));
                }
                names.push(name);
                layer_of.push(l);
                ids.push(id);
            }
            id_layers.push(ids);
        }

        let n = names.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut gains = BTreeMap::new();
        let mut mode = None;
        for (from, to, gain) in edges {
            let a = *by_name.get(&from).ok_or_else(|| NetworkError::UnknownNode(from.clone()))?;
            let b = *by_name.get(&to).ok_or_else(|| NetworkError::UnknownNode(to.clone()))?;
            if layer_of[b.index()] != layer_of[a.index()] + 1 {
                return Err(NetworkError::CrossLayerEdge { from, to });
            }
            let kind = matches!(gain, ChannelGain::Gaussian(_));
            if *mode.get_or_insert(kind) != kind {
                return Err(NetworkError::MixedGainKinds);
            }
            if gains.insert((a, b), gain).is_some() {
                return Err(NetworkError::DuplicateEdge { from, to });
            }
            out_adj[a.index()].push(b);
            in_adj[b.index()].push(a);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }

        let mut net = LayeredNetwork {
            names,
            layer_of,
            layers: id_layers,
            out_adj,
            in_adj,
            gains,
            family,
            own_subgraph_nodes: Vec::new(),
        };
        net.own_subgraph_nodes = (0..sources)
            .map(|j| {
                let p = PairId::from_index(j);
                net.route_union(net.source(p), net.destination(p))
            })
            .collect();
        Ok(net)
    }

    /// Number of source/destination pairs `K`.
    pub fn num_pairs(&self) -> usize {
        self.layers[0].len()
    }

    /// Number of layers `L`, counting the source and destination layers.
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn layers(&self) -> &[Vec<NodeId>] {
        &self.layers
    }

    /// Zero-based layer index of a node.
    pub fn layer_of(&self, node: NodeId) -> usize {
        self.layer_of[node.index()]
    }

    pub fn name(&self, node: NodeId) -> &str {
        &self.names[node.index()]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(|i| NodeId(i as u32))
    }

    pub fn source(&self, pair: PairId) -> NodeId {
        self.layers[0][pair.index()]
    }

    pub fn destination(&self, pair: PairId) -> NodeId {
        self.layers[self.layers.len() - 1][pair.index()]
    }

    pub fn pairs(&self) -> impl Iterator<Item = PairId> {
        (0..self.num_pairs()).map(PairId::from_index)
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    /// Returns a copy tagged with `family`.
    pub fn with_family(mut self, family: Option<Family>) -> Self {
        self.family = family;
        self
    }

    pub fn out_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.out_adj[node.index()]
    }

    pub fn in_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.in_adj[node.index()]
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.gains.contains_key(&(from, to))
    }

    /// All edges with their gains, ordered by `(from, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &ChannelGain)> {
        self.gains.iter().map(|(&(a, b), g)| (a, b, g))
    }

    pub fn num_edges(&self) -> usize {
        self.gains.len()
    }

    pub fn gain(&self, from: NodeId, to: NodeId) -> Option<&ChannelGain> {
        self.gains.get(&(from, to))
    }

    /// Channel model of the network. Networks without edges count as
    /// deterministic.
    pub fn mode(&self) -> ChannelMode {
        match self.gains.values().next() {
            Some(ChannelGain::Gaussian(_)) => ChannelMode::Gaussian,
            _ => ChannelMode::Deterministic,
        }
    }

    /// Largest deterministic gain `q`, or zero when there is none.
    pub fn max_gain(&self) -> u32 {
        self.gains
            .values()
            .filter_map(|g| match g {
                ChannelGain::Deterministic(n) => Some(*n),
                ChannelGain::Gaussian(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Returns a copy of the network whose gains are replaced by `gains`.
    /// Every edge must receive a gain and no other key may appear.
    pub fn with_gains(&self, gains: BTreeMap<(NodeId, NodeId), ChannelGain>) -> Result<Self, NetworkError> {
        let named = |a: NodeId, b: NodeId| (self.name(a).to_string(), self.name(b).to_string());
        if let Some(&(a, b)) = gains.keys().find(|key| !self.gains.contains_key(key)) {
            let (from, to) = named(a, b);
            return Err(NetworkError::DanglingGain { from, to });
        }
        if let Some(&(a, b)) = self.gains.keys().find(|key| !gains.contains_key(key)) {
            let (from, to) = named(a, b);
            return Err(NetworkError::MissingGain { from, to });
        }
        let kinds: BTreeSet<bool> = gains.values().map(|g| matches!(g, ChannelGain::Gaussian(_))).collect();
        if kinds.len() > 1 {
            return Err(NetworkError::MixedGainKinds);
        }
        let mut net = self.clone();
        net.gains = gains;
        Ok(net)
    }

    fn check_pair(&self, pair: PairId) -> Result<(), NetworkError> {
        if pair.0 == 0 || pair.index() >= self.num_pairs() {
            return Err(NetworkError::BadPair(pair.0));
        }
        Ok(())
    }

    /// All routes from `S_src` to `D_dst` as node sequences, in
    /// lexicographic order. Empty when the destination is unreachable.
    pub fn routes(&self, src: PairId, dst: PairId) -> Result<Vec<Vec<NodeId>>, NetworkError> {
        self.check_pair(src)?;
        self.check_pair(dst)?;
        let target = self.destination(dst);
        let mut found = Vec::new();
        let mut path = vec![self.source(src)];
        self.extend_routes(target, &mut path, &mut found);
        Ok(found)
    }

    fn extend_routes(&self, target: NodeId, path: &mut Vec<NodeId>, found: &mut Vec<Vec<NodeId>>) {
        let last = *path.last().expect("route prefix is never empty");
        if last == target {
            found.push(path.clone());
            return;
        }
        for &next in self.out_neighbors(last) {
            path.push(next);
            self.extend_routes(target, path, found);
            path.pop();
        }
    }

    /// Union of all nodes lying on some route from `from` to `to`.
    fn route_union(&self, from: NodeId, to: NodeId) -> BTreeSet<NodeId> {
        let mut forward = vec![false; self.num_nodes()];
        forward[from.index()] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &w in self.out_neighbors(v) {
                if !forward[w.index()] {
                    forward[w.index()] = true;
                    stack.push(w);
                }
            }
        }
        if !forward[to.index()] {
            return BTreeSet::new();
        }
        let mut backward = vec![false; self.num_nodes()];
        backward[to.index()] = true;
        let mut stack = vec![to];
        while let Some(v) = stack.pop() {
            for &w in self.in_neighbors(v) {
                if !backward[w.index()] {
                    backward[w.index()] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.num_nodes()).filter(|&i| forward[i] && backward[i]).map(|i| NodeId(i as u32)).collect()
    }

    /// Induced subgraph `G_ij`: every node on a route from `S_src` to
    /// `D_dst`, with all network edges between those nodes.
    pub fn induced_subgraph(&self, src: PairId, dst: PairId) -> Result<Subgraph, NetworkError> {
        self.check_pair(src)?;
        self.check_pair(dst)?;
        let nodes = if src == dst {
            self.own_subgraph_nodes[src.index()].clone()
        } else {
            self.route_union(self.source(src), self.destination(dst))
        };
        Ok(self.subgraph_on(nodes))
    }

    fn subgraph_on(&self, nodes: BTreeSet<NodeId>) -> Subgraph {
        let edges = nodes
            .iter()
            .flat_map(|&a| self.out_neighbors(a).iter().map(move |&b| (a, b)))
            .filter(|(_, b)| nodes.contains(b))
            .collect();
        Subgraph { nodes, edges }
    }

    /// Vertex set of `G_jj`.
    pub fn own_subgraph_nodes(&self, pair: PairId) -> &BTreeSet<NodeId> {
        &self.own_subgraph_nodes[pair.index()]
    }

    /// Whether `D_j` is reachable from `S_j`.
    pub fn is_routable(&self, pair: PairId) -> bool {
        !self.own_subgraph_nodes[pair.index()].is_empty()
    }

    /// Index set `J_V`: the pairs whose own induced subgraph contains `node`.
    pub fn pair_index_set(&self, node: NodeId) -> BTreeSet<PairId> {
        self.pairs().filter(|p| self.own_subgraph_nodes[p.index()].contains(&node)).collect()
    }

    /// In/out degrees and `d_max`.
    pub fn degrees(&self) -> Degrees {
        let in_degree: Vec<usize> = self.in_adj.iter().map(Vec::len).collect();
        let out_degree: Vec<usize> = self.out_adj.iter().map(Vec::len).collect();
        let d_max = in_degree.iter().chain(out_degree.iter()).copied().max().unwrap_or(0);
        Degrees { in_degree, out_degree, d_max }
    }

    /// Route-adjacency graph: `(S_i, D_j)` is an edge iff a route exists.
    pub fn route_adjacency_graph(&self) -> RouteAdjacency {
        let mut edges = BTreeSet::new();
        for i in self.pairs() {
            for j in self.pairs() {
                if !self.route_union(self.source(i), self.destination(j)).is_empty() {
                    edges.insert((i, j));
                }
            }
        }
        RouteAdjacency { num_pairs: self.num_pairs(), edges }
    }

    /// Whether `G_ii` and `G_jj` share no vertex.
    pub fn non_interfering(&self, i: PairId, j: PairId) -> Result<bool, NetworkError> {
        self.check_pair(i)?;
        self.check_pair(j)?;
        let a = &self.own_subgraph_nodes[i.index()];
        let b = &self.own_subgraph_nodes[j.index()];
        Ok(a.is_disjoint(b))
    }
}
