//! Generators for the named topology families and for random layered
//! networks.
//!
//! Every generated network carries its [`Family`] tag, so that family-specific
//! bounds can recognise it, and gives every edge the deterministic gain 1.
//! Sources are named `S1..SK`, destinations `D1..DK` and relays `A1..` for a
//! single relay layer or `V{l}_{i}` for relay layer `l` when there are several.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network_model::{ChannelGain, Family, LayeredNetwork, NetworkError};

/// Attempts [`gen_random`] makes before giving up.
pub const MAX_RANDOM_RETRIES: usize = 100;

/// Errors raised by the generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("bad relay pattern: {0}")]
    BadPattern(String),
    #[error("network is not a K x 2 x ... x 2 x K network")]
    NotK22K,
    #[error("no random network with every pair routable after {0} attempts")]
    UnroutableAfterRetries(usize),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Connectivity of a `K x 2 x ... x 2 x K` network.
///
/// Relays of one layer are indexed 0 and 1. `sources[i][r]` says whether
/// source `i` reaches relay `r` of the first relay layer, `middle[l][a][b]`
/// whether relay `a` of relay layer `l` reaches relay `b` of the next one, and
/// `destinations[j][r]` whether relay `r` of the last relay layer reaches
/// destination `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K22kPattern {
    pub sources: Vec<[bool; 2]>,
    pub middle: Vec<[[bool; 2]; 2]>,
    pub destinations: Vec<[bool; 2]>,
}

impl K22kPattern {
    /// Every source and destination on both relays, and full relay meshes.
    pub fn full(k: usize, relay_layers: usize) -> Self {
        K22kPattern {
            sources: vec![[true; 2]; k],
            middle: vec![[[true; 2]; 2]; relay_layers.saturating_sub(1)],
            destinations: vec![[true; 2]; k],
        }
    }

    /// Number of pairs.
    pub fn k(&self) -> usize {
        self.sources.len()
    }

    /// Number of relay layers `M`.
    pub fn relay_layers(&self) -> usize {
        self.middle.len() + 1
    }
}

fn bits2(s: &str) -> Option<[bool; 2]> {
    let b: Vec<bool> = s.chars().map(|c| c == '1').collect();
    (s.len() == 2 && s.chars().all(|c| c == '0' || c == '1')).then(|| [b[0], b[1]])
}

/// Text form: `src|mid|...|dst`. `src` and `dst` list one two-digit group per
/// pair, comma separated, giving the links to relays 0 and 1. Each `mid`
/// group has four digits for the relay links `00`, `01`, `10` and `11`.
/// For example `11,10,01|1001|10,11,01`.
impl FromStr for K22kPattern {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() < 2 {
            return Err(TopologyError::BadPattern(format!("`{s}` needs at least src|dst")));
        }
        let side = |part: &str| -> Result<Vec<[bool; 2]>, TopologyError> {
            part.split(',')
                .map(|g| bits2(g.trim()).ok_or_else(|| TopologyError::BadPattern(format!("bad group `{g}`"))))
                .collect()
        };
        let sources = side(parts[0])?;
        let destinations = side(parts[parts.len() - 1])?;
        let middle = parts[1..parts.len() - 1]
            .iter()
            .map(|g| {
                let g = g.trim();
                match (bits2(g.get(..2).unwrap_or("")), bits2(g.get(2..).unwrap_or(""))) {
                    (Some(a), Some(b)) => Ok([a, b]),
                    _ => Err(TopologyError::BadPattern(format!("bad relay group `{g}`"))),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(K22kPattern { sources, middle, destinations })
    }
}

impl fmt::Display for K22kPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = |b: &[bool; 2]| format!("{}{}", b[0] as u8, b[1] as u8);
        let side = |v: &[[bool; 2]]| v.iter().map(group).collect::<Vec<_>>().join(",");
        write!(f, "{}", side(&self.sources))?;
        for m in &self.middle {
            write!(f, "|{}{}", group(&m[0]), group(&m[1]))?;
        }
        write!(f, "|{}", side(&self.destinations))
    }
}

fn unit(from: String, to: String) -> (String, String, ChannelGain) {
    (from, to, ChannelGain::Deterministic(1))
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// Name of relay `i` (1-based) in relay layer `l` (1-based) of a network
/// with `relay_layers` relay layers.
fn relay_name(relay_layers: usize, l: usize, i: usize) -> String {
    if relay_layers == 1 {
        format!("A{i}")
    } else {
        format!("V{}_{i}", l + 1)
    }
}

/// `K x 2 x ... x 2 x K` network with the given relay pattern.
pub fn gen_k22k(pattern: &K22kPattern) -> Result<LayeredNetwork, TopologyError> {
    let k = pattern.k();
    if k == 0 {
        return Err(TopologyError::BadParams("K must be at least 1".into()));
    }
    if pattern.destinations.len() != k {
        return Err(TopologyError::BadPattern(format!(
            "{k} source groups but {} destination groups",
            pattern.destinations.len()
        )));
    }
    let m = pattern.relay_layers();
    let relays = |l: usize| (1..=2).map(|i| relay_name(m, l, i)).collect::<Vec<_>>();
    let mut layers = vec![names("S", k)];
    layers.extend((1..=m).map(relays));
    layers.push(names("D", k));

    let mut edges = Vec::new();
    for (i, links) in pattern.sources.iter().enumerate() {
        for (r, &linked) in links.iter().enumerate() {
            if linked {
                edges.push(unit(format!("S{}", i + 1), relay_name(m, 1, r + 1)));
            }
        }
    }
    for (l, mesh) in pattern.middle.iter().enumerate() {
        for (a, row) in mesh.iter().enumerate() {
            for (b, &linked) in row.iter().enumerate() {
                if linked {
                    edges.push(unit(relay_name(m, l + 1, a + 1), relay_name(m, l + 2, b + 1)));
                }
            }
        }
    }
    for (j, links) in pattern.destinations.iter().enumerate() {
        for (r, &linked) in links.iter().enumerate() {
            if linked {
                edges.push(unit(relay_name(m, m, r + 1), format!("D{}", j + 1)));
            }
        }
    }
    let family = Family::K22k { k: k as u32, relay_layers: m as u32 };
    Ok(LayeredNetwork::from_parts(layers, edges, Some(family))?)
}

/// Whether a `K x 2 x ... x 2 x K` network is non-interfering: no relay of the
/// last relay layer is reachable from both relays of the first relay layer.
pub fn is_non_interfering_k22k(net: &LayeredNetwork) -> Result<bool, TopologyError> {
    let Some(Family::K22k { relay_layers, .. }) = net.family() else {
        return Err(TopologyError::NotK22K);
    };
    let m = *relay_layers as usize;
    let layers = net.layers();
    if layers.len() != m + 2 || layers[1..=m].iter().any(|l| l.len() != 2) {
        return Err(TopologyError::NotK22K);
    }
    let reach = |start| {
        let mut frontier = BTreeSet::from([start]);
        for _ in 1..m {
            frontier = frontier.iter().flat_map(|&v| net.out_neighbors(v).iter().copied()).collect();
        }
        frontier
    };
    let first = &layers[1];
    Ok(reach(first[0]).is_disjoint(&reach(first[1])))
}

/// Destinations (0-based) reached by source `i` (0-based) in a `(K, m)`
/// folded chain: `1 + ((i-1)^+ + (j-1)) mod K` in 1-based terms.
pub fn folded_targets(k: usize, m: usize, i: usize) -> Vec<usize> {
    (0..m).map(|j| (i + j) % k).collect()
}

fn check_km(k: u32, m: u32) -> Result<(usize, usize), TopologyError> {
    if m < 1 || m > k {
        return Err(TopologyError::BadParams(format!("need 1 <= m <= K, got K={k}, m={m}")));
    }
    Ok((k as usize, m as usize))
}

/// Single-layer `(K, m)` folded chain.
pub fn gen_folded_single(k: u32, m: u32) -> Result<LayeredNetwork, TopologyError> {
    let (kk, mm) = check_km(k, m)?;
    let edges = (0..kk)
        .flat_map(|i| {
            folded_targets(kk, mm, i).into_iter().map(move |d| unit(format!("S{}", i + 1), format!("D{}", d + 1)))
        })
        .collect();
    let layers = vec![names("S", kk), names("D", kk)];
    Ok(LayeredNetwork::from_parts(layers, edges, Some(Family::FoldedSingle { k, m }))?)
}

/// Two-layer `(K, m)` folded chain: pair `i` reaches its destination over
/// the relays a single-layer chain would connect source `i` to.
pub fn gen_folded_two_layer(k: u32, m: u32) -> Result<LayeredNetwork, TopologyError> {
    let (kk, mm) = check_km(k, m)?;
    let mut edges = BTreeSet::new();
    for i in 0..kk {
        for r in folded_targets(kk, mm, i) {
            edges.insert((format!("S{}", i + 1), format!("A{}", r + 1)));
            edges.insert((format!("A{}", r + 1), format!("D{}", i + 1)));
        }
    }
    let layers = vec![names("S", kk), names("A", kk), names("D", kk)];
    let edges = edges.into_iter().map(|(a, b)| unit(a, b)).collect();
    Ok(LayeredNetwork::from_parts(layers, edges, Some(Family::FoldedTwoLayer { k, m }))?)
}

/// Source-to-destination links (0-based pair indices) of the `L`-nested
/// folded chain. Pair `c * 3^(L-1) + i` is pair `i` of copy `c`.
pub fn nested_links(levels: u32) -> Vec<(usize, usize)> {
    if levels <= 1 {
        return (0..3).flat_map(|i| folded_targets(3, 2, i).into_iter().map(move |d| (i, d))).collect();
    }
    let inner = nested_links(levels - 1);
    let n = 3usize.pow(levels - 1);
    let mut links = Vec::with_capacity(3 * inner.len() + 3 * n);
    for c in 0..3 {
        links.extend(inner.iter().map(|&(s, d)| (c * n + s, c * n + d)));
    }
    for c in 0..3 {
        links.extend((0..n).map(|i| (c * n + i, ((c + 1) % 3) * n + i)));
    }
    links.sort_unstable();
    links
}

/// `L`-nested folded chain with `3^L` pairs.
pub fn gen_nested(levels: u32) -> Result<LayeredNetwork, TopologyError> {
    if !(1..=6).contains(&levels) {
        return Err(TopologyError::BadParams(format!("nesting depth {levels} outside 1..=6")));
    }
    let k = 3usize.pow(levels);
    let edges =
        nested_links(levels).into_iter().map(|(s, d)| unit(format!("S{}", s + 1), format!("D{}", d + 1))).collect();
    let layers = vec![names("S", k), names("D", k)];
    Ok(LayeredNetwork::from_parts(layers, edges, Some(Family::Nested { levels }))?)
}

/// Random layered network: each edge between adjacent layers is present
/// with probability `p`. Draws again until every pair is routable.
pub fn gen_random(layer_sizes: &[usize], p: f64, seed: u64) -> Result<LayeredNetwork, TopologyError> {
    if layer_sizes.len() < 2 {
        return Err(TopologyError::BadParams("need at least two layers".into()));
    }
    if layer_sizes.contains(&0) {
        return Err(TopologyError::BadParams("layers must be non-empty".into()));
    }
    if layer_sizes[0] != layer_sizes[layer_sizes.len() - 1] {
        return Err(TopologyError::BadParams("first and last layer sizes differ".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(TopologyError::BadParams(format!("edge probability {p} outside [0, 1]")));
    }
    let last = layer_sizes.len() - 1;
    let layer_names: Vec<Vec<String>> = layer_sizes
        .iter()
        .enumerate()
        .map(|(l, &n)| match l {
            0 => names("S", n),
            l if l == last => names("D", n),
            l => (1..=n).map(|i| relay_name(last - 1, l, i)).collect(),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RANDOM_RETRIES {
        let mut edges = Vec::new();
        for l in 0..last {
            for a in &layer_names[l] {
                for b in &layer_names[l + 1] {
                    if rng.gen_bool(p) {
                        edges.push(unit(a.clone(), b.clone()));
                    }
                }
            }
        }
        let net = LayeredNetwork::from_parts(layer_names.clone(), edges, Some(Family::Random { seed }))?;
        if net.pairs().all(|pair| net.is_routable(pair)) {
            return Ok(net);
        }
    }
    Err(TopologyError::UnroutableAfterRetries(MAX_RANDOM_RETRIES))
}

fn fixture(second_layer: [(&str, &str); 4]) -> LayeredNetwork {
    let first = [("S1", "A"), ("S2", "A"), ("S2", "B"), ("S3", "B")];
    let edges = first.iter().chain(second_layer.iter()).map(|&(a, b)| unit(a.into(), b.into())).collect();
    let layers = vec![names("S", 3), vec!["A".into(), "B".into()], names("D", 3)];
    LayeredNetwork::from_parts(layers, edges, None).expect("fixture is well formed")
}

/// Three pairs over relays `A` and `B` where relay `A` serves `D1, D2` and
/// relay `B` serves `D2, D3`. End-to-end interference avoidance already
/// reaches `1/2` here.
pub fn two_relay_chain() -> LayeredNetwork {
    fixture([("A", "D1"), ("A", "D2"), ("B", "D2"), ("B", "D3")])
}

/// Three pairs over relays `A` and `B` where relay `A` serves `D1, D3` and
/// relay `B` serves `D2, D3`. End-to-end avoidance needs three colors while
/// per-layer avoidance needs two.
pub fn two_relay_crossed() -> LayeredNetwork {
    fixture([("A", "D1"), ("A", "D3"), ("B", "D2"), ("B", "D3")])
}
