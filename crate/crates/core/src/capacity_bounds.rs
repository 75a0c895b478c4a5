//! Upper bounds on the normalized sum-capacity, the constructive colorings
//! that meet them, and the MCL versus MIL comparison report.
//!
//! Bounds are exact rationals. Family-specific bounds are applied only to
//! networks whose [`Family`] tag names the family; any other network gets
//! the cross-path bound `1/2` when some source reaches a foreign destination
//! and the trivial bound `1` otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::channel_sim::cancelling_receive;
use crate::coloring::{
    achievable_alpha, exact_coloring, search_end_to_end, search_mcl, search_mil, tdma, ColorAssignment, ColorSet,
    SearchError,
};
use crate::network_model::{ChannelGain, Family, LayeredNetwork, NetworkError, NodeId, PairId};
use crate::route_expansion::{expand, ExpandedNode, RouteExpandedGraph};
use crate::topology_gen::{
    gen_folded_single, gen_folded_two_layer, gen_nested, is_non_interfering_k22k, TopologyError,
};

/// Errors raised by bounds and constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("no path from S{i} to D{j} with {i} != {j}", i = .0.0, j = .1.0)]
    NoCrossPath(PairId, PairId),
    #[error("network is not a K x 2 x ... x 2 x K network")]
    NotK22K,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("no construction for m = {m} with K = {k}; only m in {{1, 2, K-1, K}} is covered")]
    UnsupportedM { k: u32, m: u32 },
    #[error("construction left {0} without a valid receive set")]
    ConstructionFailed(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Serializes a rational as `p/q`, or `p` when the denominator is one.
pub fn serialize_ratio<S: Serializer>(r: &Ratio<u64>, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(r)
}

fn serialize_opt_ratio<S: Serializer>(r: &Option<Ratio<u64>>, serializer: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => serializer.collect_str(r),
        None => serializer.serialize_none(),
    }
}

/// Which argument produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundRule {
    /// Some source reaches a foreign destination: `1/2`.
    #[serde(rename = "lemma1_cross_path")]
    CrossPath,
    /// Non-interfering `K x 2 x ... x 2 x K` network: `1/d_max`.
    #[serde(rename = "thm2_noninterfering")]
    K22kNonInterfering,
    /// Interfering `K x 2 x ... x 2 x K` network: `1/K`.
    #[serde(rename = "thm2_interfering")]
    K22kInterfering,
    /// Single-layer `(K, m)` folded chain: `1/m`.
    #[serde(rename = "lemma3_folded")]
    FoldedSingle,
    /// Two-layer `(K, m)` folded chain: `1/m`.
    #[serde(rename = "thm4_two_layer_folded")]
    FoldedTwoLayer,
    /// Nothing applies: `1`.
    #[serde(rename = "none_applicable")]
    NoneApplicable,
}

impl BoundRule {
    /// Tag used in reports and serialized output.
    pub fn tag(self) -> &'static str {
        match self {
            BoundRule::CrossPath => "lemma1_cross_path",
            BoundRule::K22kNonInterfering => "thm2_noninterfering",
            BoundRule::K22kInterfering => "thm2_interfering",
            BoundRule::FoldedSingle => "lemma3_folded",
            BoundRule::FoldedTwoLayer => "thm4_two_layer_folded",
            BoundRule::NoneApplicable => "none_applicable",
        }
    }
}

impl fmt::Display for BoundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Gain assignment under which some node must decode two messages.
///
/// Edges on the three chosen paths get the high gain `n`, every other edge
/// gets gain zero. `v_star` lies in both `G_ij` and `G_jj`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossPathWitness {
    pub i: PairId,
    pub j: PairId,
    /// Route from `S_i` to `D_j`.
    pub cross_path: Vec<NodeId>,
    /// Route from `S_i` to `D_i`.
    pub own_path_i: Vec<NodeId>,
    /// Route from `S_j` to `D_j`.
    pub own_path_j: Vec<NodeId>,
    /// Edges carrying the high gain.
    pub high_edges: BTreeSet<(NodeId, NodeId)>,
    pub v_star: NodeId,
}

impl CrossPathWitness {
    /// Full deterministic gain map: `n` on the high edges, zero elsewhere.
    pub fn deterministic_gains(&self, net: &LayeredNetwork, n: u32) -> BTreeMap<(NodeId, NodeId), ChannelGain> {
        net.edges()
            .map(|(a, b, _)| {
                let gain = if self.high_edges.contains(&(a, b)) { n } else { 0 };
                ((a, b), ChannelGain::Deterministic(gain))
            })
            .collect()
    }
}

/// An upper bound on the normalized sum-capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    #[serde(serialize_with = "serialize_ratio")]
    pub alpha_upper: Ratio<u64>,
    pub rule: BoundRule,
    pub witness: Option<CrossPathWitness>,
}

fn path_edges(path: &[NodeId]) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
    path.windows(2).map(|w| (w[0], w[1]))
}

/// Cross-path witness for pairs `i != j`.
pub fn witness_lemma1(net: &LayeredNetwork, i: PairId, j: PairId) -> Result<CrossPathWitness, BoundError> {
    if i == j {
        return Err(BoundError::NoCrossPath(i, j));
    }
    let first = |src, dst| -> Result<Option<Vec<NodeId>>, BoundError> { Ok(net.routes(src, dst)?.into_iter().next()) };
    let Some(cross_path) = first(i, j)? else {
        return Err(BoundError::NoCrossPath(i, j));
    };
    let own_path_i = first(i, i)?.ok_or(BoundError::NoCrossPath(i, j))?;
    let own_path_j = first(j, j)?.ok_or(BoundError::NoCrossPath(i, j))?;
    let high_edges = [&cross_path, &own_path_i, &own_path_j].into_iter().flat_map(|p| path_edges(p)).collect();
    let own_j = net.own_subgraph_nodes(j);
    let v_star =
        *cross_path.iter().find(|v| own_j.contains(v)).expect("the cross path ends at D_j, which lies in G_jj");
    Ok(CrossPathWitness { i, j, cross_path, own_path_i, own_path_j, high_edges, v_star })
}

fn unit_fraction(d: usize) -> Ratio<u64> {
    Ratio::new(1, d.max(1) as u64)
}

/// `d_max` of a `K x 2 x ... x 2 x K` network: the largest in-degree of a
/// first-layer relay or out-degree of a last-layer relay.
fn k22k_d_max(net: &LayeredNetwork) -> usize {
    let deg = net.degrees();
    let layers = net.layers();
    let first = layers[1].iter().map(|v| deg.in_degree[v.index()]);
    let last = layers[layers.len() - 2].iter().map(|v| deg.out_degree[v.index()]);
    first.chain(last).max().unwrap_or(1)
}

/// Best upper bound the known results give for `net`.
pub fn upper_bound(net: &LayeredNetwork) -> BoundResult {
    let plain = |alpha_upper, rule| BoundResult { alpha_upper, rule, witness: None };
    if net.num_pairs() == 1 {
        return plain(Ratio::from_integer(1), BoundRule::NoneApplicable);
    }
    match net.family() {
        Some(Family::FoldedSingle { m, .. }) => return plain(unit_fraction(*m as usize), BoundRule::FoldedSingle),
        Some(Family::FoldedTwoLayer { m, .. }) => return plain(unit_fraction(*m as usize), BoundRule::FoldedTwoLayer),
        Some(Family::K22k { .. }) => match is_non_interfering_k22k(net) {
            Ok(true) => return plain(unit_fraction(k22k_d_max(net)), BoundRule::K22kNonInterfering),
            Ok(false) => return plain(unit_fraction(net.num_pairs()), BoundRule::K22kInterfering),
            Err(_) => {}
        },
        _ => {}
    }
    for i in net.pairs() {
        for j in net.pairs().filter(|&j| j != i) {
            if let Ok(w) = witness_lemma1(net, i, j) {
                return BoundResult { alpha_upper: Ratio::new(1, 2), rule: BoundRule::CrossPath, witness: Some(w) };
            }
        }
    }
    plain(Ratio::from_integer(1), BoundRule::NoneApplicable)
}

/// A network together with a coloring built for it.
#[derive(Debug, Clone)]
pub struct Construction {
    pub graph: RouteExpandedGraph,
    pub assignment: ColorAssignment,
}

impl Construction {
    fn finish(graph: RouteExpandedGraph, mut assignment: ColorAssignment) -> Result<Self, BoundError> {
        assignment.derive_all_receive(&graph).map_err(|idx| BoundError::ConstructionFailed(graph.label(idx)))?;
        Ok(Construction { graph, assignment })
    }

    /// Index of the expanded node of `pair` at the node named `name`.
    pub fn index(&self, name: &str, pair: u32) -> Option<usize> {
        let base = self.graph.network().node_by_name(name)?;
        self.graph.index_of(ExpandedNode { base, pair: PairId(pair) })
    }
}

/// Colors the sides of a two-node relay layer: `groups[r]` holds the pairs
/// attached to relay `r` alone and `both` those attached to both. One pair of
/// each side shares a color until the smaller side runs out; every other
/// pair gets a color of its own.
fn pair_up(groups: [Vec<PairId>; 2], both: Vec<PairId>) -> BTreeMap<PairId, usize> {
    let [a, b] = groups;
    let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut colors = BTreeMap::new();
    let mut next = 0;
    for (k, &p) in big.iter().enumerate() {
        if let Some(&q) = small.get(k) {
            colors.insert(q, next);
        }
        colors.insert(p, next);
        next += 1;
    }
    for p in both {
        colors.insert(p, next);
        next += 1;
    }
    colors
}

/// Groups pairs by which of the two relays in `relays` their end node
/// `end(p)` is linked to.
fn relay_groups(
    net: &LayeredNetwork,
    relays: &[NodeId],
    linked: impl Fn(PairId, NodeId) -> bool,
) -> ([Vec<PairId>; 2], Vec<PairId>) {
    let mut groups = [Vec::new(), Vec::new()];
    let mut both = Vec::new();
    for p in net.pairs() {
        match (linked(p, relays[0]), linked(p, relays[1])) {
            (true, true) => both.push(p),
            (true, false) => groups[0].push(p),
            (false, true) => groups[1].push(p),
            (false, false) => {}
        }
    }
    (groups, both)
}

/// Pair-level coloring of transmitting layer `l`: pairs conflict when they
/// share a transmitting node, or when a receiver of one hears a transmitter
/// of the other.
fn pair_layer_coloring(g: &RouteExpandedGraph, l: usize) -> BTreeMap<PairId, usize> {
    let layer: Vec<usize> = g.layer_nodes(l).collect();
    let pairs: Vec<PairId> = layer.iter().map(|&i| g.node(i).pair).collect::<BTreeSet<_>>().into_iter().collect();
    let pos = |p: PairId| pairs.binary_search(&p).expect("pair is present");
    let mut adj = vec![vec![false; pairs.len()]; pairs.len()];
    let mut join = |a: PairId, b: PairId| {
        if a != b {
            adj[pos(a)][pos(b)] = true;
            adj[pos(b)][pos(a)] = true;
        }
    };
    for &idx in &layer {
        for &m in g.mates(idx) {
            join(g.node(idx).pair, g.node(m).pair);
        }
        for &r in g.out_neighbors(idx) {
            for &k in g.in_neighbors(r) {
                join(g.node(r).pair, g.node(k).pair);
            }
        }
    }
    let (_, colors) = exact_coloring(&adj);
    pairs.into_iter().zip(colors).collect()
}

/// Independent Layer coloring of a `K x 2 x ... x 2 x K` network with
/// `d_max` colors when it is non-interfering, and TDMA otherwise.
///
/// The first and last transmitting layers use the pairing of pairs attached
/// to one relay only; relay-to-relay layers use a pair-level exact coloring.
/// Fails when some pair has no route.
pub fn construct_thm2_coloring(net: &LayeredNetwork) -> Result<Construction, BoundError> {
    let non_interfering = is_non_interfering_k22k(net).map_err(|_| BoundError::NotK22K)?;
    let g = expand(net);
    if let Some(&p) = g.unroutable_pairs().first() {
        return Err(SearchError::Unroutable(p).into());
    }
    if !non_interfering {
        let a = tdma(&g)?;
        return Ok(Construction { graph: g, assignment: a });
    }
    let layers = net.layers();
    let m = layers.len() - 2;
    let mut per_layer: Vec<BTreeMap<PairId, usize>> = Vec::with_capacity(m + 1);
    for l in 0..=m {
        let colors = if l == 0 {
            let (groups, both) = relay_groups(net, &layers[1], |p, r| net.has_edge(net.source(p), r));
            pair_up(groups, both)
        } else if l == m {
            let (groups, both) = relay_groups(net, &layers[m], |p, r| net.has_edge(r, net.destination(p)));
            pair_up(groups, both)
        } else {
            pair_layer_coloring(&g, l)
        };
        per_layer.push(colors);
    }
    let num_colors = per_layer.iter().flat_map(|c| c.values()).max().map_or(1, |c| c + 1);
    let mut a = ColorAssignment::empty(&g, num_colors);
    for idx in 0..g.len() {
        let l = g.layer_of(idx);
        if l <= m {
            let color = per_layer[l][&g.node(idx).pair];
            a.colors[idx].transmit = ColorSet::single(color);
        }
    }
    Construction::finish(g, a)
}

fn source_index(g: &RouteExpandedGraph, p: PairId) -> usize {
    let base = g.network().source(p);
    g.index_of(ExpandedNode { base, pair: p }).expect("routable pair has its source")
}

/// Whether destination `x` of a single-layer folded chain with transmit
/// masks `t` (cyclic, window width `m`) admits a receive set satisfying the
/// Coded Layer conditions: one own color `r0`, plus one color `c*` outside
/// the own set that every source holding `r0` also holds and no other source
/// in the window holds.
fn folded_window_ok(t: &[u64], x: usize, m: usize, palette: u64) -> bool {
    let n = t.len();
    let others: Vec<u64> = (1..m).map(|d| t[(x + n - d) % n]).collect();
    let own = t[x];
    (0..m).filter(|&r| own >> r & 1 == 1).any(|r0| {
        let r0 = 1u64 << r0;
        if others.iter().all(|&y| y & r0 == 0) {
            return true;
        }
        (0..m).map(|c| 1u64 << c).filter(|&c| c & palette & !own != 0).any(|c| {
            let r = r0 | c;
            others.iter().all(|&y| y & r == 0 || y & r == r)
        })
    })
}

/// Upper limit on transmit-set trials in [`folded_extras`].
const FOLDED_SEARCH_BUDGET: u64 = 5_000_000;

/// Transmit masks of the `s` sources that follow a periodic run of
/// singletons `{c_(i mod m)}` in a single-layer folded chain with `m` colors.
///
/// The nested sets `E_k = {c : c mod s <= k}` are tried first. They end in
/// the full palette and work for most `(m, s)`; otherwise the masks are
/// found by backtracking.
fn folded_extras(m: usize, s: usize) -> Option<Vec<u64>> {
    let palette = (1u64 << m) - 1;
    let ring =
        |extras: &[u64]| -> Vec<u64> { (0..2 * m).map(|i| 1u64 << (i % m)).chain(extras.iter().copied()).collect() };
    let all_ok = |extras: &[u64]| {
        let t = ring(extras);
        (0..t.len()).all(|x| folded_window_ok(&t, x, m, palette))
    };
    let nested: Vec<u64> = (0..s).map(|k| (0..m).filter(|c| c % s <= k).fold(0, |acc, c| acc | 1 << c)).collect();
    if all_ok(&nested) {
        return Some(nested);
    }

    fn extend(m: usize, s: usize, t: &mut Vec<u64>, budget: &mut u64, done: &dyn Fn(&[u64]) -> bool) -> bool {
        let placed = t.len() - 2 * m;
        if placed == s {
            return done(&t[2 * m..]);
        }
        let palette = (1u64 << m) - 1;
        for mask in 1..=palette {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            t.push(mask);
            let x = t.len() - 1;
            if folded_window_ok(t, x, m, palette) && extend(m, s, t, budget, done) {
                return true;
            }
            t.pop();
        }
        false
    }
    let mut t = ring(&[]);
    let mut budget = FOLDED_SEARCH_BUDGET;
    extend(m, s, &mut t, &mut budget, &all_ok).then(|| t[2 * m..].to_vec())
}

/// Repetition coloring of the single-layer `(K, m)` folded chain with `m`
/// colors.
///
/// For `K = 2m - 1` source `i` (1-based) sends in every color `c_t` with
/// `t + 1 <= i <= t + m`. Otherwise write `K = q m + s` with `0 <= s < m`:
/// the first `q m` sources send in color `c_(i mod m)` and the last `s` use
/// the repetition sets of [`folded_extras`].
pub fn construct_folded_single_coloring(k: u32, m: u32) -> Result<Construction, BoundError> {
    let net = gen_folded_single(k, m)?;
    let g = expand(&net);
    let (k, m) = (k as usize, m as usize);
    let masks: Vec<u64> = if k == 2 * m - 1 {
        (1..=k).map(|i| (0..m).filter(|&t| t < i && i <= t + m).fold(0, |acc, t| acc | 1 << t)).collect()
    } else {
        let (q, s) = (k / m, k % m);
        let extras = folded_extras(m, s)
            .ok_or_else(|| BoundError::ConstructionFailed(format!("no repetition sets for K={k}, m={m}")))?;
        (0..q * m).map(|i| 1u64 << (i % m)).chain(extras).collect()
    };
    let mut a = ColorAssignment::empty(&g, m);
    for p in net.pairs() {
        a.colors[source_index(&g, p)].transmit = ColorSet::from_bits(masks[p.index()]);
    }
    Construction::finish(g, a)
}

/// Coded Layer coloring of the two-layer `(K, m)` folded chain with `m`
/// colors, for `m` in `{1, 2, K-1, K}`.
///
/// Pairs `1..K-1` use one color on every node, alternating for `m = 2` and
/// `c_{j-1}` for `m = K-1`. When `K` is odd (for `m = 2`) or always (for
/// `m = K-1`), pair `K` repeats its source signal in every color, and each
/// relay on its paths codes in the colors of its other pairs and transmits
/// in the remaining ones.
pub fn construct_folded_two_layer_coloring(k: u32, m: u32) -> Result<Construction, BoundError> {
    if m < 1 || m > k {
        return Err(BoundError::BadParams(format!("need 1 <= m <= K, got K={k}, m={m}")));
    }
    let net = gen_folded_two_layer(k, m)?;
    let g = expand(&net);
    if m == k {
        let a = tdma(&g)?;
        return Ok(Construction { graph: g, assignment: a });
    }
    let (kk, mm) = (k as usize, m as usize);
    let single: Box<dyn Fn(PairId) -> usize> = match m {
        1 => Box::new(|_| 0),
        2 => Box::new(|p: PairId| p.index() % 2),
        _ if mm == kk - 1 => Box::new(|p: PairId| p.index()),
        _ => return Err(BoundError::UnsupportedM { k, m }),
    };
    let coded = if mm == 2 { kk % 2 == 1 } else { mm == kk - 1 && mm > 1 };
    let last = PairId(k);
    let palette = ColorSet::first(mm);
    let mut a = ColorAssignment::empty(&g, mm);
    for idx in 0..g.len() {
        let node = g.node(idx);
        if g.layer_of(idx) == 2 || (coded && node.pair == last) {
            continue;
        }
        a.colors[idx].transmit = ColorSet::single(single(node.pair));
    }
    if coded {
        for idx in 0..g.len() {
            let node = g.node(idx);
            if node.pair != last || g.layer_of(idx) == 2 {
                continue;
            }
            if g.layer_of(idx) == 0 {
                a.colors[idx].transmit = palette;
                continue;
            }
            let others = g.mates(idx).iter().fold(ColorSet::EMPTY, |acc, &k| acc | a.colors[k].transmit);
            a.colors[idx].coding = others;
            a.colors[idx].transmit = palette - others;
        }
    }
    Construction::finish(g, a)
}

/// Colors source `p` of an `L`-nested folded chain sends in: the digits of
/// `p - 1` in base 3, outermost copy first, map to `{0}`, `{0, 1}` and `{1}`,
/// and each combination of choices names the color `sum_k b_k 2^(L-k)`.
pub fn nested_slots(levels: u32, p: PairId) -> ColorSet {
    let choices: [&[usize]; 3] = [&[0], &[0, 1], &[1]];
    let mut slots = vec![0usize];
    let mut rest = p.index();
    let mut digits = Vec::with_capacity(levels as usize);
    for _ in 0..levels {
        digits.push(rest % 3);
        rest /= 3;
    }
    for &d in digits.iter().rev() {
        slots = slots.iter().flat_map(|&s| choices[d].iter().map(move |&b| 2 * s + b)).collect();
    }
    slots.into_iter().collect()
}

/// Repetition schedule of the `L`-nested folded chain with `2^L` colors.
///
/// Each destination listens in the smallest set of slots over which its
/// interference cancels. From `L = 2` on some destinations hear interferers
/// that share no slot outside the destination's own, so the schedule cancels
/// interference without satisfying the Coded Layer conditions.
pub fn construct_nested_schedule(levels: u32) -> Result<Construction, BoundError> {
    if !(1..=6).contains(&levels) {
        return Err(BoundError::BadParams(format!("nesting depth {levels} outside 1..=6")));
    }
    let net = gen_nested(levels)?;
    let g = expand(&net);
    let mut a = ColorAssignment::empty(&g, 1 << levels);
    for p in net.pairs() {
        a.colors[source_index(&g, p)].transmit = nested_slots(levels, p);
    }
    for idx in 0..g.len() {
        if g.layer_of(idx) == 1 {
            a.colors[idx].receive =
                cancelling_receive(&g, &a, idx).ok_or_else(|| BoundError::ConstructionFailed(g.label(idx)))?;
        }
    }
    Ok(Construction { graph: g, assignment: a })
}

/// Constructive coloring for a family-tagged network, if one exists.
pub fn construct_for(net: &LayeredNetwork) -> Option<Result<Construction, BoundError>> {
    match net.family()? {
        Family::FoldedSingle { k, m } => Some(construct_folded_single_coloring(*k, *m)),
        Family::FoldedTwoLayer { k, m } => Some(construct_folded_two_layer_coloring(*k, *m)),
        Family::Nested { levels } => Some(construct_nested_schedule(*levels)),
        Family::K22k { .. } => Some(construct_thm2_coloring(net)),
        Family::Random { .. } => None,
    }
}

/// One scheme in a [`GainReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub scheme: String,
    /// Number of colors, when the scheme produced a coloring.
    pub colors: Option<usize>,
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub alpha: Option<Ratio<u64>>,
    pub tight: bool,
    pub note: String,
}

/// Achieved rates of every scheme next to the upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainReport {
    pub rows: Vec<ReportRow>,
    pub bound: BoundResult,
    /// Best Coded Layer rate over the MIL rate.
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub mcl_over_mil: Option<Ratio<u64>>,
}

impl GainReport {
    /// Row of scheme `name`.
    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.scheme == name)
    }

    /// Aligned text table.
    pub fn to_text(&self) -> String {
        let show = |r: &Option<Ratio<u64>>| r.map_or("-".to_string(), |r| r.to_string());
        let mut out = String::new();
        let _ = writeln!(out, "{:<14} {:>4} {:>8} {:>8} {:<6} note", "scheme", "T", "alpha", "bound", "tight");
        let bound = self.bound.alpha_upper.to_string();
        for r in &self.rows {
            let t = r.colors.map_or("-".to_string(), |t| t.to_string());
            let tight = if r.tight { "yes" } else { "no" };
            let line = format!("{:<14} {:>4} {:>8} {:>8} {:<6} {}", r.scheme, t, show(&r.alpha), bound, tight, r.note);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(out, "bound rule: {}", self.bound.rule);
        let _ = writeln!(out, "mcl/mil: {}", show(&self.mcl_over_mil));
        out
    }
}

/// Runs every scheme on `net` and compares it with the upper bound.
/// `budget` limits the Coded Layer search.
pub fn gain_report(net: &LayeredNetwork, budget: u64) -> GainReport {
    let g = expand(net);
    let bound = upper_bound(net);
    let mut rows = Vec::new();
    let mut push = |scheme: &str, result: Result<ColorAssignment, String>, note: String| {
        let row = match result {
            Ok(a) => {
                let alpha = achievable_alpha(&g, &a).ok();
                ReportRow {
                    scheme: scheme.to_string(),
                    colors: Some(a.num_colors),
                    alpha,
                    tight: alpha == Some(bound.alpha_upper),
                    note,
                }
            }
            Err(e) => ReportRow { scheme: scheme.to_string(), colors: None, alpha: None, tight: false, note: e },
        };
        rows.push(row);
    };
    push("end_to_end", search_end_to_end(&g).map_err(|e| e.to_string()), String::new());
    push("mil", search_mil(&g).map_err(|e| e.to_string()), String::new());
    let t_max = net.num_pairs().min(crate::coloring::MAX_COLORS);
    match search_mcl(&g, t_max, budget) {
        Ok(out) => push("mcl", Ok(out.assignment), format!("minimal, {} configurations", out.expansions)),
        Err(SearchError::BudgetExhausted { proven_lower, fallback }) => {
            push("mcl", Ok(*fallback), format!("budget exhausted, at least {proven_lower} colors"))
        }
        Err(e) => push("mcl", Err(e.to_string()), String::new()),
    }
    if let Some(c) = construct_for(net) {
        push("constructive", c.map(|c| c.assignment).map_err(|e| e.to_string()), String::new());
    }

    let alpha = |name: &str| rows.iter().find(|r| r.scheme == name).and_then(|r| r.alpha);
    let coded = [alpha("mcl"), alpha("constructive")].into_iter().flatten().max();
    let mcl_over_mil = match (coded, alpha("mil")) {
        (Some(c), Some(m)) => Some(c / m),
        _ => None,
    };
    GainReport { rows, bound, mcl_over_mil }
}
