//! Bit-exact simulation of one block in the linear deterministic model.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bits::{shift_apply, BitSignal, MAX_Q};
use super::SimError;
use crate::coloring::{validate_shape, ColorAssignment};
use crate::network_model::{ChannelGain, ChannelMode, LayeredNetwork, NodeId, PairId};
use crate::route_expansion::{ExpandedNode, RouteExpandedGraph};

/// Signal `X^j_{V_i}` of every expanded node `V_{i,j}`.
pub type Snapshot = BTreeMap<ExpandedNode, BitSignal>;

/// Transmitted and received vectors of one base node in one instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeSignal {
    pub node: NodeId,
    pub transmitted: BitSignal,
    pub received: BitSignal,
}

/// All node signals of one instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstantRecord {
    pub instant: usize,
    pub signals: Vec<NodeSignal>,
}

/// Reconstructed signal `Ỹ^j_{V_i}` of a receiver next to the signal `Y^j_{V_i}`
/// it receives when pair `j` runs alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reconstruction {
    pub node: ExpandedNode,
    pub label: String,
    pub reconstructed: BitSignal,
    pub isolated: BitSignal,
}

impl Reconstruction {
    pub fn equal(&self) -> bool {
        self.reconstructed == self.isolated
    }
}

/// Full record of one simulated block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationTrace {
    pub q: u32,
    /// Seed the gains and snapshot were drawn from, when they were random.
    pub seed: Option<u64>,
    pub instants: Vec<InstantRecord>,
    pub reconstructions: Vec<Reconstruction>,
}

impl SimulationTrace {
    /// Whether every receiver recovered its isolated signal.
    pub fn all_equal(&self) -> bool {
        self.reconstructions.iter().all(Reconstruction::equal)
    }

    /// Text dump: a header, the transmitted and received vector of every node
    /// in every instant as hex, then one equality line per receiver.
    pub fn dump(&self, net: &LayeredNetwork) -> String {
        let mut out = String::new();
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        let _ = writeln!(out, "# seed={seed} q={} instants={}", self.q, self.instants.len());
        for record in &self.instants {
            let _ = writeln!(out, "t={}", record.instant);
            for s in &record.signals {
                let _ = writeln!(out, "  {} tx={} rx={}", net.name(s.node), s.transmitted, s.received);
            }
        }
        let _ = writeln!(out, "reconstruction");
        for r in &self.reconstructions {
            let verdict = if r.equal() { "pass" } else { "FAIL" };
            let _ = writeln!(out, "  {} ytilde={} y={} {verdict}", r.label, r.reconstructed, r.isolated);
        }
        out
    }
}

fn check_network(net: &LayeredNetwork, g: &RouteExpandedGraph, q: u32) -> Result<(), SimError> {
    if !(1..=MAX_Q).contains(&q) {
        return Err(SimError::BadQ(q));
    }
    let reference = g.network();
    let same = net.num_nodes() == reference.num_nodes()
        && net.num_edges() == reference.num_edges()
        && net.edges().all(|(a, b, _)| reference.has_edge(a, b));
    if !same {
        return Err(SimError::TopologyMismatch);
    }
    for (_, _, gain) in net.edges() {
        match gain {
            ChannelGain::Deterministic(n) if *n > q => return Err(SimError::GainExceedsQ { gain: *n, q }),
            ChannelGain::Deterministic(_) => {}
            ChannelGain::Gaussian(_) => return Err(SimError::NotDeterministic),
        }
    }
    Ok(())
}

fn gain(net: &LayeredNetwork, from: NodeId, to: NodeId) -> u32 {
    match net.gain(from, to) {
        Some(ChannelGain::Deterministic(n)) => *n,
        _ => unreachable!("gains are checked before simulating"),
    }
}

fn snapshot_value(g: &RouteExpandedGraph, snapshot: &Snapshot, node: ExpandedNode) -> Result<BitSignal, SimError> {
    snapshot
        .get(&node)
        .copied()
        .ok_or_else(|| SimError::MissingSnapshot(format!("{}:{}", g.network().name(node.base), node.pair)))
}

/// Signal each base node transmits in each instant.
pub(crate) fn transmissions(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    q: u32,
    snapshot: &Snapshot,
) -> Result<Vec<BTreeMap<NodeId, BitSignal>>, SimError> {
    let mut per_instant = vec![BTreeMap::new(); a.num_colors];
    for sn in g.supernodes() {
        for (t, slot) in per_instant.iter_mut().enumerate() {
            let mut x = BitSignal::zero(q);
            let mut speaker: Option<usize> = None;
            for &m in &sn.members {
                let colors = a.colors[m];
                if !colors.transmit.contains(t) {
                    continue;
                }
                if speaker.replace(m).is_some() {
                    return Err(SimError::SimultaneousTransmit { node: g.label(m), instant: t });
                }
                x = x.xor(snapshot_value(g, snapshot, g.node(m))?);
                for &k in &sn.members {
                    if k != m && a.colors[k].transmit.intersects(colors.coding) {
                        x = x.xor(snapshot_value(g, snapshot, g.node(k))?);
                    }
                }
            }
            slot.insert(sn.base, x);
        }
    }
    Ok(per_instant)
}

/// Signal `Y^j_{V_i}` at every node of the induced subgraph of `pair` when
/// that pair runs alone with snapshot `snapshot`.
pub fn isolated_receive(
    net: &LayeredNetwork,
    q: u32,
    pair: PairId,
    snapshot: &Snapshot,
) -> Result<BTreeMap<NodeId, BitSignal>, SimError> {
    let sub = net.induced_subgraph(pair, pair).expect("pair is in range");
    let mut out: BTreeMap<NodeId, BitSignal> = sub.nodes.iter().map(|&v| (v, BitSignal::zero(q))).collect();
    for &(from, to) in &sub.edges {
        let node = ExpandedNode { base: from, pair };
        let x = snapshot
            .get(&node)
            .copied()
            .ok_or_else(|| SimError::MissingSnapshot(format!("{}:{}", net.name(from), pair)))?;
        let y = shift_apply(gain(net, from, to), x, q)?;
        let slot = out.get_mut(&to).expect("edge heads lie in the subgraph");
        *slot = slot.xor(y);
    }
    Ok(out)
}

/// Runs one block of the coloring on `net` (whose topology must match `g`)
/// and compares every reconstructed signal against the isolated run.
pub fn deterministic_simulate(
    net: &LayeredNetwork,
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    q: u32,
    snapshot: &Snapshot,
) -> Result<SimulationTrace, SimError> {
    check_network(net, g, q)?;
    validate_shape(g, a)?;
    let tx = transmissions(g, a, q, snapshot)?;

    let mut instants = Vec::with_capacity(a.num_colors);
    let mut received: Vec<BTreeMap<NodeId, BitSignal>> = Vec::with_capacity(a.num_colors);
    for (t, sent) in tx.iter().enumerate() {
        let mut rx = BTreeMap::new();
        let mut signals = Vec::new();
        for layer in net.layers() {
            for &v in layer {
                let mut y = BitSignal::zero(q);
                for &from in net.in_neighbors(v) {
                    let x = sent.get(&from).copied().unwrap_or(BitSignal::zero(q));
                    y = y.xor(shift_apply(gain(net, from, v), x, q)?);
                }
                rx.insert(v, y);
                let transmitted = sent.get(&v).copied().unwrap_or(BitSignal::zero(q));
                signals.push(NodeSignal { node: v, transmitted, received: y });
            }
        }
        instants.push(InstantRecord { instant: t, signals });
        received.push(rx);
    }

    let mut isolated: BTreeMap<PairId, BTreeMap<NodeId, BitSignal>> = BTreeMap::new();
    let mut reconstructions = Vec::new();
    for idx in 0..g.len() {
        if g.layer_of(idx) == 0 {
            continue;
        }
        let node = g.node(idx);
        let reconstructed =
            a.colors[idx].receive.iter().fold(BitSignal::zero(q), |acc, t| acc.xor(received[t][&node.base]));
        let oracle = match isolated.get(&node.pair) {
            Some(map) => map,
            None => {
                let map = isolated_receive(net, q, node.pair, snapshot)?;
                isolated.entry(node.pair).or_insert(map)
            }
        };
        reconstructions.push(Reconstruction { node, label: g.label(idx), reconstructed, isolated: oracle[&node.base] });
    }
    Ok(SimulationTrace { q, seed: None, instants, reconstructions })
}

/// Copy of `net` with every gain drawn uniformly from `0..=q`.
pub fn random_gains(net: &LayeredNetwork, q: u32, rng: &mut impl Rng) -> LayeredNetwork {
    let gains = net.edges().map(|(a, b, _)| ((a, b), ChannelGain::Deterministic(rng.gen_range(0..=q)))).collect();
    net.with_gains(gains).expect("same edge set")
}

/// Uniformly random signal for every expanded node.
pub fn random_snapshot(g: &RouteExpandedGraph, q: u32, rng: &mut impl Rng) -> Snapshot {
    g.nodes().iter().map(|&node| (node, BitSignal::random(q, rng))).collect()
}

/// Outcome of [`run_trials`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub q: u32,
    pub trials: usize,
    pub passed: usize,
    /// Trace of the first failing trial, if any.
    pub first_failure: Option<SimulationTrace>,
}

/// Runs `trials` simulations with random gains and snapshots. Trial `k`
/// draws from its own ChaCha8 stream of `seed`, so results do not depend on
/// how many trials run.
pub fn run_trials(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    q: u32,
    trials: usize,
    seed: u64,
) -> Result<TrialSummary, SimError> {
    if g.network().mode() == ChannelMode::Gaussian {
        return Err(SimError::NotDeterministic);
    }
    let mut passed = 0;
    let mut first_failure = None;
    for k in 0..trials {
        let mut rng = trial_rng(seed, k);
        let net = random_gains(g.network(), q, &mut rng);
        let snapshot = random_snapshot(g, q, &mut rng);
        let mut trace = deterministic_simulate(&net, g, a, q, &snapshot)?;
        trace.seed = Some(seed);
        if trace.all_equal() {
            passed += 1;
        } else if first_failure.is_none() {
            first_failure = Some(trace);
        }
    }
    Ok(TrialSummary { seed, q, trials, passed, first_failure })
}

/// Random stream for trial `k` of a run seeded with `seed`.
pub(crate) fn trial_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{tdma, ColorSet};
    use crate::route_expansion::expand;

    fn folded_3_2() -> RouteExpandedGraph {
        let names = |p: &str| (1..=3).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let edges = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 1)]
            .iter()
            .map(|(s, d)| (format!("S{s}"), format!("D{d}"), ChannelGain::Deterministic(1)))
            .collect();
        expand(&LayeredNetwork::from_parts(vec![names("S"), names("D")], edges, None).unwrap())
    }

    fn repetition(g: &RouteExpandedGraph) -> ColorAssignment {
        let mut a = ColorAssignment::empty(g, 2);
        let sets = [ColorSet::single(0), ColorSet::first(2), ColorSet::single(1)];
        for (i, set) in sets.into_iter().enumerate() {
            let p = PairId(i as u32 + 1);
            let idx = g.index_of(ExpandedNode { base: g.network().source(p), pair: p }).unwrap();
            a.colors[idx].transmit = set;
        }
        a.derive_all_receive(g).unwrap();
        a
    }

    #[test]
    fn repetition_recovers_isolated_signals() {
        let g = folded_3_2();
        let a = repetition(&g);
        let summary = run_trials(&g, &a, 4, 50, 11).unwrap();
        assert_eq!(summary.passed, 50);
    }

    #[test]
    fn zero_snapshot_gives_zero_trace() {
        let g = folded_3_2();
        let a = repetition(&g);
        let snapshot: Snapshot = g.nodes().iter().map(|&n| (n, BitSignal::zero(3))).collect();
        let net = g.network().clone();
        let trace = deterministic_simulate(&net, &g, &a, 3, &snapshot).unwrap();
        assert!(trace.all_equal());
        assert!(trace.instants.iter().flat_map(|i| &i.signals).all(|s| s.received.is_zero()));
    }

    #[test]
    fn guards_and_errors() {
        let g = folded_3_2();
        let a = tdma(&g).unwrap();
        let snapshot = random_snapshot(&g, 2, &mut trial_rng(1, 0));
        let net = g.network().clone();
        assert_eq!(deterministic_simulate(&net, &g, &a, 0, &snapshot).unwrap_err(), SimError::BadQ(0));
        let loud =
            net.with_gains(net.edges().map(|(x, y, _)| ((x, y), ChannelGain::Deterministic(5))).collect()).unwrap();
        assert!(matches!(deterministic_simulate(&loud, &g, &a, 2, &snapshot), Err(SimError::GainExceedsQ { .. })));
        assert!(matches!(deterministic_simulate(&net, &g, &a, 2, &Snapshot::new()), Err(SimError::MissingSnapshot(_))));
    }

    #[test]
    fn trials_are_reproducible() {
        let g = folded_3_2();
        let a = tdma(&g).unwrap();
        let one = run_trials(&g, &a, 3, 5, 99).unwrap();
        let two = run_trials(&g, &a, 3, 5, 99).unwrap();
        assert_eq!(one, two);
        let mut r1 = trial_rng(99, 3);
        let mut r2 = trial_rng(99, 3);
        assert_eq!(r1.gen::<u64>(), r2.gen::<u64>());
    }
}
