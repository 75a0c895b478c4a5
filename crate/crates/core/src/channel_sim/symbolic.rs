//! Symbolic cancellation check.
//!
//! Signals are formal linear combinations of snapshot symbols `X^j_{V_i}`,
//! the signal node `V_i` would send on the induced subgraph of pair `j`.
//! Every received term is tagged with the edge it crossed, which stands for
//! the edge's gain (a shift in the deterministic model, a complex factor in
//! the Gaussian model). A receiver `V_{i,j}` passes when its combined signal
//! holds exactly one term per in-edge `(V_k, V_i)` with `V_k` in the induced
//! subgraph of pair `j`, namely `X^j_{V_k}` with coefficient one, and nothing
//! else. Since terms on different edges never interact, this holds for every
//! gain assignment.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coloring::{validate_shape, ColorAssignment, ColorSet, ColoringError};
use crate::network_model::{ChannelMode, NodeId, PairId};
use crate::route_expansion::RouteExpandedGraph;

/// Snapshot symbol `X^pair_{base}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Symbol {
    pub base: NodeId,
    pub pair: PairId,
}

/// A symbol as received over one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Term {
    pub symbol: Symbol,
    pub edge: (NodeId, NodeId),
}

/// Formal combination of received terms.
///
/// In the deterministic model coefficients live in `F_2`; in the Gaussian
/// model they are integers. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSignal {
    pub mode: ChannelMode,
    pub terms: BTreeMap<Term, i64>,
    /// Number of noise terms summed into the signal (Gaussian model only).
    pub noise_count: usize,
}

impl SymbolicSignal {
    fn new(mode: ChannelMode) -> Self {
        SymbolicSignal { mode, terms: BTreeMap::new(), noise_count: 0 }
    }

    fn add(&mut self, term: Term, coefficient: i64) {
        let entry = self.terms.entry(term).or_insert(0);
        *entry += coefficient;
        if self.mode == ChannelMode::Deterministic {
            *entry = entry.rem_euclid(2);
        }
        if *entry == 0 {
            self.terms.remove(&term);
        }
    }
}

/// A failure found by [`symbolic_verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolicIssue {
    /// A symbol that should have cancelled survives.
    ResidualInterference { node: String, symbol: String, coefficient: i64 },
    /// The wanted symbol does not arrive with coefficient one.
    MissingDesired { node: String, symbol: String, coefficient: i64 },
    /// More noise terms are summed than there are instants in a block.
    NoiseBudgetExceeded { node: String, noise: usize, limit: usize },
}

impl fmt::Display for SymbolicIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicIssue::ResidualInterference { node, symbol, coefficient } => {
                write!(f, "ResidualInterference at {node}: {symbol} has coefficient {coefficient}")
            }
            SymbolicIssue::MissingDesired { node, symbol, coefficient } => {
                write!(f, "MissingDesired at {node}: {symbol} has coefficient {coefficient}")
            }
            SymbolicIssue::NoiseBudgetExceeded { node, noise, limit } => {
                write!(f, "NoiseBudgetExceeded at {node}: {noise} noise terms, limit {limit}")
            }
        }
    }
}

/// Outcome of [`symbolic_verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicReport {
    pub mode: ChannelMode,
    /// Number of receivers checked.
    pub receivers: usize,
    pub issues: Vec<SymbolicIssue>,
}

impl SymbolicReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Transmit signal of base node `base` in instant `t` as symbol
/// coefficients.
fn transmit_symbols(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    base: NodeId,
    t: usize,
    mode: ChannelMode,
) -> BTreeMap<Symbol, i64> {
    let mut out = BTreeMap::new();
    let Some(sn) = g.supernode(base) else {
        return out;
    };
    let sign = match mode {
        ChannelMode::Deterministic => 1,
        ChannelMode::Gaussian => -1,
    };
    for &m in &sn.members {
        let colors = a.colors[m];
        if !colors.transmit.contains(t) {
            continue;
        }
        *out.entry(Symbol { base, pair: g.node(m).pair }).or_insert(0) += 1;
        for &k in &sn.members {
            if k != m && a.colors[k].transmit.intersects(colors.coding) {
                *out.entry(Symbol { base, pair: g.node(k).pair }).or_insert(0) += sign;
            }
        }
    }
    out
}

/// Per-instant weights a receiver applies when combining its receive
/// instants. The deterministic model adds every receive instant. The
/// Gaussian model adds the effective receive instants and subtracts the
/// others.
pub fn receive_weights(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    idx: usize,
    mode: ChannelMode,
) -> Vec<(usize, i64)> {
    let r = a.colors[idx].receive;
    let eff = crate::coloring::effective_receive_set(g, a, idx);
    r.iter()
        .map(|t| {
            let w = match mode {
                ChannelMode::Deterministic => 1,
                ChannelMode::Gaussian if eff.contains(t) => 1,
                ChannelMode::Gaussian => -1,
            };
            (t, w)
        })
        .collect()
}

/// Combined signal at receiver `idx`.
pub(crate) fn combined_signal(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    idx: usize,
    mode: ChannelMode,
) -> SymbolicSignal {
    let net = g.network();
    let base = g.node(idx).base;
    let mut signal = SymbolicSignal::new(mode);
    for (t, w) in receive_weights(g, a, idx, mode) {
        if mode == ChannelMode::Gaussian {
            signal.noise_count += 1;
        }
        for &from in net.in_neighbors(base) {
            for (symbol, c) in transmit_symbols(g, a, from, t, mode) {
                signal.add(Term { symbol, edge: (from, base) }, w * c);
            }
        }
    }
    signal
}

/// Appends the issues of receiver `idx` to `issues`.
fn receiver_issues(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    idx: usize,
    mode: ChannelMode,
    issues: &mut Vec<SymbolicIssue>,
) {
    let net = g.network();
    let label = |s: Symbol| format!("X^{}[{}]", s.pair, net.name(s.base));
    let node = g.node(idx);
    let signal = combined_signal(g, a, idx, mode);
    let own = net.own_subgraph_nodes(node.pair);
    for &from in net.in_neighbors(node.base) {
        if !own.contains(&from) {
            continue;
        }
        let desired = Term { symbol: Symbol { base: from, pair: node.pair }, edge: (from, node.base) };
        let coefficient = signal.terms.get(&desired).copied().unwrap_or(0);
        if coefficient != 1 {
            issues.push(SymbolicIssue::MissingDesired {
                node: g.label(idx),
                symbol: label(desired.symbol),
                coefficient,
            });
        }
    }
    for (term, &coefficient) in &signal.terms {
        let wanted = term.symbol.pair == node.pair && own.contains(&term.symbol.base);
        if !wanted {
            issues.push(SymbolicIssue::ResidualInterference {
                node: g.label(idx),
                symbol: label(term.symbol),
                coefficient,
            });
        }
    }
    if signal.noise_count > a.num_colors {
        issues.push(SymbolicIssue::NoiseBudgetExceeded {
            node: g.label(idx),
            noise: signal.noise_count,
            limit: a.num_colors,
        });
    }
}

/// Checks that every receiver of `a` recovers exactly its isolated signal.
pub fn symbolic_verify(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    mode: ChannelMode,
) -> Result<SymbolicReport, ColoringError> {
    validate_shape(g, a)?;
    let mut issues = Vec::new();
    let mut receivers = 0;
    for idx in 0..g.len() {
        if g.layer_of(idx) == 0 {
            continue;
        }
        receivers += 1;
        receiver_issues(g, a, idx, mode, &mut issues);
    }
    Ok(SymbolicReport { mode, receivers, issues })
}

/// Smallest receive set, lowest colors first, with which receiver `idx`
/// recovers its isolated signal in both channel models, whether or not the
/// Coded Layer conditions hold there. Returns `None` when no subset of the
/// palette works.
pub fn cancelling_receive(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize) -> Option<ColorSet> {
    let n = a.num_colors;
    let mut subsets: Vec<ColorSet> = (0..1u64 << n).map(ColorSet::from_bits).collect();
    subsets.sort_by_key(|s| (s.len(), s.bits()));
    let mut trial = a.clone();
    subsets.into_iter().find(|&r| {
        trial.colors[idx].receive = r;
        let mut issues = Vec::new();
        receiver_issues(g, &trial, idx, ChannelMode::Deterministic, &mut issues);
        receiver_issues(g, &trial, idx, ChannelMode::Gaussian, &mut issues);
        issues.is_empty()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{tdma, ColorSet};
    use crate::network_model::{ChannelGain, LayeredNetwork};
    use crate::route_expansion::{expand, ExpandedNode};

    fn folded_3_2() -> RouteExpandedGraph {
        let names = |p: &str| (1..=3).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let edges = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 1)]
            .iter()
            .map(|(s, d)| (format!("S{s}"), format!("D{d}"), ChannelGain::Deterministic(1)))
            .collect();
        expand(&LayeredNetwork::from_parts(vec![names("S"), names("D")], edges, None).unwrap())
    }

    fn repetition(g: &RouteExpandedGraph, s2: &[usize]) -> ColorAssignment {
        let mut a = ColorAssignment::empty(g, 2);
        let sets = [vec![0], s2.to_vec(), vec![1]];
        for (i, set) in sets.iter().enumerate() {
            let p = PairId(i as u32 + 1);
            let idx = g.index_of(ExpandedNode { base: g.network().source(p), pair: p }).unwrap();
            a.colors[idx].transmit = set.iter().copied().collect();
        }
        for p in 1..=3 {
            let p = PairId(p);
            let idx = g.index_of(ExpandedNode { base: g.network().destination(p), pair: p }).unwrap();
            a.colors[idx].receive = if p.0 == 3 { ColorSet::first(2) } else { ColorSet::single(p.index().min(1)) };
        }
        a
    }

    #[test]
    fn repetition_cancels_in_both_models() {
        let g = folded_3_2();
        let a = repetition(&g, &[0, 1]);
        for mode in [ChannelMode::Deterministic, ChannelMode::Gaussian] {
            let report = symbolic_verify(&g, &a, mode).unwrap();
            assert!(report.passed(), "{mode:?}: {:?}", report.issues);
            assert_eq!(report.receivers, 3);
        }
    }

    #[test]
    fn dropped_repetition_leaves_residual() {
        let g = folded_3_2();
        let a = repetition(&g, &[0]);
        let report = symbolic_verify(&g, &a, ChannelMode::Deterministic).unwrap();
        assert!(report.issues.iter().any(|i| matches!(
            i,
            SymbolicIssue::ResidualInterference { node, symbol, .. } if node == "D3:3" && symbol == "X^2[S2]"
        )));
    }

    #[test]
    fn gaussian_weights_subtract_the_shared_color() {
        let g = folded_3_2();
        let a = repetition(&g, &[0, 1]);
        let d3 = g.index_of(ExpandedNode { base: g.network().destination(PairId(3)), pair: PairId(3) }).unwrap();
        assert_eq!(receive_weights(&g, &a, d3, ChannelMode::Gaussian), vec![(0, -1), (1, 1)]);
        assert_eq!(combined_signal(&g, &a, d3, ChannelMode::Gaussian).noise_count, 2);
    }

    #[test]
    fn tdma_passes() {
        let g = folded_3_2();
        let a = tdma(&g).unwrap();
        assert!(symbolic_verify(&g, &a, ChannelMode::Gaussian).unwrap().passed());
    }
}
