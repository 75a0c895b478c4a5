//! Searches for small colorings.
//!
//! Validity of a coloring splits along layers: the conditions at a receiver
//! in layer `l + 1` only involve the transmit and coding sets of layer `l` and
//! the receiver's own receive set, which is derived. Every search therefore
//! colors one transmitting layer at a time with a shared palette, and the
//! number of colors of the whole coloring is the largest layer count.
//!
//! * [`search_mcl`] looks for the fewest colors over all Coded Layer
//!   colorings by iterative deepening and backtracking.
//! * [`search_mil`] finds the fewest colors among Independent Layer colorings
//!   (singleton transmit sets, no coding) by exact graph coloring of a
//!   per-layer conflict graph.
//! * [`search_end_to_end`] gives each pair one color on its whole induced
//!   subgraph.
//! * [`tdma`] gives every pair its own color.

use std::collections::BTreeSet;

use thiserror::Error;

use super::check::is_valid;
use super::{derive_receive, ColorAssignment, ColorSet, NodeColors, MAX_COLORS};
use crate::network_model::PairId;
use crate::route_expansion::RouteExpandedGraph;

/// Default limit on the number of configurations [`search_mcl`] may try.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest per-layer color count the backtracking search enumerates
/// subsets for.
const MAX_SEARCH_COLORS: usize = 16;

/// Errors raised by the searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("pair {0} has no route from its source to its destination")]
    Unroutable(PairId),
    #[error("no coloring with at most {t_max} colors exists")]
    NoColoringWithin { t_max: usize },
    #[error("search budget exhausted; at least {proven_lower} colors are needed, best found uses {}", fallback.num_colors)]
    BudgetExhausted { proven_lower: usize, fallback: Box<ColorAssignment> },
    #[error("{0} colors exceed the supported maximum of {MAX_COLORS}")]
    TooManyColors(usize),
}

/// Result of a completed [`search_mcl`] run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// A valid coloring with the minimal number of colors.
    pub assignment: ColorAssignment,
    /// Number of configurations tried.
    pub expansions: u64,
}

/// The K-color schedule in which pair `j` owns color `j - 1`.
pub fn tdma(g: &RouteExpandedGraph) -> Result<ColorAssignment, SearchError> {
    let k = g.network().num_pairs();
    if k > MAX_COLORS {
        return Err(SearchError::TooManyColors(k));
    }
    let colors: Vec<usize> = (0..k).collect();
    Ok(per_pair(g, k, &colors))
}

/// Colors every node of pair `j` with `pair_color[j - 1]` and derives the
/// receive sets.
fn per_pair(g: &RouteExpandedGraph, num_colors: usize, pair_color: &[usize]) -> ColorAssignment {
    let mut a = ColorAssignment::empty(g, num_colors);
    let last = g.network().num_layers() - 1;
    for idx in 0..g.len() {
        if g.layer_of(idx) < last {
            a.colors[idx].transmit = ColorSet::single(pair_color[g.node(idx).pair.index()]);
        }
    }
    a.derive_all_receive(g).expect("per-pair schedules never need interference handling");
    a
}

fn require_routable(g: &RouteExpandedGraph) -> Result<(), SearchError> {
    match g.unroutable_pairs().first() {
        Some(&p) => Err(SearchError::Unroutable(p)),
        None => Ok(()),
    }
}

/// End-to-end interference avoidance: pairs whose induced subgraphs share a
/// node or are joined by an edge get different colors, and each pair keeps
/// its color on every node.
pub fn search_end_to_end(g: &RouteExpandedGraph) -> Result<ColorAssignment, SearchError> {
    require_routable(g)?;
    let net = g.network();
    let k = net.num_pairs();
    let mut adj = vec![vec![false; k]; k];
    for i in net.pairs() {
        for j in net.pairs().filter(|&j| j > i) {
            let gi = net.own_subgraph_nodes(i);
            let gj = net.own_subgraph_nodes(j);
            let joined = !gi.is_disjoint(gj)
                || gi.iter().any(|&v| net.out_neighbors(v).iter().chain(net.in_neighbors(v)).any(|w| gj.contains(w)));
            adj[i.index()][j.index()] = joined;
            adj[j.index()][i.index()] = joined;
        }
    }
    let (num_colors, colors) = exact_coloring(&adj);
    if num_colors > MAX_COLORS {
        return Err(SearchError::TooManyColors(num_colors));
    }
    Ok(per_pair(g, num_colors, &colors))
}

/// Per-layer conflict graph of Independent Layer coloring: two transmitting
/// nodes conflict when they share a super-node, or when one is a same-pair
/// in-neighbor and the other a different-pair in-neighbor of some receiver.
fn layer_conflicts(g: &RouteExpandedGraph, layer: &[usize]) -> Vec<Vec<bool>> {
    let pos = |idx: usize| layer.binary_search(&idx).expect("node belongs to the layer");
    let mut adj = vec![vec![false; layer.len()]; layer.len()];
    let mut join = |a: usize, b: usize| {
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    };
    for (p, &idx) in layer.iter().enumerate() {
        for &m in g.mates(idx) {
            join(p, pos(m));
        }
    }
    let receivers: BTreeSet<usize> = layer.iter().flat_map(|&idx| g.out_neighbors(idx).iter().copied()).collect();
    for r in receivers {
        let pair = g.node(r).pair;
        let (own, other): (Vec<usize>, Vec<usize>) = g.in_neighbors(r).iter().partition(|&&k| g.node(k).pair == pair);
        for &a in &own {
            for &b in &other {
                join(pos(a), pos(b));
            }
        }
    }
    adj
}

/// Transmitting layers of the expansion as sorted node lists.
fn transmit_layers(g: &RouteExpandedGraph) -> Vec<Vec<usize>> {
    let last = g.network().num_layers() - 1;
    (0..last).map(|l| g.layer_nodes(l).collect()).collect()
}

/// Minimal Independent Layer coloring.
pub fn search_mil(g: &RouteExpandedGraph) -> Result<ColorAssignment, SearchError> {
    require_routable(g)?;
    let mut layer_colors = Vec::new();
    let mut num_colors = 1;
    for layer in transmit_layers(g) {
        let (k, colors) = exact_coloring(&layer_conflicts(g, &layer));
        num_colors = num_colors.max(k);
        layer_colors.push((layer, colors));
    }
    if num_colors > MAX_COLORS {
        return Err(SearchError::TooManyColors(num_colors));
    }
    let mut a = ColorAssignment::empty(g, num_colors);
    for (layer, colors) in layer_colors {
        for (idx, c) in layer.into_iter().zip(colors) {
            a.colors[idx].transmit = ColorSet::single(c);
        }
    }
    a.derive_all_receive(g).expect("conflict-free layers need no interference handling");
    Ok(a)
}

/// Exact vertex coloring by backtracking over increasing color counts.
/// Returns the chromatic number (at least one) and a coloring.
pub(crate) fn exact_coloring(adj: &[Vec<bool>]) -> (usize, Vec<usize>) {
    let n = adj.len();
    let degree = |v: usize| adj[v].iter().filter(|&&e| e).count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(degree(v)));
    let mut colors = vec![usize::MAX; n];
    for k in 1..=n.max(1) {
        if color_from(adj, &order, 0, k, 0, &mut colors) {
            return (k, colors);
        }
    }
    unreachable!("n colors always suffice")
}

fn color_from(adj: &[Vec<bool>], order: &[usize], pos: usize, k: usize, used: usize, colors: &mut [usize]) -> bool {
    let Some(&v) = order.get(pos) else {
        return true;
    };
    for c in 0..k.min(used + 1) {
        if (0..adj.len()).any(|w| adj[v][w] && colors[w] == c) {
            continue;
        }
        colors[v] = c;
        if color_from(adj, order, pos + 1, k, used.max(c + 1), colors) {
            return true;
        }
    }
    colors[v] = usize::MAX;
    false
}

/// Outcome of searching one layer.
enum LayerResult {
    /// Fewest colors needed, with the transmit/coding sets of the layer.
    Solved(usize, Vec<(usize, NodeColors)>),
    /// Budget ran out while testing `t` colors; fewer than `t` are ruled out.
    Exhausted(usize),
}

struct Exhausted;

struct LayerSearch<'g> {
    g: &'g RouteExpandedGraph,
    supers: Vec<Vec<usize>>,
    /// Receivers whose in-neighbors are all assigned once super-node `s` is.
    ready: Vec<Vec<usize>>,
    subsets: Vec<ColorSet>,
    work: ColorAssignment,
    budget: u64,
    spent: u64,
}

impl<'g> LayerSearch<'g> {
    fn new(g: &'g RouteExpandedGraph, layer: &[usize], budget: u64) -> Self {
        let mut supers: Vec<Vec<usize>> = Vec::new();
        for &idx in layer {
            match supers.last_mut() {
                Some(s) if g.node(s[0]).base == g.node(idx).base => s.push(idx),
                _ => supers.push(vec![idx]),
            }
        }
        let super_of = |idx: usize| supers.iter().position(|s| s.contains(&idx)).expect("node belongs to the layer");
        let mut ready = vec![Vec::new(); supers.len()];
        let receivers: BTreeSet<usize> = layer.iter().flat_map(|&idx| g.out_neighbors(idx).iter().copied()).collect();
        for r in receivers {
            let last = g.in_neighbors(r).iter().map(|&k| super_of(k)).max().expect("has inputs");
            ready[last].push(r);
        }
        LayerSearch { g, supers, ready, subsets: Vec::new(), work: ColorAssignment::empty(g, 1), budget, spent: 0 }
    }

    fn lower_bound(&self) -> usize {
        self.supers.iter().map(Vec::len).max().unwrap_or(1).max(1)
    }

    /// Tries to color the layer with `t` colors.
    fn try_colors(&mut self, t: usize) -> Result<bool, Exhausted> {
        let mut subsets: Vec<ColorSet> = (1..1u64 << t).map(ColorSet::from_bits).collect();
        subsets.sort_by_key(|s| (s.len(), s.bits()));
        self.subsets = subsets;
        self.work = ColorAssignment::empty(self.g, t);
        self.solve(0, 0)
    }

    fn solve(&mut self, s: usize, used: usize) -> Result<bool, Exhausted> {
        if s == self.supers.len() {
            return Ok(true);
        }
        let members = self.supers[s].clone();
        let mut transmit = vec![ColorSet::EMPTY; members.len()];
        self.pick_transmit(s, &members, 0, ColorSet::EMPTY, used, &mut transmit)
    }

    fn pick_transmit(
        &mut self,
        s: usize,
        members: &[usize],
        p: usize,
        taken: ColorSet,
        used: usize,
        transmit: &mut Vec<ColorSet>,
    ) -> Result<bool, Exhausted> {
        if p == members.len() {
            let fresh = taken - ColorSet::first(used);
            let next = used + fresh.len();
            if fresh != ColorSet::first(next) - ColorSet::first(used) {
                return Ok(false);
            }
            return self.pick_coding(s, members, transmit, next);
        }
        for i in 0..self.subsets.len() {
            let set = self.subsets[i];
            if set.intersects(taken) {
                continue;
            }
            transmit[p] = set;
            if self.pick_transmit(s, members, p + 1, taken | set, used, transmit)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn pick_coding(
        &mut self,
        s: usize,
        members: &[usize],
        transmit: &[ColorSet],
        used: usize,
    ) -> Result<bool, Exhausted> {
        let n = members.len();
        let eligible: u32 =
            if n >= 2 { (0..n).filter(|&p| transmit[p].len() == 1).fold(0, |acc, p| acc | 1 << p) } else { 0 };
        let mut coders: u32 = 0;
        loop {
            if coders & !eligible == 0 && (coders == 0 || coders.count_ones() < n as u32) {
                let donors: Vec<usize> = (0..n).filter(|&p| coders & (1 << p) == 0).collect();
                let coder_list: Vec<usize> = (0..n).filter(|&p| coders & (1 << p) != 0).collect();
                let mut coding = vec![ColorSet::EMPTY; n];
                if self.assign_coding(s, members, transmit, &donors, &coder_list, 0, &mut coding, used)? {
                    return Ok(true);
                }
            }
            if coders == eligible {
                break;
            }
            coders = (coders | !eligible).wrapping_add(1) & eligible;
        }
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_coding(
        &mut self,
        s: usize,
        members: &[usize],
        transmit: &[ColorSet],
        donors: &[usize],
        coders: &[usize],
        c: usize,
        coding: &mut Vec<ColorSet>,
        used: usize,
    ) -> Result<bool, Exhausted> {
        if c == coders.len() {
            return self.apply(s, members, transmit, coding, used);
        }
        let mut choices = vec![ColorSet::EMPTY];
        for &d in donors {
            let mut next = Vec::new();
            for &partial in &choices {
                next.push(partial);
                for color in transmit[d].iter() {
                    next.push(partial | ColorSet::single(color));
                }
            }
            choices = next;
        }
        choices.retain(|set| !set.is_empty());
        choices.sort_by_key(|set| (set.len(), set.bits()));
        for choice in choices {
            coding[coders[c]] = choice;
            if self.assign_coding(s, members, transmit, donors, coders, c + 1, coding, used)? {
                return Ok(true);
            }
        }
        coding[coders[c]] = ColorSet::EMPTY;
        Ok(false)
    }

    fn apply(
        &mut self,
        s: usize,
        members: &[usize],
        transmit: &[ColorSet],
        coding: &[ColorSet],
        used: usize,
    ) -> Result<bool, Exhausted> {
        if self.spent >= self.budget {
            return Err(Exhausted);
        }
        self.spent += 1;
        for (p, &idx) in members.iter().enumerate() {
            self.work.colors[idx].transmit = transmit[p];
            self.work.colors[idx].coding = coding[p];
        }
        let ready = self.ready[s].clone();
        let mut ok = true;
        for &r in &ready {
            match derive_receive(self.g, &self.work, r) {
                Some(set) => self.work.colors[r].receive = set,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let found = ok && self.solve(s + 1, used)?;
        if !found {
            for &idx in members {
                self.work.colors[idx] = NodeColors::default();
            }
        }
        Ok(found)
    }
}

/// Searches one transmitting layer for its fewest colors below `cap`.
/// A solved result with `cap` colors and no sets means nothing smaller works.
fn search_layer(g: &RouteExpandedGraph, layer: &[usize], cap: usize, budget: &mut u64, spent: &mut u64) -> LayerResult {
    let mut search = LayerSearch::new(g, layer, *budget);
    let lower = search.lower_bound();
    for t in lower..cap {
        if t > MAX_SEARCH_COLORS {
            *budget = budget.saturating_sub(search.spent);
            *spent += search.spent;
            return LayerResult::Exhausted(t);
        }
        match search.try_colors(t) {
            Ok(true) => {
                *budget -= search.spent;
                *spent += search.spent;
                let colors = layer.iter().map(|&idx| (idx, search.work.colors[idx])).collect();
                return LayerResult::Solved(t, colors);
            }
            Ok(false) => {}
            Err(Exhausted) => {
                *budget -= search.spent.min(*budget);
                *spent += search.spent;
                return LayerResult::Exhausted(t);
            }
        }
    }
    *budget -= search.spent;
    *spent += search.spent;
    LayerResult::Solved(cap, Vec::new())
}

/// Searches for a Coded Layer coloring with the fewest colors.
///
/// Each transmitting layer is searched by iterative deepening, starting at
/// the size of its largest super-node and stopping below the layer's
/// Independent Layer color count, which is always achievable. `budget` caps
/// the number of tried configurations over the whole search.
pub fn search_mcl(g: &RouteExpandedGraph, t_max: usize, budget: u64) -> Result<SearchOutcome, SearchError> {
    let mut remaining = budget;
    let mut spent = 0;
    let mut num_colors = 1;
    let mut proven_lower = 1;
    let mut exhausted = false;
    let mut a = ColorAssignment::empty(g, 1);
    for layer in transmit_layers(g) {
        let (mil, mil_colors) = exact_coloring(&layer_conflicts(g, &layer));
        let (t, colors) = match search_layer(g, &layer, mil, &mut remaining, &mut spent) {
            LayerResult::Solved(t, colors) if t < mil => (t, colors),
            LayerResult::Solved(..) => (mil, singleton_colors(&layer, &mil_colors)),
            LayerResult::Exhausted(lower) => {
                exhausted = true;
                proven_lower = proven_lower.max(lower);
                (mil, singleton_colors(&layer, &mil_colors))
            }
        };
        if !exhausted {
            proven_lower = proven_lower.max(t);
        }
        num_colors = num_colors.max(t);
        for (idx, c) in colors {
            a.colors[idx].transmit = c.transmit;
            a.colors[idx].coding = c.coding;
        }
    }
    if num_colors > MAX_COLORS {
        return Err(SearchError::TooManyColors(num_colors));
    }
    a.num_colors = num_colors;
    if let Err(idx) = a.derive_all_receive(g) {
        unreachable!("layer search left receiver {} unsatisfiable", g.label(idx));
    }
    debug_assert!(is_valid(g, &a));
    if exhausted {
        return Err(SearchError::BudgetExhausted { proven_lower, fallback: Box::new(a) });
    }
    if num_colors > t_max {
        return Err(SearchError::NoColoringWithin { t_max });
    }
    Ok(SearchOutcome { assignment: a, expansions: spent })
}

fn singleton_colors(layer: &[usize], colors: &[usize]) -> Vec<(usize, NodeColors)> {
    layer
        .iter()
        .zip(colors)
        .map(|(&idx, &c)| (idx, NodeColors { transmit: ColorSet::single(c), ..Default::default() }))
        .collect()
}
