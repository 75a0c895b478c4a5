//! Validity checking of Coded Layer colorings.
//!
//! The checker evaluates the six coloring conditions:
//!
//! * **C1** transmit sets inside one super-node are disjoint;
//! * **C2** a node that codes transmits exactly once;
//! * **C3** each coding color is taken from the transmit set of a distinct
//!   non-coding node of the same super-node;
//! * **C4** a receive set contains the coding sets of all same-pair
//!   in-neighbors;
//! * **C5** a receive set meets the transmit set of every same-pair
//!   in-neighbor in exactly one color;
//! * **C6** all interferers share one exclusive color `c*` outside the
//!   instants used by same-pair in-neighbors.
//!
//! On top of the literal C6 the checker enforces the accounting that makes
//! the summed receive signal cancel: at a receiver every in-neighbor of
//! another pair must meet the receive set in exactly two colors when it is an
//! interferer (its useful instant and `c*`), in exactly one color when a
//! coding mate neutralizes it, and in none otherwise. Without this clause a
//! coloring can satisfy C1 to C6 and still leave residual interference, for
//! example when an interferer repeats over three receive instants. These
//! failures are reported under C6.

use std::fmt;

use serde::Serialize;

use super::{ColorAssignment, ColorSet, ColoringError, MAX_COLORS};
use crate::route_expansion::{ExpandedNode, RouteExpandedGraph};

/// One of the six coloring conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A failed condition at one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub node: ExpandedNode,
    /// `base:pair` label of the node.
    pub label: String,
    pub detail: String,
}

/// Outcome of [`check_coloring`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// True when no node codes and every transmitting node uses one color.
    pub is_independent_layer: bool,
}

impl ValidityReport {
    /// Whether `condition` holds everywhere.
    pub fn holds(&self, condition: Condition) -> bool {
        self.violations.iter().all(|v| v.condition != condition)
    }
}

/// Interferers at a node together with its effective receive set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfererSet {
    pub target: usize,
    pub interferers: Vec<usize>,
    pub effective_receive: ColorSet,
}

/// Receives violations as the checker finds them.
trait Sink {
    /// Records a violation and returns whether checking should continue.
    fn report(&mut self, condition: Condition, idx: usize, detail: impl FnOnce() -> String) -> bool;
}

struct Collect<'g> {
    g: &'g RouteExpandedGraph,
    violations: Vec<Violation>,
}

impl Sink for Collect<'_> {
    fn report(&mut self, condition: Condition, idx: usize, detail: impl FnOnce() -> String) -> bool {
        self.violations.push(Violation {
            condition,
            node: self.g.node(idx),
            label: self.g.label(idx),
            detail: detail(),
        });
        true
    }
}

/// Stops at the first violation without formatting anything.
struct FirstFailure;

impl Sink for FirstFailure {
    fn report(&mut self, _: Condition, _: usize, _: impl FnOnce() -> String) -> bool {
        false
    }
}

/// Union of `T ∪ C` over the same-pair in-neighbors of `idx`.
fn own_union(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize) -> ColorSet {
    let pair = g.node(idx).pair;
    g.in_neighbors(idx)
        .iter()
        .filter(|&&k| g.node(k).pair == pair)
        .fold(ColorSet::EMPTY, |acc, &k| acc | a.colors[k].transmit | a.colors[k].coding)
}

/// Effective receive set `R̃_{i,j}`: the receive colors in which some
/// same-pair in-neighbor transmits or codes.
pub fn effective_receive_set(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize) -> ColorSet {
    a.colors[idx].receive & own_union(g, a, idx)
}

/// Whether the other-pair in-neighbor `u` of a pair-`pair` receiver is
/// neutralized by the coding set of its pair-`pair` mate.
fn neutralized(g: &RouteExpandedGraph, a: &ColorAssignment, u: usize, pair: u32) -> bool {
    let mate = ExpandedNode { base: g.node(u).base, pair: crate::network_model::PairId(pair) };
    g.index_of(mate).is_some_and(|m| a.colors[u].transmit.intersects(a.colors[m].coding))
}

/// Interferers at `idx` under the receive set stored in `a`.
pub fn interferers(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize) -> InterfererSet {
    let pair = g.node(idx).pair;
    let eff = effective_receive_set(g, a, idx);
    let interferers = g
        .in_neighbors(idx)
        .iter()
        .copied()
        .filter(|&u| g.node(u).pair != pair)
        .filter(|&u| !neutralized(g, a, u, pair.0))
        .filter(|&u| a.colors[u].transmit.intersects(eff))
        .collect();
    InterfererSet { target: idx, interferers, effective_receive: eff }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Interferer,
    Neutralized,
    Silent,
}

/// Checks C4, C5 and C6 at receiver `idx` as if its receive set were `r`.
fn check_receiver(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize, r: ColorSet, sink: &mut impl Sink) -> bool {
    let pair = g.node(idx).pair;
    let mut ok = true;
    let mut own = ColorSet::EMPTY;
    for &k in g.in_neighbors(idx) {
        if g.node(k).pair != pair {
            continue;
        }
        let ck = a.colors[k];
        own = own | ck.transmit | ck.coding;
        if !ck.coding.is_subset(r) {
            ok = false;
            let go = sink.report(Condition::C4, idx, || {
                format!("coding set {} of {} is not inside R={}", ck.coding, g.label(k), r)
            });
            if !go {
                return false;
            }
        }
        let hits = (ck.transmit & r).len();
        if hits != 1 {
            ok = false;
            let go = sink.report(Condition::C5, idx, || {
                format!("transmit set {} of {} meets R={} in {} colors", ck.transmit, g.label(k), r, hits)
            });
            if !go {
                return false;
            }
        }
    }

    let eff = r & own;
    let mut shared = ColorSet::first(MAX_COLORS);
    let mut any_interferer = false;
    let others: Vec<(usize, Role)> = g
        .in_neighbors(idx)
        .iter()
        .copied()
        .filter(|&u| g.node(u).pair != pair)
        .map(|u| {
            let role = if neutralized(g, a, u, pair.0) {
                Role::Neutralized
            } else if a.colors[u].transmit.intersects(eff) {
                Role::Interferer
            } else {
                Role::Silent
            };
            if role == Role::Interferer {
                any_interferer = true;
                shared = shared & a.colors[u].transmit;
            }
            (u, role)
        })
        .collect();

    if any_interferer {
        let candidates = shared & (r - own);
        if candidates.len() != 1 {
            ok = false;
            let go = sink.report(Condition::C6, idx, || {
                format!("interferers share {} colors in R={} outside {}", candidates.len(), r, own)
            });
            if !go {
                return false;
            }
        } else {
            let star = candidates.min().expect("one candidate");
            for &(u, role) in &others {
                let cu = a.colors[u];
                if role != Role::Interferer && (cu.transmit | cu.coding).contains(star) {
                    ok = false;
                    let go = sink.report(Condition::C6, idx, || {
                        format!("shared color {star} is also used by non-interferer {}", g.label(u))
                    });
                    if !go {
                        return false;
                    }
                }
            }
        }
    }

    for &(u, role) in &others {
        let hits = (a.colors[u].transmit & r).len();
        let expected = match role {
            Role::Interferer => 2,
            Role::Neutralized => 1,
            Role::Silent => 0,
        };
        if hits != expected {
            ok = false;
            let go = sink.report(Condition::C6, idx, || {
                let what = match role {
                    Role::Interferer => "interferer",
                    Role::Neutralized => "neutralized node",
                    Role::Silent => "non-interfering node",
                };
                format!("{what} {} is heard in {hits} receive colors, expected {expected}", g.label(u))
            });
            if !go {
                return false;
            }
        }
    }
    ok
}

/// Checks C1, C2 and C3 at node `idx`.
fn check_transmitter(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize, sink: &mut impl Sink) -> bool {
    let me = a.colors[idx];
    let mut ok = true;
    for &m in g.mates(idx) {
        if m > idx && me.transmit.intersects(a.colors[m].transmit) {
            ok = false;
            let go = sink.report(Condition::C1, idx, || {
                format!("transmit set {} overlaps {} of {}", me.transmit, a.colors[m].transmit, g.label(m))
            });
            if !go {
                return false;
            }
        }
    }
    if me.coding.is_empty() {
        return ok;
    }
    if me.transmit.len() != 1 {
        ok = false;
        let go = sink.report(Condition::C2, idx, || format!("coding node transmits in {} colors", me.transmit.len()));
        if !go {
            return false;
        }
    }
    let donors: Vec<ColorSet> = g
        .mates(idx)
        .iter()
        .filter(|&&m| m != idx && a.colors[m].coding.is_empty())
        .map(|&m| a.colors[m].transmit)
        .collect();
    let colors: Vec<usize> = me.coding.iter().collect();
    if !distinct_donors(&colors, &donors, &mut vec![false; donors.len()]) {
        ok = false;
        let go = sink.report(Condition::C3, idx, || {
            format!("coding set {} is not drawn one color each from non-coding mates", me.coding)
        });
        if !go {
            return false;
        }
    }
    ok
}

/// Whether every color can be matched to a distinct donor transmit set that
/// contains it.
fn distinct_donors(colors: &[usize], donors: &[ColorSet], used: &mut Vec<bool>) -> bool {
    let Some((&c, rest)) = colors.split_first() else {
        return true;
    };
    for d in 0..donors.len() {
        if !used[d] && donors[d].contains(c) {
            used[d] = true;
            let found = distinct_donors(rest, donors, used);
            used[d] = false;
            if found {
                return true;
            }
        }
    }
    false
}

pub(crate) fn validate_shape(g: &RouteExpandedGraph, a: &ColorAssignment) -> Result<(), ColoringError> {
    let malformed = |msg: String| Err(ColoringError::MalformedAssignment(msg));
    if a.num_colors == 0 || a.num_colors > MAX_COLORS {
        return malformed(format!("color count {} outside 1..={MAX_COLORS}", a.num_colors));
    }
    if a.colors.len() != a.nodes.len() {
        return malformed("node and color lists differ in length".into());
    }
    for (i, node) in g.nodes().iter().enumerate() {
        if a.nodes.get(i) != Some(node) {
            return malformed(format!("assignment is missing node {}", g.label(i)));
        }
    }
    if a.nodes.len() != g.len() {
        return malformed(format!("assignment has {} extra nodes", a.nodes.len() - g.len()));
    }
    let palette = ColorSet::first(a.num_colors);
    let last = g.network().num_layers() - 1;
    for (i, c) in a.colors.iter().enumerate() {
        if !(c.transmit | c.coding | c.receive).is_subset(palette) {
            return malformed(format!("node {} uses a color index >= {}", g.label(i), a.num_colors));
        }
        if g.layer_of(i) == last && !(c.transmit | c.coding).is_empty() {
            return malformed(format!("destination {} has transmit or coding colors", g.label(i)));
        }
    }
    Ok(())
}

/// Checks every condition and collects all violations.
pub fn check_coloring(g: &RouteExpandedGraph, a: &ColorAssignment) -> Result<ValidityReport, ColoringError> {
    validate_shape(g, a)?;
    let mut sink = Collect { g, violations: Vec::new() };
    for idx in 0..g.len() {
        check_transmitter(g, a, idx, &mut sink);
    }
    for idx in 0..g.len() {
        check_receiver(g, a, idx, a.colors[idx].receive, &mut sink);
    }
    let last = g.network().num_layers() - 1;
    let is_independent_layer = (0..g.len()).all(|i| {
        let c = a.colors[i];
        c.coding.is_empty() && (g.layer_of(i) == last || c.transmit.len() == 1)
    });
    let violations = sink.violations;
    Ok(ValidityReport { valid: violations.is_empty(), violations, is_independent_layer })
}

/// Violations of the conditions at node `idx` alone: C1 to C3 for its
/// transmit and coding sets and C4 to C6 for its receive set.
pub fn node_violations(
    g: &RouteExpandedGraph,
    a: &ColorAssignment,
    idx: usize,
) -> Result<Vec<Violation>, ColoringError> {
    validate_shape(g, a)?;
    let mut sink = Collect { g, violations: Vec::new() };
    check_transmitter(g, a, idx, &mut sink);
    check_receiver(g, a, idx, a.colors[idx].receive, &mut sink);
    Ok(sink.violations)
}

/// Quick validity test without building a report.
pub(crate) fn is_valid(g: &RouteExpandedGraph, a: &ColorAssignment) -> bool {
    validate_shape(g, a).is_ok()
        && (0..g.len()).all(|idx| check_transmitter(g, a, idx, &mut FirstFailure))
        && (0..g.len()).all(|idx| check_receiver(g, a, idx, a.colors[idx].receive, &mut FirstFailure))
}

/// Whether receiver `idx` satisfies C4 to C6 with receive set `r`, given the
/// transmit and coding sets in `a`.
pub(crate) fn receiver_ok(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize, r: ColorSet) -> bool {
    check_receiver(g, a, idx, r, &mut FirstFailure)
}

/// Derives the smallest receive set that makes `idx` valid given the
/// transmit and coding sets of its in-neighbors.
///
/// The candidates are the coding sets of same-pair in-neighbors plus one
/// transmit color from each of them, optionally extended by one shared color
/// for the interferers. Lower colors are preferred and candidates without the
/// shared color are tried first. Returns `None` when no receive set works.
pub fn derive_receive(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize) -> Option<ColorSet> {
    let pair = g.node(idx).pair;
    let own: Vec<usize> = g.in_neighbors(idx).iter().copied().filter(|&k| g.node(k).pair == pair).collect();
    if g.in_neighbors(idx).is_empty() {
        return Some(ColorSet::EMPTY);
    }
    let base = own.iter().fold(ColorSet::EMPTY, |acc, &k| acc | a.colors[k].coding);
    let mut bases = Vec::new();
    pick_transmit_colors(a, &own, 0, base, &mut bases);
    if let Some(&r) = bases.iter().find(|&&r| receiver_ok(g, a, idx, r)) {
        return Some(r);
    }
    let union = own_union(g, a, idx);
    let spare = ColorSet::first(a.num_colors) - union;
    for &r in &bases {
        for c in spare.iter() {
            let candidate = r | ColorSet::single(c);
            if receiver_ok(g, a, idx, candidate) {
                return Some(candidate);
            }
        }
    }
    None
}

/// Enumerates receive sets containing exactly one transmit color of every
/// node in `own[pos..]`, in increasing color order.
fn pick_transmit_colors(a: &ColorAssignment, own: &[usize], pos: usize, r: ColorSet, out: &mut Vec<ColorSet>) {
    if own[..pos].iter().any(|&k| (a.colors[k].transmit & r).len() > 1) {
        return;
    }
    let Some(&k) = own.get(pos) else {
        out.push(r);
        return;
    };
    let t = a.colors[k].transmit;
    match (t & r).len() {
        0 => {
            for c in t.iter() {
                pick_transmit_colors(a, own, pos + 1, r | ColorSet::single(c), out);
            }
        }
        1 => pick_transmit_colors(a, own, pos + 1, r, out),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::NodeColors;
    use crate::network_model::{ChannelGain, LayeredNetwork, PairId};
    use crate::route_expansion::expand;

    /// Single-layer network where `S_i` reaches `D_i` and `D_{i+1}` for
    /// `i < 3`, and `S_3` reaches `D_3` and `D_1`.
    fn folded_3_2() -> RouteExpandedGraph {
        let names = |p: &str| (1..=3).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let edges = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 1)]
            .iter()
            .map(|(s, d)| (format!("S{s}"), format!("D{d}"), ChannelGain::Deterministic(1)))
            .collect();
        let net = LayeredNetwork::from_parts(vec![names("S"), names("D")], edges, None).unwrap();
        expand(&net)
    }

    fn set(colors: &[usize]) -> ColorSet {
        colors.iter().copied().collect()
    }

    fn assign(g: &RouteExpandedGraph, t: usize, sources: [&[usize]; 3]) -> ColorAssignment {
        let mut a = ColorAssignment::empty(g, t);
        for (i, colors) in sources.iter().enumerate() {
            let node = ExpandedNode { base: g.network().source(PairId(i as u32 + 1)), pair: PairId(i as u32 + 1) };
            let idx = g.index_of(node).unwrap();
            a.colors[idx] = NodeColors { transmit: set(colors), ..Default::default() };
        }
        a.derive_all_receive(g).unwrap();
        a
    }

    #[test]
    fn repetition_coloring_is_valid() {
        let g = folded_3_2();
        // D1 hears S1 and S3; with S3 on {1} only this needs S1 on {0}, S2 on {0,1}.
        let a = assign(&g, 2, [&[0], &[0, 1], &[1]]);
        let report = check_coloring(&g, &a).unwrap();
        assert!(report.valid, "{:?}", report.violations);
        assert!(!report.is_independent_layer);
        let d3 = g.index_of(ExpandedNode { base: g.network().destination(PairId(3)), pair: PairId(3) }).unwrap();
        assert_eq!(a.colors[d3].receive, set(&[0, 1]));
        assert_eq!(effective_receive_set(&g, &a, d3), set(&[1]));
        let ints = interferers(&g, &a, d3);
        assert_eq!(ints.interferers.len(), 1);
        assert_eq!(g.label(ints.interferers[0]), "S2:2");
    }

    #[test]
    fn truncated_repetition_fails_c6() {
        let g = folded_3_2();
        let mut a = assign(&g, 2, [&[0], &[0, 1], &[1]]);
        let s2 = g.index_of(ExpandedNode { base: g.network().source(PairId(2)), pair: PairId(2) }).unwrap();
        a.colors[s2].transmit = set(&[0]);
        let report = check_coloring(&g, &a).unwrap();
        assert!(!report.valid);
        assert!(!report.holds(Condition::C6));
    }

    #[test]
    fn derive_receive_finds_nothing_for_full_overlap() {
        let g = folded_3_2();
        let mut a = ColorAssignment::empty(&g, 1);
        for idx in g.layer_nodes(0).collect::<Vec<_>>() {
            a.colors[idx].transmit = set(&[0]);
        }
        let d1 = g.index_of(ExpandedNode { base: g.network().destination(PairId(1)), pair: PairId(1) }).unwrap();
        assert_eq!(derive_receive(&g, &a, d1), None);
    }

    #[test]
    fn malformed_assignments_are_rejected() {
        let g = folded_3_2();
        let mut a = assign(&g, 2, [&[0], &[0, 1], &[1]]);
        a.colors[0].transmit = set(&[5]);
        assert!(matches!(check_coloring(&g, &a), Err(ColoringError::MalformedAssignment(_))));
        let mut b = assign(&g, 2, [&[0], &[0, 1], &[1]]);
        b.nodes.pop();
        b.colors.pop();
        assert!(matches!(check_coloring(&g, &b), Err(ColoringError::MalformedAssignment(_))));
    }

    #[test]
    fn donor_matching_requires_distinct_mates() {
        let donors = [set(&[0, 1]), set(&[2])];
        assert!(distinct_donors(&[0, 2], &donors, &mut vec![false; 2]));
        assert!(!distinct_donors(&[0, 1], &donors, &mut vec![false; 2]));
        assert!(!distinct_donors(&[3], &donors, &mut vec![false; 2]));
    }
}
