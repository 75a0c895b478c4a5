//! Exhaustive enumeration of Coded Layer colorings for small graphs.

use clsched::coloring::{node_violations, ColorAssignment, ColorSet, Condition};
use clsched::route_expansion::RouteExpandedGraph;

/// Whether `idx` is free of the named conditions in `a`.
fn clean_at(g: &RouteExpandedGraph, a: &ColorAssignment, idx: usize, conditions: &[Condition]) -> bool {
    node_violations(g, a, idx).unwrap().iter().all(|v| !conditions.contains(&v.condition))
}

/// Full enumeration of transmit, coding and receive sets with `t` colors.
/// Transmitters are filled layer by layer. Once a layer is complete, its
/// nodes must satisfy C1 to C3 and every receiver of the next layer must
/// admit some receive set meeting C4 to C6.
pub fn enumerate_feasible(g: &RouteExpandedGraph, t: usize) -> bool {
    let last = g.network().num_layers() - 1;
    let layers: Vec<Vec<usize>> = (0..last).map(|l| g.layer_nodes(l).collect()).collect();
    let subsets: Vec<ColorSet> = (0..1u64 << t).map(ColorSet::from_bits).collect();
    let mut a = ColorAssignment::empty(g, t);

    fn receivers_ok(g: &RouteExpandedGraph, a: &mut ColorAssignment, l: usize, subsets: &[ColorSet]) -> bool {
        let receivers: Vec<usize> = g.layer_nodes(l + 1).collect();
        receivers.into_iter().all(|r| {
            let found = subsets.iter().any(|&set| {
                a.colors[r].receive = set;
                clean_at(g, a, r, &[Condition::C4, Condition::C5, Condition::C6])
            });
            found
        })
    }

    fn fill(
        g: &RouteExpandedGraph,
        a: &mut ColorAssignment,
        layers: &[Vec<usize>],
        l: usize,
        pos: usize,
        subsets: &[ColorSet],
    ) -> bool {
        if l == layers.len() {
            return true;
        }
        if pos == layers[l].len() {
            let transmit_ok =
                layers[l].iter().all(|&i| clean_at(g, a, i, &[Condition::C1, Condition::C2, Condition::C3]));
            return transmit_ok && receivers_ok(g, a, l, subsets) && fill(g, a, layers, l + 1, 0, subsets);
        }
        let idx = layers[l][pos];
        let has_mates = !g.mates(idx).is_empty();
        // Colors are interchangeable, so the very first transmit set can be
        // taken to be a prefix {0, .., k}.
        let first = l == 0 && pos == 0;
        for &transmit in &subsets[1..] {
            if first && transmit != ColorSet::first(transmit.len()) {
                continue;
            }
            for &coding in subsets {
                if !coding.is_empty() && !has_mates {
                    continue;
                }
                a.colors[idx].transmit = transmit;
                a.colors[idx].coding = coding;
                if fill(g, a, layers, l, pos + 1, subsets) {
                    return true;
                }
            }
        }
        a.colors[idx].transmit = ColorSet::EMPTY;
        a.colors[idx].coding = ColorSet::EMPTY;
        false
    }

    fill(g, &mut a, &layers, 0, 0, &subsets)
}

/// Smallest `T <= 3` admitting a valid coloring, by enumeration.
pub fn oracle_min_colors(g: &RouteExpandedGraph) -> Option<usize> {
    (1..=3).find(|&t| enumerate_feasible(g, t))
}
