//! Coded Layer colorings of route-expanded graphs.
//!
//! A coloring with `T` colors gives every expanded node `V_{i,j}` a transmit
//! set `T_{i,j}`, a coding set `C_{i,j}` and a receive set `R_{i,j}`. Color
//! `c_t` stands for time instant `t` of a block of `T` instants. A valid
//! coloring lets every pair run its own induced subgraph interference-free
//! once per block, so it achieves a normalized sum-rate of `1/T`.
//!
//! The submodules hold the validity checker, the searches for small colorings
//! and the text file format.

mod check;
mod file;
mod search;

pub(crate) use check::validate_shape;
pub use check::{
    check_coloring, derive_receive, effective_receive_set, interferers, node_violations, Condition, InterfererSet,
    ValidityReport, Violation,
};
pub use file::{parse_coloring, write_coloring, ColoringFileError};
pub(crate) use search::exact_coloring;
pub use search::{search_end_to_end, search_mcl, search_mil, tdma, SearchError, SearchOutcome, DEFAULT_BUDGET};

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::route_expansion::{ExpandedNode, RouteExpandedGraph};

/// Largest number of colors a [`ColorSet`] can hold.
pub const MAX_COLORS: usize = 64;

/// A set of color indices below [`MAX_COLORS`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ColorSet(u64);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    /// Builds a set from its bit representation.
    pub fn from_bits(bits: u64) -> Self {
        ColorSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn single(color: usize) -> Self {
        assert!(color < MAX_COLORS, "color index {color} out of range");
        ColorSet(1 << color)
    }

    /// The colors `0..n`.
    pub fn first(n: usize) -> Self {
        assert!(n <= MAX_COLORS, "color count {n} out of range");
        if n == MAX_COLORS {
            ColorSet(u64::MAX)
        } else {
            ColorSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, color: usize) -> bool {
        color < MAX_COLORS && self.0 & (1 << color) != 0
    }

    pub fn insert(&mut self, color: usize) {
        *self = *self | ColorSet::single(color);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: ColorSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: ColorSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest color in the set.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Largest color in the set.
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Colors in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(c)
        })
    }
}

impl FromIterator<usize> for ColorSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(ColorSet::EMPTY, |acc, c| acc | ColorSet::single(c))
    }
}

impl BitOr for ColorSet {
    type Output = ColorSet;
    fn bitor(self, rhs: ColorSet) -> ColorSet {
        ColorSet(self.0 | rhs.0)
    }
}

impl BitAnd for ColorSet {
    type Output = ColorSet;
    fn bitand(self, rhs: ColorSet) -> ColorSet {
        ColorSet(self.0 & rhs.0)
    }
}

impl Sub for ColorSet {
    type Output = ColorSet;
    fn sub(self, rhs: ColorSet) -> ColorSet {
        ColorSet(self.0 & !rhs.0)
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ColorSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Transmit, coding and receive sets of one expanded node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct NodeColors {
    pub transmit: ColorSet,
    pub coding: ColorSet,
    pub receive: ColorSet,
}

/// A color assignment over a route-expanded graph.
///
/// `nodes` and `colors` run parallel to [`RouteExpandedGraph::nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    pub num_colors: usize,
    pub nodes: Vec<ExpandedNode>,
    pub colors: Vec<NodeColors>,
}

impl ColorAssignment {
    /// An assignment with every set empty.
    pub fn empty(g: &RouteExpandedGraph, num_colors: usize) -> Self {
        ColorAssignment { num_colors, nodes: g.nodes().to_vec(), colors: vec![NodeColors::default(); g.len()] }
    }

    /// Colors of node `idx`.
    pub fn get(&self, idx: usize) -> &NodeColors {
        &self.colors[idx]
    }

    /// Colors of `node`, if it is part of the assignment.
    pub fn colors_of(&self, node: ExpandedNode) -> Option<&NodeColors> {
        self.nodes.iter().position(|&n| n == node).map(|i| &self.colors[i])
    }

    /// Whether any node performs network coding.
    pub fn uses_coding(&self) -> bool {
        self.colors.iter().any(|c| !c.coding.is_empty())
    }

    /// Fills every receive set with the derived closure. Returns the index of
    /// the first node whose receive set cannot be completed, if any.
    pub fn derive_all_receive(&mut self, g: &RouteExpandedGraph) -> Result<(), usize> {
        for idx in 0..g.len() {
            match derive_receive(g, self, idx) {
                Some(r) => self.colors[idx].receive = r,
                None => return Err(idx),
            }
        }
        Ok(())
    }
}

/// Errors raised for assignments that do not fit their graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("malformed assignment: {0}")]
    MalformedAssignment(String),
    #[error("coloring is not a valid Coded Layer coloring ({0} violations)")]
    InvalidColoring(usize),
}

/// Normalized sum-rate `1/T` guaranteed by a valid coloring.
pub fn achievable_alpha(g: &RouteExpandedGraph, a: &ColorAssignment) -> Result<Ratio<u64>, ColoringError> {
    let report = check_coloring(g, a)?;
    if !report.valid {
        return Err(ColoringError::InvalidColoring(report.violations.len()));
    }
    Ok(Ratio::new(1, a.num_colors as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_set_operations() {
        let a: ColorSet = [0, 2, 5].into_iter().collect();
        let b = ColorSet::first(3);
        assert_eq!((a & b).iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!((a | b).len(), 4);
        assert_eq!((a - b), ColorSet::single(5));
        assert_eq!(a.min(), Some(0));
        assert_eq!(a.max(), Some(5));
        assert!(ColorSet::single(2).is_subset(a));
        assert_eq!(a.to_string(), "{0,2,5}");
        assert_eq!(ColorSet::EMPTY.to_string(), "{}");
        assert_eq!(ColorSet::first(64).len(), 64);
    }
}
