//! Coloring files.
//!
//! ```text
//! T=2
//! S1:1 T={0} C={} R={}
//! S2:2 T={0,1} C={} R={}
//! D1:1 T={} C={} R={0}
//! ```
//!
//! The first line gives the number of colors. Every other line describes one
//! expanded node by its `base:pair` label followed by its transmit, coding
//! and receive sets. Blank lines and lines starting with `#` are ignored.
//! Every node of the route-expanded graph must appear exactly once.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{ColorAssignment, ColorSet, NodeColors, MAX_COLORS};
use crate::network_model::PairId;
use crate::route_expansion::{ExpandedNode, RouteExpandedGraph};

/// Errors raised while reading a coloring file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node {label} is not in the route-expanded graph")]
    UnknownNode { line: usize, label: String },
    #[error("line {line}: node {label} is listed twice")]
    DuplicateNode { line: usize, label: String },
    #[error("node {0} has no line")]
    MissingNode(String),
}

fn syntax(line: usize, message: impl Into<String>) -> ColoringFileError {
    ColoringFileError::Syntax { line, message: message.into() }
}

fn parse_set(text: &str, line: usize) -> Result<ColorSet, ColoringFileError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| syntax(line, format!("expected {{...}}, found {text:?}")))?;
    let mut set = ColorSet::EMPTY;
    for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let c: usize = item.parse().map_err(|_| syntax(line, format!("bad color {item:?}")))?;
        if c >= MAX_COLORS {
            return Err(syntax(line, format!("color {c} exceeds {}", MAX_COLORS - 1)));
        }
        set.insert(c);
    }
    Ok(set)
}

/// Parses a coloring file against the route-expanded graph it colors.
pub fn parse_coloring(g: &RouteExpandedGraph, text: &str) -> Result<ColorAssignment, ColoringFileError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, header) = lines.next().ok_or_else(|| syntax(1, "missing T=<n> header"))?;
    let num_colors: usize = header
        .strip_prefix("T=")
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| syntax(first, "expected T=<n> header"))?;

    let names: HashMap<&str, _> = g.network().layers().iter().flatten().map(|&v| (g.network().name(v), v)).collect();
    let mut colors: Vec<Option<NodeColors>> = vec![None; g.len()];
    for (line, content) in lines {
        let (head, sets) =
            content.split_once(" T=").ok_or_else(|| syntax(line, "expected `base:pair T={..} C={..} R={..}`"))?;
        let parts: Vec<&str> = sets.split_whitespace().collect();
        let [t, c, r] = parts.as_slice() else {
            return Err(syntax(line, "expected three color sets"));
        };
        let c = c.strip_prefix("C=").ok_or_else(|| syntax(line, "expected C={..}"))?;
        let r = r.strip_prefix("R=").ok_or_else(|| syntax(line, "expected R={..}"))?;
        let label = head.trim();
        let (base, pair) = label.rsplit_once(':').ok_or_else(|| syntax(line, "expected base:pair label"))?;
        let unknown = || ColoringFileError::UnknownNode { line, label: label.to_string() };
        let pair: u32 = pair.parse().map_err(|_| unknown())?;
        let base = *names.get(base).ok_or_else(unknown)?;
        let idx = g.index_of(ExpandedNode { base, pair: PairId(pair) }).ok_or_else(unknown)?;
        if colors[idx].is_some() {
            return Err(ColoringFileError::DuplicateNode { line, label: label.to_string() });
        }
        colors[idx] = Some(NodeColors {
            transmit: parse_set(t, line)?,
            coding: parse_set(c, line)?,
            receive: parse_set(r, line)?,
        });
    }
    let colors = colors
        .into_iter()
        .enumerate()
        .map(|(idx, c)| c.ok_or_else(|| ColoringFileError::MissingNode(g.label(idx))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ColorAssignment { num_colors, nodes: g.nodes().to_vec(), colors })
}

/// Writes a coloring in file form, one line per node in graph order.
pub fn write_coloring(g: &RouteExpandedGraph, a: &ColorAssignment) -> String {
    let mut out = format!("T={}\n", a.num_colors);
    for (idx, c) in a.colors.iter().enumerate() {
        let _ = writeln!(out, "{} T={} C={} R={}", g.label(idx), c.transmit, c.coding, c.receive);
    }
    out
}
