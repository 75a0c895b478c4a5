//! Network descriptor files.
//!
//! Descriptors are TOML documents with three required keys and one optional
//! table:
//!
//! ```toml
//! layers = [["S1", "S2"], ["A"], ["D1", "D2"]]
//! pairs = { sources = ["S1", "S2"], destinations = ["D1", "D2"] }
//! edges = [["S1", "A", 1], ["S2", "A", 2], ["A", "D1", 1], ["A", "D2", 1]]
//!
//! [family]
//! kind = "folded_single"
//! k = 2
//! m = 1
//! ```
//!
//! * `layers` lists the node names of every layer, first layer to last.
//! * `pairs.sources` and `pairs.destinations` fix the pair order: pair `j`
//!   is `(sources[j-1], destinations[j-1])`. They must be permutations of the
//!   first and last layer.
//! * `edges` holds `[from, to, gain]` triples. A gain is a non-negative
//!   integer for the linear deterministic model or the string `"h:<label>"`
//!   for the Gaussian model. A network uses one model throughout.
//! * `family` is the tag written by the generators. It unlocks the
//!   family-specific capacity bounds.
//!
//! Unknown keys anywhere in the document are rejected.

use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;

use super::{ChannelGain, Family, LayeredNetwork, NetworkError};

/// Errors raised while reading a descriptor.
#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("descriptor syntax: {0}")]
    Syntax(String),
    #[error("gain {0:?} is neither a non-negative integer nor \"h:<label>\"")]
    BadGain(String),
    #[error("pairs.{list} must be a permutation of the {layer} layer")]
    PairOrder { list: &'static str, layer: &'static str },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    layers: Vec<Vec<String>>,
    pairs: Pairs,
    edges: Vec<(String, String, GainValue)>,
    family: Option<Family>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Pairs {
    sources: Vec<String>,
    destinations: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GainValue {
    Integer(i64),
    Text(String),
}

fn parse_gain(value: GainValue) -> Result<ChannelGain, DescriptorError> {
    match value {
        GainValue::Integer(n) => {
            u32::try_from(n).map(ChannelGain::Deterministic).map_err(|_| DescriptorError::BadGain(n.to_string()))
        }
        GainValue::Text(text) => match text.strip_prefix("h:") {
            Some(label) if !label.is_empty() => Ok(ChannelGain::Gaussian(label.to_string())),
            _ => Err(DescriptorError::BadGain(text)),
        },
    }
}

fn same_members(a: &[String], b: &[String]) -> bool {
    a.len() == b.len() && a.iter().collect::<BTreeSet<_>>() == b.iter().collect::<BTreeSet<_>>()
}

/// Parses a descriptor document into a validated network.
pub fn parse_descriptor(text: &str) -> Result<LayeredNetwork, DescriptorError> {
    let doc: Document = toml::from_str(text).map_err(|e| DescriptorError::Syntax(e.to_string()))?;
    let mut layers = doc.layers;
    if layers.len() < 2 {
        return Err(NetworkError::TooFewLayers(layers.len()).into());
    }
    let last = layers.len() - 1;
    if !same_members(&doc.pairs.sources, &layers[0]) {
        return Err(DescriptorError::PairOrder { list: "sources", layer: "first" });
    }
    if !same_members(&doc.pairs.destinations, &layers[last]) {
        return Err(DescriptorError::PairOrder { list: "destinations", layer: "last" });
    }
    layers[0] = doc.pairs.sources;
    layers[last] = doc.pairs.destinations;
    let edges = doc
        .edges
        .into_iter()
        .map(|(a, b, g)| Ok((a, b, parse_gain(g)?)))
        .collect::<Result<Vec<_>, DescriptorError>>()?;
    Ok(LayeredNetwork::from_parts(layers, edges, doc.family)?)
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn name_list<'a>(names: impl Iterator<Item = &'a str>) -> String {
    let items: Vec<String> = names.map(quote).collect();
    format!("[{}]", items.join(", "))
}

/// Writes a network in descriptor form. Parsing the output yields an equal
/// network, and writing that network again reproduces the same text.
pub fn write_descriptor(net: &LayeredNetwork) -> String {
    let mut out = String::new();
    out.push_str("layers = [\n");
    for layer in net.layers() {
        out.push_str(&format!("  {},\n", name_list(layer.iter().map(|&v| net.name(v)))));
    }
    out.push_str("]\n");
    let first = &net.layers()[0];
    let last = &net.layers()[net.num_layers() - 1];
    out.push_str(&format!(
        "pairs = {{ sources = {}, destinations = {} }}\n",
        name_list(first.iter().map(|&v| net.name(v))),
        name_list(last.iter().map(|&v| net.name(v))),
    ));
    out.push_str("edges = [\n");
    for (a, b, gain) in net.edges() {
        let gain = match gain {
            ChannelGain::Deterministic(n) => n.to_string(),
            ChannelGain::Gaussian(label) => quote(&format!("h:{label}")),
        };
        out.push_str(&format!("  [{}, {}, {}],\n", quote(net.name(a)), quote(net.name(b)), gain));
    }
    out.push_str("]\n");
    if let Some(family) = net.family() {
        let table = toml::to_string(family).expect("family tags always serialize");
        out.push_str("\n[family]\n");
        out.push_str(&table);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network_model::PairId;

    const SAMPLE: &str = r#"
layers = [["S1", "S2"], ["A"], ["D1", "D2"]]
pairs = { sources = ["S2", "S1"], destinations = ["D2", "D1"] }
edges = [["S1", "A", 1], ["S2", "A", 2], ["A", "D1", 1], ["A", "D2", 0]]
"#;

    #[test]
    fn parses_and_reorders_pairs() {
        let net = parse_descriptor(SAMPLE).unwrap();
        assert_eq!(net.name(net.source(PairId(1))), "S2");
        assert_eq!(net.name(net.destination(PairId(2))), "D1");
        assert_eq!(net.max_gain(), 2);
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let net = parse_descriptor(SAMPLE).unwrap().with_family(Some(Family::Nested { levels: 1 }));
        let text = write_descriptor(&net);
        let again = parse_descriptor(&text).unwrap();
        assert_eq!(again, net);
        assert_eq!(write_descriptor(&again), text);
    }

    #[test]
    fn gaussian_gains() {
        let text = r#"
layers = [["S"], ["D"]]
pairs = { sources = ["S"], destinations = ["D"] }
edges = [["S", "D", "h:sd"]]
"#;
        let net = parse_descriptor(text).unwrap();
        assert_eq!(net.mode(), crate::network_model::ChannelMode::Gaussian);
        let again = parse_descriptor(&write_descriptor(&net)).unwrap();
        assert_eq!(again, net);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = format!("{SAMPLE}\ncomment = \"x\"\n");
        assert!(matches!(parse_descriptor(&text), Err(DescriptorError::Syntax(_))));
        let nested = SAMPLE.replace("destinations = [\"D2\", \"D1\"]", "destinations = [\"D2\", \"D1\"], extra = 1");
        assert!(matches!(parse_descriptor(&nested), Err(DescriptorError::Syntax(_))));
    }

    #[test]
    fn rejects_bad_gains_and_pairs() {
        let negative = SAMPLE.replace("[\"S1\", \"A\", 1]", "[\"S1\", \"A\", -1]");
        assert!(matches!(parse_descriptor(&negative), Err(DescriptorError::BadGain(_))));
        let label = SAMPLE.replace("[\"S1\", \"A\", 1]", "[\"S1\", \"A\", \"g:1\"]");
        assert!(matches!(parse_descriptor(&label), Err(DescriptorError::BadGain(_))));
        let pairs = SAMPLE.replace("sources = [\"S2\", \"S1\"]", "sources = [\"S2\", \"A\"]");
        assert!(matches!(parse_descriptor(&pairs), Err(DescriptorError::PairOrder { .. })));
    }

    #[test]
    fn surfaces_network_errors() {
        let text = SAMPLE.replace("[\"S1\", \"A\", 1]", "[\"S1\", \"D1\", 1]");
        assert!(matches!(parse_descriptor(&text), Err(DescriptorError::Network(NetworkError::CrossLayerEdge { .. }))));
    }
}
