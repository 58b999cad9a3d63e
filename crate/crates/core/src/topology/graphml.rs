//! GraphML ingestion for Topology Zoo files. Only node ids and edge
//! endpoints are read; all data attributes are ignored.

use std::collections::HashMap;
use std::path::Path;

use super::{Provenance, Topology};
use crate::error::{Error, Result};

/// Loads a Topology Zoo GraphML file, keeping its largest connected
/// component. The file stem is recorded as the provenance source name.
pub fn load_topology_zoo(path: impl AsRef<Path>) -> Result<Topology> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graphml".to_string());
    parse_graphml(&text, &name)
}

pub fn parse_graphml(text: &str, source_name: &str) -> Result<Topology> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Parse {
        line: Some(e.pos().row),
        message: e.to_string(),
    })?;
    let line_of = |node: roxmltree::Node| doc.text_pos_at(node.range().start).row;

    let graph = doc
        .descendants()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| Error::Parse {
            line: None,
            message: "no <graph> element".to_string(),
        })?;

    let mut index = HashMap::new();
    let mut ids = Vec::new();
    for node in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = node.attribute("id").ok_or_else(|| Error::Parse {
            line: Some(line_of(node)),
            message: "<node> without id".to_string(),
        })?;
        if index.insert(id.to_string(), ids.len()).is_some() {
            return Err(Error::Parse {
                line: Some(line_of(node)),
                message: format!("duplicate node id {id:?}"),
            });
        }
        ids.push(id.to_string());
    }
    if ids.is_empty() {
        return Err(Error::param("graph has no nodes"));
    }

    let mut edges = Vec::new();
    for edge in graph.children().filter(|n| n.has_tag_name("edge")) {
        let endpoint = |attr: &str| -> Result<usize> {
            let id = edge.attribute(attr).ok_or_else(|| Error::Parse {
                line: Some(line_of(edge)),
                message: format!("<edge> without {attr}"),
            })?;
            index.get(id).copied().ok_or_else(|| Error::Parse {
                line: Some(line_of(edge)),
                message: format!("edge {attr} {id:?} is not a declared node"),
            })
        };
        let (a, b) = (endpoint("source")?, endpoint("target")?);
        // Topology Zoo files occasionally carry self-loops and parallel
        // links; neither exists in a simple graph.
        if a != b {
            edges.push((a, b));
        }
    }

    let full = Topology::from_edges(ids.len(), edges, Provenance::default())?;
    let largest = full
        .components()
        .into_iter()
        .enumerate()
        .max_by_key(|(order, c)| (c.len(), std::cmp::Reverse(*order)))
        .map(|(_, c)| c)
        .expect("at least one node");
    let provenance = Provenance::new("topology_zoo")
        .with_param("source", source_name)
        .with_param("file_nodes", ids.len())
        .with_param(
            "node_ids",
            largest.iter().map(|&v| ids[v].as_str()).collect::<Vec<_>>(),
        );
    Ok(full.induced_subgraph(&largest)?.with_provenance(provenance))
}
