//! Instance files: a JSON array of `{id, x, y, w}` records, one per node.
//! Ids must be 0..n-1 (any order), coordinates finite, weights finite and
//! nonnegative; adjacency is recomputed from the coordinates on load.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use ftb_core::udg::{build_udg, PointNode, UnitDiskGraph};

/// On-disk node record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileNode {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

/// Parse an instance from JSON text. Syntax errors surface with line and
/// column; semantic errors (bad ids, non-finite values) carry the node id.
pub fn parse_instance(text: &str) -> Result<UnitDiskGraph> {
    let raw: Vec<FileNode> =
        serde_json::from_str(text).context("instance must be a JSON array of {id, x, y, w}")?;
    let nodes: Vec<PointNode> = raw
        .iter()
        .map(|f| PointNode { id: f.id, x: f.x, y: f.y, weight: f.w })
        .collect();
    build_udg(nodes).map_err(|e| anyhow::anyhow!("invalid instance: {e}"))
}

pub fn load_instance(path: &Path) -> Result<UnitDiskGraph> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read instance file {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("in {}", path.display()))
}

/// Serialize a graph back to the file format (sorted by id, pretty).
pub fn instance_to_json(g: &UnitDiskGraph) -> String {
    let raw: Vec<FileNode> = g
        .nodes()
        .iter()
        .map(|p| FileNode { id: p.id, x: p.x, y: p.y, w: p.weight })
        .collect();
    serde_json::to_string_pretty(&raw).expect("plain records always serialize")
}

pub fn save_instance(g: &UnitDiskGraph, path: &Path) -> Result<()> {
    fs::write(path, instance_to_json(g) + "\n")
        .with_context(|| format!("cannot write instance file {}", path.display()))
}

/// Parse a comma-separated node id list such as `0,3,7`.
pub fn parse_node_list(text: &str) -> Result<std::collections::BTreeSet<u32>> {
    let mut out = std::collections::BTreeSet::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let id: u32 = part
            .parse()
            .with_context(|| format!("invalid node id {part:?} in list {text:?}"))?;
        out.insert(id);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ftb_core::udg::fixtures;

    #[test]
    fn round_trip_preserves_the_graph() {
        let g = fixtures::pent5();
        let text = instance_to_json(&g);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.n(), g.n());
        assert_eq!(back.edges().len(), g.edges().len());
        for (a, b) in back.nodes().iter().zip(g.nodes()) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
            assert_eq!(a.weight, b.weight);
        }
    }

    #[test]
    fn parse_reports_syntax_position_and_semantics() {
        let err = parse_instance("[{\"id\": 0, \"x\": oops}]").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line"), "{msg}");
        let err = parse_instance(
            "[{\"id\": 0, \"x\": 0, \"y\": 0, \"w\": 1}, {\"id\": 5, \"x\": 1, \"y\": 0, \"w\": 1}]",
        )
        .unwrap_err();
        assert!(format!("{err:#}").contains("invalid instance"));
    }

    #[test]
    fn node_lists_parse_and_reject() {
        assert_eq!(
            parse_node_list("2, 0,1").unwrap(),
            std::collections::BTreeSet::from([0, 1, 2])
        );
        assert!(parse_node_list("1,x").is_err());
        assert!(parse_node_list("").unwrap().is_empty());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let g = fixtures::sq4();
        save_instance(&g, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back.n(), 4);
        assert_eq!(back.edges().len(), 6);
        assert!(load_instance(&dir.path().join("missing.json")).is_err());
    }
}
