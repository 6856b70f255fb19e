//! Plain-text network files.
//!
//! ```text
//! # layers=3 nodes=5
//! 0 1
//! 0 2
//! ...
//! # node layer parent
//! 0 1 -
//! 1 2 0
//! ```
//!
//! Edges are 0-based, one per line with `u < v`; the table lists every node
//! with its layer and skeleton parent (`-` for roots).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hiernet_core::{Network, NodeId, Skeleton};

use crate::error::{Error, Result};

pub fn format_network(network: &Network) -> String {
    let sk = network.skeleton();
    let mut out = String::new();
    let _ = writeln!(out, "# layers={} nodes={}", network.n_layers(), network.node_count());
    for (u, v) in network.graph().edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out.push_str("# node layer parent\n");
    for v in 0..network.node_count() {
        match sk.parent_of(v) {
            Some(p) => writeln!(out, "{v} {} {p}", sk.layer_of(v)),
            None => writeln!(out, "{v} {} -", sk.layer_of(v)),
        }
        .unwrap();
    }
    out
}

pub fn write_network(path: &Path, network: &Network) -> Result<()> {
    fs::write(path, format_network(network)).map_err(|e| Error::io(path, e))
}

fn header_field(header: &str, name: &str) -> Option<usize> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(name)?.strip_prefix('=')?.parse().ok())
}

/// Parses a network file; `origin` only labels error messages.
pub fn parse_network(text: &str, origin: &Path) -> Result<Network> {
    let bad = |line: usize, message: String| Error::Parse { path: origin.to_path_buf(), line, message };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let (Some(n_layers), Some(n)) = (header_field(header, "layers"), header_field(header, "nodes")) else {
        return Err(bad(1, "expected `# layers=<l> nodes=<N>`".into()));
    };

    let mut edges = Vec::new();
    let mut parents: Vec<Option<Option<NodeId>>> = vec![None; n];
    let mut layers = vec![0usize; n];
    let mut in_table = false;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.starts_with('#') {
            in_table = line.trim_start_matches('#').split_whitespace().eq(["node", "layer", "parent"]);
            if !in_table {
                return Err(bad(lineno, format!("unexpected section `{line}`")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let id = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| bad(lineno, format!("bad node id `{s}`")))?;
            if v >= n {
                return Err(bad(lineno, format!("node {v} out of range (nodes={n})")));
            }
            Ok(v)
        };
        if in_table {
            let [node, layer, parent] = fields[..] else {
                return Err(bad(lineno, "expected `node layer parent`".into()));
            };
            let v = id(node)?;
            layers[v] = layer.parse().map_err(|_| bad(lineno, format!("bad layer `{layer}`")))?;
            parents[v] = Some(if parent == "-" { None } else { Some(id(parent)?) });
        } else {
            let [u, v] = fields[..] else {
                return Err(bad(lineno, "expected `u v`".into()));
            };
            edges.push((id(u)?, id(v)?));
        }
    }

    let parents = parents
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| bad(0, format!("node {v} missing from the node table"))))
        .collect::<Result<Vec<_>>>()?;
    let skeleton = Skeleton::from_parents(parents)?;
    if skeleton.n_layers() != n_layers {
        return Err(bad(1, format!("header says {n_layers} layers, parents give {}", skeleton.n_layers())));
    }
    if let Some(v) = (0..n).find(|&v| skeleton.layer_of(v) != layers[v]) {
        return Err(bad(0, format!("node {v}: layer column disagrees with its parent chain")));
    }
    Ok(Network::new(skeleton, edges))
}

pub fn read_network(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_network(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hiernet_core::{netgen, HierarchyConfig};

    #[test]
    fn toy_format() {
        let sk = Skeleton::from_parents(vec![None, Some(0), Some(0)]).unwrap();
        let net = Network::new(sk, [(1, 2)]);
        let text = format_network(&net);
        assert_eq!(text, "# layers=2 nodes=3\n0 1\n0 2\n1 2\n# node layer parent\n0 1 -\n1 2 0\n2 2 0\n");
    }

    #[test]
    fn generated_network_round_trips() {
        let net = netgen::generate(&HierarchyConfig::statistical(300).with_seed(5)).unwrap();
        let back = parse_network(&format_network(&net), Path::new("mem")).unwrap();
        assert_eq!(back.graph(), net.graph());
        assert_eq!(back.skeleton().layer_sizes(), net.skeleton().layer_sizes());
        assert_eq!(format_network(&back), format_network(&net));
    }

    #[test]
    fn rejects_malformed_input() {
        let p = Path::new("mem");
        assert!(parse_network("", p).is_err());
        assert!(parse_network("# layers=1 nodes=2\n0 5\n# node layer parent\n0 1 -\n1 1 -\n", p).is_err());
        assert!(parse_network("# layers=1 nodes=2\n0 1\n# node layer parent\n0 1 -\n", p).is_err());
        assert!(parse_network("# layers=2 nodes=2\n# node layer parent\n0 1 -\n1 1 -\n", p).is_err());
    }
}
