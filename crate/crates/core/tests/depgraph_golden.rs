use std::path::PathBuf;

use evosoft::depgraph::{scan_tree, LangProfile};
use evosoft::DirectedGraph;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/depgraph")
}

#[test]
fn medium_tree_matches_golden_edges() {
    let dir = fixtures();
    let report = scan_tree(&dir.join("medium"), &LangProfile::c(), true).unwrap();
    let golden = std::fs::read_to_string(dir.join("medium_edges.txt")).unwrap();
    assert_eq!(report.graph.to_edge_list(), golden);
    let labels = std::fs::read_to_string(dir.join("medium_labels.csv")).unwrap();
    assert_eq!(report.labels_csv(), labels);
    assert!(report.skipped.is_empty() && report.unresolved.is_empty());
}

#[test]
fn medium_tree_has_cycle_and_externals() {
    let report = scan_tree(&fixtures().join("medium"), &LangProfile::c(), true).unwrap();
    let id = |name: &str| report.labels.iter().position(|l| l == name).unwrap();
    let (a, b) = (id("src/net/peer_a.h"), id("src/net/peer_b.h"));
    assert!(report.graph.has_edge(a, b) && report.graph.has_edge(b, a));
    assert_eq!(report.external_count, 7);
    assert_eq!(report.graph.in_degree(id("ext:stdio.h")), 3);
    assert!(!report.labels.iter().any(|l| l.contains("ghost") || l.ends_with(".md") || l.ends_with(".py")));
}

#[test]
fn rescans_are_byte_identical() {
    let root = fixtures().join("medium");
    let a = scan_tree(&root, &LangProfile::c(), true).unwrap();
    let b = scan_tree(&root, &LangProfile::c(), true).unwrap();
    assert_eq!(a.graph.to_edge_list(), b.graph.to_edge_list());
    assert_eq!(a.labels_csv(), b.labels_csv());
}

#[test]
fn internal_only_mode_records_unresolved() {
    let root = fixtures().join("medium");
    let with_ext = scan_tree(&root, &LangProfile::c(), true).unwrap();
    let internal = scan_tree(&root, &LangProfile::c(), false).unwrap();
    assert_eq!(internal.graph.node_count(), with_ext.graph.node_count() - with_ext.external_count);
    assert_eq!(internal.external_count, 0);
    let ext_edges = with_ext.graph.edges().filter(|&(_, v)| v >= internal.graph.node_count()).count();
    assert_eq!(internal.unresolved.len(), ext_edges);
    assert_eq!(internal.graph.edge_count(), with_ext.graph.edge_count() - ext_edges);
    let parsed = DirectedGraph::from_edge_list(&internal.graph.to_edge_list()).unwrap();
    assert_eq!(parsed.sorted_edges(), internal.graph.sorted_edges());
}
