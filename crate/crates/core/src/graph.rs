//! Simple directed graphs with dense node ids, plus the canonical labeling of
//! small subgraphs used by the motif census.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type NodeId = usize;

/// Simple digraph: no self-loops, no parallel edges. `in_adj` is kept as the
/// exact transpose of `out_adj`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectedGraph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn new(node_count: usize) -> Self {
        Self {
            out_adj: vec![Vec::new(); node_count],
            in_adj: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut g = Self::new(node_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Appends an isolated node and returns its id.
    pub fn add_node(&mut self) -> NodeId {
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        self.out_adj.len() - 1
    }

    /// Adds `u -> v`. Returns `Ok(true)` if the edge is new, `Ok(false)` if it
    /// was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        let n = self.node_count();
        if u >= n || v >= n {
            return Err(Error::UnknownNode);
        }
        if u == v {
            return Err(Error::SelfLoop);
        }
        if self.out_adj[u].contains(&v) {
            return Ok(false);
        }
        self.push_edge(u, v);
        Ok(true)
    }

    /// Caller guarantees `u != v`, both in range, and the edge is absent.
    pub(crate) fn push_edge(&mut self, u: NodeId, v: NodeId) {
        debug_assert!(u != v && !self.out_adj[u].contains(&v));
        self.out_adj[u].push(v);
        self.in_adj[v].push(u);
        self.edge_count += 1;
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj.get(u).is_some_and(|s| s.contains(&v))
    }

    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out_adj[u]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_adj[u].len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v].len()
    }

    /// `(in-degrees, out-degrees)`, both of length `node_count`.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.in_adj.iter().map(Vec::len).collect(),
            self.out_adj.iter().map(Vec::len).collect(),
        )
    }

    /// `L / N`.
    pub fn average_degree(&self) -> Result<f64> {
        if self.node_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(self.edge_count as f64 / self.node_count() as f64)
    }

    /// Edges in source order, then insertion order within each source.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Edges sorted by `(src, dst)`.
    pub fn sorted_edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut e: Vec<_> = self.edges().collect();
        e.sort_unstable();
        e
    }

    /// Rebuilds the in-lists from the out-lists and checks they agree with
    /// the stored ones as multisets, and that the edge count matches.
    pub fn is_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.node_count()];
        for (u, v) in self.edges() {
            if u == v || v >= self.node_count() {
                return false;
            }
            rebuilt[v].push(u);
        }
        let total: usize = self.out_adj.iter().map(Vec::len).sum();
        if total != self.edge_count {
            return false;
        }
        rebuilt.iter_mut().zip(&self.in_adj).all(|(r, stored)| {
            let mut s = stored.clone();
            r.sort_unstable();
            s.sort_unstable();
            r == &s
        }) && self.out_adj.iter().all(|vs| {
            let mut s = vs.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Serializes to the edge-list text format: a `# nodes=<N>` header and one
    /// `src,dst` line per edge, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::with_capacity(16 + self.edge_count * 12);
        let _ = writeln!(s, "# nodes={}", self.node_count());
        for (u, v) in self.sorted_edges() {
            let _ = writeln!(s, "{u},{v}");
        }
        s
    }

    /// Parses the edge-list format. Without a header the node count is one
    /// past the largest id seen. Duplicate lines collapse into one edge.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(n) = rest.trim().strip_prefix("nodes=") {
                    declared = Some(n.trim().parse().map_err(|_| Error::Parse {
                        line: i + 1,
                        msg: format!("bad node count {n:?}"),
                    })?);
                }
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "expected src,dst".into(),
            })?;
            let parse = |t: &str| {
                t.trim().parse::<NodeId>().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad node id {t:?}"),
                })
            };
            edges.push((parse(a)?, parse(b)?));
        }
        let max_id = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = match declared {
            Some(n) if n < max_id => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("header declares {n} nodes but id {} appears", max_id - 1),
                })
            }
            Some(n) => n,
            None => max_id,
        };
        Self::from_edges(n, edges)
    }
}

/// Isomorphism-class label of a digraph on `k <= 4` nodes: the minimum, over
/// all node permutations, of the row-major adjacency matrix read as a binary
/// number (entry `(0,0)` is the most significant of the `k²` bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalCode {
    pub k: u8,
    pub code: u16,
}

impl CanonicalCode {
    pub fn edge_count(&self) -> u32 {
        self.code.count_ones()
    }
}

/// Bit position of entry `(i, j)` in a packed `k x k` matrix.
#[inline]
pub(crate) fn bit(k: usize, i: usize, j: usize) -> u16 {
    1 << (k * k - 1 - (i * k + j))
}

/// All permutations of `0..k`, lexicographic.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Canonical code of a packed `k x k` matrix, given the permutations of `0..k`.
pub(crate) fn canonical_packed(k: usize, packed: u16, perms: &[Vec<usize>]) -> u16 {
    let mut best = u16::MAX;
    for perm in perms {
        let mut c = 0u16;
        for i in 0..k {
            for j in 0..k {
                if packed & bit(k, i, j) != 0 {
                    c |= bit(k, perm[i], perm[j]);
                }
            }
        }
        best = best.min(c);
    }
    best
}

/// Canonical code of a square 0/1 adjacency matrix of order 2, 3 or 4.
pub fn canonical_code(matrix: &[Vec<bool>]) -> Result<CanonicalCode> {
    let k = matrix.len();
    if !(2..=4).contains(&k) {
        return Err(invalid(format!("subgraph order must be 2..=4, got {k}")));
    }
    let mut packed = 0u16;
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != k {
            return Err(invalid("adjacency matrix is not square"));
        }
        if row[i] {
            return Err(invalid("adjacency matrix has a nonzero diagonal"));
        }
        for (j, &a) in row.iter().enumerate() {
            if a {
                packed |= bit(k, i, j);
            }
        }
    }
    Ok(CanonicalCode {
        k: k as u8,
        code: canonical_packed(k, packed, &permutations(k)),
    })
}
