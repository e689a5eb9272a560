//! Census of induced, weakly connected subgraphs on 3 or 4 nodes.
//!
//! Enumeration follows ESU on the undirected skeleton: every connected node
//! set is reached exactly once from its smallest node. Each set is then
//! classified by the canonical code of its induced directed adjacency.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use log::warn;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{bit, canonical_packed, permutations, CanonicalCode, DirectedGraph};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifCensus {
    pub k: usize,
    pub counts: BTreeMap<CanonicalCode, u64>,
    pub total: u64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub class: CanonicalCode,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassZScore {
    pub class: CanonicalCode,
    pub observed: u64,
    pub null_mean: f64,
    pub null_std: f64,
    /// `None` when the null ensemble has zero variance for this class.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifZScores {
    pub k: usize,
    pub classes: Vec<ClassZScore>,
}

/// Sorted skeleton and out-lists for O(log d) adjacency queries.
struct Adjacency {
    und: Vec<Vec<u32>>,
    out: Vec<Vec<u32>>,
}

impl Adjacency {
    fn new(g: &DirectedGraph) -> Self {
        let n = g.node_count();
        let mut und: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut out: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in g.edges() {
            und[u].push(v as u32);
            und[v].push(u as u32);
            out[u].push(v as u32);
        }
        for l in und.iter_mut().chain(out.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Self { und, out }
    }

    #[inline]
    fn arc(&self, u: u32, v: u32) -> bool {
        self.out[u as usize].binary_search(&v).is_ok()
    }

    #[inline]
    fn adjacent(&self, u: u32, v: u32) -> bool {
        self.und[u as usize].binary_search(&v).is_ok()
    }

    fn packed(&self, nodes: &[u32]) -> u16 {
        let k = nodes.len();
        let mut p = 0u16;
        for i in 0..k {
            for j in 0..k {
                if i != j && self.arc(nodes[i], nodes[j]) {
                    p |= bit(k, i, j);
                }
            }
        }
        p
    }
}

/// Lookup from packed adjacency to canonical code for one subgraph order.
struct ClassTable {
    lut: Vec<u16>,
}

impl ClassTable {
    fn new(k: usize) -> Self {
        let perms = permutations(k);
        let offdiag: Vec<u16> = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| bit(k, i, j)))
            .collect();
        let mut lut = vec![u16::MAX; 1 << (k * k)];
        for mask in 0u32..(1 << offdiag.len()) {
            let packed = offdiag
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .fold(0u16, |acc, (_, &bt)| acc | bt);
            lut[packed as usize] = canonical_packed(k, packed, &perms);
        }
        Self { lut }
    }
}

fn check_args(g: &DirectedGraph, k: usize) -> Result<()> {
    if !(3..=4).contains(&k) {
        return Err(invalid(format!("subgraph order must be 3 or 4, got {k}")));
    }
    if g.node_count() < k {
        return Err(invalid(format!("graph has {} nodes, fewer than k = {k}", g.node_count())));
    }
    Ok(())
}

/// One ESU walk from `root`. `keep(depth)` decides whether a child that would
/// grow the subgraph to `depth + 1` nodes is explored; `leaf` receives
/// every complete node set.
fn esu_from<R: FnMut(usize) -> bool, L: FnMut(&[u32])>(
    adj: &Adjacency,
    k: usize,
    root: u32,
    keep: &mut R,
    leaf: &mut L,
) {
    fn extend<R: FnMut(usize) -> bool, L: FnMut(&[u32])>(
        adj: &Adjacency,
        k: usize,
        root: u32,
        sub: &mut Vec<u32>,
        mut ext: Vec<u32>,
        keep: &mut R,
        leaf: &mut L,
    ) {
        if sub.len() == k {
            leaf(sub);
            return;
        }
        while let Some(w) = ext.pop() {
            if !keep(sub.len()) {
                continue;
            }
            if sub.len() + 1 == k {
                sub.push(w);
                leaf(sub);
                sub.pop();
                continue;
            }
            // exclusive neighbourhood of w; anything adjacent to `sub` is
            // already in `ext` or was consumed earlier
            let mut next = ext.clone();
            for &u in &adj.und[w as usize] {
                if u > root && !sub.contains(&u) && !sub.iter().any(|&s| adj.adjacent(s, u)) {
                    next.push(u);
                }
            }
            sub.push(w);
            extend(adj, k, root, sub, next, keep, leaf);
            sub.pop();
        }
    }
    let ext: Vec<u32> = adj.und[root as usize].iter().copied().filter(|&u| u > root).collect();
    let mut sub = vec![root];
    extend(adj, k, root, &mut sub, ext, keep, leaf);
}

fn collect_counts(k: usize, flat: Vec<u64>, exact: bool) -> MotifCensus {
    let counts: BTreeMap<CanonicalCode, u64> = flat
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(code, c)| (CanonicalCode { k: k as u8, code: code as u16 }, c))
        .collect();
    let total = counts.values().sum();
    MotifCensus { k, counts, total, exact }
}

fn add_vec(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Exact census of induced weakly connected `k`-node subgraphs.
pub fn enumerate_subgraphs(g: &DirectedGraph, k: usize) -> Result<MotifCensus> {
    check_args(g, k)?;
    let adj = Adjacency::new(g);
    let table = ClassTable::new(k);
    let size = 1usize << (k * k);
    let flat = (0..g.node_count() as u32)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, root| {
                esu_from(&adj, k, root, &mut |_| true, &mut |nodes| {
                    acc[table.lut[adj.packed(nodes) as usize] as usize] += 1;
                });
                acc
            },
        )
        .reduce(|| vec![0u64; size], add_vec);
    Ok(collect_counts(k, flat, true))
}

/// Number of connected `k`-node sets, counted from the `(k-1)`-level of the
/// ESU tree without materialising the leaves.
fn count_connected_sets(adj: &Adjacency, n: usize, k: usize) -> u64 {
    (0..n as u32)
        .into_par_iter()
        .map(|root| {
            let mut leaves = 0u64;
            // every leaf below a (k-1)-node set is one extension element;
            // walking to depth k and pruning at the last level counts them
            esu_from(adj, k, root, &mut |depth| {
                if depth == k - 1 {
                    leaves += 1;
                    false
                } else {
                    true
                }
            }, &mut |_| {});
            leaves
        })
        .sum()
}

/// Rand-ESU census. Internal levels are explored fully and each complete
/// subgraph is retained independently with probability
/// `min(1, n_samples / total)`, so every connected set has the same
/// inclusion probability and about `n_samples` sets are kept.
pub fn sample_subgraphs(g: &DirectedGraph, k: usize, n_samples: usize, seed: u64) -> Result<MotifCensus> {
    check_args(g, k)?;
    if n_samples == 0 {
        return Err(invalid("n_samples must be at least 1"));
    }
    let adj = Adjacency::new(g);
    let total = count_connected_sets(&adj, g.node_count(), k);
    let p_last = if total == 0 { 1.0 } else { (n_samples as f64 / total as f64).min(1.0) };
    let table = ClassTable::new(k);
    let size = 1usize << (k * k);
    let flat = (0..g.node_count() as u32)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, root| {
                let mut rng = substream(seed, root as u64);
                esu_from(
                    &adj,
                    k,
                    root,
                    &mut |depth| depth < k - 1 || rng.random::<f64>() < p_last,
                    &mut |nodes| acc[table.lut[adj.packed(nodes) as usize] as usize] += 1,
                );
                acc
            },
        )
        .reduce(|| vec![0u64; size], add_vec);
    Ok(collect_counts(k, flat, p_last >= 1.0))
}

/// Classes by descending count, ties by ascending code.
pub fn frequency_rank(census: &MotifCensus) -> Result<Vec<RankEntry>> {
    if census.total == 0 {
        return Err(Error::InsufficientData("empty census".into()));
    }
    let mut v: Vec<(CanonicalCode, u64)> = census.counts.iter().map(|(c, n)| (*c, *n)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let total = census.total as f64;
    Ok(v.into_iter()
        .enumerate()
        .map(|(i, (class, count))| RankEntry { rank: i + 1, class, count, frequency: count as f64 / total })
        .collect())
}

pub fn rank_csv(entries: &[RankEntry]) -> String {
    let mut s = String::from("rank,code,count,frequency\n");
    for e in entries {
        s.push_str(&format!("{},{},{},{}\n", e.rank, e.class.code, e.count, e.frequency));
    }
    s
}

/// Degree-preserving randomisation: `attempts` proposed swaps of edge pairs
/// `(a,b),(c,d) -> (a,d),(c,b)`, rejecting self-loops and duplicates.
/// Returns the rewired graph and the number of accepted swaps.
pub fn rewire<R: Rng + ?Sized>(g: &DirectedGraph, attempts: usize, rng: &mut R) -> (DirectedGraph, usize) {
    let mut edges: Vec<(usize, usize)> = g.sorted_edges();
    let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let mut accepted = 0;
    if edges.len() >= 2 {
        for _ in 0..attempts {
            let i = rng.random_range(0..edges.len());
            let j = rng.random_range(0..edges.len());
            let ((a, b), (c, d)) = (edges[i], edges[j]);
            if i == j || a == c || b == d || a == d || c == b {
                continue;
            }
            if present.contains(&(a, d)) || present.contains(&(c, b)) {
                continue;
            }
            present.remove(&(a, b));
            present.remove(&(c, d));
            present.insert((a, d));
            present.insert((c, b));
            edges[i] = (a, d);
            edges[j] = (c, b);
            accepted += 1;
        }
    }
    let out = DirectedGraph::from_edges(g.node_count(), edges).expect("swaps keep a simple graph");
    (out, accepted)
}

const SWAP_RETRIES: u64 = 5;

/// Z-scores of each class against `n_null` degree-preserving rewirings of
/// `g`, each using `100 * edge_count` swap attempts.
pub fn motif_zscores(g: &DirectedGraph, k: usize, n_null: usize, seed: u64) -> Result<MotifZScores> {
    check_args(g, k)?;
    if n_null < 10 {
        return Err(invalid("n_null must be at least 10"));
    }
    let observed = enumerate_subgraphs(g, k)?;
    let attempts = 100 * g.edge_count();
    let nulls: Vec<MotifCensus> = (0..n_null as u64)
        .into_par_iter()
        .map(|i| {
            let mut retry = 0;
            loop {
                let mut rng = substream(seed, i * (SWAP_RETRIES + 1) + retry);
                let (h, accepted) = rewire(g, attempts, &mut rng);
                if accepted > 0 || g.edge_count() < 2 || retry == SWAP_RETRIES {
                    if accepted == 0 && g.edge_count() >= 2 {
                        warn!("null sample {i}: no swap accepted after {SWAP_RETRIES} retries");
                    }
                    break enumerate_subgraphs(&h, k);
                }
                retry += 1;
            }
        })
        .collect::<Result<_>>()?;
    let classes: BTreeSet<CanonicalCode> = observed
        .counts
        .keys()
        .chain(nulls.iter().flat_map(|c| c.counts.keys()))
        .copied()
        .collect();
    let n = n_null as f64;
    let classes = classes
        .into_iter()
        .map(|class| {
            let xs: Vec<f64> = nulls.iter().map(|c| *c.counts.get(&class).unwrap_or(&0) as f64).collect();
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let std = var.sqrt();
            let obs = *observed.counts.get(&class).unwrap_or(&0);
            let z = (std > 0.0).then(|| (obs as f64 - mean) / std);
            ClassZScore { class, observed: obs, null_mean: mean, null_std: std, z }
        })
        .collect();
    Ok(MotifZScores { k, classes })
}
