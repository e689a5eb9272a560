//! Tinkering (copying) growth of software networks.
//!
//! Each new node picks `m` distinct targets among the existing nodes, links to
//! each target with probability `p`, and copies every out-edge of the target
//! independently with probability `q`. Edges always point from the newer node
//! to an older one, so the result is a DAG whose topological order is the
//! creation order.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::DirectedGraph;
use crate::rng::seeded;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N0")]
    pub n0: usize,
    pub seed: u64,
}

impl GrowthParams {
    /// Parameters with the default seed graph of `m + 1` nodes (clamped to `n`).
    pub fn new(m: usize, p: f64, q: f64, n: usize, seed: u64) -> Self {
        Self { m, p, q, n, n0: (m + 1).min(n.max(1)), seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(invalid("p must lie in [0,1]"));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(invalid("q must lie in [0,1]"));
        }
        if self.n0 == 0 || self.n0 > self.n {
            return Err(invalid("N0 must satisfy 1 <= N0 <= N"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

impl TrajectoryPoint {
    pub fn avg_degree(&self) -> f64 {
        self.l as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GrowthTrajectory {
    pub samples: Vec<TrajectoryPoint>,
}

impl GrowthTrajectory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,L,avg_degree\n");
        for pt in &self.samples {
            s.push_str(&format!("{},{},{}\n", pt.n, pt.l, pt.avg_degree()));
        }
        s
    }
}

/// Roughly `count` log-spaced node counts in `[from, to]`, always including
/// both ends.
pub fn log_checkpoints(from: usize, to: usize, count: usize) -> Vec<usize> {
    let mut out = vec![from];
    if to > from && count > 1 {
        let ratio = (to as f64 / from as f64).ln();
        for i in 1..count {
            let x = (from as f64 * (ratio * i as f64 / (count - 1) as f64).exp()).round() as usize;
            let x = x.clamp(from, to);
            if x > *out.last().unwrap() {
                out.push(x);
            }
        }
        if *out.last().unwrap() != to {
            out.push(to);
        }
    }
    out
}

const CHECKPOINTS: usize = 50;

/// Grows a network to `params.n` nodes from a directed chain of `params.n0`
/// seed nodes (`i + 1 -> i`).
pub fn grow_network(params: &GrowthParams) -> Result<(DirectedGraph, GrowthTrajectory)> {
    params.validate()?;
    let mut rng = seeded(params.seed);
    let mut g = DirectedGraph::new(params.n0);
    for i in 1..params.n0 {
        g.push_edge(i, i - 1);
    }

    let checkpoints = log_checkpoints(params.n0, params.n, CHECKPOINTS);
    let mut next_cp = 0;
    let mut traj = GrowthTrajectory::default();
    let mut record = |g: &DirectedGraph, next_cp: &mut usize| {
        if *next_cp < checkpoints.len() && g.node_count() == checkpoints[*next_cp] {
            traj.samples.push(TrajectoryPoint { n: g.node_count(), l: g.edge_count() });
            *next_cp += 1;
        }
    };
    record(&g, &mut next_cp);

    // stamp[w] == v + 1 marks w as already linked from the node v being added
    let mut stamp = vec![0usize; params.n];
    let mut new_edges = Vec::new();
    for v in params.n0..params.n {
        let existing = g.add_node();
        debug_assert_eq!(existing, v);
        let targets: Vec<usize> = if params.m >= v {
            (0..v).collect()
        } else {
            index::sample(&mut rng, v, params.m).into_vec()
        };
        new_edges.clear();
        for &t in &targets {
            if rng.random::<f64>() < params.p && stamp[t] != v + 1 {
                stamp[t] = v + 1;
                new_edges.push(t);
            }
            for &w in g.out_neighbors(t) {
                if rng.random::<f64>() < params.q && stamp[w] != v + 1 {
                    stamp[w] = v + 1;
                    new_edges.push(w);
                }
            }
        }
        for &w in &new_edges {
            g.push_edge(v, w);
        }
        record(&g, &mut next_cp);
    }
    Ok((g, traj))
}

/// Mean degree `L(N)/N` from the exact solution of `dL/dN = mp + mq L/N`
/// with `L(n0) = l0`.
pub fn meanfield_avg_degree<T: Real>(m: T, p: T, q: T, n: T, n0: T, l0: T) -> T {
    let mp = m * p;
    let mq = m * q;
    let one = T::one();
    if (mq - one).abs() <= T::epsilon() {
        // L = N (mp ln N + C)
        let c = l0 / n0 - mp * n0.ln();
        mp * n.ln() + c
    } else {
        // L = C N^mq + mp N / (1 - mq)
        let particular = mp / (one - mq);
        let c = (l0 - particular * n0) / n0.powf(mq);
        c * n.powf(mq - one) + particular
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Regime of the mean degree, controlled by `mq`: bounded below 1,
/// logarithmic at 1, power-law above.
pub fn classify_regime(m: usize, q: f64) -> Regime {
    let mq = m as f64 * q;
    if (mq - 1.0).abs() <= 1e-12 {
        Regime::Critical
    } else if mq < 1.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}
