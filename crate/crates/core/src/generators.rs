//! Synthetic connected graphs with unit weights.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::numeric::substream;

struct Builder {
    adj: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    fn has(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u].contains(&v)
    }

    fn add(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v || self.has(u, v) {
            return false;
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edges.push((u, v));
        true
    }

    fn finish(self, n: usize) -> Result<Graph> {
        Graph::from_edges(n, self.edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("graph needs at least one node"));
    }
    if m + 1 < n || m > n * (n - 1) / 2 {
        return Err(Error::validation(format!(
            "a connected simple graph on {n} nodes cannot have {m} edges"
        )));
    }
    Ok(())
}

/// Random recursive tree plus uniformly random extra edges, `m` edges total.
pub fn random_connected(n: usize, m: usize, seed: u64) -> Result<Graph> {
    check_sizes(n, m)?;
    let mut rng = substream(seed, 0);
    let mut b = Builder::new(n);
    for v in 1..n {
        let u = rng.random_range(0..v);
        b.add(u, v);
    }
    while b.edges.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        b.add(u, v);
    }
    b.finish(n)
}

/// Growth by preferential attachment with triad closure: each new node
/// links to a degree-biased target, and each further link goes to a
/// neighbour of the previous target with probability `triad`. Links are
/// spread so the graph ends with exactly `m` edges.
pub fn clustered_preferential(n: usize, m: usize, triad: f64, seed: u64) -> Result<Graph> {
    check_sizes(n, m)?;
    let mut rng = substream(seed, 1);
    let mut b = Builder::new(n);
    for v in 1..n {
        // cumulative quota keeps the per-node link count near m / (n - 1)
        let quota = m * v / (n - 1) - m * (v - 1) / (n - 1);
        let want = quota.clamp(1, v);
        let mut prev: Option<NodeId> = None;
        let mut attempts = 0;
        let mut linked = 0;
        while linked < want && attempts < 50 * want {
            attempts += 1;
            let target = match prev {
                Some(p) if rng.random::<f64>() < triad && !b.adj[p].is_empty() => *b.adj[p].choose(&mut rng).unwrap(),
                _ if b.edges.is_empty() => rng.random_range(0..v),
                _ => {
                    let (x, y) = b.edges[rng.random_range(0..b.edges.len())];
                    if rng.random::<bool>() {
                        x
                    } else {
                        y
                    }
                }
            };
            if target < v && b.add(v, target) {
                linked += 1;
                prev = Some(target);
            }
        }
        if linked == 0 {
            b.add(v, rng.random_range(0..v));
        }
    }
    while b.edges.len() < m {
        let u = rng.random_range(0..n);
        let close = b.adj[u].choose(&mut rng).and_then(|&w| b.adj[w].choose(&mut rng).copied());
        let v = match close {
            Some(v) if rng.random::<f64>() < triad => v,
            _ => rng.random_range(0..n),
        };
        b.add(u, v);
    }
    b.finish(n)
}

/// Sparse clustered graph shaped like a small co-authorship network.
pub fn collaboration_like(n: usize, m: usize, seed: u64) -> Result<Graph> {
    clustered_preferential(n, m, 0.8, seed)
}

/// Heavy-tailed graph shaped like a voting or follower network.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Result<Graph> {
    clustered_preferential(n, m, 0.1, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn connected(g: &Graph) -> bool {
        g.largest_connected_component().unwrap().node_count() == g.node_count()
    }

    #[test]
    fn sizes_are_exact() {
        for seed in 0..5 {
            let g = random_connected(50, 120, seed).unwrap();
            assert_eq!((g.node_count(), g.edge_count()), (50, 120));
            assert!(connected(&g));
            let g = collaboration_like(379, 914, seed).unwrap();
            assert_eq!((g.node_count(), g.edge_count()), (379, 914));
            assert!(connected(&g));
            let g = preferential_attachment(889, 2914, seed).unwrap();
            assert_eq!((g.node_count(), g.edge_count()), (889, 2914));
            assert!(connected(&g));
        }
    }

    #[test]
    fn tree_and_complete_extremes() {
        let g = random_connected(10, 9, 1).unwrap();
        assert_eq!(g.edge_count(), 9);
        assert!(connected(&g));
        let g = random_connected(6, 15, 1).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!(random_connected(6, 16, 1).is_err());
        assert!(random_connected(6, 4, 1).is_err());
    }

    #[test]
    fn generation_is_reproducible() {
        let a: Vec<_> = collaboration_like(100, 240, 4).unwrap().edges().collect();
        let b: Vec<_> = collaboration_like(100, 240, 4).unwrap().edges().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn degree_is_heavy_tailed() {
        let g = preferential_attachment(889, 2914, 2).unwrap();
        let max = (0..889).map(|u| g.degree(u)).max().unwrap();
        assert!(max > 30, "max degree {max}");
    }
}
