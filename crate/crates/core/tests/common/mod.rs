//! Independent oracles: dense linear algebra and exhaustive possible-world
//! enumeration on tiny graphs.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use opinion_cascade::{EdgeLabel, Graph, IndexKind, NodeId};

pub fn shifted_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::<f64>::identity(n, n);
    for (u, v, w) in g.edges() {
        a[(u, u)] += w;
        a[(v, v)] += w;
        a[(u, v)] -= w;
        a[(v, u)] -= w;
    }
    a
}

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    shifted_laplacian(g) - DMatrix::<f64>::identity(n, n)
}

pub fn inverse(g: &Graph) -> DMatrix<f64> {
    shifted_laplacian(g).try_inverse().expect("I + L is invertible")
}

/// Matrix of a quadratic index, built from the dense inverse.
pub fn index_matrix(g: &Graph, kind: IndexKind) -> DMatrix<f64> {
    let n = g.node_count();
    let id = DMatrix::<f64>::identity(n, n);
    let inv = inverse(g);
    match kind {
        IndexKind::Sum => panic!("the sum index is linear"),
        IndexKind::DisagreementControversy => inv,
        IndexKind::Controversy => &inv * &inv,
        IndexKind::Disagreement => &inv * laplacian(g) * &inv,
        IndexKind::InternalConflict => {
            let r = &id - &inv;
            &r * &r
        }
        IndexKind::Polarization => {
            let centering = &id - DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
            &inv * centering * &inv
        }
    }
}

pub fn index_value(g: &Graph, s: &[f64], kind: IndexKind) -> f64 {
    if kind == IndexKind::Sum {
        return s.iter().sum();
    }
    let sv = DVector::from_column_slice(s);
    (sv.transpose() * index_matrix(g, kind) * &sv)[(0, 0)]
}

/// Linear and pair weights `w_u = 2 (sᵀM)_u Δ_u`, `m_uv = Δ_u M_uv Δ_v`.
pub fn objective_weights(g: &Graph, s: &[f64], delta: &[f64], kind: IndexKind) -> (Vec<f64>, DMatrix<f64>) {
    let n = g.node_count();
    let m = index_matrix(g, kind);
    let sv = DVector::from_column_slice(s);
    let sm = m.transpose() * sv;
    let w = (0..n).map(|u| 2.0 * sm[u] * delta[u]).collect();
    let pair = DMatrix::from_fn(n, n, |u, v| delta[u] * m[(u, v)] * delta[v]);
    (w, pair)
}

/// `(δp, (1−δ)p, 1−p)` for a directed edge.
pub fn label_probabilities(p: f64, delta: f64) -> [(EdgeLabel, f64); 3] {
    [
        (EdgeLabel::Spread, delta * p),
        (EdgeLabel::Acknowledge, (1.0 - delta) * p),
        (EdgeLabel::Ignore, 1.0 - p),
    ]
}

/// Calls `visit(labels, probability)` for every labelling of the directed
/// edges with positive probability.
pub fn for_each_world(g: &Graph, delta: f64, mut visit: impl FnMut(&[EdgeLabel], f64)) {
    fn rec(
        g: &Graph,
        delta: f64,
        e: usize,
        prob: f64,
        labels: &mut Vec<EdgeLabel>,
        visit: &mut dyn FnMut(&[EdgeLabel], f64),
    ) {
        if e == g.directed_edge_count() {
            visit(labels, prob);
            return;
        }
        for (label, q) in label_probabilities(g.probability(e), delta) {
            if q > 0.0 {
                labels.push(label);
                rec(g, delta, e + 1, prob * q, labels, visit);
                labels.pop();
            }
        }
    }
    rec(g, delta, 0, 1.0, &mut Vec::new(), &mut visit);
}

pub fn mask_of(nodes: &[NodeId]) -> u32 {
    nodes.iter().fold(0, |m, &u| m | 1 << u)
}

/// Nodes reachable from `seeds` over edges labelled `Spread`, seeds included.
pub fn spread_closure(g: &Graph, spread: &[bool], seeds: u32) -> u32 {
    let mut reached = seeds;
    let mut stack: Vec<NodeId> = (0..g.node_count()).filter(|&u| seeds >> u & 1 == 1).collect();
    while let Some(u) = stack.pop() {
        for e in g.out_edges(u) {
            let v = g.target(e);
            if spread[e] && reached >> v & 1 == 0 {
                reached |= 1 << v;
                stack.push(v);
            }
        }
    }
    reached
}

/// Users who adjust in a fully labelled world.
pub fn adjusted_in_world(g: &Graph, labels: &[EdgeLabel], seeds: u32) -> u32 {
    let spread: Vec<bool> = labels.iter().map(|&l| l == EdgeLabel::Spread).collect();
    let t = spread_closure(g, &spread, seeds);
    let mut adjusted = t;
    for u in 0..g.node_count() {
        if t >> u & 1 == 1 {
            for e in g.out_edges(u) {
                if labels[e] != EdgeLabel::Ignore {
                    adjusted |= 1 << g.target(e);
                }
            }
        }
    }
    adjusted
}

/// Distribution over adjusted sets for each seed set, by full enumeration.
pub fn adjusted_distributions(g: &Graph, delta: f64, seed_sets: &[Vec<NodeId>]) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let masks: Vec<u32> = seed_sets.iter().map(|s| mask_of(s)).collect();
    let mut dist = vec![vec![0.0; 1 << n]; seed_sets.len()];
    for_each_world(g, delta, |labels, p| {
        for (d, &m) in dist.iter_mut().zip(&masks) {
            d[adjusted_in_world(g, labels, m) as usize] += p;
        }
    });
    dist
}

/// Marginal and pairwise adjustment probabilities from a distribution over
/// adjusted sets.
pub fn moments(n: usize, dist: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let mut single = vec![0.0; n];
    let mut pair = DMatrix::<f64>::zeros(n, n);
    for (mask, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for u in 0..n {
            if mask >> u & 1 == 1 {
                single[u] += p;
                for v in 0..n {
                    if mask >> v & 1 == 1 {
                        pair[(u, v)] += p;
                    }
                }
            }
        }
    }
    (single, pair)
}

/// `Σ_u w_u P_u + Σ_{u,v} m_uv P_uv`.
pub fn objective(w: &[f64], m: &DMatrix<f64>, single: &[f64], pair: &DMatrix<f64>) -> f64 {
    let n = w.len();
    let mut total: f64 = (0..n).map(|u| w[u] * single[u]).sum();
    for u in 0..n {
        for v in 0..n {
            total += m[(u, v)] * pair[(u, v)];
        }
    }
    total
}

/// Adjustment moments by enumerating only whether each edge spreads. Given
/// the spread edges, each outside user adjusts independently, with
/// probability one minus the chance that every edge into it from a
/// spreader ignores.
pub fn branching_moments(g: &Graph, delta: f64, seed_sets: &[Vec<NodeId>]) -> Vec<(Vec<f64>, DMatrix<f64>)> {
    let n = g.node_count();
    let m2 = g.directed_edge_count();
    let masks: Vec<u32> = seed_sets.iter().map(|s| mask_of(s)).collect();
    let mut out = vec![(vec![0.0; n], DMatrix::<f64>::zeros(n, n)); seed_sets.len()];
    let free: Vec<usize> = (0..m2)
        .filter(|&e| {
            let q = delta * g.probability(e);
            q > 0.0 && q < 1.0
        })
        .collect();
    let mut spread: Vec<bool> = (0..m2).map(|e| delta * g.probability(e) >= 1.0).collect();
    // acknowledge probability of an edge known not to spread
    let ack: Vec<f64> = (0..m2)
        .map(|e| {
            let p = g.probability(e);
            let q = delta * p;
            if q >= 1.0 {
                0.0
            } else {
                (1.0 - delta) * p / (1.0 - q)
            }
        })
        .collect();
    let mut q = vec![0.0; n];
    for bits in 0u64..(1u64 << free.len()) {
        let mut prob = 1.0;
        for (i, &e) in free.iter().enumerate() {
            let on = bits >> i & 1 == 1;
            spread[e] = on;
            let qe = delta * g.probability(e);
            prob *= if on { qe } else { 1.0 - qe };
        }
        for (slot, &m) in out.iter_mut().zip(&masks) {
            let t = spread_closure(g, &spread, m);
            for (u, qu) in q.iter_mut().enumerate() {
                if t >> u & 1 == 1 {
                    *qu = 1.0;
                    continue;
                }
                let mut miss = 1.0;
                for e in g.out_edges(u) {
                    if t >> g.target(e) & 1 == 1 {
                        miss *= 1.0 - ack[g.reverse(e)];
                    }
                }
                *qu = 1.0 - miss;
            }
            for u in 0..n {
                slot.0[u] += prob * q[u];
                for v in 0..n {
                    slot.1[(u, v)] += prob * if u == v { q[u] } else { q[u] * q[v] };
                }
            }
        }
    }
    out
}

/// Standalone independent cascade: every newly active node gets one chance
/// to activate each inactive neighbour with the edge probability.
pub fn independent_cascade(g: &Graph, seeds: &[NodeId], rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut active = vec![false; g.node_count()];
    let mut frontier: Vec<NodeId> = Vec::new();
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            frontier.push(s);
        }
    }
    while let Some(u) = frontier.pop() {
        for e in g.out_edges(u) {
            let v = g.target(e);
            if !active[v] && rng.random::<f64>() < g.probability(e) {
                active[v] = true;
                frontier.push(v);
            }
        }
    }
    active
}

/// Two triangles joined by the edge 2-3.
pub fn two_triangles() -> Graph {
    Graph::from_edges(
        6,
        [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)],
    )
    .unwrap()
    .assign_weighted_cascade()
    .unwrap()
}

pub fn all_pairs(n: usize) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(vec![a, b]);
        }
    }
    out
}

pub fn uniform_opinions(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Random `k`-subset, sorted.
pub fn random_subset(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let mut s = rand::seq::index::sample(rng, n, k).into_vec();
    s.sort_unstable();
    s
}
