//! Undirected weighted graphs with per-direction activation probabilities.
//!
//! Adjacency is kept in compressed sorted-neighbour form. Every undirected
//! edge `{u, v}` appears twice, once as the directed edge `u -> v` in the row
//! of `u` and once as `v -> u` in the row of `v`. The two share a weight but
//! carry independent activation probabilities. Directed edges are addressed
//! by their position in the compressed arrays ([`EdgeId`]), which is also
//! the key used when sampling edge labels.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{BufRead, Write};
use std::ops::{Deref, Range};

use crate::error::{Error, Result};

pub type NodeId = usize;
/// Position of a directed edge in the compressed adjacency.
pub type EdgeId = usize;

#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    probs: Vec<f64>,
    reverse: Vec<EdgeId>,
    weighted_degree: Vec<f64>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph on nodes `0..n` from undirected `(u, v, weight)` triples.
    ///
    /// Self-loops are dropped and repeated edges collapse onto the first
    /// occurrence. All activation probabilities start at zero.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let labels = (0..n).map(|u| u.to_string()).collect();
        let mut dedup = EdgeDedup::default();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            check_weight(w)?;
            dedup.push(u, v, w);
        }
        Ok(Self::assemble(n, dedup.edges, labels))
    }

    fn assemble(n: usize, edges: Vec<(NodeId, NodeId, f64)>, labels: Vec<String>) -> Self {
        let mut rows: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in &edges {
            rows[u].push((v, w));
            rows[v].push((u, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * edges.len());
        let mut weights = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for row in &mut rows {
            row.sort_unstable_by_key(|&(v, _)| v);
            for &(v, w) in row.iter() {
                targets.push(v);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let weighted_degree = (0..n)
            .map(|u| weights[offsets[u]..offsets[u + 1]].iter().sum())
            .collect();
        let mut graph = Graph {
            probs: vec![0.0; targets.len()],
            reverse: vec![0; targets.len()],
            offsets,
            targets,
            weights,
            weighted_degree,
            labels,
        };
        for u in 0..n {
            for e in graph.out_edges(u) {
                let v = graph.targets[e];
                graph.reverse[e] = graph.find_edge(v, u).expect("adjacency is symmetric");
            }
        }
        graph
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn directed_edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Directed edges leaving `u`, in ascending order of target.
    #[inline]
    pub fn out_edges(&self, u: NodeId) -> Range<EdgeId> {
        self.offsets[u]..self.offsets[u + 1]
    }

    #[inline]
    pub fn target(&self, e: EdgeId) -> NodeId {
        self.targets[e]
    }

    #[inline]
    pub fn weight(&self, e: EdgeId) -> f64 {
        self.weights[e]
    }

    /// Activation probability of the directed edge, i.e. the chance that the
    /// target reacts to content received from the source.
    #[inline]
    pub fn probability(&self, e: EdgeId) -> f64 {
        self.probs[e]
    }

    /// The opposite direction of `e`.
    #[inline]
    pub fn reverse(&self, e: EdgeId) -> EdgeId {
        self.reverse[e]
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.out_edges(u)]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn weighted_degree(&self, u: NodeId) -> f64 {
        self.weighted_degree[u]
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let row = self.out_edges(u);
        self.targets[row.clone()]
            .binary_search(&v)
            .ok()
            .map(|i| row.start + i)
    }

    /// Undirected edges as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.out_edges(u)
                .filter(move |&e| u < self.targets[e])
                .map(move |e| (u, self.targets[e], self.weights[e]))
        })
    }

    /// Human-readable id of each node as it appeared in the source file.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u]
    }

    /// Sets `p(u, v)` for every directed edge from a caller-supplied rule.
    pub fn with_probabilities(mut self, rule: impl Fn(NodeId, NodeId) -> f64) -> Result<Self> {
        for u in 0..self.node_count() {
            for e in self.out_edges(u) {
                let p = rule(u, self.targets[e]);
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::validation(format!(
                        "activation probability {p} on ({u}, {}) is outside [0, 1]",
                        self.targets[e]
                    )));
                }
                self.probs[e] = p;
            }
        }
        Ok(self)
    }

    pub fn with_uniform_probability(self, p: f64) -> Result<Self> {
        self.with_probabilities(|_, _| p)
    }

    /// Weighted cascade probabilities: `p(u, v) = 1 / degree(v)`.
    pub fn assign_weighted_cascade(mut self) -> Result<Self> {
        if let Some(u) = (0..self.node_count()).find(|&u| self.degree(u) == 0) {
            return Err(Error::validation(format!(
                "node {} is isolated; weighted cascade needs degree >= 1",
                self.labels[u]
            )));
        }
        for e in 0..self.targets.len() {
            self.probs[e] = 1.0 / self.degree(self.targets[e]) as f64;
        }
        Ok(self)
    }

    /// `(Lx)_u = sum_{v in N(u)} w_uv (x_u - x_v)`.
    pub fn laplacian_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut out = vec![0.0; x.len()];
        self.laplacian_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn laplacian_into(&self, x: &[f64], out: &mut [f64]) {
        for (u, o) in out.iter_mut().enumerate() {
            let mut acc = self.weighted_degree[u] * x[u];
            for e in self.out_edges(u) {
                acc -= self.weights[e] * x[self.targets[e]];
            }
            *o = acc;
        }
    }

    /// `out = (I + L) x`.
    pub(crate) fn shifted_laplacian_into(&self, x: &[f64], out: &mut [f64]) {
        for (u, o) in out.iter_mut().enumerate() {
            let mut acc = (1.0 + self.weighted_degree[u]) * x[u];
            for e in self.out_edges(u) {
                acc -= self.weights[e] * x[self.targets[e]];
            }
            *o = acc;
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.node_count() {
            return Err(Error::validation(format!(
                "vector has length {len}, graph has {} nodes",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Induced subgraph on the largest connected component.
    ///
    /// Ties between equally large components go to the one holding the
    /// smallest node id. Surviving nodes keep their relative order and their
    /// labels; activation probabilities are carried over.
    pub fn largest_connected_component(&self) -> Result<Graph> {
        let n = self.node_count();
        if n == 0 {
            return Err(Error::validation("graph has no nodes"));
        }
        let mut component = vec![usize::MAX; n];
        let mut best: Option<(usize, usize)> = None;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = start;
            queue.push_back(start);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if component[v] == usize::MAX {
                        component[v] = start;
                        queue.push_back(v);
                    }
                }
            }
            // components are discovered in order of their smallest member
            if best.is_none_or(|(_, s)| size > s) {
                best = Some((start, size));
            }
        }
        let (root, _) = best.expect("at least one component");
        let keep: Vec<NodeId> = (0..n).filter(|&u| component[u] == root).collect();
        if keep.len() == n {
            return Ok(self.clone());
        }
        let mut new_id = vec![usize::MAX; n];
        for (i, &u) in keep.iter().enumerate() {
            new_id[u] = i;
        }
        let edges = self
            .edges()
            .filter(|&(u, _, _)| new_id[u] != usize::MAX)
            .map(|(u, v, w)| (new_id[u], new_id[v], w))
            .collect();
        let labels = keep.iter().map(|&u| self.labels[u].clone()).collect();
        let mut sub = Self::assemble(keep.len(), edges, labels);
        for (i, &u) in keep.iter().enumerate() {
            for e in sub.out_edges(i) {
                let old = self
                    .find_edge(u, keep[sub.targets[e]])
                    .expect("induced edge exists in parent");
                sub.probs[e] = self.probs[old];
            }
        }
        Ok(sub)
    }

    /// Writes `label label weight` lines that [`load_edge_list`] reads back.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v, w) in self.edges() {
            writeln!(out, "{} {} {}", self.labels[u], self.labels[v], w)?;
        }
        Ok(())
    }
}

fn check_weight(w: f64) -> Result<()> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::validation(format!("edge weight {w} is not positive")));
    }
    Ok(())
}

#[derive(Default)]
struct EdgeDedup {
    seen: HashSet<(NodeId, NodeId)>,
    edges: Vec<(NodeId, NodeId, f64)>,
    duplicates: usize,
    self_loops: usize,
}

impl EdgeDedup {
    fn push(&mut self, u: NodeId, v: NodeId, w: f64) {
        if u == v {
            self.self_loops += 1;
            return;
        }
        let key = (u.min(v), u.max(v));
        if self.seen.insert(key) {
            self.edges.push((key.0, key.1, w));
        } else {
            self.duplicates += 1;
        }
    }
}

/// Reads a whitespace-separated edge list: `u v` or `u v w` per line.
///
/// Node ids are arbitrary tokens, remapped to `0..n` in order of first
/// appearance. Lines starting with `#` or `%` are comments. Missing weights
/// take `default_weight`.
pub fn load_edge_list<R: BufRead>(reader: R, default_weight: f64) -> Result<Graph> {
    check_weight(default_weight)?;
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels = Vec::new();
    let mut dedup = EdgeDedup::default();
    let mut intern = |tok: &str| -> NodeId {
        if let Some(&id) = ids.get(tok) {
            return id;
        }
        let id = labels.len();
        labels.push(tok.to_string());
        ids.insert(tok.to_string(), id);
        id
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let weight = match fields.len() {
            2 => default_weight,
            3 => fields[2].parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("weight {:?} is not a number", fields[2]),
            })?,
            k => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 2 or 3 fields, found {k}"),
                })
            }
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::validation(format!(
                "line {lineno}: edge weight {weight} is not positive"
            )));
        }
        let u = intern(fields[0]);
        let v = intern(fields[1]);
        dedup.push(u, v, weight);
    }
    if dedup.duplicates > 0 {
        log::warn!("collapsed {} duplicate edges", dedup.duplicates);
    }
    if dedup.self_loops > 0 {
        log::warn!("dropped {} self-loops", dedup.self_loops);
    }
    let n = labels.len();
    Ok(Graph::assemble(n, dedup.edges, labels))
}

/// Per-node opinions, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((u, x)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !(0.0..=1.0).contains(*x))
        {
            return Err(Error::validation(format!(
                "opinion {x} of node {u} is outside [0, 1]"
            )));
        }
        Ok(OpinionVector(values))
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for OpinionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Reads one opinion per line, `n` lines expected.
pub fn read_opinions<R: BufRead>(reader: R, n: usize) -> Result<OpinionVector> {
    let mut values = Vec::with_capacity(n);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let x = t.parse::<f64>().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("opinion {t:?} is not a number"),
        })?;
        values.push(x);
    }
    if values.len() != n {
        return Err(Error::validation(format!(
            "opinion file has {} values, graph has {n} nodes",
            values.len()
        )));
    }
    OpinionVector::new(values)
}
