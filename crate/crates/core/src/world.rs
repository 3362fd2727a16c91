//! Possible worlds: one random label per directed edge.
//!
//! A world assigns every directed edge `(u, v)` a uniform draw in `[0, 1)`.
//! Thresholding that draw at `δ·p(u, v)` and `p(u, v)` gives the edge label
//! (the state `v` would take when `u` shares content with it). The forward
//! simulators and the reverse-reachable samplers both read edges through
//! [`EdgeCoins`], so a fixed world yields the same labels to every consumer.

use rand::Rng;

use crate::graph::{EdgeId, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Spread,
    Acknowledge,
    Ignore,
}

impl EdgeLabel {
    /// `Spread` w.p. `δp`, `Acknowledge` w.p. `(1−δ)p`, `Ignore` otherwise.
    #[inline]
    pub fn from_uniform(draw: f64, p: f64, delta: f64) -> EdgeLabel {
        if draw < delta * p {
            EdgeLabel::Spread
        } else if draw < p {
            EdgeLabel::Acknowledge
        } else {
            EdgeLabel::Ignore
        }
    }
}

/// Source of per-edge uniform draws for one possible world.
pub trait EdgeCoins {
    /// The draw attached to directed edge `edge`. Repeated calls within one
    /// world return the same value.
    fn uniform(&mut self, edge: EdgeId) -> f64;

    fn label(&mut self, graph: &Graph, edge: EdgeId, delta: f64) -> EdgeLabel {
        EdgeLabel::from_uniform(self.uniform(edge), graph.probability(edge), delta)
    }
}

/// Explicit draws, indexed by edge id.
impl EdgeCoins for &[f64] {
    fn uniform(&mut self, edge: EdgeId) -> f64 {
        self[edge]
    }
}

impl EdgeCoins for Vec<f64> {
    fn uniform(&mut self, edge: EdgeId) -> f64 {
        self[edge]
    }
}

/// Lazily drawn world: an edge gets its draw from the generator the first
/// time it is queried and keeps it until [`LazyWorld::fresh`].
#[derive(Clone, Debug)]
pub struct LazyWorld<R> {
    rng: R,
    memo: Vec<f64>,
    touched: Vec<EdgeId>,
    id: u64,
}

impl<R: Rng> LazyWorld<R> {
    pub fn new(directed_edges: usize, rng: R) -> Self {
        LazyWorld {
            rng,
            memo: vec![f64::NAN; directed_edges],
            touched: Vec::new(),
            id: 0,
        }
    }

    /// Forgets every label; subsequent queries belong to a new world.
    pub fn fresh(&mut self) {
        for &e in &self.touched {
            self.memo[e] = f64::NAN;
        }
        self.touched.clear();
        self.id += 1;
    }

    /// Starts a new world drawing from `rng`.
    pub fn reseed(&mut self, rng: R) {
        self.fresh();
        self.rng = rng;
    }

    /// Counter distinguishing successive worlds from this store.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn labeled_edges(&self) -> &[EdgeId] {
        &self.touched
    }
}

impl<R: Rng> EdgeCoins for LazyWorld<R> {
    #[inline]
    fn uniform(&mut self, edge: EdgeId) -> f64 {
        let slot = &mut self.memo[edge];
        if slot.is_nan() {
            *slot = self.rng.random::<f64>();
            self.touched.push(edge);
        }
        *slot
    }
}
