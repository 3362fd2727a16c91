//! Reverse-reachable sampling.
//!
//! A node `w` belongs to the RR-set of `root` in a world when it has a live
//! path to the root: every edge on the path is labelled `Spread`, except the
//! final edge into the root which may also be `Acknowledge`. Seeding any
//! member makes the root adjust its opinion in that world.
//!
//! Linear objectives `Σ_u w_u Pr[u adjusts]` use single RR-sets. Quadratic
//! objectives add `Σ_{u,v} m_{u,v} Pr[u and v adjust]` and use pairs of
//! RR-sets drawn from one shared world, with roots uniform over `V × V`.

use std::collections::HashMap;
use std::ops::Range;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cascade::CampaignConfig;
use crate::error::{Error, Result};
use crate::fj::{index_matrix_apply, index_matrix_column, linear_gain_vector, ColumnCache, IndexKind, SolverConfig};
use crate::graph::{Graph, NodeId};
use crate::numeric::{compensated_sum, ln_binomial, substream};
use crate::world::{EdgeCoins, EdgeLabel, LazyWorld};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RRSet {
    pub root: NodeId,
    /// Sorted, includes `root`.
    pub members: Vec<NodeId>,
}

impl RRSet {
    pub fn contains(&self, u: NodeId) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    /// Whether any node flagged in `mask` is a member.
    pub fn hits(&self, mask: &[bool]) -> bool {
        self.members.iter().any(|&u| mask[u])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RRPair {
    pub first: RRSet,
    pub second: RRSet,
    /// Identifies the world both sets were read from.
    pub world_id: u64,
}

/// Reusable traversal buffers.
#[derive(Clone, Debug)]
pub struct RrSampler {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<NodeId>,
}

impl RrSampler {
    pub fn new(n: usize) -> Self {
        RrSampler {
            stamp: vec![0; n],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    pub fn sample<C: EdgeCoins + ?Sized>(
        &mut self,
        graph: &Graph,
        root: NodeId,
        delta: f64,
        coins: &mut C,
    ) -> RRSet {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.queue.clear();
        self.queue.push(root);
        self.stamp[root] = epoch;
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            for e in graph.out_edges(x) {
                let w = graph.target(e);
                if self.stamp[w] == epoch {
                    continue;
                }
                let live = match coins.label(graph, graph.reverse(e), delta) {
                    EdgeLabel::Spread => true,
                    EdgeLabel::Acknowledge => x == root,
                    EdgeLabel::Ignore => false,
                };
                if live {
                    self.stamp[w] = epoch;
                    self.queue.push(w);
                }
            }
        }
        let mut members = self.queue.clone();
        members.sort_unstable();
        RRSet { root, members }
    }
}

/// RR-set of `root` in the world held by `world`.
pub fn sample_rr_set<C: EdgeCoins + ?Sized>(
    graph: &Graph,
    root: NodeId,
    campaign: &CampaignConfig,
    world: &mut C,
) -> Result<RRSet> {
    if root >= graph.node_count() {
        return Err(Error::validation(format!("root {root} is out of range")));
    }
    Ok(RrSampler::new(graph.node_count()).sample(graph, root, campaign.delta, world))
}

/// Draws two roots uniformly from `V` and reads both RR-sets from one fresh world.
pub fn sample_rr_pair(graph: &Graph, campaign: &CampaignConfig, mut rng: ChaCha8Rng) -> RRPair {
    let n = graph.node_count();
    let u = rng.random_range(0..n);
    let v = rng.random_range(0..n);
    let mut world = LazyWorld::new(graph.directed_edge_count(), rng);
    let mut sampler = RrSampler::new(n);
    let first = sampler.sample(graph, u, campaign.delta, &mut world);
    let second = sampler.sample(graph, v, campaign.delta, &mut world);
    RRPair {
        first,
        second,
        world_id: world.id(),
    }
}

/// Single RR-sets with uniform roots; sample `i` uses substream `i` of `seed`,
/// so the result for a given index never depends on batching.
pub fn generate_sets(graph: &Graph, campaign: &CampaignConfig, seed: u64, range: Range<u64>) -> Vec<RRSet> {
    let n = graph.node_count();
    let m2 = graph.directed_edge_count();
    range
        .into_par_iter()
        .map_init(
            || (LazyWorld::new(m2, substream(seed, 0)), RrSampler::new(n)),
            |(world, sampler), i| {
                let mut rng = substream(seed, i);
                let root = rng.random_range(0..n);
                world.reseed(rng);
                sampler.sample(graph, root, campaign.delta, world)
            },
        )
        .collect()
}

/// Pairs of RR-sets, one shared world per pair, indexed like [`generate_sets`].
pub fn generate_pairs(graph: &Graph, campaign: &CampaignConfig, seed: u64, range: Range<u64>) -> Vec<RRPair> {
    let n = graph.node_count();
    let m2 = graph.directed_edge_count();
    range
        .into_par_iter()
        .map_init(
            || (LazyWorld::new(m2, substream(seed, 0)), RrSampler::new(n)),
            |(world, sampler), i| {
                let mut rng = substream(seed, i);
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                world.reseed(rng);
                let first = sampler.sample(graph, u, campaign.delta, world);
                let second = sampler.sample(graph, v, campaign.delta, world);
                RRPair {
                    first,
                    second,
                    world_id: i,
                }
            },
        )
        .collect()
}

/// Quadratic gains `m_{u,v} = Δs_u M_{u,v} Δs_v` of an index.
#[derive(Clone, Debug)]
pub struct PairGains {
    pub kind: IndexKind,
    pub delta: Vec<f64>,
}

/// Per-sample weights of an objective, with the magnitude bound `χ` and the
/// initial lower bound `LB₀` used by adaptive sampling.
#[derive(Clone, Debug)]
pub struct WeightTable {
    pub linear: Vec<f64>,
    pub pair: Option<PairGains>,
    pub chi: f64,
    pub lb0: f64,
}

/// Above this many nodes `χ` uses an analytic entry bound instead of scanning `M`.
pub const EXACT_CHI_LIMIT: usize = 2000;

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl WeightTable {
    /// Linear objective `Σ_u w_u Pr[u adjusts]`.
    pub fn linear(weights: Vec<f64>) -> Self {
        let chi = max_abs(&weights);
        WeightTable {
            linear: weights,
            pair: None,
            chi,
            lb0: chi,
        }
    }

    /// Expected change of the opinion sum: `w = Δs`.
    pub fn sum_objective(delta: Vec<f64>) -> Self {
        Self::linear(delta)
    }

    /// Linear part of a quadratic index, `w = 2 (sᵀM) ⊙ Δs`.
    pub fn index_linear(
        graph: &Graph,
        s: &[f64],
        delta: &[f64],
        kind: IndexKind,
        solver: &SolverConfig,
    ) -> Result<Self> {
        Ok(Self::linear(linear_gain_vector(graph, s, delta, kind, solver)?))
    }

    /// Upper modular bound `w + (Mℓ) ⊙ Δs²` of a non-negative quadratic index.
    pub fn index_upper(
        graph: &Graph,
        s: &[f64],
        delta: &[f64],
        kind: IndexKind,
        solver: &SolverConfig,
    ) -> Result<Self> {
        if !kind.has_nonnegative_matrix() {
            return Err(Error::contract(format!("{kind} has a signed matrix")));
        }
        let rows = match kind {
            // ℓᵀA⁻¹ = ℓᵀ, and the matrix is symmetric
            IndexKind::DisagreementControversy => vec![1.0; graph.node_count()],
            _ => index_matrix_apply(graph, kind, &vec![1.0; graph.node_count()], solver)?,
        };
        let mut w = linear_gain_vector(graph, s, delta, kind, solver)?;
        for ((w, r), d) in w.iter_mut().zip(&rows).zip(delta) {
            *w += r * d * d;
        }
        Ok(Self::linear(w))
    }

    /// Full quadratic index change. `χ = max |w_u + n m_{u,v}|` and
    /// `LB₀ = max |w_u + m_{u,v}|`, exact up to [`EXACT_CHI_LIMIT`] nodes.
    pub fn index_quadratic(
        graph: &Graph,
        s: &[f64],
        delta: &[f64],
        kind: IndexKind,
        solver: &SolverConfig,
    ) -> Result<Self> {
        let w = linear_gain_vector(graph, s, delta, kind, solver)?;
        let n = graph.node_count();
        let (chi, lb0) = if n <= EXACT_CHI_LIMIT {
            let per_column = (0..n)
                .into_par_iter()
                .map(|v| {
                    let mut e = vec![0.0; n];
                    e[v] = 1.0;
                    let col = index_matrix_apply(graph, kind, &e, solver)?;
                    let mut chi = 0.0f64;
                    let mut lb0 = 0.0f64;
                    for u in 0..n {
                        let m = delta[u] * col[u] * delta[v];
                        chi = chi.max((w[u] + n as f64 * m).abs());
                        lb0 = lb0.max((w[u] + m).abs());
                    }
                    Ok((chi, lb0))
                })
                .collect::<Result<Vec<_>>>()?;
            per_column
                .into_iter()
                .fold((0.0f64, 0.0f64), |(a, b), (c, d)| (a.max(c), b.max(d)))
        } else {
            // |M_uv| ≤ 1 for every kind except internal conflict, where it is ≤ 2
            let entry = if kind == IndexKind::InternalConflict { 2.0 } else { 1.0 };
            let d2 = max_abs(delta).powi(2);
            let wmax = max_abs(&w);
            (wmax + n as f64 * d2 * entry, wmax)
        };
        Ok(WeightTable {
            linear: w,
            pair: Some(PairGains {
                kind,
                delta: delta.to_vec(),
            }),
            chi,
            lb0,
        })
    }

    /// Raises `χ` and `LB₀` to cover the given resolved samples.
    pub fn observe(&mut self, samples: &[WeightedPair], n: usize) {
        for s in samples {
            self.chi = self.chi.max((s.linear + n as f64 * s.quadratic).abs());
            self.lb0 = self.lb0.max((s.linear + s.quadratic).abs());
        }
    }
}

/// A pair with its weights looked up: `linear = w_u`, `quadratic = m_{u,v}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPair {
    pub pair: RRPair,
    pub linear: f64,
    pub quadratic: f64,
}

const COLUMN_CHUNK: usize = 256;

/// Attaches `w_u` and `m_{u,v}` to every pair. Columns of `M` come from
/// `cache`; pairs are grouped by second root so each column is solved once.
pub fn resolve_pairs(
    graph: &Graph,
    table: &WeightTable,
    pairs: Vec<RRPair>,
    solver: &SolverConfig,
    cache: &ColumnCache,
) -> Result<Vec<WeightedPair>> {
    let n = graph.node_count();
    if table.linear.len() != n {
        return Err(Error::contract(format!(
            "weight table covers {} nodes, graph has {n}",
            table.linear.len()
        )));
    }
    let mut quadratic = vec![0.0; pairs.len()];
    if let Some(gains) = &table.pair {
        if gains.delta.len() != n {
            return Err(Error::contract("pair gains do not cover every node"));
        }
        let mut by_column: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let (u, v) = (p.first.root, p.second.root);
            if gains.delta[u] != 0.0 && gains.delta[v] != 0.0 {
                by_column.entry(v).or_default().push(i);
            }
        }
        let mut columns: Vec<NodeId> = by_column.keys().copied().collect();
        columns.sort_unstable();
        for chunk in columns.chunks(COLUMN_CHUNK) {
            let values = chunk
                .par_iter()
                .map(|&v| {
                    let col = index_matrix_column(graph, gains.kind, v, solver, cache)?;
                    Ok(by_column[&v]
                        .iter()
                        .map(|&i| {
                            let u = pairs[i].first.root;
                            (i, gains.delta[u] * col[u] * gains.delta[v])
                        })
                        .collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            for (i, m) in values.into_iter().flatten() {
                quadratic[i] = m;
            }
        }
    }
    Ok(pairs
        .into_iter()
        .zip(quadratic)
        .map(|(pair, quadratic)| WeightedPair {
            linear: table.linear[pair.first.root],
            pair,
            quadratic,
        })
        .collect())
}

/// Boolean membership mask of a node set.
pub fn seed_mask(n: usize, seeds: &[NodeId]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &u in seeds {
        if u >= n {
            return Err(Error::validation(format!("node {u} is out of range")));
        }
        mask[u] = true;
    }
    Ok(mask)
}

/// `1[R_u ∩ S ≠ ∅] w_u + 1[R_u ∩ S ≠ ∅, R_v ∩ S ≠ ∅] n m_{u,v}`.
pub fn estimator_x(sample: &WeightedPair, mask: &[bool], n: usize) -> f64 {
    if !sample.pair.first.hits(mask) {
        return 0.0;
    }
    if sample.quadratic != 0.0 && sample.pair.second.hits(mask) {
        sample.linear + n as f64 * sample.quadratic
    } else {
        sample.linear
    }
}

/// Mean of [`estimator_x`]; `n` times this estimates the expected objective.
pub fn f_r(samples: &[WeightedPair], seeds: &[NodeId], n: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::contract("no samples"));
    }
    let mask = seed_mask(n, seeds)?;
    let total = compensated_sum(samples.iter().map(|s| estimator_x(s, &mask, n)));
    Ok(total / samples.len() as f64)
}

/// Mean of `1[R ∩ S ≠ ∅] w_root` over single RR-sets.
pub fn f_r_linear(samples: &[RRSet], seeds: &[NodeId], weights: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::contract("no samples"));
    }
    let mask = seed_mask(weights.len(), seeds)?;
    let total = compensated_sum(
        samples
            .iter()
            .map(|r| if r.hits(&mask) { weights[r.root] } else { 0.0 }),
    );
    Ok(total / samples.len() as f64)
}

fn check_sampling_inputs(n: usize, k: usize, eps: f64, ell: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::validation("sampling bounds need at least two nodes"));
    }
    if k == 0 || k > n {
        return Err(Error::validation(format!("k = {k} is outside [1, {n}]")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::validation(format!("accuracy {eps} is outside (0, 1)")));
    }
    if !(ell > 0.0) {
        return Err(Error::validation(format!("confidence exponent {ell} is not positive")));
    }
    Ok(())
}

/// `λ = (8nχ/ε²)(ε/3 + 1)(ℓ ln n + ln 2 + ln C(n,k))`.
pub fn required_samples_lambda(n: usize, k: usize, chi: f64, epsilon: f64, ell: f64) -> Result<f64> {
    check_sampling_inputs(n, k, epsilon, ell)?;
    if !(chi > 0.0) {
        return Err(Error::validation(format!("chi {chi} is not positive")));
    }
    let nf = n as f64;
    let logs = ell * nf.ln() + 2f64.ln() + ln_binomial(n, k);
    Ok(8.0 * nf * chi / (epsilon * epsilon) * (epsilon / 3.0 + 1.0) * logs)
}

/// `β = n(4ε₂/3 + 2)(ℓ ln n + ln log₂ 2n + ln C(n,k)) / ε₂²`.
pub fn beta(n: usize, k: usize, epsilon2: f64, ell: f64) -> Result<f64> {
    check_sampling_inputs(n, k, epsilon2, ell)?;
    let nf = n as f64;
    let logs = ell * nf.ln() + (2.0 * nf).log2().ln() + ln_binomial(n, k);
    Ok(nf * (4.0 / 3.0 * epsilon2 + 2.0) * logs / (epsilon2 * epsilon2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3(p: f64) -> Graph {
        Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
            .unwrap()
            .with_uniform_probability(p)
            .unwrap()
    }

    fn star(leaves: usize, p: f64) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v, 1.0)))
            .unwrap()
            .with_uniform_probability(p)
            .unwrap()
    }

    fn world(g: &Graph, seed: u64) -> LazyWorld<ChaCha8Rng> {
        LazyWorld::new(g.directed_edge_count(), substream(seed, 0))
    }

    #[test]
    fn full_spread_path_reaches_everything() {
        let g = path3(1.0);
        let r = sample_rr_set(&g, 2, &CampaignConfig::marketing(0.1, 1.0), &mut world(&g, 1)).unwrap();
        assert_eq!(r.members, vec![0, 1, 2]);
    }

    #[test]
    fn acknowledge_only_reaches_one_hop() {
        let g = star(4, 1.0);
        let r = sample_rr_set(&g, 3, &CampaignConfig::marketing(0.1, 0.0), &mut world(&g, 1)).unwrap();
        assert_eq!(r.members, vec![0, 3]);
    }

    #[test]
    fn zero_probability_gives_root_only() {
        let g = star(4, 0.0);
        let r = sample_rr_set(&g, 0, &CampaignConfig::marketing(0.1, 0.5), &mut world(&g, 1)).unwrap();
        assert_eq!(r.members, vec![0]);
        assert!(sample_rr_set(&g, 9, &CampaignConfig::marketing(0.1, 0.5), &mut world(&g, 1)).is_err());
    }

    #[test]
    fn acknowledge_is_not_live_beyond_the_root() {
        // 0 - 1 - 2 with root 2: edge 1->2 acknowledges, edge 0->1 acknowledges
        let g = path3(1.0);
        let mut coins = vec![0.0; g.directed_edge_count()];
        coins[g.find_edge(1, 2).unwrap()] = 0.7;
        coins[g.find_edge(0, 1).unwrap()] = 0.7;
        let r = RrSampler::new(3).sample(&g, 2, 0.5, &mut coins);
        assert_eq!(r.members, vec![1, 2]);
        coins[g.find_edge(0, 1).unwrap()] = 0.2;
        let r = RrSampler::new(3).sample(&g, 2, 0.5, &mut coins);
        assert_eq!(r.members, vec![0, 1, 2]);
    }

    #[test]
    fn pair_on_single_node() {
        let g = Graph::from_edges(1, std::iter::empty()).unwrap();
        let p = sample_rr_pair(&g, &CampaignConfig::marketing(0.1, 0.5), substream(3, 0));
        assert_eq!(p.first.members, vec![0]);
        assert_eq!(p.second.members, vec![0]);
    }

    #[test]
    fn generation_is_independent_of_batching() {
        let g = star(6, 0.5);
        let c = CampaignConfig::marketing(0.1, 0.5);
        let all = generate_pairs(&g, &c, 11, 0..40);
        let mut split = generate_pairs(&g, &c, 11, 0..15);
        split.extend(generate_pairs(&g, &c, 11, 15..40));
        assert_eq!(all, split);
        let sets = generate_sets(&g, &c, 11, 0..40);
        assert_eq!(sets, generate_sets(&g, &c, 11, 0..40));
    }

    fn weighted(first: Vec<NodeId>, second: Vec<NodeId>, linear: f64, quadratic: f64) -> WeightedPair {
        WeightedPair {
            pair: RRPair {
                first: RRSet {
                    root: first[0],
                    members: first,
                },
                second: RRSet {
                    root: second[0],
                    members: second,
                },
                world_id: 0,
            },
            linear,
            quadratic,
        }
    }

    #[test]
    fn estimator_cases() {
        let s = weighted(vec![1, 4], vec![2, 5], 0.2, 0.03);
        let n = 10;
        assert_eq!(estimator_x(&s, &seed_mask(n, &[0]).unwrap(), n), 0.0);
        assert_eq!(estimator_x(&s, &seed_mask(n, &[4]).unwrap(), n), 0.2);
        assert_eq!(estimator_x(&s, &seed_mask(n, &[2]).unwrap(), n), 0.0);
        assert!((estimator_x(&s, &seed_mask(n, &[4, 5]).unwrap(), n) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn f_r_cases() {
        assert!(matches!(f_r(&[], &[0], 3), Err(Error::Contract(_))));
        let s = weighted(vec![1], vec![2], 0.2, 0.03);
        assert_eq!(f_r(std::slice::from_ref(&s), &[0], 3).unwrap(), 0.0);
        assert!((f_r(&[s], &[1, 2], 3).unwrap() - 0.29).abs() < 1e-15);

        let sets = vec![
            RRSet { root: 0, members: vec![0] },
            RRSet { root: 1, members: vec![0, 1] },
            RRSet { root: 2, members: vec![2] },
        ];
        assert!((f_r_linear(&sets, &[0], &[1.0; 3]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let w = [0.3, 0.6, 0.9];
        assert!((f_r_linear(&sets, &[0, 1, 2], &w).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(f_r_linear(&[], &[0], &w), Err(Error::Contract(_))));
    }

    #[test]
    fn lambda_reference_value() {
        let lambda = required_samples_lambda(100, 1, 1.0, 0.1, 1.0).unwrap();
        let direct = 8.0 * 100.0 / 0.01 * (0.1 / 3.0 + 1.0) * (2.0 * 100f64.ln() + 2f64.ln());
        assert!((lambda - direct).abs() / direct < 1e-12);
        assert!((lambda - 8.1869e5).abs() / 8.1869e5 < 1e-4);
        let doubled = required_samples_lambda(100, 1, 2.0, 0.1, 1.0).unwrap();
        assert!((doubled - 2.0 * lambda).abs() < 1e-6);
    }

    #[test]
    fn sampling_bound_validation() {
        assert!(required_samples_lambda(1, 1, 1.0, 0.1, 1.0).is_err());
        assert!(required_samples_lambda(10, 0, 1.0, 0.1, 1.0).is_err());
        assert!(required_samples_lambda(10, 11, 1.0, 0.1, 1.0).is_err());
        assert!(required_samples_lambda(10, 2, 0.0, 0.1, 1.0).is_err());
        assert!(required_samples_lambda(10, 2, 1.0, 1.0, 1.0).is_err());
        assert!(required_samples_lambda(10, 2, 1.0, 0.1, 0.0).is_err());
        assert!(beta(10, 2, 0.0, 1.0).is_err());
        assert!(required_samples_lambda(10, 10, 1.0, 0.1, 1.0).is_ok());
    }

    #[test]
    fn beta_reference_value() {
        let b = beta(8, 2, 0.6, 1.0).unwrap();
        let direct = 8.0 * (0.8 + 2.0) * (8f64.ln() + 4f64.ln() + 28f64.ln()) / 0.36;
        assert!((b - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn upper_table_of_disagreement_controversy_adds_squared_shift() {
        let g = path3(0.5);
        let s = [0.2, 0.5, 0.9];
        let d = [0.1, 0.1, 0.05];
        let cfg = SolverConfig::default();
        let lower = WeightTable::index_linear(&g, &s, &d, IndexKind::DisagreementControversy, &cfg).unwrap();
        let upper = WeightTable::index_upper(&g, &s, &d, IndexKind::DisagreementControversy, &cfg).unwrap();
        for ((up, low), d) in upper.linear.iter().zip(&lower.linear).zip(d) {
            assert!((up - low - d * d).abs() < 1e-12);
        }
        assert!(WeightTable::index_upper(&g, &s, &d, IndexKind::Polarization, &cfg).is_err());
    }

    #[test]
    fn resolved_pairs_use_matrix_entries() {
        let g = path3(1.0);
        let s = [0.2, 0.5, 0.9];
        let d = [0.1, 0.1, 0.1];
        let cfg = SolverConfig::default();
        let table = WeightTable::index_quadratic(&g, &s, &d, IndexKind::Controversy, &cfg).unwrap();
        let c = CampaignConfig::marketing(0.1, 1.0);
        let pairs = generate_pairs(&g, &c, 5, 0..30);
        let cache = ColumnCache::default();
        let resolved = resolve_pairs(&g, &table, pairs, &cfg, &cache).unwrap();
        for r in &resolved {
            let (u, v) = (r.pair.first.root, r.pair.second.root);
            let mut e = vec![0.0; 3];
            e[v] = 1.0;
            let col = index_matrix_apply(&g, IndexKind::Controversy, &e, &cfg).unwrap();
            assert!((r.quadratic - 0.01 * col[u]).abs() < 1e-12);
            assert_eq!(r.linear, table.linear[u]);
            assert!(estimator_x(r, &[true; 3], 3).abs() <= table.chi + 1e-12);
        }
    }
}
