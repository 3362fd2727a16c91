//! Seed selection over reverse-reachable samples.
//!
//! [`rr_greedy`] picks seeds by marginal coverage gain. [`sampling_with_test`]
//! sizes the sample so the greedy value is accurate relative to the optimum:
//! it first halves a guess `y` of the optimum until the greedy value clears
//! `(1+ε₂)·y·χ`, which yields a lower bound `LB`, and then draws `⌈λ/LB⌉`
//! samples. The maximizers wrap both for the sum objective, the quadratic
//! indices, their linear heuristics and the sandwich bounds.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;

use crate::cascade::{delta_vector, monte_carlo_map, CampaignConfig};
use crate::error::{Error, Result};
use crate::fj::{index_value, ColumnCache, IndexKind, SolverConfig};
use crate::graph::{Graph, NodeId};
use crate::numeric::{compensated_sum, substream, Estimate};
use crate::rr::{beta, generate_pairs, generate_sets, required_samples_lambda, resolve_pairs, RRSet, WeightTable, WeightedPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMode {
    /// Greedy on the full objective including pair terms.
    FullQuadratic,
    /// Greedy on the linear gains only, capped sample size, Monte Carlo re-score.
    LinearHeuristic,
}

#[derive(Clone, Debug)]
pub struct OptimizerParams {
    pub k: usize,
    pub epsilon: f64,
    pub epsilon2: f64,
    pub ell: f64,
    /// Hard limit on the number of samples, if any.
    pub sample_cap: Option<u64>,
    /// Requests above this many samples fail instead of exhausting memory.
    pub memory_cap: u64,
    pub mode: SelectionMode,
    /// Monte Carlo trials used to re-score heuristic selections.
    pub rescore_trials: usize,
    pub solver: SolverConfig,
}

impl OptimizerParams {
    pub const DEFAULT_MEMORY_CAP: u64 = 20_000_000;

    pub fn new(k: usize) -> Self {
        OptimizerParams {
            k,
            epsilon: 0.1,
            epsilon2: 0.6,
            ell: 1.0,
            sample_cap: None,
            memory_cap: Self::DEFAULT_MEMORY_CAP,
            mode: SelectionMode::FullQuadratic,
            rescore_trials: 1000,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::validation(format!("k = {} is outside [1, {n}]", self.k)));
        }
        for (name, v) in [("epsilon", self.epsilon), ("epsilon2", self.epsilon2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::validation(format!("{name} = {v} is outside (0, 1)")));
            }
        }
        if !(self.ell > 0.0) {
            return Err(Error::validation(format!("ell = {} is not positive", self.ell)));
        }
        Ok(())
    }
}

/// Sample cap of the linear heuristics: `200n`, or `5n` above 50,000 nodes.
pub fn heuristic_sample_cap(n: usize) -> u64 {
    if n > 50_000 {
        5 * n as u64
    } else {
        200 * n as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedResult {
    pub seeds: Vec<NodeId>,
    /// `n·F_R` of the seeds on the samples they were chosen with.
    pub estimated_value: f64,
    pub samples_used: u64,
    pub lower_bound: f64,
    /// `μ₀(S_U) / μ_U(S_U)` for sandwich selections.
    pub sandwich_ratio: Option<f64>,
    /// Monte Carlo estimate of the objective at the seeds, for heuristics.
    pub rescored: Option<Estimate>,
}

/// Samples in the uniform shape the greedy works on: sample `i` is worth
/// `a_i` once its first set is hit, plus `b_i` once both sets are hit.
#[derive(Clone, Debug, Default)]
pub struct Coverage {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    offsets: Vec<usize>,
    /// `(sample, side bits)` per node: bit 0 first set, bit 1 second set.
    entries: Vec<(u32, u8)>,
}

impl Coverage {
    pub fn from_sets(n: usize, sets: &[RRSet], weights: &[f64]) -> Self {
        Self::build(
            n,
            sets.iter().map(|r| (&r.members[..], &[][..], weights[r.root], 0.0)),
        )
    }

    pub fn from_pairs(n: usize, pairs: &[WeightedPair]) -> Self {
        let nf = n as f64;
        Self::build(
            n,
            pairs.iter().map(|p| {
                let second: &[NodeId] = if p.quadratic == 0.0 { &[] } else { &p.pair.second.members };
                (&p.pair.first.members[..], second, p.linear, nf * p.quadratic)
            }),
        )
    }

    fn build<'a>(n: usize, samples: impl Iterator<Item = (&'a [NodeId], &'a [NodeId], f64, f64)>) -> Self {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut flat: Vec<(NodeId, u32, u8)> = Vec::new();
        for (i, (first, second, wa, wb)) in samples.enumerate() {
            a.push(wa);
            b.push(wb);
            let i = i as u32;
            let start = flat.len();
            flat.extend(first.iter().map(|&u| (u, i, 1u8)));
            for &u in second {
                match flat[start..start + first.len()].binary_search_by_key(&u, |e| e.0) {
                    Ok(j) => flat[start + j].2 |= 2,
                    Err(_) => flat.push((u, i, 2)),
                }
            }
        }
        flat.sort_unstable();
        let mut offsets = vec![0; n + 1];
        for &(u, _, _) in &flat {
            offsets[u + 1] += 1;
        }
        for u in 0..n {
            offsets[u + 1] += offsets[u];
        }
        Coverage {
            n,
            a,
            b,
            offsets,
            entries: flat.into_iter().map(|(_, i, bits)| (i, bits)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Whether every sample only ever adds non-negative value, so marginal
    /// gains shrink as the seed set grows.
    pub fn diminishing_returns(&self) -> bool {
        self.b.iter().all(|&b| b == 0.0) && self.a.iter().all(|&a| a >= 0.0)
    }

    #[inline]
    fn value(&self, i: usize, mask: u8) -> f64 {
        match mask {
            3 => self.a[i] + self.b[i],
            1 => self.a[i],
            _ => 0.0,
        }
    }

    fn gain(&self, u: NodeId, hit: &[u8]) -> f64 {
        let mut g = 0.0;
        for &(i, bits) in &self.entries[self.offsets[u]..self.offsets[u + 1]] {
            let i = i as usize;
            let old = hit[i];
            let new = old | bits;
            if new != old {
                g += self.value(i, new) - self.value(i, old);
            }
        }
        g
    }

    fn add(&self, u: NodeId, hit: &mut [u8]) {
        for &(i, bits) in &self.entries[self.offsets[u]..self.offsets[u + 1]] {
            hit[i as usize] |= bits;
        }
    }

    /// Mean sample value at `seeds`, `F_R(S)`.
    pub fn mean_value(&self, seeds: &[NodeId]) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let mut hit = vec![0u8; self.len()];
        for &u in seeds {
            self.add(u, &mut hit);
        }
        compensated_sum(hit.iter().enumerate().map(|(i, &m)| self.value(i, m))) / self.len() as f64
    }
}

#[derive(PartialEq)]
struct Candidate {
    gain: f64,
    node: Reverse<NodeId>,
    round: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.total_cmp(&other.gain).then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy selection of exactly `k` nodes by marginal gain in `F_R`, ties to
/// the smallest id. Lazy evaluation is used when gains can only shrink.
pub fn rr_greedy(coverage: &Coverage, k: usize) -> Result<Vec<NodeId>> {
    let n = coverage.n;
    if k == 0 || k > n {
        return Err(Error::validation(format!("k = {k} is outside [1, {n}]")));
    }
    if coverage.diminishing_returns() {
        Ok(lazy_greedy(coverage, k))
    } else {
        Ok(plain_greedy(coverage, k))
    }
}

/// Greedy with full re-evaluation every round.
pub fn plain_greedy(coverage: &Coverage, k: usize) -> Vec<NodeId> {
    let n = coverage.n;
    let mut hit = vec![0u8; coverage.len()];
    let mut chosen = vec![false; n];
    let mut seeds = Vec::with_capacity(k);
    for _ in 0..k.min(n) {
        let gains: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|u| if chosen[u] { f64::NEG_INFINITY } else { coverage.gain(u, &hit) })
            .collect();
        let mut best = None;
        for (u, &g) in gains.iter().enumerate() {
            if chosen[u] {
                continue;
            }
            match best {
                Some((_, bg)) if g <= bg => {}
                _ => best = Some((u, g)),
            }
        }
        let (u, _) = best.expect("fewer candidates than k");
        chosen[u] = true;
        coverage.add(u, &mut hit);
        seeds.push(u);
    }
    seeds
}

/// Lazy-forward greedy; selects the same nodes as [`plain_greedy`] whenever
/// marginal gains are non-increasing.
pub fn lazy_greedy(coverage: &Coverage, k: usize) -> Vec<NodeId> {
    let n = coverage.n;
    let mut hit = vec![0u8; coverage.len()];
    let initial: Vec<f64> = (0..n).into_par_iter().map(|u| coverage.gain(u, &hit)).collect();
    let mut heap: BinaryHeap<Candidate> = initial
        .into_iter()
        .enumerate()
        .map(|(u, gain)| Candidate {
            gain,
            node: Reverse(u),
            round: 0,
        })
        .collect();
    let mut seeds = Vec::with_capacity(k);
    while seeds.len() < k.min(n) {
        let top = heap.pop().expect("fewer candidates than k");
        let round = seeds.len();
        if top.round == round {
            coverage.add(top.node.0, &mut hit);
            seeds.push(top.node.0);
        } else {
            heap.push(Candidate {
                gain: coverage.gain(top.node.0, &hit),
                node: top.node,
                round,
            });
        }
    }
    seeds
}

/// Source of samples that can be extended in place. Sample `i` is always
/// the same regardless of how the pool grew to include it.
pub trait SamplePool {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn extend_to(&mut self, target: usize) -> Result<()>;
    fn coverage(&self) -> Coverage;
    /// `χ`, the largest absolute value of one sample.
    fn chi(&self) -> f64;
    /// Initial lower bound used when the test never fires.
    fn lb0(&self) -> f64;
}

/// Single RR-sets under a linear weight table.
pub struct SetPool<'a> {
    graph: &'a Graph,
    campaign: &'a CampaignConfig,
    weights: WeightTable,
    seed: u64,
    pub sets: Vec<RRSet>,
}

impl<'a> SetPool<'a> {
    pub fn new(graph: &'a Graph, campaign: &'a CampaignConfig, weights: WeightTable, seed: u64) -> Self {
        SetPool {
            graph,
            campaign,
            weights,
            seed,
            sets: Vec::new(),
        }
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }
}

impl SamplePool for SetPool<'_> {
    fn len(&self) -> usize {
        self.sets.len()
    }

    fn extend_to(&mut self, target: usize) -> Result<()> {
        if target > self.sets.len() {
            let more = generate_sets(self.graph, self.campaign, self.seed, self.sets.len() as u64..target as u64);
            self.sets.extend(more);
        }
        Ok(())
    }

    fn coverage(&self) -> Coverage {
        Coverage::from_sets(self.graph.node_count(), &self.sets, &self.weights.linear)
    }

    fn chi(&self) -> f64 {
        self.weights.chi
    }

    fn lb0(&self) -> f64 {
        self.weights.lb0
    }
}

/// Paired RR-sets under a quadratic weight table.
pub struct PairPool<'a> {
    graph: &'a Graph,
    campaign: &'a CampaignConfig,
    weights: WeightTable,
    solver: &'a SolverConfig,
    cache: &'a ColumnCache,
    seed: u64,
    pub pairs: Vec<WeightedPair>,
}

impl<'a> PairPool<'a> {
    pub fn new(
        graph: &'a Graph,
        campaign: &'a CampaignConfig,
        weights: WeightTable,
        solver: &'a SolverConfig,
        cache: &'a ColumnCache,
        seed: u64,
    ) -> Self {
        PairPool {
            graph,
            campaign,
            weights,
            solver,
            cache,
            seed,
            pairs: Vec::new(),
        }
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }
}

impl SamplePool for PairPool<'_> {
    fn len(&self) -> usize {
        self.pairs.len()
    }

    fn extend_to(&mut self, target: usize) -> Result<()> {
        if target > self.pairs.len() {
            let raw = generate_pairs(self.graph, self.campaign, self.seed, self.pairs.len() as u64..target as u64);
            let resolved = resolve_pairs(self.graph, &self.weights, raw, self.solver, self.cache)?;
            self.weights.observe(&resolved, self.graph.node_count());
            self.pairs.extend(resolved);
        }
        Ok(())
    }

    fn coverage(&self) -> Coverage {
        Coverage::from_pairs(self.graph.node_count(), &self.pairs)
    }

    fn chi(&self) -> f64 {
        self.weights.chi
    }

    fn lb0(&self) -> f64 {
        self.weights.lb0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOutcome {
    pub lower_bound: f64,
    /// Whether the statistical test fired before falling back to `LB₀`.
    pub test_fired: bool,
    pub samples: u64,
}

fn planned(want: f64, params: &OptimizerParams) -> Result<usize> {
    let mut want = want.ceil().max(1.0);
    if let Some(cap) = params.sample_cap {
        want = want.min(cap as f64);
    }
    if want > params.memory_cap as f64 {
        return Err(Error::SampleBudget {
            wanted: want.min(u64::MAX as f64) as u64,
            cap: params.memory_cap,
        });
    }
    Ok(want as usize)
}

/// Grows `pool` to the size needed for the accuracy in `params` and returns
/// the lower bound that sized it.
pub fn sampling_with_test<P: SamplePool>(pool: &mut P, n: usize, params: &OptimizerParams) -> Result<SamplingOutcome> {
    params.validate(n)?;
    let b = beta(n, params.k, params.epsilon2, params.ell)?;
    let mut lower_bound = pool.lb0();
    let mut test_fired = false;
    let nf = n as f64;
    let rounds = (nf.log2().floor() as usize).saturating_sub(1);
    for i in 1..=rounds {
        let y = nf / 2f64.powi(i as i32);
        let target = planned(b / y, params)?;
        pool.extend_to(target)?;
        let coverage = pool.coverage();
        let seeds = rr_greedy(&coverage, params.k)?;
        let value = nf * coverage.mean_value(&seeds);
        log::debug!("test round {i}: y = {y:.3}, samples = {}, value = {value:.6}", pool.len());
        if value >= (1.0 + params.epsilon2) * y * pool.chi() {
            lower_bound = value / (1.0 + params.epsilon2);
            test_fired = true;
            break;
        }
    }
    if !(lower_bound > 0.0) {
        return Err(Error::validation("objective has no positive lower bound"));
    }
    let lambda = required_samples_lambda(n, params.k, pool.chi(), params.epsilon, params.ell)?;
    let target = planned(lambda / lower_bound, params)?;
    pool.extend_to(target)?;
    log::debug!("lambda = {lambda:.3e}, LB = {lower_bound:.6}, samples = {}", pool.len());
    Ok(SamplingOutcome {
        lower_bound,
        test_fired,
        samples: pool.len() as u64,
    })
}

/// Adaptive sampling followed by greedy selection on the final samples.
pub fn select_from_pool<P: SamplePool>(pool: &mut P, n: usize, params: &OptimizerParams) -> Result<SeedResult> {
    if pool.chi() == 0.0 {
        // every seed set scores zero
        return Ok(SeedResult {
            seeds: (0..params.k).collect(),
            estimated_value: 0.0,
            samples_used: 0,
            lower_bound: 0.0,
            sandwich_ratio: None,
            rescored: None,
        });
    }
    let outcome = sampling_with_test(pool, n, params)?;
    let coverage = pool.coverage();
    let seeds = rr_greedy(&coverage, params.k)?;
    Ok(SeedResult {
        estimated_value: n as f64 * coverage.mean_value(&seeds),
        seeds,
        samples_used: outcome.samples,
        lower_bound: outcome.lower_bound,
        sandwich_ratio: None,
        rescored: None,
    })
}

/// Seeds maximizing the expected increase of the opinion sum.
pub fn maximize_sum(
    graph: &Graph,
    s: &[f64],
    campaign: &CampaignConfig,
    params: &OptimizerParams,
    seed: u64,
) -> Result<SeedResult> {
    params.validate(graph.node_count())?;
    let table = WeightTable::sum_objective(delta_vector(s, campaign)?);
    let mut pool = SetPool::new(graph, campaign, table, seed);
    select_from_pool(&mut pool, graph.node_count(), params)
}

/// Seeds maximizing the expected increase of a quadratic index, either on
/// the full objective or on its linear gains (see [`SelectionMode`]).
#[allow(clippy::too_many_arguments)]
pub fn maximize_index(
    graph: &Graph,
    s: &[f64],
    campaign: &CampaignConfig,
    kind: IndexKind,
    params: &OptimizerParams,
    seed: u64,
    cache: &ColumnCache,
) -> Result<SeedResult> {
    let n = graph.node_count();
    params.validate(n)?;
    if !kind.is_quadratic() {
        return Err(Error::contract("use maximize_sum for the sum index"));
    }
    let delta = delta_vector(s, campaign)?;
    match params.mode {
        SelectionMode::FullQuadratic => {
            let table = WeightTable::index_quadratic(graph, s, &delta, kind, &params.solver)?;
            let mut pool = PairPool::new(graph, campaign, table, &params.solver, cache, seed);
            select_from_pool(&mut pool, n, params)
        }
        SelectionMode::LinearHeuristic => {
            let table = WeightTable::index_linear(graph, s, &delta, kind, &params.solver)?;
            let mut capped = params.clone();
            capped.sample_cap = Some(params.sample_cap.unwrap_or_else(|| heuristic_sample_cap(n)));
            let mut pool = SetPool::new(graph, campaign, table, seed);
            let mut result = select_from_pool(&mut pool, n, &capped)?;
            if params.rescore_trials > 0 {
                result.rescored = Some(expected_index_change(
                    graph,
                    s,
                    &result.seeds,
                    campaign,
                    kind,
                    params.rescore_trials,
                    seed ^ RESCORE_STREAM,
                    &params.solver,
                )?);
            }
            Ok(result)
        }
    }
}

const RESCORE_STREAM: u64 = 0x5eed_0001;
const SANDWICH_LOWER_STREAM: u64 = 0x5eed_0002;
const SANDWICH_UPPER_STREAM: u64 = 0x5eed_0003;
const SANDWICH_EVAL_STREAM: u64 = 0x5eed_0004;

/// Monte Carlo estimate of `E[I(ŝ)] − I(s)`.
#[allow(clippy::too_many_arguments)]
pub fn expected_index_change(
    graph: &Graph,
    s: &[f64],
    seeds: &[NodeId],
    campaign: &CampaignConfig,
    kind: IndexKind,
    trials: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Result<Estimate> {
    let base = index_value(graph, s, kind, solver)?;
    let values = monte_carlo_map(graph, s, seeds, campaign, trials, seed, |o| {
        Ok(index_value(graph, &o.adjusted_opinions, kind, solver)? - base)
    })?;
    Ok(Estimate::from_samples(&values))
}

/// Sandwich selection for non-negative index matrices: greedy on the lower
/// modular bound, the upper modular bound and the full objective, then the
/// candidate with the best full-objective estimate on fresh samples.
#[allow(clippy::too_many_arguments)]
pub fn sandwich_maximize(
    graph: &Graph,
    s: &[f64],
    campaign: &CampaignConfig,
    kind: IndexKind,
    params: &OptimizerParams,
    seed: u64,
    cache: &ColumnCache,
) -> Result<SeedResult> {
    let n = graph.node_count();
    params.validate(n)?;
    if !kind.has_nonnegative_matrix() {
        return Err(Error::contract(format!("{kind} has a signed matrix")));
    }
    let delta = delta_vector(s, campaign)?;
    let lower_table = WeightTable::index_linear(graph, s, &delta, kind, &params.solver)?;
    let upper_table = WeightTable::index_upper(graph, s, &delta, kind, &params.solver)?;
    let full_table = WeightTable::index_quadratic(graph, s, &delta, kind, &params.solver)?;
    let upper_weights = upper_table.linear.clone();

    let mut lower_pool = SetPool::new(graph, campaign, lower_table, seed ^ SANDWICH_LOWER_STREAM);
    let lower = select_from_pool(&mut lower_pool, n, params)?;
    let mut upper_pool = SetPool::new(graph, campaign, upper_table, seed ^ SANDWICH_UPPER_STREAM);
    let upper = select_from_pool(&mut upper_pool, n, params)?;
    let mut full_pool = PairPool::new(graph, campaign, full_table.clone(), &params.solver, cache, seed);
    let full = select_from_pool(&mut full_pool, n, params)?;

    let eval_size = full.samples_used.max(lower.samples_used).max(upper.samples_used).max(1);
    let mut eval = PairPool::new(graph, campaign, full_table, &params.solver, cache, seed ^ SANDWICH_EVAL_STREAM);
    eval.extend_to(planned(eval_size as f64, params)?)?;
    let coverage = eval.coverage();
    let nf = n as f64;

    let candidates = [&lower, &upper, &full];
    let scores: Vec<f64> = candidates.iter().map(|c| nf * coverage.mean_value(&c.seeds)).collect();
    let mut best = 0;
    for i in 1..3 {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    let first_sets: Vec<RRSet> = eval.pairs.iter().map(|p| p.pair.first.clone()).collect();
    let upper_value = nf * Coverage::from_sets(n, &first_sets, &upper_weights).mean_value(&upper.seeds);
    let ratio = (upper_value != 0.0).then(|| scores[1] / upper_value);
    log::info!(
        "sandwich scores: lower {:.6}, upper {:.6}, full {:.6}; ratio {:?}",
        scores[0],
        scores[1],
        scores[2],
        ratio
    );
    Ok(SeedResult {
        seeds: candidates[best].seeds.clone(),
        estimated_value: scores[best],
        samples_used: lower.samples_used + upper.samples_used + full.samples_used + eval.len() as u64,
        lower_bound: candidates[best].lower_bound,
        sandwich_ratio: ratio,
        rescored: None,
    })
}

/// Seeds maximizing the expected number of users who adjust their opinion.
pub fn baseline_max_influence(
    graph: &Graph,
    campaign: &CampaignConfig,
    params: &OptimizerParams,
    seed: u64,
) -> Result<SeedResult> {
    let n = graph.node_count();
    params.validate(n)?;
    let mut pool = SetPool::new(graph, campaign, WeightTable::linear(vec![1.0; n]), seed);
    select_from_pool(&mut pool, n, params)
}

/// The `k` nodes of highest degree, ties to the smallest id.
pub fn baseline_high_degree(graph: &Graph, k: usize) -> Result<Vec<NodeId>> {
    let n = graph.node_count();
    if k == 0 || k > n {
        return Err(Error::validation(format!("k = {k} is outside [1, {n}]")));
    }
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by_key(|&u| (Reverse(graph.degree(u)), u));
    order.truncate(k);
    Ok(order)
}

/// `repeats` independent uniform draws of `k` distinct nodes.
pub fn baseline_random(graph: &Graph, k: usize, seed: u64, repeats: usize) -> Result<Vec<Vec<NodeId>>> {
    let n = graph.node_count();
    if k == 0 || k > n {
        return Err(Error::validation(format!("k = {k} is outside [1, {n}]")));
    }
    Ok((0..repeats as u64)
        .map(|r| {
            let mut picked = sample_indices(&mut substream(seed, r), n, k).into_vec();
            picked.sort_unstable();
            picked
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(list: &[(NodeId, &[NodeId])]) -> Vec<RRSet> {
        list.iter()
            .map(|(r, m)| RRSet {
                root: *r,
                members: m.to_vec(),
            })
            .collect()
    }

    fn star(leaves: usize, p: f64) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v, 1.0)))
            .unwrap()
            .with_uniform_probability(p)
            .unwrap()
    }

    #[test]
    fn greedy_picks_best_coverage() {
        let samples = sets(&[(0, &[0]), (1, &[0, 1]), (2, &[2])]);
        let cov = Coverage::from_sets(3, &samples, &[1.0; 3]);
        assert_eq!(rr_greedy(&cov, 1).unwrap(), vec![0]);
        assert_eq!(rr_greedy(&cov, 2).unwrap(), vec![0, 2]);
        assert!(rr_greedy(&cov, 4).is_err());
        assert!(rr_greedy(&cov, 0).is_err());
    }

    #[test]
    fn greedy_with_all_nodes_covers_everything() {
        let samples = sets(&[(0, &[0, 2]), (1, &[1]), (2, &[2])]);
        let w = [0.5, 0.25, 1.0];
        let cov = Coverage::from_sets(3, &samples, &w);
        let all = rr_greedy(&cov, 3).unwrap();
        assert_eq!(all.len(), 3);
        let expected = crate::rr::f_r_linear(&samples, &[0, 1, 2], &w).unwrap();
        assert!((cov.mean_value(&all) - expected).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_smallest_id() {
        let samples = sets(&[(3, &[3]), (1, &[1]), (2, &[2])]);
        let cov = Coverage::from_sets(4, &samples, &[1.0; 4]);
        assert_eq!(lazy_greedy(&cov, 2), vec![1, 2]);
        assert_eq!(plain_greedy(&cov, 2), vec![1, 2]);
        // zero-gain picks fill up from the smallest unused id
        assert_eq!(plain_greedy(&cov, 4), vec![1, 2, 3, 0]);
        assert_eq!(lazy_greedy(&cov, 4), vec![1, 2, 3, 0]);
    }

    #[test]
    fn pair_coverage_counts_both_sides() {
        let pair = |u: Vec<NodeId>, v: Vec<NodeId>, a, m| WeightedPair {
            pair: crate::rr::RRPair {
                first: RRSet { root: u[0], members: u },
                second: RRSet { root: v[0], members: v },
                world_id: 0,
            },
            linear: a,
            quadratic: m,
        };
        let samples = vec![pair(vec![0, 1], vec![2], 0.1, 0.05), pair(vec![1], vec![1], 0.2, 0.01)];
        let cov = Coverage::from_pairs(3, &samples);
        let direct = crate::rr::f_r(&samples, &[1, 2], 3).unwrap();
        assert!((cov.mean_value(&[1, 2]) - direct).abs() < 1e-15);
        assert!(!cov.diminishing_returns());
    }

    #[test]
    fn high_degree_and_random_baselines() {
        let g = star(5, 0.5);
        assert_eq!(baseline_high_degree(&g, 1).unwrap(), vec![0]);
        assert_eq!(baseline_high_degree(&g, 3).unwrap(), vec![0, 1, 2]);
        let a = baseline_random(&g, 2, 7, 10).unwrap();
        assert_eq!(a, baseline_random(&g, 2, 7, 10).unwrap());
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|s| s.len() == 2 && s[0] < s[1] && s[1] < 6));
    }

    #[test]
    fn star_center_maximizes_sum() {
        let g = star(6, 1.0);
        let c = CampaignConfig::marketing(0.1, 1.0);
        let r = maximize_sum(&g, &[0.5; 7], &c, &OptimizerParams::new(1), 3).unwrap();
        assert_eq!(r.seeds, vec![0]);
        assert!((r.estimated_value - 0.7).abs() < 1e-9);
    }

    #[test]
    fn zero_probability_influence_counts_roots() {
        // every RR-set is a singleton, so the greedy takes the most sampled roots
        let g = star(6, 0.0);
        let c = CampaignConfig::marketing(0.1, 0.5);
        let params = OptimizerParams::new(3);
        let mut pool = SetPool::new(&g, &c, WeightTable::linear(vec![1.0; 7]), 3);
        let r = select_from_pool(&mut pool, 7, &params).unwrap();
        let mut counts = [0usize; 7];
        for set in &pool.sets {
            assert_eq!(set.members, vec![set.root]);
            counts[set.root] += 1;
        }
        let mut order: Vec<NodeId> = (0..7).collect();
        order.sort_by_key(|&u| (Reverse(counts[u]), u));
        assert_eq!(r.seeds, order[..3].to_vec());
        let covered: usize = r.seeds.iter().map(|&u| counts[u]).sum();
        assert!((r.estimated_value - 7.0 * covered as f64 / pool.sets.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn sampling_respects_caps() {
        let g = star(30, 0.3);
        let c = CampaignConfig::marketing(0.1, 0.5);
        let mut params = OptimizerParams::new(2);
        params.sample_cap = Some(500);
        let mut pool = SetPool::new(&g, &c, WeightTable::linear(vec![1.0; 31]), 1);
        let out = sampling_with_test(&mut pool, 31, &params).unwrap();
        assert!(out.samples <= 500);
        params.sample_cap = None;
        params.memory_cap = 10;
        let mut pool = SetPool::new(&g, &c, WeightTable::linear(vec![1.0; 31]), 1);
        assert!(matches!(
            sampling_with_test(&mut pool, 31, &params),
            Err(Error::SampleBudget { cap: 10, .. })
        ));
    }

    #[test]
    fn selection_is_deterministic() {
        let g = star(12, 0.4);
        let c = CampaignConfig::marketing(0.1, 0.5);
        let s: Vec<f64> = (0..13).map(|i| i as f64 / 13.0).collect();
        let p = OptimizerParams::new(2);
        assert_eq!(maximize_sum(&g, &s, &c, &p, 9).unwrap(), maximize_sum(&g, &s, &c, &p, 9).unwrap());
    }

    #[test]
    fn k_above_n_is_rejected() {
        let g = star(2, 0.4);
        let c = CampaignConfig::marketing(0.1, 0.5);
        assert!(matches!(
            maximize_sum(&g, &[0.5; 3], &c, &OptimizerParams::new(4), 1),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn heuristic_caps() {
        assert_eq!(heuristic_sample_cap(100), 20_000);
        assert_eq!(heuristic_sample_cap(60_000), 300_000);
    }
}
