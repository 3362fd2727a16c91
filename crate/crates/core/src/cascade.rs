//! The spread-acknowledge cascade.
//!
//! Content starts at the seed nodes and is shared along edges. A node that
//! reacts either acknowledges it or spreads it further, and in both cases
//! shifts its innate opinion once. [`simulate_two_stage`] runs the whole
//! information spread first and leaves the expressed opinions to a single
//! equilibrium solve; [`simulate_round_based`] interleaves Friedkin-Johnsen
//! updates with the spread round by round and serves as the reference.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fj::{fj_step_into, index_value, IndexKind, SolverConfig};
use crate::graph::{Graph, NodeId};
use crate::numeric::{substream, Estimate};
use crate::world::{EdgeCoins, EdgeLabel, LazyWorld};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CampaignKind {
    /// Every reached user moves up by ε.
    Marketing,
    /// Users at or above τ move up by ε, the rest move down by ε.
    PolarizingBackfire,
}

impl FromStr for CampaignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "marketing" => Ok(CampaignKind::Marketing),
            "backfire" | "polarizing" => Ok(CampaignKind::PolarizingBackfire),
            _ => Err(Error::validation(format!("unknown campaign {s:?}"))),
        }
    }
}

impl fmt::Display for CampaignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CampaignKind::Marketing => "marketing",
            CampaignKind::PolarizingBackfire => "backfire",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CampaignConfig {
    /// Opinion shift, in `(0, 1]`.
    pub epsilon: f64,
    /// Probability that a reacting user shares, in `[0, 1]`.
    pub delta: f64,
    /// Backfire threshold, ignored for marketing.
    pub tau: f64,
    pub kind: CampaignKind,
}

impl CampaignConfig {
    pub fn marketing(epsilon: f64, delta: f64) -> Self {
        CampaignConfig {
            epsilon,
            delta,
            tau: 0.5,
            kind: CampaignKind::Marketing,
        }
    }

    pub fn backfire(epsilon: f64, delta: f64, tau: f64) -> Self {
        CampaignConfig {
            epsilon,
            delta,
            tau,
            kind: CampaignKind::PolarizingBackfire,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::validation(format!(
                "epsilon {} is outside (0, 1]",
                self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::validation(format!("delta {} is outside [0, 1]", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::validation(format!("tau {} is outside [0, 1]", self.tau)));
        }
        Ok(())
    }
}

/// Ordered so that a node's state only ever increases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeState {
    Inactive,
    Ignore,
    Acknowledge,
    Spread,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub node: NodeId,
    pub from: NodeState,
    pub to: NodeState,
    pub round: usize,
    /// Whether the node adjusted its innate opinion in this transition.
    pub adjusted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CascadeOutcome {
    /// Innate opinions after the campaign, `ŝ`.
    pub adjusted_opinions: Vec<f64>,
    pub final_states: Vec<NodeState>,
    /// `ind_u`: whether `u` adjusted its opinion.
    pub adjusted_flags: Vec<bool>,
    /// Spread rounds until no new spreader appeared.
    pub rounds: usize,
}

impl CascadeOutcome {
    pub fn adjusted_count(&self) -> usize {
        self.adjusted_flags.iter().filter(|&&f| f).count()
    }
}

/// New innate opinion of a user reached by the campaign.
pub fn adjusted_opinion(s_u: f64, campaign: &CampaignConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&s_u) {
        return Err(Error::validation(format!("opinion {s_u} is outside [0, 1]")));
    }
    let eps = campaign.epsilon;
    Ok(match campaign.kind {
        CampaignKind::Marketing => (s_u + eps).min(1.0),
        CampaignKind::PolarizingBackfire if s_u >= campaign.tau => (s_u + eps).min(1.0),
        CampaignKind::PolarizingBackfire => (s_u - eps).max(0.0),
    })
}

/// `Δs_u`: the signed change a user would apply when reached.
pub fn delta_opinion(s_u: f64, campaign: &CampaignConfig) -> Result<f64> {
    Ok(adjusted_opinion(s_u, campaign)? - s_u)
}

pub fn delta_vector(s: &[f64], campaign: &CampaignConfig) -> Result<Vec<f64>> {
    s.iter().map(|&x| delta_opinion(x, campaign)).collect()
}

struct SpreadState<'a> {
    graph: &'a Graph,
    campaign: &'a CampaignConfig,
    target: Vec<f64>,
    s_hat: Vec<f64>,
    states: Vec<NodeState>,
    flags: Vec<bool>,
}

impl<'a> SpreadState<'a> {
    fn new(graph: &'a Graph, s: &[f64], campaign: &'a CampaignConfig) -> Result<Self> {
        campaign.validate()?;
        graph.check_len(s.len())?;
        let target = s
            .iter()
            .map(|&x| adjusted_opinion(x, campaign))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpreadState {
            graph,
            campaign,
            target,
            s_hat: s.to_vec(),
            states: vec![NodeState::Inactive; s.len()],
            flags: vec![false; s.len()],
        })
    }

    fn seed(&mut self, seeds: &[NodeId], observer: &mut impl FnMut(Transition)) -> Result<Vec<NodeId>> {
        if seeds.is_empty() {
            return Err(Error::validation("seed set is empty"));
        }
        let n = self.graph.node_count();
        let mut frontier = seeds.to_vec();
        frontier.sort_unstable();
        frontier.dedup();
        if let Some(&u) = frontier.iter().find(|&&u| u >= n) {
            return Err(Error::validation(format!("seed {u} is out of range")));
        }
        for &u in &frontier {
            self.move_to(u, NodeState::Spread, 0, observer);
        }
        Ok(frontier)
    }

    fn move_to(&mut self, u: NodeId, to: NodeState, round: usize, observer: &mut impl FnMut(Transition)) {
        let from = self.states[u];
        let adjusts = !self.flags[u] && to >= NodeState::Acknowledge;
        if adjusts {
            self.s_hat[u] = self.target[u];
            self.flags[u] = true;
        }
        self.states[u] = to;
        observer(Transition {
            node: u,
            from,
            to,
            round,
            adjusted: adjusts,
        });
    }

    /// One sharing round: every node of `frontier` offers the content to each
    /// neighbour once. Returns the new spreaders in ascending order.
    fn share<C: EdgeCoins + ?Sized>(
        &mut self,
        frontier: &[NodeId],
        coins: &mut C,
        round: usize,
        observer: &mut impl FnMut(Transition),
    ) -> Vec<NodeId> {
        let delta = self.campaign.delta;
        let mut next = Vec::new();
        for &u in frontier {
            for e in self.graph.out_edges(u) {
                let v = self.graph.target(e);
                let state = self.states[v];
                if state == NodeState::Spread {
                    continue;
                }
                let label = coins.label(self.graph, e, delta);
                let to = match (state, label) {
                    (_, EdgeLabel::Spread) => NodeState::Spread,
                    (NodeState::Acknowledge, _) => continue,
                    (_, EdgeLabel::Acknowledge) => NodeState::Acknowledge,
                    (NodeState::Ignore, EdgeLabel::Ignore) => continue,
                    (_, EdgeLabel::Ignore) => NodeState::Ignore,
                };
                self.move_to(v, to, round, observer);
                if to == NodeState::Spread {
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        next
    }

    fn finish(self, rounds: usize) -> CascadeOutcome {
        CascadeOutcome {
            adjusted_opinions: self.s_hat,
            final_states: self.states,
            adjusted_flags: self.flags,
            rounds,
        }
    }
}

/// Runs the information spread to completion. The expressed opinions are
/// not computed here; they are `fj_equilibrium(adjusted_opinions)`.
pub fn simulate_two_stage<C: EdgeCoins + ?Sized>(
    graph: &Graph,
    s: &[f64],
    seeds: &[NodeId],
    campaign: &CampaignConfig,
    coins: &mut C,
) -> Result<CascadeOutcome> {
    simulate_two_stage_observed(graph, s, seeds, campaign, coins, |_| {})
}

/// [`simulate_two_stage`] reporting every state change to `observer`.
pub fn simulate_two_stage_observed<C: EdgeCoins + ?Sized>(
    graph: &Graph,
    s: &[f64],
    seeds: &[NodeId],
    campaign: &CampaignConfig,
    coins: &mut C,
    mut observer: impl FnMut(Transition),
) -> Result<CascadeOutcome> {
    let mut state = SpreadState::new(graph, s, campaign)?;
    let mut frontier = state.seed(seeds, &mut observer)?;
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        frontier = state.share(&frontier, coins, rounds, &mut observer);
    }
    Ok(state.finish(rounds))
}

#[derive(Clone, Debug)]
pub struct RoundBasedOutcome {
    pub outcome: CascadeOutcome,
    /// Expressed opinions after the last round.
    pub expressed: Vec<f64>,
    /// `‖z(t+1) − z(t)‖∞` for every round.
    pub residuals: Vec<f64>,
}

pub const ROUND_CONVERGENCE_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

/// Reference simulator: each round first updates the expressed opinions with
/// one Friedkin-Johnsen step and then runs one sharing round. Stops once no
/// spreader is pending and the expressed opinions moved by less than
/// [`ROUND_CONVERGENCE_TOLERANCE`].
#[allow(clippy::too_many_arguments)]
pub fn simulate_round_based<C: EdgeCoins + ?Sized>(
    graph: &Graph,
    s: &[f64],
    z0: &[f64],
    seeds: &[NodeId],
    campaign: &CampaignConfig,
    coins: &mut C,
    max_rounds: usize,
) -> Result<RoundBasedOutcome> {
    graph.check_len(z0.len())?;
    let mut observer = |_| {};
    let mut state = SpreadState::new(graph, s, campaign)?;
    let mut frontier = state.seed(seeds, &mut observer)?;
    let mut z = z0.to_vec();
    let mut next_z = vec![0.0; z.len()];
    let mut residuals = Vec::new();
    let mut spread_rounds = 0;
    for round in 1..=max_rounds {
        fj_step_into(graph, &z, &state.s_hat, &mut next_z);
        let residual = z
            .iter()
            .zip(&next_z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut z, &mut next_z);
        residuals.push(residual);
        if !frontier.is_empty() {
            spread_rounds = round;
            frontier = state.share(&frontier, coins, round, &mut observer);
        }
        if frontier.is_empty() && residual < ROUND_CONVERGENCE_TOLERANCE {
            return Ok(RoundBasedOutcome {
                outcome: state.finish(spread_rounds),
                expressed: z,
                residuals,
            });
        }
    }
    Err(Error::MaxRounds {
        rounds: max_rounds,
        residual: residuals.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// Runs `trials` independent two-stage simulations, trial `t` drawing its
/// world from substream `t` of `seed`, and returns `metric` per trial in
/// trial order.
pub fn monte_carlo_map<F>(
    graph: &Graph,
    s: &[f64],
    seeds: &[NodeId],
    campaign: &CampaignConfig,
    trials: usize,
    seed: u64,
    metric: F,
) -> Result<Vec<f64>>
where
    F: Fn(&CascadeOutcome) -> Result<f64> + Sync,
{
    if trials == 0 {
        return Err(Error::validation("at least one trial is required"));
    }
    let m2 = graph.directed_edge_count();
    (0..trials)
        .into_par_iter()
        .map_init(
            || LazyWorld::new(m2, substream(seed, 0)),
            |world, t| {
                world.reseed(substream(seed, t as u64));
                simulate_two_stage(graph, s, seeds, campaign, world)
                    .and_then(|o| metric(&o))
                    .map_err(|e| Error::Trial {
                        trial: t,
                        source: Box::new(e),
                    })
            },
        )
        .collect()
}

/// Expected index value after the campaign, with its standard error.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_expected(
    graph: &Graph,
    s: &[f64],
    seeds: &[NodeId],
    campaign: &CampaignConfig,
    kind: IndexKind,
    trials: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Result<Estimate> {
    let values = monte_carlo_map(graph, s, seeds, campaign, trials, seed, |o| {
        index_value(graph, &o.adjusted_opinions, kind, solver)
    })?;
    Ok(Estimate::from_samples(&values))
}

/// Expected relative change `(I(ŝ) − I(s)) / I(s)` of an index.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_relative_increase(
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
    if base == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    let values = monte_carlo_map(graph, s, seeds, campaign, trials, seed, |o| {
        Ok((index_value(graph, &o.adjusted_opinions, kind, solver)? - base) / base)
    })?;
    Ok(Estimate::from_samples(&values))
}
