//! Experiment driver: dataset preparation, opinion initialization, seed
//! selection by method, and Monte Carlo evaluation of index changes.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::cascade::{monte_carlo_relative_increase, CampaignConfig};
use crate::error::{Error, Result};
use crate::fj::{ColumnCache, IndexKind, SolverConfig};
use crate::graph::{load_edge_list, read_opinions, Graph, NodeId, OpinionVector};
use crate::numeric::{substream, Estimate};
use crate::optimizer::{
    baseline_high_degree, baseline_max_influence, baseline_random, maximize_index, maximize_sum, sandwich_maximize,
    OptimizerParams, SelectionMode,
};

#[derive(Clone, Debug, PartialEq)]
pub enum OpinionInit {
    Uniform,
    /// `1 + Exp(1)` draws scaled by their maximum.
    Exponential,
    /// One value per line, in node order of the prepared graph.
    FromFile(PathBuf),
}

impl FromStr for OpinionInit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(OpinionInit::Uniform),
            "exp" | "exponential" => Ok(OpinionInit::Exponential),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(OpinionInit::FromFile(PathBuf::from(path))),
                _ => Err(Error::validation(format!("unknown opinion initialization {s:?}"))),
            },
        }
    }
}

/// Opinions drawn from `rng`; file input is handled by [`load_opinions`].
pub fn init_opinions(n: usize, kind: &OpinionInit, rng: &mut ChaCha8Rng) -> Result<OpinionVector> {
    if n == 0 {
        return Err(Error::validation("no nodes to initialize"));
    }
    match kind {
        OpinionInit::Uniform => OpinionVector::new((0..n).map(|_| rng.random::<f64>()).collect()),
        OpinionInit::Exponential => {
            let a: Vec<f64> = (0..n).map(|_| 1.0 + rng.sample::<f64, _>(Exp1)).collect();
            let max = a.iter().copied().fold(f64::MIN, f64::max);
            OpinionVector::new(a.into_iter().map(|x| x / max).collect())
        }
        OpinionInit::FromFile(path) => load_opinions(path, n),
    }
}

pub fn load_opinions(path: &Path, n: usize) -> Result<OpinionVector> {
    read_opinions(BufReader::new(File::open(path)?), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    MaxSum,
    MaxDisCon,
    MaxPol,
    MaxDis,
    MaxInt,
    MaxLinDisCon,
    MaxLinPol,
    MaxLinDis,
    MaxLinInt,
    Sandwich,
    MaxInfluence,
    HighDegree,
    Random,
}

impl Method {
    pub const ALL: [Method; 13] = [
        Method::MaxSum,
        Method::MaxDisCon,
        Method::MaxPol,
        Method::MaxDis,
        Method::MaxInt,
        Method::MaxLinDisCon,
        Method::MaxLinPol,
        Method::MaxLinDis,
        Method::MaxLinInt,
        Method::Sandwich,
        Method::MaxInfluence,
        Method::HighDegree,
        Method::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MaxSum => "MaxSum",
            Method::MaxDisCon => "MaxDisCon",
            Method::MaxPol => "MaxPol",
            Method::MaxDis => "MaxDis",
            Method::MaxInt => "MaxInt",
            Method::MaxLinDisCon => "MaxLinDisCon",
            Method::MaxLinPol => "MaxLinPol",
            Method::MaxLinDis => "MaxLinDis",
            Method::MaxLinInt => "MaxLinInt",
            Method::Sandwich => "Sandwich",
            Method::MaxInfluence => "MaxInfluence",
            Method::HighDegree => "HighDegree",
            Method::Random => "Random",
        }
    }

    /// Index optimized by the index-specific methods.
    fn target(self) -> Option<(IndexKind, SelectionMode)> {
        use IndexKind::*;
        use SelectionMode::*;
        match self {
            Method::MaxDisCon => Some((DisagreementControversy, FullQuadratic)),
            Method::MaxPol => Some((Polarization, FullQuadratic)),
            Method::MaxDis => Some((Disagreement, FullQuadratic)),
            Method::MaxInt => Some((InternalConflict, FullQuadratic)),
            Method::MaxLinDisCon => Some((DisagreementControversy, LinearHeuristic)),
            Method::MaxLinPol => Some((Polarization, LinearHeuristic)),
            Method::MaxLinDis => Some((Disagreement, LinearHeuristic)),
            Method::MaxLinInt => Some((InternalConflict, LinearHeuristic)),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeedBudget {
    /// `k = ⌈fraction · n⌉`.
    Fraction(f64),
    Absolute(usize),
}

impl SeedBudget {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let k = match self {
            SeedBudget::Fraction(f) if f > 0.0 && f <= 1.0 => ((f * n as f64) - 1e-9).ceil() as usize,
            SeedBudget::Fraction(f) => return Err(Error::validation(format!("seed fraction {f} is outside (0, 1]"))),
            SeedBudget::Absolute(k) => k,
        };
        if k == 0 || k > n {
            return Err(Error::validation(format!("k = {k} is outside [1, {n}]")));
        }
        Ok(k)
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub opinion_init: OpinionInit,
    pub campaign: CampaignConfig,
    pub indices: Vec<IndexKind>,
    pub methods: Vec<Method>,
    pub budget: SeedBudget,
    pub trials: usize,
    pub master_seed: u64,
    pub sample_cap: Option<u64>,
    /// Index used by [`Method::Sandwich`].
    pub sandwich_index: IndexKind,
    /// Seed sets averaged for [`Method::Random`].
    pub random_repeats: usize,
    pub epsilon: f64,
    pub epsilon2: f64,
    pub ell: f64,
    /// Write wall time to the report; off gives byte-identical reruns.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<String>, campaign: CampaignConfig) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            opinion_init: OpinionInit::Uniform,
            campaign,
            indices: vec![IndexKind::Sum],
            methods: vec![Method::MaxSum],
            budget: SeedBudget::Fraction(0.005),
            trials: 1000,
            master_seed: 0,
            sample_cap: None,
            sandwich_index: IndexKind::DisagreementControversy,
            random_repeats: 10,
            epsilon: 0.1,
            epsilon2: 0.6,
            ell: 1.0,
            record_timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub index: IndexKind,
    pub campaign: String,
    pub k: usize,
    /// Percent.
    pub mean_rel_increase: f64,
    /// Percent.
    pub stderr: f64,
    pub samples: u64,
    pub seconds: f64,
}

pub const CSV_HEADER: [&str; 11] = [
    "dataset",
    "n",
    "m",
    "method",
    "index",
    "campaign",
    "k",
    "mean_rel_increase",
    "stderr",
    "samples",
    "seconds",
];

const OPINION_STREAM: u64 = 1;
const SELECTION_STREAM: u64 = 2;
const EVALUATION_STREAM: u64 = 3;
const RANDOM_BASELINE_STREAM: u64 = 4;

fn named_seed(master: u64, stream: u64) -> u64 {
    substream(master, stream).random()
}

/// Largest connected component with weighted-cascade probabilities.
pub fn prepare_graph(graph: &Graph) -> Result<Graph> {
    let lcc = graph.largest_connected_component()?;
    if lcc.node_count() < graph.node_count() {
        log::info!(
            "kept largest component: {} of {} nodes",
            lcc.node_count(),
            graph.node_count()
        );
    }
    lcc.assign_weighted_cascade()
}

pub fn load_dataset(path: &Path) -> Result<Graph> {
    let raw = load_edge_list(BufReader::new(File::open(path)?), 1.0)?;
    prepare_graph(&raw)
}

struct Selection {
    seed_sets: Vec<Vec<NodeId>>,
    samples: u64,
}

fn select(
    graph: &Graph,
    s: &[f64],
    cfg: &ExperimentConfig,
    method: Method,
    k: usize,
    cache: &ColumnCache,
) -> Result<Selection> {
    let seed = named_seed(cfg.master_seed, SELECTION_STREAM);
    let mut params = OptimizerParams::new(k);
    params.epsilon = cfg.epsilon;
    params.epsilon2 = cfg.epsilon2;
    params.ell = cfg.ell;
    params.sample_cap = cfg.sample_cap;
    params.rescore_trials = 0;
    let single = |r: crate::optimizer::SeedResult| Selection {
        samples: r.samples_used,
        seed_sets: vec![r.seeds],
    };
    Ok(match method {
        Method::MaxSum => single(maximize_sum(graph, s, &cfg.campaign, &params, seed)?),
        Method::Sandwich => single(sandwich_maximize(graph, s, &cfg.campaign, cfg.sandwich_index, &params, seed, cache)?),
        Method::MaxInfluence => single(baseline_max_influence(graph, &cfg.campaign, &params, seed)?),
        Method::HighDegree => Selection {
            seed_sets: vec![baseline_high_degree(graph, k)?],
            samples: 0,
        },
        Method::Random => Selection {
            seed_sets: baseline_random(
                graph,
                k,
                named_seed(cfg.master_seed, RANDOM_BASELINE_STREAM),
                cfg.random_repeats.max(1),
            )?,
            samples: 0,
        },
        _ => {
            let (kind, mode) = method.target().expect("index method");
            params.mode = mode;
            let r = maximize_index(graph, s, &cfg.campaign, kind, &params, seed, cache)?;
            log::info!("{method}: selection-time estimate {:.6}", r.estimated_value);
            single(r)
        }
    })
}

/// Runs every configured method on a prepared graph and evaluates each
/// requested index. Opinions come from the configured initialization.
pub fn run_on_graph(graph: &Graph, cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rng = substream(cfg.master_seed, OPINION_STREAM);
    let s = init_opinions(graph.node_count(), &cfg.opinion_init, &mut rng)?;
    run_with_opinions(graph, &s, cfg)
}

/// [`run_on_graph`] with given innate opinions.
pub fn run_with_opinions(graph: &Graph, s: &[f64], cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.campaign.validate()?;
    if cfg.trials == 0 {
        return Err(Error::validation("at least one trial is required"));
    }
    let n = graph.node_count();
    let k = cfg.budget.resolve(n)?;
    let solver = SolverConfig::default();
    let cache = ColumnCache::default();
    let eval_seed = named_seed(cfg.master_seed, EVALUATION_STREAM);
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let started = Instant::now();
        log::info!("{}: selecting {k} seeds with {method}", cfg.dataset);
        let selection = select(graph, s, cfg, method, k, &cache)?;
        let selection_time = started.elapsed().as_secs_f64();
        for &index in &cfg.indices {
            let started = Instant::now();
            let estimates = selection
                .seed_sets
                .iter()
                .map(|seeds| {
                    monte_carlo_relative_increase(graph, s, seeds, &cfg.campaign, index, cfg.trials, eval_seed, &solver)
                })
                .collect::<Result<Vec<Estimate>>>()?;
            let reps = estimates.len() as f64;
            let mean = estimates.iter().map(|e| e.mean).sum::<f64>() / reps;
            let stderr = estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / reps;
            let seconds = if cfg.record_timing {
                selection_time + started.elapsed().as_secs_f64()
            } else {
                0.0
            };
            rows.push(ReportRow {
                dataset: cfg.dataset.clone(),
                n,
                m: graph.edge_count(),
                method,
                index,
                campaign: cfg.campaign.kind.to_string(),
                k,
                mean_rel_increase: 100.0 * mean,
                stderr: 100.0 * stderr,
                samples: selection.samples,
                seconds,
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with [`CSV_HEADER`].
pub fn write_report<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.method.to_string(),
            r.index.short_name().to_string(),
            r.campaign.clone(),
            r.k.to_string(),
            format!("{:.2}", r.mean_rel_increase),
            format!("{:.4}", r.stderr),
            r.samples.to_string(),
            format!("{:.3}", r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads the dataset at `graph_path` and runs [`run_on_graph`].
pub fn run_experiment(graph_path: &Path, cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let graph = load_dataset(graph_path)?;
    log::info!(
        "{}: {} nodes, {} edges after preparation",
        cfg.dataset,
        graph.node_count(),
        graph.edge_count()
    );
    run_on_graph(&graph, cfg)
}
