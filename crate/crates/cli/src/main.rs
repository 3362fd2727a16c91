use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser};

use opinion_cascade::cascade::{CampaignConfig, CampaignKind};
use opinion_cascade::experiment::{load_dataset, prepare_graph, run_on_graph, write_report, ExperimentConfig, Method, OpinionInit, SeedBudget};
use opinion_cascade::generators::{collaboration_like, preferential_attachment, random_connected};
use opinion_cascade::{Graph, IndexKind};

/// Select campaign seeds and report the expected change of opinion indices.
#[derive(Parser, Debug)]
#[command(name = "opcascade", version)]
#[command(group(ArgGroup::new("input").required(true).args(["graph", "synthetic"])))]
#[command(group(ArgGroup::new("budget").args(["k_frac", "k"])))]
struct Args {
    /// Edge list: one `u v [weight]` per line, `#` or `%` comments.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,

    /// Generated graph instead of a file: `KIND:N:M` with KIND one of
    /// random, collab, pa.
    #[arg(long, value_name = "SPEC")]
    synthetic: Option<String>,

    /// Dataset name in the report; defaults to the file stem.
    #[arg(long)]
    dataset: Option<String>,

    /// uniform, exp, or file:PATH
    #[arg(long, default_value = "uniform")]
    init: String,

    /// marketing or backfire
    #[arg(long, default_value = "marketing")]
    campaign: String,

    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Probability that a reacting user shares the content.
    #[arg(long)]
    delta: f64,

    #[arg(long, default_value_t = 0.5)]
    tau: f64,

    /// Comma-separated: sum, pol, dis, int, con, discon.
    #[arg(long, default_value = "sum", value_delimiter = ',')]
    index: Vec<String>,

    /// Comma-separated method names, e.g. MaxSum,MaxLinPol,Random.
    #[arg(long, default_value = "MaxSum", value_delimiter = ',')]
    method: Vec<String>,

    /// Seed budget as a fraction of n, rounded up.
    #[arg(long)]
    k_frac: Option<f64>,

    /// Seed budget as a node count.
    #[arg(long)]
    k: Option<usize>,

    /// Monte Carlo trials per evaluation.
    #[arg(long, default_value_t = 1000)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "OPCASCADE_THREADS", default_value_t = 0)]
    threads: usize,

    /// CSV destination; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Upper limit on RR samples per selection.
    #[arg(long)]
    sample_cap: Option<u64>,

    /// Index optimized by the Sandwich method: con or discon.
    #[arg(long, default_value = "discon")]
    sandwich_index: String,

    /// Seed sets averaged by the Random method.
    #[arg(long, default_value_t = 10)]
    random_repeats: usize,

    /// Write 0 for wall time so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn synthetic(spec: &str, seed: u64) -> Result<Graph> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [kind, n, m] = parts[..] else {
        bail!("synthetic graph spec {spec:?} is not KIND:N:M");
    };
    let n: usize = n.parse().with_context(|| format!("node count in {spec:?}"))?;
    let m: usize = m.parse().with_context(|| format!("edge count in {spec:?}"))?;
    let g = match kind {
        "random" => random_connected(n, m, seed)?,
        "collab" => collaboration_like(n, m, seed)?,
        "pa" => preferential_attachment(n, m, seed)?,
        _ => bail!("unknown synthetic graph kind {kind:?}"),
    };
    Ok(prepare_graph(&g)?)
}

fn config(args: &Args) -> Result<ExperimentConfig> {
    let kind: CampaignKind = args.campaign.parse()?;
    let campaign = match kind {
        CampaignKind::Marketing => CampaignConfig::marketing(args.epsilon, args.delta),
        CampaignKind::PolarizingBackfire => CampaignConfig::backfire(args.epsilon, args.delta, args.tau),
    };
    campaign.validate()?;
    let dataset = match (&args.dataset, &args.graph, &args.synthetic) {
        (Some(name), _, _) => name.clone(),
        (None, Some(path), _) => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into()),
        (None, None, Some(spec)) => spec.clone(),
        (None, None, None) => unreachable!(),
    };
    let mut cfg = ExperimentConfig::new(dataset, campaign);
    cfg.opinion_init = args.init.parse::<OpinionInit>()?;
    cfg.indices = args
        .index
        .iter()
        .map(|s| s.trim().parse::<IndexKind>())
        .collect::<Result<_, _>>()?;
    cfg.methods = args
        .method
        .iter()
        .map(|s| s.trim().parse::<Method>())
        .collect::<Result<_, _>>()?;
    cfg.budget = match (args.k_frac, args.k) {
        (_, Some(k)) => SeedBudget::Absolute(k),
        (Some(f), None) => SeedBudget::Fraction(f),
        (None, None) => SeedBudget::Fraction(0.005),
    };
    cfg.trials = args.trials;
    cfg.master_seed = args.seed;
    cfg.sample_cap = args.sample_cap;
    cfg.sandwich_index = args.sandwich_index.parse()?;
    cfg.random_repeats = args.random_repeats;
    cfg.record_timing = !args.no_timing;
    Ok(cfg)
}

fn run(args: Args) -> Result<()> {
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let cfg = config(&args)?;
    let graph = match (&args.graph, &args.synthetic) {
        (Some(path), _) => load_dataset(path).with_context(|| format!("loading {}", path.display()))?,
        (None, Some(spec)) => synthetic(spec, args.seed)?,
        (None, None) => unreachable!(),
    };
    log::info!(
        "{}: {} nodes, {} edges",
        cfg.dataset,
        graph.node_count(),
        graph.edge_count()
    );
    let rows = run_on_graph(&graph, &cfg).context("running experiment")?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_report(&rows, BufWriter::new(file))?;
        }
        None => write_report(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Args::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
