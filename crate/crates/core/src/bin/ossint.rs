use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use ossint::eval::{metrics, ConfusionMatrix, ConfusionPopulation, ExperimentConfig};
use ossint::generate::{generate_synthetic, ingest_edge_list, AttributeRow, GeneratorConfig};
use ossint::model::{OsnSnapshot, UserId};
use ossint::output::{write_atomic, write_json};
use ossint::rational::{self, Rational};
use ossint::run::{calibrate_on, execute, RunConfig, SnapshotSource, ThresholdSource, OUT_DIR_ENV};
use ossint::scoring::{Thresholds, Verdict};
use ossint::twohop::{build_graph, collect_2hop, prune_single_edge};
use ossint::OracleHandle;
use ossint::Error;

#[derive(Parser)]
#[command(name = "ossint", version, about = "Friendship-graph reconstruction and attribute inference on simulated social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic snapshot.
    Generate(GenerateArgs),
    /// Build a snapshot from an undirected edge list.
    Ingest(IngestArgs),
    /// Run the full pipeline for one or more victims and write reports.
    Run(RunArgs),
    /// Pick F1-optimal thresholds from labeled victims.
    Calibrate(CalibrateArgs),
    /// Print precision, recall and F1 for a confusion matrix or predictions.
    Evaluate(EvaluateArgs),
    /// Write the 2-hop friendship graph of a victim as DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON generator config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    mean_degree: Option<f64>,
    #[arg(long)]
    p_friend: Option<f64>,
    #[arg(long)]
    p_stranger: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    edges: PathBuf,
    /// JSON array of {id, feature, value}.
    #[arg(long)]
    attrs: Option<PathBuf>,
    /// JSON generator config supplying the activity model.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// Maximum oracle queries per victim.
    #[arg(long)]
    budget: Option<u64>,
    /// Keep single-edge 2-hop candidates.
    #[arg(long)]
    no_prune: bool,
    /// Count pruned candidates as NOT_FRIEND predictions.
    #[arg(long)]
    count_pruned: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl PipelineArgs {
    fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            prune: !self.no_prune,
            population: if self.count_pruned {
                ConfusionPopulation::PrunedAsNotFriend
            } else {
                ConfusionPopulation::ScoredOnly
            },
            budget: self.budget,
            jobs: self.jobs.max(1),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config; replaces all other flags.
    #[arg(long, conflicts_with_all = ["snapshot", "victim"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    snapshot: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    victim: Vec<String>,
    #[arg(long, requires = "best_edges")]
    best_info: Option<String>,
    #[arg(long, requires = "best_info")]
    best_edges: Option<String>,
    /// Thresholds JSON as written by `calibrate`.
    #[arg(long, conflicts_with_all = ["best_info", "calibrate_on"])]
    thresholds: Option<PathBuf>,
    /// Calibrate thresholds on these victims before the run.
    #[arg(long)]
    calibrate_on: Vec<String>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "ossint-out")]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long, required = true)]
    victim: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// JSON {tn, fp, fn, tp}.
    #[arg(long, conflicts_with = "predictions")]
    matrix: Option<PathBuf>,
    /// CSV with columns candidate, verdict, actual_friend.
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args)]
struct ExportDotArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long)]
    victim: String,
    #[arg(long)]
    out: PathBuf,
    /// Export the graph after single-edge pruning.
    #[arg(long)]
    pruned: bool,
    #[arg(long)]
    budget: Option<u64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn user_ids(raw: &[String]) -> anyhow::Result<Vec<UserId>> {
    raw.iter()
        .map(|s| UserId::new(s.as_str()).map_err(Into::into))
        .collect()
}

fn load_snapshot(path: &Path) -> anyhow::Result<OsnSnapshot> {
    OsnSnapshot::load(path).with_context(|| format!("load snapshot {}", path.display()))
}

fn require_victims(snapshot: &OsnSnapshot, victims: &[UserId]) -> anyhow::Result<()> {
    for v in victims {
        if !snapshot.contains_user(v) {
            bail!("victim `{v}` does not exist in the snapshot");
        }
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut config: GeneratorConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => GeneratorConfig::default(),
    };
    if let Some(n) = args.users {
        config.users = n;
    }
    if let Some(d) = args.mean_degree {
        config.mean_degree = d;
    }
    if let Some(p) = args.p_friend {
        config.p_friend = p;
    }
    if let Some(p) = args.p_stranger {
        config.p_stranger = p;
    }
    let snapshot = generate_synthetic(&config, args.seed).context("generate")?;
    write_atomic(&args.out, snapshot.to_json_string().as_bytes()).context("write snapshot")?;
    println!("wrote {} users to {}", snapshot.len(), args.out.display());
    Ok(())
}

fn ingest(args: IngestArgs) -> anyhow::Result<()> {
    let edges = std::fs::read_to_string(&args.edges)
        .with_context(|| format!("reading {}", args.edges.display()))?;
    let attrs: Option<Vec<AttributeRow>> = args.attrs.as_deref().map(read_json).transpose()?;
    let activity: GeneratorConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => GeneratorConfig::default(),
    };
    let snapshot = ingest_edge_list(&edges, attrs.as_deref(), &activity, args.seed).context("ingest")?;
    write_atomic(&args.out, snapshot.to_json_string().as_bytes()).context("write snapshot")?;
    println!("wrote {} users to {}", snapshot.len(), args.out.display());
    Ok(())
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let config = match &args.config {
        Some(p) => RunConfig::from_file(p).context("load run config")?,
        None => {
            let snapshot_path = args.snapshot.clone().expect("required by clap");
            let victims = user_ids(&args.victim)?;
            let snapshot = load_snapshot(&snapshot_path)?;
            require_victims(&snapshot, &victims)?;
            let thresholds = resolve_thresholds(&args, &snapshot, &victims)?;
            RunConfig {
                snapshot: SnapshotSource::Path(snapshot_path),
                victims,
                thresholds,
                out_dir: args.out.clone(),
                experiment: args.pipeline.experiment(),
            }
        }
    };
    let experiment = execute(&config).context("run")?;
    print!("{}", ossint::eval::render_summary(&experiment.report));
    println!("reports written to {}", config.out_dir.display());
    Ok(())
}

fn resolve_thresholds(
    args: &RunArgs,
    snapshot: &OsnSnapshot,
    victims: &[UserId],
) -> anyhow::Result<ThresholdSource> {
    if let (Some(info), Some(edges)) = (&args.best_info, &args.best_edges) {
        let t = Thresholds::new(rational::parse(info)?, rational::parse(edges)?)?;
        return Ok(ThresholdSource::Fixed(t));
    }
    if let Some(path) = &args.thresholds {
        let t: Thresholds = read_json(path)?;
        return Ok(ThresholdSource::Fixed(Thresholds::new(t.best_info, t.best_edges)?));
    }
    let calibration = if args.calibrate_on.is_empty() {
        victims.to_vec()
    } else {
        user_ids(&args.calibrate_on)?
    };
    require_victims(snapshot, &calibration)?;
    match calibrate_on(snapshot, &calibration, &args.pipeline.experiment()) {
        Ok(_) => Ok(ThresholdSource::Calibrate {
            victims: calibration,
        }),
        Err(Error::NoPositives) => {
            log::warn!("no ground-truth friends among calibration candidates; using thresholds (1, 1)");
            let one = Rational::from_integer(1);
            Ok(ThresholdSource::Fixed(Thresholds::new(one, one)?))
        }
        Err(e) => Err(e).context("calibrate"),
    }
}

fn calibrate(args: CalibrateArgs) -> anyhow::Result<()> {
    let snapshot = load_snapshot(&args.snapshot)?;
    let victims = user_ids(&args.victim)?;
    require_victims(&snapshot, &victims)?;
    let cal = calibrate_on(&snapshot, &victims, &args.pipeline.experiment()).context("calibrate")?;
    write_json(&args.out, &cal.thresholds).context("write thresholds")?;
    println!(
        "best_info {} best_edges {} (f1 {:.4}, precision {:.4})",
        rational::format(&cal.thresholds.best_info),
        rational::format(&cal.thresholds.best_edges),
        rational::to_f64(&cal.f1),
        rational::to_f64(&cal.precision),
    );
    Ok(())
}

#[derive(Deserialize)]
struct PredictionRow {
    candidate: String,
    verdict: String,
    actual_friend: bool,
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let matrix: ConfusionMatrix = if let Some(p) = &args.matrix {
        read_json(p)?
    } else if let Some(p) = &args.predictions {
        let mut reader = csv::Reader::from_path(p).with_context(|| format!("reading {}", p.display()))?;
        let mut m = ConfusionMatrix::default();
        for row in reader.deserialize() {
            let row: PredictionRow = row.context("parsing predictions")?;
            let verdict = match row.verdict.trim().to_ascii_uppercase().replace(' ', "_").as_str() {
                "FRIEND" => Verdict::Friend,
                "NOT_FRIEND" => Verdict::NotFriend,
                other => bail!("candidate `{}`: unknown verdict `{other}`", row.candidate),
            };
            m.record(verdict, row.actual_friend);
        }
        m
    } else {
        bail!("evaluate needs --matrix or --predictions");
    };
    let m = metrics(&matrix);
    let show = |r: Option<Rational>| {
        r.map(|r| format!("{:.4} ({})", rational::to_f64(&r), rational::format(&r)))
            .unwrap_or_else(|| "undefined".into())
    };
    println!("tn {} fp {} fn {} tp {}", matrix.tn, matrix.fp, matrix.fn_, matrix.tp);
    println!("precision {}", show(m.precision));
    println!("recall {}", show(m.recall));
    println!("f1 {}", show(m.f1));
    Ok(())
}

fn export_dot(args: ExportDotArgs) -> anyhow::Result<()> {
    let snapshot = load_snapshot(&args.snapshot)?;
    let victim = UserId::new(args.victim.as_str())?;
    require_victims(&snapshot, std::slice::from_ref(&victim))?;
    let oracle = OracleHandle::with_budget(&snapshot, args.budget);
    let map = collect_2hop(&victim, &oracle).context("collect 2-hop")?;
    let graph = build_graph(&victim, &map).context("build graph")?;
    let dot = if args.pruned {
        prune_single_edge(&graph).to_dot()
    } else {
        graph.to_dot()
    };
    write_atomic(&args.out, dot.as_bytes()).context("write dot")?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Ingest(a) => ingest(a),
        Command::Run(a) => run(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::ExportDot(a) => export_dot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
