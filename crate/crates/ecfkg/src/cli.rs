//! Command-line front end wiring ingestion, training, recommendation,
//! explanation, evaluation, and ablation into reproducible runs.
//!
//! All randomness flows from one `--seed` through named per-purpose streams,
//! so identical arguments over identical files produce byte-identical
//! outputs. Exit codes: 0 on success, 2 on usage errors, 1 on data or I/O
//! errors (with a diagnostic line on stderr).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::eval::{evaluate, fisher_randomization, run_ablation, EvalReport};
use crate::explain::{best_explanation, render_explanation};
use crate::graph::{EntityId, EntityType, Graph, RelationType};
use crate::ingest::{
    build_from_reviews, generate_synthetic, parse_triplets, read_metadata_jsonl,
    read_reviews_jsonl, write_triplets, SyntheticConfig, VocabConfig,
};
use crate::model::{load_checkpoint, save_checkpoint, train, EmbeddingModel, Hyperparams};
use crate::recommend::top_n;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Single-threaded reference execution.
    Deterministic,
    /// Allow parallel evaluation (results are still deterministic).
    Fast,
}

#[derive(Parser)]
#[command(
    name = "ecfkg",
    version,
    about = "Explainable recommendations over a user-item knowledge graph"
)]
struct Cli {
    /// Worker threads (falls back to the ECFKG_THREADS environment
    /// variable); 1 forces the single-threaded reference path.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Execution mode; deterministic pins everything to one thread unless
    /// --threads overrides it.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Deterministic)]
    mode: Mode,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert review and metadata JSONL files into a triplet TSV.
    Ingest(IngestArgs),
    /// Generate a synthetic clustered purchase graph as a triplet TSV.
    Synth(SynthArgs),
    /// Train embeddings on a triplet file and write a checkpoint.
    Train(TrainArgs),
    /// Rank the best items per user from a trained checkpoint.
    Recommend(RecommendArgs),
    /// Extract and render explanation paths for user-item pairs.
    Explain(ExplainArgs),
    /// Split held-out purchases and report ranking metrics.
    Evaluate(EvaluateArgs),
    /// Train and evaluate several relation subsets and compare them.
    Ablate(AblateArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Reviews JSONL file (reviewerID, asin, reviewText per line).
    #[arg(long)]
    reviews: PathBuf,
    /// Item metadata JSONL file (asin, brand, categories, related).
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Output triplet TSV path.
    #[arg(long)]
    out: PathBuf,
    /// Keep only words occurring at least this often.
    #[arg(long, default_value_t = 1)]
    min_word_count: u64,
    /// Cap the word vocabulary at the N most frequent words.
    #[arg(long)]
    max_vocab: Option<usize>,
    /// Keep original casing instead of lowercasing review text.
    #[arg(long)]
    no_lowercase: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    users: usize,
    #[arg(long, default_value_t = 200)]
    items: usize,
    #[arg(long, default_value_t = 200)]
    words: usize,
    #[arg(long, default_value_t = 10)]
    brands: usize,
    #[arg(long, default_value_t = 10)]
    categories: usize,
    /// Number of planted user/item clusters.
    #[arg(long, default_value_t = 4)]
    clusters: usize,
    #[arg(long, default_value_t = 10)]
    purchases: usize,
    /// Probability that a purchase stays within the user's own cluster.
    #[arg(long, default_value_t = 0.9)]
    affinity: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output triplet TSV path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the ground-truth cluster assignments here (TSV).
    #[arg(long)]
    assignments: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Input triplet TSV.
    #[arg(long)]
    triplets: PathBuf,
    #[arg(long, default_value_t = 300)]
    dim: usize,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    /// Negative samples per observed triplet.
    #[arg(long, default_value_t = 5)]
    neg: usize,
    /// Initial learning rate (decays linearly to --lr-final).
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 0.0)]
    lr_final: f64,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    /// Global L2 clip on each batch gradient.
    #[arg(long, default_value_t = 5.0)]
    clip: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output checkpoint path.
    #[arg(long)]
    out: PathBuf,
    /// Train on a relation subset: comma-separated names, or "all".
    #[arg(long)]
    relations: Option<String>,
    /// Hold out purchases at this ratio and train on the training side only,
    /// so a later evaluate with the same seed scores unseen purchases.
    #[arg(long)]
    split: Option<f64>,
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("user_selection")
        .required(true)
        .args(["users", "users_file", "all_users"])
))]
struct RecommendArgs {
    /// Trained checkpoint.
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated user keys.
    #[arg(long)]
    users: Option<String>,
    /// File with one user key per line.
    #[arg(long)]
    users_file: Option<PathBuf>,
    /// Recommend for every user in the model vocabulary.
    #[arg(long)]
    all_users: bool,
    /// List length per user.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Triplet file whose purchases are excluded from the results.
    #[arg(long)]
    triplets: Option<PathBuf>,
    /// Output TSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("pair_selection")
        .required(true)
        .args(["pairs", "pairs_file"])
))]
struct ExplainArgs {
    /// Trained checkpoint.
    #[arg(long)]
    model: PathBuf,
    /// Triplet TSV the paths are searched in.
    #[arg(long)]
    triplets: PathBuf,
    /// Comma-separated user:item pairs.
    #[arg(long)]
    pairs: Option<String>,
    /// File with one user:item (or tab-separated) pair per line.
    #[arg(long)]
    pairs_file: Option<PathBuf>,
    /// Hop budget per side.
    #[arg(long, default_value_t = 2)]
    zmax: usize,
    /// Print rendered sentences instead of TSV.
    #[arg(long)]
    text: bool,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trained checkpoint.
    #[arg(long)]
    model: PathBuf,
    /// Triplet TSV holding the full graph; the test purchases are re-derived
    /// from it with --split and --seed.
    #[arg(long)]
    triplets: PathBuf,
    /// Fraction of each user's purchases assigned to training.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    /// Ranking cutoff.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Relation subset the model was trained on, if any.
    #[arg(long)]
    relations: Option<String>,
    /// Write the per-user TSV report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    /// Input triplet TSV.
    #[arg(long)]
    triplets: PathBuf,
    /// Pipe-separated relation subsets, comma-separated within, with "all"
    /// as a shorthand: e.g. "purchase|purchase,mention|all".
    #[arg(long)]
    relation_sets: String,
    #[arg(long, default_value_t = 300)]
    dim: usize,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    neg: usize,
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 0.0)]
    lr_final: f64,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 5.0)]
    clip: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    /// Randomization iterations for the significance test when there are too
    /// many users to enumerate sign patterns exactly.
    #[arg(long, default_value_t = 10000)]
    iterations: u64,
    /// Write the comparison TSV here as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv, runs the selected subcommand, and returns the process exit
/// code. Usage problems exit 2; data, format, and I/O problems exit 1.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    configure_threads(&cli);
    let result = match cli.command {
        Command::Ingest(args) => run_ingest(args),
        Command::Synth(args) => run_synth(args),
        Command::Train(args) => run_train(args),
        Command::Recommend(args) => run_recommend(args),
        Command::Explain(args) => run_explain(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Ablate(args) => run_ablate(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn configure_threads(cli: &Cli) {
    let requested = cli.threads.or_else(|| {
        std::env::var("ECFKG_THREADS").ok().and_then(|v| v.parse().ok())
    });
    let threads = match (requested, cli.mode) {
        (Some(n), _) if n >= 1 => Some(n),
        (None, Mode::Deterministic) => Some(1),
        _ => None, // fast mode without an override: rayon's default pool
    };
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> Result<Graph> {
    let g = parse_triplets(open_input(path)?)
        .with_context(|| format!("parsing triplets from {}", path.display()))?;
    Ok(g)
}

fn load_model(path: &Path) -> Result<EmbeddingModel> {
    load_checkpoint(path).with_context(|| format!("loading checkpoint {}", path.display()))
}

fn parse_relation_set(s: &str) -> Result<BTreeSet<RelationType>> {
    if s.trim() == "all" {
        return Ok(RelationType::ALL.into_iter().collect());
    }
    let mut set = BTreeSet::new();
    for name in s.split(',') {
        let name = name.trim();
        let r = RelationType::parse(name)
            .with_context(|| format!("unknown relation {name:?}"))?;
        set.insert(r);
    }
    Ok(set)
}

fn maybe_filter(graph: Graph, relations: Option<&str>) -> Result<Graph> {
    match relations {
        Some(spec) => {
            let subset = parse_relation_set(spec)?;
            Ok(graph.filter_relations(&subset)?)
        }
        None => Ok(graph),
    }
}

fn resolve_user(g: &Graph, key: &str) -> Result<EntityId> {
    g.entity_id(EntityType::User, key)
        .with_context(|| format!("unknown user {key:?}"))
}

fn join_rels(rels: &[RelationType]) -> String {
    rels.iter().map(|r| r.name()).collect::<Vec<_>>().join(",")
}

fn run_ingest(args: IngestArgs) -> Result<()> {
    let reviews = read_reviews_jsonl(open_input(&args.reviews)?)
        .with_context(|| format!("reading reviews from {}", args.reviews.display()))?;
    let metadata = match &args.meta {
        Some(path) => read_metadata_jsonl(open_input(path)?)
            .with_context(|| format!("reading metadata from {}", path.display()))?,
        None => Vec::new(),
    };
    let cfg = VocabConfig {
        min_word_count: args.min_word_count,
        max_vocab_size: args.max_vocab.unwrap_or(usize::MAX),
        lowercase: !args.no_lowercase,
    };
    let g = build_from_reviews(&reviews, &metadata, &cfg);
    let mut out = open_output(Some(&args.out))?;
    write_triplets(&g, &mut out)?;
    out.flush()?;
    eprintln!(
        "wrote {} triplets ({} users, {} items, {} words, {} brands, {} categories) to {}",
        g.len(),
        g.vocab_size(EntityType::User),
        g.vocab_size(EntityType::Item),
        g.vocab_size(EntityType::Word),
        g.vocab_size(EntityType::Brand),
        g.vocab_size(EntityType::Category),
        args.out.display()
    );
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let cfg = SyntheticConfig {
        num_users: args.users,
        num_items: args.items,
        num_words: args.words,
        num_brands: args.brands,
        num_categories: args.categories,
        cluster_count: args.clusters,
        purchases_per_user: args.purchases,
        within_cluster_affinity: args.affinity,
        seed: args.seed,
    };
    let (g, assignments) = generate_synthetic(&cfg)?;
    let mut out = open_output(Some(&args.out))?;
    write_triplets(&g, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.assignments {
        let mut w = open_output(Some(path))?;
        writeln!(w, "type\tkey\tcluster")?;
        for (i, c) in assignments.users.iter().enumerate() {
            let key = g.key_of(EntityId::new(EntityType::User, i as u32));
            writeln!(w, "user\t{key}\t{c}")?;
        }
        for (i, c) in assignments.items.iter().enumerate() {
            let key = g.key_of(EntityId::new(EntityType::Item, i as u32));
            writeln!(w, "item\t{key}\t{c}")?;
        }
        w.flush()?;
    }
    eprintln!("wrote {} triplets to {}", g.len(), args.out.display());
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let graph = maybe_filter(load_graph(&args.triplets)?, args.relations.as_deref())?;
    let hp = Hyperparams {
        dim: args.dim,
        epochs: args.epochs,
        batch_size: args.batch,
        negatives: args.neg,
        lr_initial: args.lr,
        lr_final: args.lr_final,
        grad_clip_norm: args.clip,
        seed: args.seed,
    };
    let train_graph;
    let graph = match args.split {
        Some(ratio) => {
            let split = graph.split_train_test(ratio, args.seed)?;
            train_graph = split.train;
            &train_graph
        }
        None => &graph,
    };
    let (model, report) = train(graph, &hp)?;
    for (i, loss) in report.epoch_losses.iter().enumerate() {
        eprintln!("epoch {}/{}: mean loss {loss:.6}", i + 1, hp.epochs);
    }
    save_checkpoint(&model, &args.out)
        .with_context(|| format!("writing checkpoint {}", args.out.display()))?;
    eprintln!(
        "trained {} triplets for {} epochs in {:.2?}; checkpoint at {}",
        graph.len(),
        hp.epochs,
        report.duration,
        args.out.display()
    );
    Ok(())
}

fn run_recommend(args: RecommendArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let exclusions = match &args.triplets {
        Some(path) => Some(load_graph(path)?),
        None => None,
    };
    if let Some(g) = &exclusions {
        if g.vocabularies() != model.vocabularies() {
            bail!("triplet file does not match the model vocabulary");
        }
    }
    let users: Vec<EntityId> = if args.all_users {
        (0..model.vocabularies().size(EntityType::User) as u32)
            .map(|i| EntityId::new(EntityType::User, i))
            .collect()
    } else {
        let keys: Vec<String> = match (&args.users, &args.users_file) {
            (Some(list), _) => list.split(',').map(|s| s.trim().to_string()).collect(),
            (None, Some(path)) => {
                let mut keys = Vec::new();
                for line in open_input(path)?.lines() {
                    let line = line?;
                    let line = line.trim();
                    if !line.is_empty() {
                        keys.push(line.to_string());
                    }
                }
                keys
            }
            (None, None) => unreachable!("clap enforces the user selection group"),
        };
        keys.iter()
            .map(|key| {
                model
                    .vocabularies()
                    .id_of(EntityType::User, key)
                    .with_context(|| format!("unknown user {key:?}"))
            })
            .collect::<Result<_>>()?
    };

    let mut out = open_output(args.out.as_deref())?;
    writeln!(out, "user\trank\titem\tscore")?;
    for user in users {
        let exclude = match &exclusions {
            Some(g) => g
                .tails_of(user, RelationType::Purchase)
                .iter()
                .copied()
                .collect(),
            None => std::collections::HashSet::new(),
        };
        let ranked = top_n(&model, user, args.n, &exclude)?;
        let user_key = model.vocabularies().key_of(user);
        for (rank, (item, score)) in ranked.items.iter().enumerate() {
            let item_key = model.vocabularies().key_of(*item);
            writeln!(out, "{user_key}\t{}\t{item_key}\t{score}", rank + 1)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_pair(spec: &str) -> Result<(String, String)> {
    let (u, i) = spec
        .split_once(':')
        .or_else(|| spec.split_once('\t'))
        .with_context(|| format!("pair {spec:?} is not user:item"))?;
    Ok((u.trim().to_string(), i.trim().to_string()))
}

fn run_explain(args: ExplainArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let graph = load_graph(&args.triplets)?;
    if graph.vocabularies() != model.vocabularies() {
        bail!("triplet file does not match the model vocabulary");
    }
    let pair_specs: Vec<(String, String)> = match (&args.pairs, &args.pairs_file) {
        (Some(list), _) => list
            .split(',')
            .map(parse_pair)
            .collect::<Result<_>>()?,
        (None, Some(path)) => {
            let mut pairs = Vec::new();
            for line in open_input(path)?.lines() {
                let line = line?;
                let line = line.trim();
                if !line.is_empty() {
                    pairs.push(parse_pair(line)?);
                }
            }
            pairs
        }
        (None, None) => unreachable!("clap enforces the pair selection group"),
    };

    let mut out = open_output(args.out.as_deref())?;
    if !args.text {
        writeln!(
            out,
            "user\titem\trank\tprobability\tvia_entity\tuser_rels\titem_rels\ttext"
        )?;
    }
    for (user_key, item_key) in pair_specs {
        let user = resolve_user(&graph, &user_key)?;
        let item = graph
            .entity_id(EntityType::Item, &item_key)
            .with_context(|| format!("unknown item {item_key:?}"))?;
        let paths = best_explanation(&graph, &model, user, item, args.zmax)?;
        if args.text {
            writeln!(out, "{user_key} -> {item_key}:")?;
            if paths.is_empty() {
                writeln!(out, "  no connecting paths within {} hops", args.zmax)?;
            }
            for (rank, path) in paths.iter().enumerate() {
                writeln!(
                    out,
                    "  {}. [p={:.6}] {}",
                    rank + 1,
                    path.probability,
                    render_explanation(path, model.vocabularies())
                )?;
            }
        } else {
            for (rank, path) in paths.iter().enumerate() {
                writeln!(
                    out,
                    "{user_key}\t{item_key}\t{}\t{}\t{}\t{}\t{}\t{}",
                    rank + 1,
                    path.probability,
                    graph.key_of(path.via),
                    join_rels(&path.user_rels),
                    join_rels(&path.item_rels),
                    render_explanation(path, model.vocabularies())
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let graph = maybe_filter(load_graph(&args.triplets)?, args.relations.as_deref())?;
    let model = load_model(&args.model)?;
    let split = graph.split_train_test(args.split, args.seed)?;
    let report = evaluate(&model, &split, args.k)?;
    print!("{}", report.to_pretty_table());
    if let Some(path) = &args.out {
        let mut w = open_output(Some(path))?;
        w.write_all(report.to_tsv(split.train.vocabularies()).as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn aggregate_row(report: &EvalReport) -> (f64, f64, f64, f64) {
    match &report.aggregate {
        Some(m) => (m.ndcg, m.recall, m.hit_ratio, m.precision),
        None => (0.0, 0.0, 0.0, 0.0),
    }
}

fn run_ablate(args: AblateArgs) -> Result<()> {
    let graph = load_graph(&args.triplets)?;
    let subsets: Vec<BTreeSet<RelationType>> = args
        .relation_sets
        .split('|')
        .map(parse_relation_set)
        .collect::<Result<_>>()?;
    if subsets.is_empty() {
        bail!("at least one relation subset is required");
    }
    let hp = Hyperparams {
        dim: args.dim,
        epochs: args.epochs,
        batch_size: args.batch,
        negatives: args.neg,
        lr_initial: args.lr,
        lr_final: args.lr_final,
        grad_clip_norm: args.clip,
        seed: args.seed,
    };
    let reports = run_ablation(&graph, &subsets, &hp, args.k, args.split)?;

    let baseline: Vec<f64> = reports[0].1.per_user.iter().map(|(_, m)| m.ndcg).collect();
    let mut rows = Vec::new();
    for (i, (subset, report)) in reports.iter().enumerate() {
        let name = subset.iter().map(|r| r.name()).collect::<Vec<_>>().join(",");
        let (ndcg, recall, hr, precision) = aggregate_row(report);
        let p = if i == 0 {
            None
        } else {
            let current: Vec<f64> = report.per_user.iter().map(|(_, m)| m.ndcg).collect();
            if current.len() != baseline.len() {
                bail!("relation subsets evaluated different user sets");
            }
            Some(
                fisher_randomization(&current, &baseline, args.iterations, hp.seed)?
                    .p_value,
            )
        };
        rows.push((name, report.users, ndcg, recall, hr, precision, p));
    }

    println!(
        "{:<40} {:<6} {:<10} {:<10} {:<10} {:<10} {:<12}",
        "relations", "users", "NDCG", "Recall", "HR", "Prec.", "p_vs_first"
    );
    for (name, users, ndcg, recall, hr, precision, p) in &rows {
        let pct = |v: f64| format!("{:.3}%", v * 100.0);
        let p_text = match p {
            Some(p) => format!("{p:.5}"),
            None => "-".to_string(),
        };
        println!(
            "{:<40} {:<6} {:<10} {:<10} {:<10} {:<10} {:<12}",
            name,
            users,
            pct(*ndcg),
            pct(*recall),
            pct(*hr),
            pct(*precision),
            p_text
        );
    }
    if let Some(path) = &args.out {
        let mut w = open_output(Some(path))?;
        writeln!(w, "relations\tusers\tndcg\trecall\thit_ratio\tprecision\tp_vs_first")?;
        for (name, users, ndcg, recall, hr, precision, p) in &rows {
            let p_text = match p {
                Some(p) => p.to_string(),
                None => "-".to_string(),
            };
            writeln!(w, "{name}\t{users}\t{ndcg}\t{recall}\t{hr}\t{precision}\t{p_text}")?;
        }
        w.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_exits_zero() {
        assert_eq!(execute(["ecfkg", "--help"]), 0);
        assert_eq!(execute(["ecfkg", "train", "--help"]), 0);
        assert_eq!(execute(["ecfkg", "--version"]), 0);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(execute(["ecfkg", "--definitely-not-a-flag"]), 2);
        assert_eq!(execute(["ecfkg", "train"]), 2); // missing required args
        assert_eq!(execute(["ecfkg", "no-such-command"]), 2);
        // recommend requires exactly one user selection flag
        assert_eq!(execute(["ecfkg", "recommend", "--model", "x.ckpt"]), 2);
    }

    #[test]
    fn missing_files_exit_one() {
        assert_eq!(
            execute([
                "ecfkg",
                "train",
                "--triplets",
                "/nonexistent/graph.tsv",
                "--out",
                "/nonexistent/model.ckpt"
            ]),
            1
        );
    }

    #[test]
    fn relation_sets_parse_names_and_the_all_keyword() {
        let all = parse_relation_set("all").unwrap();
        assert_eq!(all.len(), 7);
        let set = parse_relation_set("purchase, mention").unwrap();
        assert_eq!(
            set,
            BTreeSet::from([RelationType::Purchase, RelationType::Mention])
        );
        assert!(parse_relation_set("purchase,unknown").is_err());
    }

    #[test]
    fn pairs_accept_colon_and_tab_separators() {
        assert_eq!(parse_pair("u1:i2").unwrap(), ("u1".into(), "i2".into()));
        assert_eq!(parse_pair("u1\ti2").unwrap(), ("u1".into(), "i2".into()));
        assert!(parse_pair("no-separator").is_err());
    }
}
