//! Command-line front end: index a corpus, analyze suspect reports, run the
//! constraint core standalone, print batch statistics, and record replay
//! transcripts from scripted responses.
//!
//! Exit codes: 0 success, 2 usage/configuration error, 3 inconclusive cases
//! under --strict.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use llift_core::constraint::{
    brute_force_oracle, parse_constraint, qualified_postcondition, Domain, RoutineModel,
};
use llift_core::corpus;
use llift_core::gateway::{
    BackendConfig, Gateway, RecordingBackend, ScriptFile, ScriptedBackend,
};
use llift_core::orchestrator::{
    run_batch, Ablation, BatchOptions, CaseVerdict, ModelLibrary, PromptPack,
};
use llift_core::report::parse_report_file;
use llift_core::store::{batch_stats, VerdictStore};

#[derive(Parser)]
#[command(name = "llift", version, about = "Use-before-initialization suspect triage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the corpus index and persist its cache
    Index(IndexArgs),
    /// Run report cases through the conversation pipeline
    Analyze(AnalyzeArgs),
    /// Run the constraint core on a routine model fixture
    Oracle(OracleArgs),
    /// Print statistics for a stored batch
    Stats(StatsArgs),
    /// Record replay transcripts by running the pipeline over scripted responses
    Record(RecordArgs),
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus root directory
    #[arg(long)]
    corpus: PathBuf,
    /// Store directory holding the index cache
    #[arg(long, default_value = "llift-store")]
    store: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendChoice {
    Replay,
    Http,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Report file (JSON array of case records)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Corpus root directory
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Model backend
    #[arg(long, value_enum)]
    backend: Option<BackendChoice>,
    /// Model name for the http backend
    #[arg(long)]
    model: Option<String>,
    /// Chat-completion endpoint URL for the http backend
    #[arg(long)]
    endpoint: Option<String>,
    /// Replay transcript directory
    #[arg(long)]
    transcripts: Option<PathBuf>,
    /// Prompt pack directory (defaults to the built-in pack)
    #[arg(long)]
    pack: Option<PathBuf>,
    /// Runs per case for majority voting (odd)
    #[arg(long)]
    votes: Option<u32>,
    /// Worker threads
    #[arg(long)]
    workers: Option<usize>,
    /// Feasibility domain as LO..HI
    #[arg(long)]
    domain: Option<String>,
    /// Store directory
    #[arg(long)]
    store: Option<PathBuf>,
    /// Routine model fixtures for consistency checking
    #[arg(long)]
    models: Option<PathBuf>,
    /// Batch identifier (defaults to the report file stem)
    #[arg(long)]
    batch: Option<String>,
    /// Exit 3 when any case is inconclusive
    #[arg(long)]
    strict: bool,
    /// Protocol ablation
    #[arg(long, value_enum)]
    ablation: Option<AblationChoice>,
    /// Optional TOML configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AblationChoice {
    ZeroStep,
    OneStep,
    Full,
}

#[derive(Args)]
struct OracleArgs {
    /// Routine model fixture (JSON)
    model: PathBuf,
    /// Post-constraint text; omitted means unconstrained
    #[arg(long)]
    cpost: Option<String>,
    /// Comma-separated suspicious variables (default: the model parameters)
    #[arg(long)]
    suspicious: Option<String>,
    /// Feasibility domain as LO..HI
    #[arg(long, default_value = "-4..7")]
    domain: String,
}

#[derive(Args)]
struct StatsArgs {
    /// Batch identifier
    batch: String,
    /// Store directory
    #[arg(long, default_value = "llift-store")]
    store: PathBuf,
}

#[derive(Args)]
struct RecordArgs {
    /// Scripted response file
    #[arg(long)]
    script: PathBuf,
    /// Report file; only cases present in the script are recorded
    #[arg(long)]
    report: PathBuf,
    /// Corpus root directory
    #[arg(long)]
    corpus: PathBuf,
    /// Prompt pack directory (defaults to the built-in pack)
    #[arg(long)]
    pack: Option<PathBuf>,
    /// Output transcript directory
    #[arg(long)]
    out: PathBuf,
}

/// Optional config file; every analyze flag can come from here instead.
#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    report: Option<PathBuf>,
    corpus: Option<PathBuf>,
    backend: Option<String>,
    model: Option<String>,
    endpoint: Option<String>,
    transcripts: Option<PathBuf>,
    pack: Option<PathBuf>,
    votes: Option<u32>,
    workers: Option<usize>,
    domain: Option<String>,
    store: Option<PathBuf>,
    models: Option<PathBuf>,
    batch: Option<String>,
    ablation: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Index(args) => cmd_index(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Record(args) => cmd_record(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_domain(text: &str) -> Result<Domain> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("domain must be LO..HI, got `{text}`"))?;
    let domain = Domain::new(
        lo.trim().parse().context("domain low bound")?,
        hi.trim().parse().context("domain high bound")?,
    );
    if domain.is_empty() {
        bail!("empty domain {domain}");
    }
    Ok(domain)
}

fn load_pack(dir: Option<&Path>) -> Result<PromptPack> {
    match dir {
        Some(dir) => Ok(PromptPack::load(dir)?),
        None => Ok(PromptPack::builtin()),
    }
}

fn cmd_index(args: IndexArgs) -> Result<ExitCode> {
    let cache = args.store.join("index.json");
    let (index, rebuilt) = corpus::load_or_build(&args.corpus, &cache)?;
    let stats = index.stats();
    println!(
        "{} functions indexed across {} files{}",
        stats.definitions_found,
        stats.files_scanned,
        if rebuilt { "" } else { " (cached)" },
    );
    for warning in &stats.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let file: FileConfig = match &args.config {
        Some(path) => toml::from_str(
            &std::fs::read_to_string(path).with_context(|| path.display().to_string())?,
        )
        .with_context(|| format!("config file {}", path.display()))?,
        None => FileConfig::default(),
    };

    let report_path = args
        .report
        .or(file.report)
        .ok_or_else(|| anyhow!("--report is required"))?;
    let corpus_root = args
        .corpus
        .or(file.corpus)
        .ok_or_else(|| anyhow!("--corpus is required"))?;
    let backend = match (args.backend, file.backend.as_deref()) {
        (Some(choice), _) => choice,
        (None, Some("replay")) => BackendChoice::Replay,
        (None, Some("http")) => BackendChoice::Http,
        (None, Some(other)) => bail!("unknown backend `{other}` in config file"),
        (None, None) => BackendChoice::Replay,
    };
    let store_dir = args.store.or(file.store).unwrap_or_else(|| "llift-store".into());
    let votes = args.votes.or(file.votes).unwrap_or(3);
    if votes == 0 || votes.is_multiple_of(2) {
        bail!("--votes must be odd and nonzero, got {votes}");
    }
    let workers = args.workers.or(file.workers).unwrap_or(1).max(1);
    let domain = parse_domain(&args.domain.or(file.domain).unwrap_or_else(|| "-4..7".into()))?;
    let ablation = match args.ablation {
        Some(AblationChoice::ZeroStep) => Ablation::ZeroStep,
        Some(AblationChoice::OneStep) => Ablation::OneStep,
        Some(AblationChoice::Full) => Ablation::Full,
        None => match file.ablation.as_deref() {
            Some("zero-step") => Ablation::ZeroStep,
            Some("one-step") => Ablation::OneStep,
            Some("full") | None => Ablation::Full,
            Some(other) => bail!("unknown ablation `{other}` in config file"),
        },
    };
    let batch = args.batch.or(file.batch).unwrap_or_else(|| {
        report_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "default".into())
    });

    let reports = parse_report_file(&report_path)
        .with_context(|| format!("report file {}", report_path.display()))?;

    let backend_config = match backend {
        BackendChoice::Replay => {
            let transcripts = args
                .transcripts
                .or(file.transcripts)
                .ok_or_else(|| anyhow!("replay backend requires --transcripts"))?;
            BackendConfig::replay(transcripts)
        }
        BackendChoice::Http => {
            let endpoint = args
                .endpoint
                .or(file.endpoint)
                .ok_or_else(|| anyhow!("http backend requires --endpoint"))?;
            let model = args.model.or(file.model).unwrap_or_else(|| "gpt-4".into());
            let mut cfg = BackendConfig::http(endpoint, model);
            cfg.api_key = Some(
                std::env::var("LLIFT_API_KEY")
                    .map_err(|_| anyhow!("http backend requires the LLIFT_API_KEY environment variable"))?,
            );
            cfg
        }
    };

    let pack = load_pack(args.pack.or(file.pack).as_deref())?;
    let models = match args.models.or(file.models) {
        Some(dir) => Some(ModelLibrary::load_dir(&dir)?),
        None => None,
    };
    let (index, _) = corpus::load_or_build(&corpus_root, &store_dir.join("index.json"))?;
    let store = VerdictStore::open(&store_dir, &batch)?;
    let gateway = {
        let gateway = Gateway::from_config(&backend_config)?;
        if backend == BackendChoice::Http {
            gateway.with_cache(Box::new(store.response_cache()))
        } else {
            gateway
        }
    };

    let options = BatchOptions {
        batch_id: batch.clone(),
        votes,
        domain,
        workers,
        ablation,
    };
    let progress = |verdict: &CaseVerdict| {
        eprintln!(
            "[{}] {} ({} turns, {} tokens)",
            verdict.case_id, verdict.decision, verdict.turns_total, verdict.tokens_total
        );
    };
    let summary = run_batch(
        &reports,
        &index,
        &gateway,
        &pack,
        models.as_ref(),
        &store,
        &options,
        &progress,
    );

    for verdict in &summary.verdicts {
        println!("{}: {}", verdict.case_id, verdict.decision);
    }
    let counts: Vec<String> = summary
        .counts
        .iter()
        .map(|(decision, count)| format!("{decision}={count}"))
        .collect();
    println!("counts: {}", counts.join(" "));
    for failure in &summary.store_failures {
        eprintln!("store failure: {failure}");
    }
    if args.strict && summary.inconclusive() > 0 {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_suspicious(args: &OracleArgs, model: &RoutineModel) -> BTreeSet<String> {
    match &args.suspicious {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        None => model.params.iter().cloned().collect(),
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.model)
        .with_context(|| args.model.display().to_string())?;
    let model = RoutineModel::from_json(&text)?;
    let domain = parse_domain(&args.domain)?;
    let cpost = parse_constraint(args.cpost.as_deref())?;
    let suspicious = load_suspicious(&args, &model);

    let q = qualified_postcondition(&model, &cpost, &suspicious, domain)?;
    let oracle = brute_force_oracle(&model, &cpost, &suspicious, domain)?;
    let surviving = llift_core::constraint::prune_paths(&model, &cpost, domain)?;

    println!("routine: {}", model.name);
    println!("postconstraint: {cpost}");
    println!(
        "surviving paths: {}",
        surviving
            .iter()
            .map(|p| p.name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("must_init: {}", join_set(&q.must_init));
    for entry in &q.may_init {
        println!("may_init: {} if {}", entry.name, entry.condition.render());
    }
    println!("unreachable_use: {}", q.unreachable_use);
    println!("oracle must_init: {}", join_set(&oracle.must_init));
    if q.must_init == oracle.must_init {
        println!("agreement: yes");
    } else {
        println!("agreement: NO — pruning and oracle disagree");
    }
    Ok(ExitCode::SUCCESS)
}

fn join_set(set: &BTreeSet<String>) -> String {
    if set.is_empty() {
        "(none)".into()
    } else {
        set.iter().cloned().collect::<Vec<_>>().join(", ")
    }
}

fn cmd_stats(args: StatsArgs) -> Result<ExitCode> {
    let stats = batch_stats(&args.store, &args.batch)?;
    println!("batch: {}", stats.batch);
    println!("cases: {}", stats.cases);
    let counts: Vec<String> = stats
        .decisions
        .iter()
        .map(|(decision, count)| format!("{decision}={count}"))
        .collect();
    println!("decisions: {}", counts.join(" "));
    println!(
        "turns: mean {:.4} max {} variance {:.4}",
        stats.turn_mean, stats.turn_max, stats.turn_variance
    );
    println!("tokens: {}", stats.token_total);
    Ok(ExitCode::SUCCESS)
}

fn cmd_record(args: RecordArgs) -> Result<ExitCode> {
    let script = ScriptFile::load(&args.script)?;
    let cases = script.cases();
    let reports: Vec<_> = parse_report_file(&args.report)?
        .into_iter()
        .filter(|r| cases.contains(&r.id))
        .collect();
    if reports.is_empty() {
        bail!("no report cases match the script");
    }
    let pack = load_pack(args.pack.as_deref())?;
    let index = corpus::build_index(&args.corpus)?;
    let recorder = RecordingBackend::new(ScriptedBackend::from_script_file(&script));
    let handle = recorder.handle();
    let mut cfg = BackendConfig::http("scripted://local", "scripted");
    cfg.max_inflight = None;
    let gateway = Gateway::with_backend(&cfg, Box::new(recorder));

    for report in &reports {
        let ctx = llift_core::orchestrator::CaseContext {
            report,
            corpus: &index,
            gateway: &gateway,
            pack: &pack,
            votes: 1,
            domain: Domain::default(),
            models: None,
            ablation: Ablation::Full,
        };
        let outcome = llift_core::orchestrator::run_case(&ctx);
        eprintln!("[{}] recorded: {}", report.id, outcome.verdict.decision);
        if let Some(reason) = &outcome.verdict.inconclusive_reason {
            bail!("case {} did not complete under the script: {reason}", report.id);
        }
    }
    let paths = handle.write_transcripts(&args.out)?;
    for path in &paths {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
