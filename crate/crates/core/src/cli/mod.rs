//! The `revkit` command line.
//!
//! Exit codes: 0 on success, 1 on internal failure, 2 on bad usage or input.

mod align;
mod eval;
mod extract;
mod output;
mod stats;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ExtractMethod, RunConfig};
use crate::docops::KeptDefinition;
use crate::intention::LabelScheme;
use crate::pipeline::Direction;
use crate::similarity::Metric;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Internal(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "revkit", version, about = "Align, analyze and evaluate revisions of versioned documents")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Corpus JSON file.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Read the corpus in the released-dataset layout.
    #[arg(long)]
    pub released: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AlignArgs {
    /// Paragraph similarity needed for a match within the position gap.
    #[arg(long)]
    pub tau1: Option<f64>,
    /// Position gap allowed for a source paragraph's best target.
    #[arg(long)]
    pub tau2: Option<f64>,
    /// Paragraph similarity that matches at any position.
    #[arg(long)]
    pub tau3: Option<f64>,
    /// Position gap allowed for a target paragraph's best source.
    #[arg(long)]
    pub tau4: Option<f64>,
    /// Sentence similarity: jaccard, tfidf, char3gram or bleu.
    #[arg(long)]
    pub metric: Option<Metric>,
    /// Sentence similarity threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// forward, backward or both.
    #[arg(long)]
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Alignment,
    Edits,
    Intention,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align every adjacent version pair; one JSON file per pair.
    Align {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        align: AlignArgs,
    },
    /// Extract span-level edits from aligned sentence pairs.
    ExtractEdits {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Alignment files or directories (with --corpus).
        #[arg(long, num_args = 1..)]
        alignments: Vec<PathBuf>,
        /// JSON-lines revisions to process instead of corpus plus alignments.
        #[arg(long, conflicts_with = "alignments")]
        revisions: Option<PathBuf>,
        /// Word alignments, one sentence pair per line (Pharaoh) or a JSON array.
        #[arg(long)]
        word_alignments: Option<PathBuf>,
        /// Bracketed source-sentence trees, one per line.
        #[arg(long)]
        src_trees: Option<PathBuf>,
        /// Bracketed target-sentence trees, one per line.
        #[arg(long)]
        tgt_trees: Option<PathBuf>,
        /// diff-baseline, simple or parse.
        #[arg(long)]
        method: Option<ExtractMethod>,
        /// Highest tree level the parse method ascends to.
        #[arg(long)]
        max_level: Option<usize>,
        /// Skip reorder derivation.
        #[arg(long)]
        no_reorder: bool,
        /// Label edits with the rule baseline.
        #[arg(long, conflicts_with = "predictions")]
        rule_intentions: bool,
        /// Attach intentions from a JSON-lines prediction file.
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Label scheme for --predictions: fine or coarse.
        #[arg(long, default_value = "fine")]
        scheme: LabelScheme,
        /// Output JSON-lines file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Document-level operation counts, update ratios and position histograms.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Alignment files or directories.
        #[arg(long, num_args = 1.., required = true)]
        alignments: Vec<PathBuf>,
        /// copy_only or copy_or_rephrase.
        #[arg(long)]
        kept_definition: Option<KeptDefinition>,
        /// Histogram bins.
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Output directory for JSON and CSV reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions against gold annotations.
    Eval {
        #[arg(long, value_enum)]
        task: Task,
        /// Prediction files (or alignment directories).
        #[arg(long, num_args = 1.., required = true)]
        pred: Vec<PathBuf>,
        /// Gold files (or alignment directories).
        #[arg(long, num_args = 1.., required = true)]
        gold: Vec<PathBuf>,
        /// Needed for alignment evaluation.
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Intention label scheme: fine or coarse.
        #[arg(long, default_value = "fine")]
        scheme: LabelScheme,
        /// JSON report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the sentence threshold on gold alignments.
    Tune {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Gold alignment files or directories.
        #[arg(long, num_args = 1.., required = true)]
        gold: Vec<PathBuf>,
        #[command(flatten)]
        align: AlignArgs,
        /// JSON report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Loads the config file if any, then applies flag overrides.
fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    let align = match &cli.command {
        Command::Align { align, .. } | Command::Tune { align, .. } => Some(align),
        _ => None,
    };
    if let Some(a) = align {
        cfg.tau1 = a.tau1.unwrap_or(cfg.tau1);
        cfg.tau2 = a.tau2.unwrap_or(cfg.tau2);
        cfg.tau3 = a.tau3.unwrap_or(cfg.tau3);
        cfg.tau4 = a.tau4.unwrap_or(cfg.tau4);
        if let Some(m) = a.metric {
            if m != cfg.metric && a.threshold.is_none() {
                // a configured threshold belongs to the configured metric
                cfg.threshold = None;
            }
            cfg.metric = m;
        }
        cfg.threshold = a.threshold.or(cfg.threshold);
        cfg.direction = a.direction.unwrap_or(cfg.direction);
    }
    match &cli.command {
        Command::Align { corpus, out, .. } => {
            cfg.corpus = corpus.corpus.clone().or(cfg.corpus);
            cfg.out = out.clone().or(cfg.out);
        }
        Command::ExtractEdits { corpus, method, max_level, out, .. } => {
            cfg.corpus = corpus.corpus.clone().or(cfg.corpus);
            cfg.method = method.unwrap_or(cfg.method);
            cfg.max_level = max_level.unwrap_or(cfg.max_level);
            cfg.out = out.clone().or(cfg.out);
        }
        Command::Stats { corpus, kept_definition, out, .. } => {
            cfg.corpus = corpus.corpus.clone().or(cfg.corpus);
            cfg.kept_definition = kept_definition.unwrap_or(cfg.kept_definition);
            cfg.out = out.clone().or(cfg.out);
        }
        Command::Eval { corpus, out, .. } | Command::Tune { corpus, out, .. } => {
            cfg.corpus = corpus.corpus.clone().or(cfg.corpus);
            cfg.out = out.clone().or(cfg.out);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a PathBuf> {
    value.as_ref().ok_or_else(|| CliError::input(format!("{flag} is required")))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve_config(&cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Align { corpus, .. } => align::cmd_align(&cfg, corpus.released),
        Command::Tune { corpus, gold, .. } => align::cmd_tune(&cfg, corpus.released, gold),
        Command::ExtractEdits {
            corpus,
            alignments,
            revisions,
            word_alignments,
            src_trees,
            tgt_trees,
            no_reorder,
            rule_intentions,
            predictions,
            scheme,
            ..
        } => extract::cmd_extract_edits(
            &cfg,
            &extract::ExtractInputs {
                released: corpus.released,
                alignments,
                revisions: revisions.as_deref(),
                word_alignments: word_alignments.as_deref(),
                src_trees: src_trees.as_deref(),
                tgt_trees: tgt_trees.as_deref(),
                reorder: !no_reorder,
                rule_intentions: *rule_intentions,
                predictions: predictions.as_deref(),
                scheme: *scheme,
            },
        ),
        Command::Stats { corpus, alignments, bins, .. } => stats::cmd_stats(&cfg, corpus.released, alignments, *bins),
        Command::Eval { task, pred, gold, corpus, scheme, .. } => {
            eval::cmd_eval(&cfg, *task, pred, gold, corpus.released, *scheme)
        }
    })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("REVKIT_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("revkit: {e}");
            e.exit_code()
        }
    }
}
