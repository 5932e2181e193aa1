use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use punforge_core::retrieval::PositionMode;
use punforge_core::{PartialConfig, Result, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "punforge", version, about = "Score and generate homophone puns")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON file whose keys mirror the run configuration fields.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Drop words seen fewer than N times when reading text corpora.
    #[arg(long, global = true, value_name = "N")]
    pub min_count: Option<u64>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest a corpus and write it with its inverted index.
    Index(IndexArgs),
    /// Train a Kneser-Ney n-gram language model.
    TrainLm(TrainLmArgs),
    /// Train the distant skip-gram.
    TrainSkipgram(TrainSkipgramArgs),
    /// Score JSON-lines pun records.
    Score(ScoreArgs),
    /// Generate pun candidates for word pairs.
    Generate(GenerateArgs),
    /// Correlate metric scores with human ratings.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Text corpus or a binary corpus written by `index`.
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,

    /// Treat each input line as one sentence.
    #[arg(long)]
    pub line_mode: bool,

    /// Input lines are pre-tagged `surface_TAG` tokens.
    #[arg(long)]
    pub tagged: bool,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Vocabulary dump; defaults to OUT with a `.vocab.tsv` suffix.
    #[arg(long, value_name = "FILE")]
    pub vocab_out: Option<PathBuf>,

    /// Tag tokens with the lexicon of this WordNet directory.
    #[arg(long, value_name = "DIR")]
    pub wordnet: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainLmArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long)]
    pub order: Option<usize>,

    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainSkipgramArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long)]
    pub d1: Option<usize>,
    #[arg(long)]
    pub d2: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub step_size: Option<f64>,

    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Also export input embeddings as `word v1 ... vD` lines.
    #[arg(long, value_name = "FILE")]
    pub text_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// JSON-lines records {sentence, pun_word, alt_word, pun_position?, id?}.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, value_name = "FILE")]
    pub lm: PathBuf,

    /// Adds ambiguity and distinctiveness.
    #[arg(long, value_name = "FILE")]
    pub skipgram: Option<PathBuf>,

    /// Local context window on each side of the pun word.
    #[arg(long, short = 'd')]
    pub window: Option<usize>,

    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PipelineArg {
    Swap,
    SwapTopic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PositionArg {
    Relative,
    Absolute,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// One `pun_word<TAB>alt_word` per line.
    #[arg(long, value_name = "FILE")]
    pub pairs: PathBuf,

    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, value_name = "FILE")]
    pub lm: PathBuf,

    #[arg(long, value_name = "FILE")]
    pub skipgram: PathBuf,

    /// WordNet dict directory (or PUNGEN_WORDNET).
    #[arg(long, value_name = "DIR")]
    pub wordnet: Option<PathBuf>,

    #[arg(long)]
    pub rerank_surprisal: bool,

    #[arg(long, value_name = "N")]
    pub max_outputs: Option<usize>,

    #[arg(long, value_enum, default_value = "swap-topic")]
    pub pipeline: PipelineArg,

    #[arg(long)]
    pub pool: Option<usize>,
    #[arg(long)]
    pub keep: Option<usize>,
    #[arg(long)]
    pub topic_k: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub position_mode: Option<PositionArg>,
    #[arg(long, short = 'd')]
    pub window: Option<usize>,

    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// CSV `item_id,rater_id,score` with `NA` for N/A.
    #[arg(long, value_name = "FILE")]
    pub ratings: PathBuf,

    /// JSON-lines metric records carrying an `id` that matches `item_id`.
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,

    #[arg(long)]
    pub min_corr: Option<f64>,

    #[arg(long)]
    pub permutations: Option<usize>,

    /// Standardize and clip metric values at two standard deviations first.
    #[arg(long)]
    pub clip: bool,

    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl Cli {
    fn flag_layer(&self) -> PartialConfig {
        let mut p = PartialConfig {
            seed: self.seed,
            min_count: self.min_count,
            ..Default::default()
        };
        match &self.command {
            Command::Index(a) => p.wordnet = a.wordnet.as_ref().map(|d| d.display().to_string()),
            Command::TrainLm(a) => p.order = a.order,
            Command::TrainSkipgram(a) => {
                p.d1 = a.d1;
                p.d2 = a.d2;
                p.dim = a.dim;
                p.epochs = a.epochs;
                p.negatives = a.negatives;
                p.step_size = a.step_size;
            }
            Command::Score(a) => p.d = a.window,
            Command::Generate(a) => {
                p.wordnet = a.wordnet.as_ref().map(|d| d.display().to_string());
                p.rerank_surprisal = a.rerank_surprisal.then_some(true);
                p.max_outputs = a.max_outputs;
                p.pool = a.pool;
                p.keep = a.keep;
                p.topic_k = a.topic_k;
                p.threshold = a.threshold;
                p.position_mode = a.position_mode.map(|m| match m {
                    PositionArg::Relative => PositionMode::Relative,
                    PositionArg::Absolute => PositionMode::Absolute,
                });
                p.d = a.window;
            }
            Command::Correlate(a) => {
                p.min_corr = a.min_corr;
                p.permutations = a.permutations;
            }
        }
        p
    }

    pub fn resolve_config(&self) -> Result<RunConfig> {
        RunConfig::layered(self.flag_layer(), self.config.as_deref())
    }
}
