//! Pun generation and scoring: a Kneser-Ney n-gram language model, local and
//! global surprisal metrics, a distant skip-gram, the ambiguity and
//! distinctiveness measures, a WordNet hypernym graph, seed retrieval and the
//! retrieve-swap-topic generator, plus rating statistics.

mod binio;

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod generator;
pub mod kao;
pub mod ngram;
pub mod retrieval;
pub mod skipgram;
pub mod surprisal;
pub mod wordnet;

pub use config::{PartialConfig, RunConfig};
pub use corpus::{Corpus, IngestOptions, Pos, Sentence, TagLexicon, Token, Vocabulary};
pub use error::{Error, Result};
pub use generator::{GenerationCandidate, GenerationOutput, GeneratorConfig, Pipeline, Resources, Stage};
pub use ngram::{LanguageModel, NGramModel};
pub use retrieval::{InvertedIndex, RetrievalConfig, SeedCandidate};
pub use skipgram::{SkipGramConfig, SkipGramModel};
pub use surprisal::{PunOccurrence, PunPair, SurprisalConfig, SurprisalReport};
pub use wordnet::{load_wordnet, SynsetGraph, SynsetId};
