//! Retrieve+Swap and Retrieve+Swap+Topic pun generation.
//!
//! Seeds containing the alternative word exactly once are retrieved, the
//! alternative word is swapped for the pun word (local surprisal), and the
//! first noun or pronoun before it is replaced by a type-consistent topic
//! word predicted by the distant skip-gram (global support). The smoothing
//! stage is an identity pass-through.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Pos, Sentence, TagLexicon, Token};
use crate::error::{Error, Result};
use crate::ngram::LanguageModel;
use crate::retrieval::{retrieve_seeds, InvertedIndex, RetrievalConfig, SeedCandidate};
use crate::skipgram::SkipGramModel;
use crate::surprisal::{report, PunOccurrence, PunPair, SurprisalConfig, SurprisalReport};
use crate::wordnet::{SynsetGraph, DEFAULT_THRESHOLD};

pub const SMOOTHER: &str = "identity";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "SWAP")]
    Swap,
    #[serde(rename = "SWAP+TOPIC")]
    SwapTopic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureReason {
    NoSeeds,
    NoTopicWords,
    NoCandidates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicWord {
    pub word: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationCandidate {
    pub seed_id: u32,
    pub seed_rank: usize,
    pub pun_position: usize,
    pub deletion_position: Option<usize>,
    pub deleted_word: Option<Token>,
    pub topic_word: Option<TopicWord>,
    pub tokens: Vec<Token>,
    pub stage: Stage,
    pub warnings: Vec<String>,
    pub scores: Option<SurprisalReport>,
}

impl GenerationCandidate {
    pub fn final_tokens(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    pub fn text(&self) -> String {
        self.final_tokens().join(" ")
    }

    fn as_sentence(&self) -> Sentence {
        Sentence {
            id: self.seed_id,
            tokens: self.tokens.clone(),
        }
    }
}

/// Replaces the single occurrence of the alternative word with the pun word.
pub fn swap(seed: &SeedCandidate, seed_rank: usize, pair: &PunPair) -> Result<GenerationCandidate> {
    let occurrences: Vec<usize> = seed.sentence.positions_of(&pair.alt_word).collect();
    if occurrences != [seed.alt_position] {
        return Err(Error::InvalidArgument(format!(
            "seed {} must contain {:?} exactly once at {}",
            seed.sentence.id, pair.alt_word, seed.alt_position
        )));
    }
    let mut tokens = seed.sentence.tokens.clone();
    tokens[seed.alt_position].surface = pair.pun_word.clone();
    Ok(GenerationCandidate {
        seed_id: seed.sentence.id,
        seed_rank,
        pun_position: seed.alt_position,
        deletion_position: None,
        deleted_word: None,
        topic_word: None,
        tokens,
        stage: Stage::Swap,
        warnings: Vec::new(),
        scores: None,
    })
}

/// Leftmost noun or pronoun strictly before the pun word.
pub fn select_deletion(candidate: &GenerationCandidate) -> Option<usize> {
    candidate.tokens[..candidate.pun_position]
        .iter()
        .position(|t| t.pos.is_nominal())
}

/// Models consulted when inserting topic words.
#[derive(Clone, Copy)]
pub struct TopicResources<'a> {
    pub skipgram: &'a SkipGramModel,
    pub wordnet: &'a SynsetGraph,
    pub lexicon: &'a TagLexicon,
}

/// One SWAP+TOPIC candidate per surviving top-k topic word, best score first.
/// Fails only if the pun word has no skip-gram predictions at all.
pub fn topic_insert(
    candidate: &GenerationCandidate,
    pair: &PunPair,
    res: &TopicResources<'_>,
    k: usize,
    threshold: f64,
) -> Result<Vec<GenerationCandidate>> {
    let Some(del) = select_deletion(candidate) else {
        return Ok(Vec::new());
    };
    let deleted = &candidate.tokens[del];
    let topics = res.skipgram.predict_topics(&pair.pun_word, k)?;
    let mut out = Vec::new();
    for (word, score) in topics {
        if word == pair.pun_word || word == pair.alt_word || word == deleted.surface {
            continue;
        }
        if res.lexicon.tag_word(&word) != Pos::Noun {
            continue;
        }
        let topic = Token {
            surface: word.clone(),
            pos: Pos::Noun,
        };
        if !res.wordnet.type_consistent(deleted, &topic, threshold) {
            continue;
        }
        let mut next = candidate.clone();
        next.tokens[del] = topic;
        next.deletion_position = Some(del);
        next.deleted_word = Some(deleted.clone());
        next.topic_word = Some(TopicWord { word, score });
        next.stage = Stage::SwapTopic;
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    RetrieveSwap,
    RetrieveSwapTopic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub retrieval: RetrievalConfig,
    pub topic_k: usize,
    pub threshold: f64,
    pub max_outputs: usize,
    pub rerank_surprisal: bool,
    pub pipeline: Pipeline,
    pub surprisal: SurprisalConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            retrieval: RetrievalConfig::default(),
            topic_k: 100,
            threshold: DEFAULT_THRESHOLD,
            max_outputs: 10,
            rerank_surprisal: false,
            pipeline: Pipeline::RetrieveSwapTopic,
            surprisal: SurprisalConfig::default(),
        }
    }
}

#[derive(Clone, Copy)]
pub struct Resources<'a> {
    pub corpus: &'a Corpus,
    pub index: &'a InvertedIndex,
    pub lm: &'a (dyn LanguageModel + Sync),
    pub skipgram: &'a SkipGramModel,
    pub wordnet: &'a SynsetGraph,
    pub lexicon: &'a TagLexicon,
}

impl Resources<'_> {
    /// All models must share the corpus vocabulary.
    pub fn check(&self) -> Result<()> {
        let expected = self.corpus.vocab.hash();
        for found in [self.lm.vocab().hash(), self.skipgram.vocab().hash()] {
            if found != expected {
                return Err(Error::VocabMismatch { expected, found });
            }
        }
        Ok(())
    }

    fn topic(&self) -> TopicResources<'_> {
        TopicResources {
            skipgram: self.skipgram,
            wordnet: self.wordnet,
            lexicon: self.lexicon,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutput {
    pub pair: PunPair,
    pub candidates: Vec<GenerationCandidate>,
    pub failure: Option<FailureReason>,
}

fn tag_unknown(seed: &SeedCandidate, lexicon: &TagLexicon) -> SeedCandidate {
    let mut seed = seed.clone();
    for t in &mut seed.sentence.tokens {
        if t.pos == Pos::Unknown {
            t.pos = lexicon.tag_word(&t.surface);
        }
    }
    seed
}

pub fn generate(pair: &PunPair, res: &Resources<'_>, cfg: &GeneratorConfig) -> Result<GenerationOutput> {
    res.check()?;
    let fail = |reason| GenerationOutput {
        pair: pair.clone(),
        candidates: Vec::new(),
        failure: Some(reason),
    };

    let seeds = retrieve_seeds(res.index, res.corpus, &pair.alt_word, &cfg.retrieval)?;
    if seeds.is_empty() {
        return Ok(fail(FailureReason::NoSeeds));
    }

    let pos_warning = {
        let (p, a) = (res.lexicon.tag_word(&pair.pun_word), res.lexicon.tag_word(&pair.alt_word));
        (p != a).then(|| format!("pun word tagged {p}, alternative word tagged {a}"))
    };

    let mut candidates = Vec::new();
    for (rank, seed) in seeds.iter().enumerate() {
        // the swap would leave two pun words
        if seed.sentence.positions_of(&pair.pun_word).next().is_some() {
            continue;
        }
        let seed = tag_unknown(seed, res.lexicon);
        let mut swapped = swap(&seed, rank, pair)?;
        swapped.warnings.extend(pos_warning.clone());
        match cfg.pipeline {
            Pipeline::RetrieveSwap => candidates.push(swapped),
            Pipeline::RetrieveSwapTopic => {
                match topic_insert(&swapped, pair, &res.topic(), cfg.topic_k, cfg.threshold) {
                    Ok(found) => candidates.extend(found),
                    Err(Error::OutOfVocabulary(_)) => return Ok(fail(FailureReason::NoTopicWords)),
                    Err(e) => return Err(e),
                }
            }
        }
        if !cfg.rerank_surprisal && candidates.len() >= cfg.max_outputs {
            break;
        }
    }
    if candidates.is_empty() {
        return Ok(fail(FailureReason::NoCandidates));
    }
    candidates.truncate(cfg.max_outputs);

    for c in &mut candidates {
        let sentence = c.as_sentence();
        let occ = PunOccurrence::new(&sentence, c.pun_position, pair)?;
        c.scores = Some(report(res.lm, &occ, pair, &cfg.surprisal)?);
    }
    if cfg.rerank_surprisal {
        candidates.sort_by(|a, b| {
            let ra = a.scores.map_or(-1.0, |s| s.s_ratio);
            let rb = b.scores.map_or(-1.0, |s| s.s_ratio);
            rb.total_cmp(&ra)
        });
    }
    Ok(GenerationOutput {
        pair: pair.clone(),
        candidates,
        failure: None,
    })
}

/// Flat JSON-lines view of a candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub pun_word: String,
    pub alt_word: String,
    pub rank: usize,
    pub stage: Stage,
    pub seed_id: u32,
    pub seed_rank: usize,
    pub pun_position: usize,
    pub deletion_position: Option<usize>,
    pub deleted_word: Option<String>,
    pub topic_word: Option<String>,
    pub topic_score: Option<f64>,
    pub text: String,
    pub final_tokens: Vec<String>,
    pub scores: Option<SurprisalReport>,
    pub warnings: Vec<String>,
    pub smoother: String,
    pub wordnet_version: String,
}

/// Emitted instead of candidates when a pair produces nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub pun_word: String,
    pub alt_word: String,
    pub failure: FailureReason,
    pub wordnet_version: String,
}

impl GenerationOutput {
    pub fn records(&self, wordnet_version: &str) -> Vec<CandidateRecord> {
        self.candidates
            .iter()
            .enumerate()
            .map(|(rank, c)| CandidateRecord {
                pun_word: self.pair.pun_word.clone(),
                alt_word: self.pair.alt_word.clone(),
                rank,
                stage: c.stage,
                seed_id: c.seed_id,
                seed_rank: c.seed_rank,
                pun_position: c.pun_position,
                deletion_position: c.deletion_position,
                deleted_word: c.deleted_word.as_ref().map(|t| t.surface.clone()),
                topic_word: c.topic_word.as_ref().map(|t| t.word.clone()),
                topic_score: c.topic_word.as_ref().map(|t| t.score),
                text: c.text(),
                final_tokens: c.final_tokens().into_iter().map(String::from).collect(),
                scores: c.scores,
                warnings: c.warnings.clone(),
                smoother: SMOOTHER.to_string(),
                wordnet_version: wordnet_version.to_string(),
            })
            .collect()
    }

    pub fn failure_record(&self, wordnet_version: &str) -> Option<FailureRecord> {
        self.failure.map(|failure| FailureRecord {
            pun_word: self.pair.pun_word.clone(),
            alt_word: self.pair.alt_word.clone(),
            failure,
            wordnet_version: wordnet_version.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(w: &str, pos: Pos) -> Token {
        Token::new(w, pos).unwrap()
    }

    fn seed(words: &[(&str, Pos)], alt_position: usize) -> SeedCandidate {
        SeedCandidate {
            sentence: Sentence {
                id: 7,
                tokens: words.iter().map(|(w, p)| tok(w, *p)).collect(),
            },
            alt_position,
        }
    }

    fn hair_seed() -> SeedCandidate {
        use Pos::*;
        seed(
            &[("the", Other), ("man", Noun), ("got", Other), ("a", Other), ("hair", Noun), ("cut", Noun)],
            4,
        )
    }

    #[test]
    fn swap_replaces_only_the_alternative_word() {
        let pair = PunPair::new("hare", "hair").unwrap();
        let c = swap(&hair_seed(), 0, &pair).unwrap();
        assert_eq!(c.final_tokens(), ["the", "man", "got", "a", "hare", "cut"]);
        assert_eq!(c.stage, Stage::Swap);
        assert_eq!(c.pun_position, 4);
        assert_eq!(c.tokens.len(), hair_seed().sentence.len());

        let again = SeedCandidate {
            sentence: Sentence {
                id: 7,
                tokens: c.tokens.clone(),
            },
            alt_position: 4,
        };
        assert!(swap(&again, 0, &pair).is_err());
    }

    #[test]
    fn deletion_targets_first_nominal_before_pun() {
        use Pos::*;
        let pair = PunPair::new("hare", "hair").unwrap();
        let c = swap(&hair_seed(), 0, &pair).unwrap();
        assert_eq!(select_deletion(&c), Some(1));

        let s = seed(&[("i", Pronoun), ("am", Other), ("a", Other), ("hair", Noun)], 3);
        assert_eq!(select_deletion(&swap(&s, 0, &pair).unwrap()), Some(0));

        let s = seed(&[("slowly", Other), ("hair", Noun), ("man", Noun)], 1);
        assert_eq!(select_deletion(&swap(&s, 0, &pair).unwrap()), None);
    }

    #[test]
    fn records_carry_identity_smoother() {
        let pair = PunPair::new("hare", "hair").unwrap();
        let out = GenerationOutput {
            pair: pair.clone(),
            candidates: vec![swap(&hair_seed(), 0, &pair).unwrap()],
            failure: None,
        };
        let recs = out.records("WordNet 3.0");
        assert_eq!(recs[0].smoother, SMOOTHER);
        assert_eq!(recs[0].text, "the man got a hare cut");
        let json = serde_json::to_string(&recs[0].stage).unwrap();
        assert_eq!(json, "\"SWAP\"");
        assert!(out.failure_record("x").is_none());
    }
}
