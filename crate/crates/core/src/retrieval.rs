//! Inverted index over corpus sentences and seed-sentence retrieval.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::binio;
use crate::corpus::{Corpus, Sentence, UNK_ID};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    /// Index of the sentence in the corpus (equal to its id for ingested corpora).
    pub sentence: u32,
    pub positions: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvertedIndex {
    postings: HashMap<u32, Vec<Posting>>,
}

impl InvertedIndex {
    pub fn build(corpus: &Corpus) -> InvertedIndex {
        let mut postings: HashMap<u32, Vec<Posting>> = HashMap::new();
        for (si, sentence) in corpus.sentences.iter().enumerate() {
            for (pos, word) in sentence.surfaces().enumerate() {
                let list = postings.entry(corpus.vocab.id(word)).or_default();
                match list.last_mut() {
                    Some(p) if p.sentence == si as u32 => p.positions.push(pos as u32),
                    _ => list.push(Posting {
                        sentence: si as u32,
                        positions: vec![pos as u32],
                    }),
                }
            }
        }
        InvertedIndex { postings }
    }

    pub fn postings(&self, id: u32) -> &[Posting] {
        self.postings.get(&id).map_or(&[], Vec::as_slice)
    }

    /// Postings for a surface form; unknown words (and UNK itself) have none.
    pub fn lookup(&self, corpus: &Corpus, word: &str) -> &[Posting] {
        match corpus.vocab.get(word) {
            Some(id) if id != UNK_ID => self.postings(id),
            _ => &[],
        }
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    pub(crate) fn write_section<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut keys: Vec<u32> = self.postings.keys().copied().collect();
        keys.sort_unstable();
        binio::write_u32(w, keys.len() as u32)?;
        for k in keys {
            let list = &self.postings[&k];
            binio::write_u32(w, k)?;
            binio::write_u32(w, list.len() as u32)?;
            for p in list {
                binio::write_u32(w, p.sentence)?;
                binio::write_u32(w, p.positions.len() as u32)?;
                binio::write_ids(w, &p.positions)?;
            }
        }
        Ok(())
    }

    pub(crate) fn read_section<R: Read>(r: &mut R, corpus: &Corpus) -> Result<InvertedIndex> {
        let bad = |m: String| Error::format("index section", m);
        let n = binio::read_u32(r)? as usize;
        let mut postings = HashMap::with_capacity(n);
        for _ in 0..n {
            let id = binio::read_u32(r)?;
            let count = binio::read_u32(r)? as usize;
            let mut list = Vec::with_capacity(count);
            for _ in 0..count {
                let sentence = binio::read_u32(r)?;
                let np = binio::read_u32(r)? as usize;
                let positions = binio::read_ids(r, np)?;
                let s = corpus
                    .sentences
                    .get(sentence as usize)
                    .ok_or_else(|| bad(format!("posting names missing sentence {sentence}")))?;
                for &p in &positions {
                    let ok = s
                        .tokens
                        .get(p as usize)
                        .is_some_and(|t| corpus.vocab.id(&t.surface) == id);
                    if !ok {
                        return Err(bad(format!("posting {sentence}:{p} does not match token {id}")));
                    }
                }
                list.push(Posting { sentence, positions });
            }
            postings.insert(id, list);
        }
        Ok(InvertedIndex { postings })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionMode {
    /// Rank by position / length.
    Relative,
    /// Rank by raw token position.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetrievalConfig {
    pub pool: usize,
    pub keep: usize,
    pub mode: PositionMode,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            pool: 500,
            keep: 100,
            mode: PositionMode::Relative,
            min_len: 4,
            max_len: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedCandidate {
    pub sentence: Sentence,
    pub alt_position: usize,
}

/// Seed ordering: later alternative word first, then shorter, then corpus order.
pub fn compare_seeds(a: &SeedCandidate, b: &SeedCandidate, mode: PositionMode) -> Ordering {
    let (pa, na) = (a.alt_position as u64, a.sentence.len() as u64);
    let (pb, nb) = (b.alt_position as u64, b.sentence.len() as u64);
    let by_position = match mode {
        PositionMode::Relative => (pb * na).cmp(&(pa * nb)),
        PositionMode::Absolute => pb.cmp(&pa),
    };
    by_position
        .then(na.cmp(&nb))
        .then(a.sentence.id.cmp(&b.sentence.id))
}

/// Gathers the first `pool` sentences (in corpus order) that contain
/// `alt_word` exactly once and satisfy the length bounds, ranks them and
/// returns the best `keep`.
pub fn retrieve_seeds(
    index: &InvertedIndex,
    corpus: &Corpus,
    alt_word: &str,
    cfg: &RetrievalConfig,
) -> Result<Vec<SeedCandidate>> {
    if cfg.keep == 0 || cfg.pool < cfg.keep {
        return Err(Error::InvalidArgument(format!(
            "need pool >= keep >= 1, got pool {} keep {}",
            cfg.pool, cfg.keep
        )));
    }
    let mut seeds: Vec<SeedCandidate> = index
        .lookup(corpus, alt_word)
        .iter()
        .filter(|p| p.positions.len() == 1)
        .filter_map(|p| {
            let s = &corpus.sentences[p.sentence as usize];
            (cfg.min_len..=cfg.max_len).contains(&s.len()).then(|| SeedCandidate {
                sentence: s.clone(),
                alt_position: p.positions[0] as usize,
            })
        })
        .take(cfg.pool)
        .collect();
    seeds.sort_by(|a, b| compare_seeds(a, b, cfg.mode));
    seeds.truncate(cfg.keep);
    Ok(seeds)
}
