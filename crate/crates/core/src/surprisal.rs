//! Local and global surprisal, their ratio, and sentence unusualness.
//!
//! A discontiguous context (left, right) is scored by inserting the
//! candidate word between the two halves and scoring the contiguous result.
//! Local windows are fragments and are scored without sentence markers;
//! whole-sentence scores use `<s>`/`</s>`.

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::ngram::LanguageModel;

/// Global surprisal below this is treated as no signal.
pub const DEGENERATE_EPS: f64 = 1e-9;
pub const DEFAULT_WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunPair {
    pub pun_word: String,
    pub alt_word: String,
}

impl PunPair {
    pub fn new(pun_word: &str, alt_word: &str) -> Result<PunPair> {
        let pun_word = pun_word.trim().to_lowercase();
        let alt_word = alt_word.trim().to_lowercase();
        if pun_word.is_empty() || alt_word.is_empty() {
            return Err(Error::InvalidArgument("pun and alternative words must be non-empty".into()));
        }
        if pun_word == alt_word {
            return Err(Error::InvalidArgument(format!(
                "pun word and alternative word are both {pun_word:?}"
            )));
        }
        Ok(PunPair { pun_word, alt_word })
    }

    pub fn reversed(&self) -> PunPair {
        PunPair {
            pun_word: self.alt_word.clone(),
            alt_word: self.pun_word.clone(),
        }
    }
}

/// A sentence with the (0-based) position of its pun word.
#[derive(Debug, Clone, Copy)]
pub struct PunOccurrence<'a> {
    pub sentence: &'a Sentence,
    pub position: usize,
}

impl<'a> PunOccurrence<'a> {
    pub fn new(sentence: &'a Sentence, position: usize, pair: &PunPair) -> Result<Self> {
        match sentence.tokens.get(position) {
            Some(t) if t.surface == pair.pun_word => Ok(PunOccurrence { sentence, position }),
            Some(t) => Err(Error::InvalidArgument(format!(
                "token {position} is {:?}, not pun word {:?}",
                t.surface, pair.pun_word
            ))),
            None => Err(Error::InvalidArgument(format!(
                "position {position} outside sentence of length {}",
                sentence.len()
            ))),
        }
    }

    /// Uses the first occurrence of the pun word.
    pub fn first(sentence: &'a Sentence, pair: &PunPair) -> Result<Self> {
        let position = sentence.positions_of(&pair.pun_word).next().ok_or_else(|| {
            Error::InvalidArgument(format!("pun word {:?} not in sentence", pair.pun_word))
        })?;
        Ok(PunOccurrence { sentence, position })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurprisalConfig {
    /// Local window size on each side of the pun word.
    pub window: usize,
    /// Score the global context with sentence markers.
    pub global_markers: bool,
}

impl Default for SurprisalConfig {
    fn default() -> Self {
        SurprisalConfig {
            window: DEFAULT_WINDOW,
            global_markers: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurprisalReport {
    pub s_local: f64,
    pub s_global: f64,
    pub s_ratio: f64,
    pub unusualness: f64,
    pub degenerate: bool,
}

fn with_word(left: &[u32], word: u32, right: &[u32]) -> Vec<u32> {
    let mut seq = Vec::with_capacity(left.len() + right.len() + 1);
    seq.extend_from_slice(left);
    seq.push(word);
    seq.extend_from_slice(right);
    seq
}

/// ln p(alt, c) - ln p(pun, c) for context ids on either side of the gap.
pub fn surprisal_with<M: LanguageModel + ?Sized>(
    lm: &M,
    left: &[u32],
    right: &[u32],
    pun: u32,
    alt: u32,
    markers: bool,
) -> f64 {
    lm.logprob_seq(&with_word(left, alt, right), markers)
        - lm.logprob_seq(&with_word(left, pun, right), markers)
}

/// Surprisal of a context fragment, scored without sentence markers.
pub fn surprisal<M: LanguageModel + ?Sized>(
    lm: &M,
    left: &[u32],
    right: &[u32],
    pair: &PunPair,
) -> f64 {
    let v = lm.vocab();
    surprisal_with(lm, left, right, v.id(&pair.pun_word), v.id(&pair.alt_word), false)
}

/// Returns (S_local, S_global).
pub fn local_global<M: LanguageModel + ?Sized>(
    lm: &M,
    occ: &PunOccurrence<'_>,
    pair: &PunPair,
    cfg: &SurprisalConfig,
) -> Result<(f64, f64)> {
    if cfg.window == 0 {
        return Err(Error::InvalidArgument("local window must be at least 1".into()));
    }
    let v = lm.vocab();
    let ids: Vec<u32> = occ.sentence.surfaces().map(|w| v.id(w)).collect();
    let p = occ.position;
    let (pun, alt) = (v.id(&pair.pun_word), v.id(&pair.alt_word));

    let left_local = &ids[p.saturating_sub(cfg.window)..p];
    let right_local = &ids[p + 1..(p + 1 + cfg.window).min(ids.len())];
    let s_local = surprisal_with(lm, left_local, right_local, pun, alt, false);
    let s_global = surprisal_with(lm, &ids[..p], &ids[p + 1..], pun, alt, cfg.global_markers);
    Ok((s_local, s_global))
}

/// Local-global ratio: -1 whenever either surprisal is negative or the
/// ratio is undefined, otherwise S_local / S_global.
pub fn s_ratio(s_local: f64, s_global: f64) -> f64 {
    if is_degenerate(s_local, s_global) || s_local < 0.0 || s_global < 0.0 {
        return -1.0;
    }
    s_local / s_global
}

fn is_degenerate(s_local: f64, s_global: f64) -> bool {
    !s_local.is_finite()
        || !s_global.is_finite()
        || (s_global >= 0.0 && s_global < DEGENERATE_EPS)
        || !(s_local / s_global).is_finite()
}

/// Negative per-token log ratio of the sentence probability to the product
/// of its unigram probabilities.
pub fn unusualness<M: LanguageModel + ?Sized>(lm: &M, tokens: &[u32]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::InvalidArgument("unusualness of an empty sentence".into()));
    }
    let joint = lm.logprob_seq(tokens, true);
    let independent: f64 = tokens.iter().map(|&t| lm.unigram_logprob(t)).sum();
    Ok(-(joint - independent) / tokens.len() as f64)
}

pub fn sentence_unusualness<M: LanguageModel + ?Sized>(lm: &M, sentence: &Sentence) -> Result<f64> {
    let ids: Vec<u32> = sentence.surfaces().map(|w| lm.vocab().id(w)).collect();
    unusualness(lm, &ids)
}

pub fn report<M: LanguageModel + ?Sized>(
    lm: &M,
    occ: &PunOccurrence<'_>,
    pair: &PunPair,
    cfg: &SurprisalConfig,
) -> Result<SurprisalReport> {
    let (s_local, s_global) = local_global(lm, occ, pair, cfg)?;
    Ok(SurprisalReport {
        s_local,
        s_global,
        s_ratio: s_ratio(s_local, s_global),
        unusualness: sentence_unusualness(lm, occ.sentence)?,
        degenerate: is_degenerate(s_local, s_global),
    })
}
