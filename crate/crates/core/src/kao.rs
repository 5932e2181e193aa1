//! Ambiguity and distinctiveness under the two-meaning generative model of
//! puns. Each sentence has a latent meaning `z` (pun or alternative); each
//! content word is drawn either from an unconditional unigram model or from
//! a relatedness model conditioned on `z`, as chosen by a per-word latent
//! assignment `f`. Relatedness comes from the distant skip-gram.
//!
//! Priors are uniform: P(z) = P(f_i = 1) = 1/2.

use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, Vocabulary, STOPWORDS};
use crate::error::{Error, Result};
use crate::skipgram::SkipGramModel;
use crate::surprisal::PunPair;

/// Bernoulli parameters are clamped to [EPS, 1 - EPS] before KL.
pub const KL_CLAMP: f64 = 1e-9;

/// Probability sources for the generative model.
pub trait KaoTables {
    /// Unconditional unigram probability of `word`.
    fn unigram(&self, word: &str) -> f64;

    /// p(word | meaning) for every word of the sentence, in order.
    fn related(&self, meaning: &str, words: &[&str]) -> Result<Vec<f64>>;
}

/// Skip-gram relatedness paired with an add-one unigram over the same vocabulary.
pub struct SkipGramTables<'a> {
    sg: &'a SkipGramModel,
}

impl<'a> SkipGramTables<'a> {
    pub fn new(sg: &'a SkipGramModel) -> Self {
        SkipGramTables { sg }
    }

    fn vocab(&self) -> &Vocabulary {
        self.sg.vocab()
    }
}

impl KaoTables for SkipGramTables<'_> {
    fn unigram(&self, word: &str) -> f64 {
        let v = self.vocab();
        (v.frequency(word) + 1) as f64 / (v.total() + v.len() as u64) as f64
    }

    fn related(&self, meaning: &str, words: &[&str]) -> Result<Vec<f64>> {
        let dist = self.sg.relatedness_dist(meaning)?;
        Ok(words.iter().map(|w| dist[self.vocab().id(w) as usize]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaoPosterior {
    /// P(z = pun word | sentence).
    pub p_pun: f64,
    /// P(f_i = 1 | z = pun word, sentence) per content position.
    pub f_pun: Vec<f64>,
    /// P(f_i = 1 | z = alternative word, sentence) per content position.
    pub f_alt: Vec<f64>,
    /// Sentence positions the vectors refer to.
    pub positions: Vec<usize>,
}

/// Positions that enter the model: no punctuation, stopwords, or the pun word.
pub fn content_positions(sentence: &Sentence, pair: &PunPair) -> Vec<usize> {
    sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            !t.is_punct() && t.surface != pair.pun_word && !STOPWORDS.contains(&t.surface.as_str())
        })
        .map(|(i, _)| i)
        .collect()
}

/// Posterior from per-position unigram and relatedness probabilities.
pub fn posterior_from_probs(unigram: &[f64], rel_pun: &[f64], rel_alt: &[f64]) -> Result<KaoPosterior> {
    let n = unigram.len();
    if rel_pun.len() != n || rel_alt.len() != n {
        return Err(Error::InvalidArgument("probability vectors differ in length".into()));
    }
    if let Some(bad) = unigram.iter().find(|&&u| !(u > 0.0 && u <= 1.0)) {
        return Err(Error::InvalidArgument(format!("unigram probability {bad} outside (0, 1]")));
    }
    let mut log_pun = 0.0;
    let mut log_alt = 0.0;
    let mut f_pun = Vec::with_capacity(n);
    let mut f_alt = Vec::with_capacity(n);
    for i in 0..n {
        let mp = 0.5 * unigram[i] + 0.5 * rel_pun[i];
        let ma = 0.5 * unigram[i] + 0.5 * rel_alt[i];
        log_pun += mp.ln();
        log_alt += ma.ln();
        f_pun.push(0.5 * rel_pun[i] / mp);
        f_alt.push(0.5 * rel_alt[i] / ma);
    }
    let p_pun = 1.0 / (1.0 + (log_alt - log_pun).exp());
    Ok(KaoPosterior {
        p_pun,
        f_pun,
        f_alt,
        positions: Vec::new(),
    })
}

pub fn posterior<T: KaoTables + ?Sized>(tables: &T, sentence: &Sentence, pair: &PunPair) -> Result<KaoPosterior> {
    let positions = content_positions(sentence, pair);
    let words: Vec<&str> = positions
        .iter()
        .map(|&i| sentence.tokens[i].surface.as_str())
        .collect();
    let unigram: Vec<f64> = words.iter().map(|w| tables.unigram(w)).collect();
    let rel_pun = tables.related(&pair.pun_word, &words)?;
    let rel_alt = tables.related(&pair.alt_word, &words)?;
    let mut post = posterior_from_probs(&unigram, &rel_pun, &rel_alt)?;
    post.positions = positions;
    Ok(post)
}

/// Entropy of the posterior over the meaning, in nats.
pub fn ambiguity(post: &KaoPosterior) -> f64 {
    binary_entropy(post.p_pun)
}

fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.ln() };
    term(p) + term(1.0 - p)
}

fn bernoulli_kl(p: f64, q: f64) -> f64 {
    p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
}

/// Symmetrized KL between the assignment posteriors under the two meanings.
pub fn distinctiveness(post: &KaoPosterior) -> Result<f64> {
    if post.f_pun.is_empty() {
        return Err(Error::InvalidArgument("no content words to compare".into()));
    }
    let clamp = |x: f64| x.clamp(KL_CLAMP, 1.0 - KL_CLAMP);
    Ok(post
        .f_pun
        .iter()
        .zip(&post.f_alt)
        .map(|(&a, &b)| {
            let (a, b) = (clamp(a), clamp(b));
            bernoulli_kl(a, b) + bernoulli_kl(b, a)
        })
        .sum())
}
