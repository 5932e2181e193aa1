//! "Distant" skip-gram: a center word predicts the words that sit between
//! `d1` and `d2` positions away from it in the same sentence, in both
//! directions. Trained with negative sampling and plain SGD; queried with an
//! exact softmax over the output embeddings.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binio;
use crate::corpus::{Corpus, Vocabulary, UNK_ID};
use crate::error::{Error, Result};

const SG_MAGIC: &[u8; 4] = b"PGSG";
const NOISE_POWER: f64 = 0.75;
const MIN_STEP_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub d1: usize,
    pub d2: usize,
    pub epochs: usize,
    pub negatives: usize,
    /// Initial SGD step; decays linearly to near zero over training.
    pub step_size: f64,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 300,
            d1: 5,
            d2: 10,
            epochs: 15,
            negatives: 5,
            step_size: 0.025,
            seed: 0,
        }
    }
}

/// (center, context) pairs whose distance lies in `d1..=d2`.
pub fn extract_pairs(ids: &[u32], d1: usize, d2: usize) -> Vec<(u32, u32)> {
    let n = ids.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        if i >= d1 {
            for j in i.saturating_sub(d2)..=i - d1 {
                pairs.push((ids[i], ids[j]));
            }
        }
        for j in (i + d1)..=(i + d2).min(n.saturating_sub(1)) {
            pairs.push((ids[i], ids[j]));
        }
    }
    pairs
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient of the negative-sampling loss for one training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub center: u32,
    pub d_input: Vec<f64>,
    /// One entry per distinct output row touched, in first-touch order.
    pub d_output: Vec<(u32, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkipGramModel {
    vocab: Vocabulary,
    dim: usize,
    d1: usize,
    d2: usize,
    input: Vec<f64>,
    output: Vec<f64>,
}

struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(vocab: &Vocabulary) -> NoiseTable {
        let mut acc = 0.0;
        let cumulative = vocab
            .iter()
            .map(|(_, _, c)| {
                acc += (c as f64).powf(NOISE_POWER);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> u32 {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        i.min(self.cumulative.len() - 1) as u32
    }
}

impl SkipGramModel {
    /// Input rows drawn uniformly from (-0.5/dim, 0.5/dim); output rows zero.
    pub fn initialize(vocab: Vocabulary, cfg: &SkipGramConfig) -> Result<SkipGramModel> {
        if cfg.dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be positive".into()));
        }
        if cfg.d1 == 0 || cfg.d1 > cfg.d2 {
            return Err(Error::InvalidArgument(format!(
                "distance band needs 1 <= d1 <= d2, got {}..{}",
                cfg.d1, cfg.d2
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = vocab.len() * cfg.dim;
        let input = (0..n)
            .map(|_| (rng.gen::<f64>() - 0.5) / cfg.dim as f64)
            .collect();
        Ok(SkipGramModel {
            vocab,
            dim: cfg.dim,
            d1: cfg.d1,
            d2: cfg.d2,
            input,
            output: vec![0.0; n],
        })
    }

    pub fn train(corpus: &Corpus, cfg: &SkipGramConfig) -> Result<SkipGramModel> {
        Self::train_ids(&corpus.id_sequences(), corpus.vocab.clone(), cfg)
    }

    pub fn train_ids(sentences: &[Vec<u32>], vocab: Vocabulary, cfg: &SkipGramConfig) -> Result<SkipGramModel> {
        let mut model = Self::initialize(vocab, cfg)?;
        let pairs: Vec<Vec<(u32, u32)>> = sentences
            .iter()
            .map(|s| extract_pairs(s, cfg.d1, cfg.d2))
            .collect();
        let per_epoch: usize = pairs.iter().map(Vec::len).sum();
        if per_epoch == 0 {
            return Err(Error::Training(format!(
                "no sentence is longer than d1 = {}; nothing to train on",
                cfg.d1
            )));
        }

        // Separate stream from initialization so init is independent of epochs.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed_5eed_5eed);
        let noise = NoiseTable::new(&model.vocab);
        let total = (per_epoch * cfg.epochs) as f64;
        let mut done = 0usize;
        let mut negs = Vec::with_capacity(cfg.negatives);
        for epoch in 0..cfg.epochs {
            for &(center, context) in pairs.iter().flatten() {
                let lr = cfg.step_size * (1.0 - done as f64 / total).max(MIN_STEP_FRACTION);
                negs.clear();
                for _ in 0..cfg.negatives {
                    let n = noise.sample(&mut rng);
                    if n != context {
                        negs.push(n);
                    }
                }
                let grad = model.pair_gradient(center, context, &negs);
                model.apply(&grad, lr);
                done += 1;
            }
            log::debug!("skip-gram epoch {} of {} done", epoch + 1, cfg.epochs);
        }
        Ok(model)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn band(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn input_row(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dim;
        &self.input[i..i + self.dim]
    }

    pub fn output_row(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dim;
        &self.output[i..i + self.dim]
    }

    pub fn input_row_mut(&mut self, id: u32) -> &mut [f64] {
        let i = id as usize * self.dim;
        &mut self.input[i..i + self.dim]
    }

    pub fn output_row_mut(&mut self, id: u32) -> &mut [f64] {
        let i = id as usize * self.dim;
        &mut self.output[i..i + self.dim]
    }

    /// -ln σ(u·v_ctx) - Σ ln σ(-u·v_neg)
    pub fn pair_loss(&self, center: u32, context: u32, negatives: &[u32]) -> f64 {
        let u = self.input_row(center);
        let pos = -sigmoid(dot(u, self.output_row(context))).ln();
        let neg: f64 = negatives
            .iter()
            .map(|&n| -sigmoid(-dot(u, self.output_row(n))).ln())
            .sum();
        pos + neg
    }

    pub fn pair_gradient(&self, center: u32, context: u32, negatives: &[u32]) -> PairGradient {
        let u = self.input_row(center);
        let mut d_input = vec![0.0; self.dim];
        let mut d_output: Vec<(u32, Vec<f64>)> = Vec::with_capacity(negatives.len() + 1);
        let targets = std::iter::once((context, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
        for (target, label) in targets {
            let v = self.output_row(target);
            // dL/d(u·v)
            let g = sigmoid(dot(u, v)) - label;
            for (d, &x) in d_input.iter_mut().zip(v) {
                *d += g * x;
            }
            let slot = match d_output.iter().position(|(id, _)| *id == target) {
                Some(i) => i,
                None => {
                    d_output.push((target, vec![0.0; self.dim]));
                    d_output.len() - 1
                }
            };
            for (d, &x) in d_output[slot].1.iter_mut().zip(u) {
                *d += g * x;
            }
        }
        PairGradient {
            center,
            d_input,
            d_output,
        }
    }

    pub fn apply(&mut self, grad: &PairGradient, lr: f64) {
        for (p, g) in self.input_row_mut(grad.center).iter_mut().zip(&grad.d_input) {
            *p -= lr * g;
        }
        for (id, dv) in &grad.d_output {
            for (p, g) in self.output_row_mut(*id).iter_mut().zip(dv) {
                *p -= lr * g;
            }
        }
    }

    fn logits(&self, center: u32) -> Vec<f64> {
        let u = self.input_row(center);
        (0..self.vocab.len() as u32)
            .map(|j| dot(u, self.output_row(j)))
            .collect()
    }

    fn lookup(&self, word: &str) -> Result<u32> {
        match self.vocab.get(word) {
            Some(id) if id != UNK_ID => Ok(id),
            _ => Err(Error::OutOfVocabulary(word.to_string())),
        }
    }

    /// Full softmax p(· | word) over the whole vocabulary.
    pub fn relatedness_dist(&self, word: &str) -> Result<Vec<f64>> {
        let id = self.lookup(word)?;
        Ok(softmax(&self.logits(id)))
    }

    /// Top-k words by p(w | word), renormalized over candidates other than
    /// the query word and UNK. Ties break toward lower ids.
    pub fn predict_topics(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let id = self.lookup(word)?;
        let logits = self.logits(id);
        let eligible: Vec<u32> = (0..self.vocab.len() as u32)
            .filter(|&j| j != id && j != UNK_ID)
            .collect();
        if eligible.is_empty() {
            return Err(Error::OutOfVocabulary(format!("no topic candidates for {word}")));
        }
        let probs = softmax(&eligible.iter().map(|&j| logits[j as usize]).collect::<Vec<_>>());
        let mut ranked: Vec<(u32, f64)> = eligible.into_iter().zip(probs).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(ranked
            .into_iter()
            .take(k)
            .map(|(j, p)| (self.vocab.word(j).to_string(), p))
            .collect())
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        binio::write_magic(w, SG_MAGIC)?;
        binio::write_u64(w, self.vocab.hash())?;
        for v in [self.vocab.len(), self.dim, self.d1, self.d2] {
            binio::write_u32(w, v as u32)?;
        }
        for &x in self.input.iter().chain(&self.output) {
            binio::write_f64(w, x)?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R, vocab: &Vocabulary) -> Result<SkipGramModel> {
        binio::expect_magic(r, SG_MAGIC, "skip-gram file")?;
        let hash = binio::read_u64(r)?;
        if hash != vocab.hash() {
            return Err(Error::VocabMismatch {
                expected: vocab.hash(),
                found: hash,
            });
        }
        let vlen = binio::read_u32(r)? as usize;
        let dim = binio::read_u32(r)? as usize;
        let d1 = binio::read_u32(r)? as usize;
        let d2 = binio::read_u32(r)? as usize;
        if vlen != vocab.len() || dim == 0 || d1 == 0 || d1 > d2 {
            return Err(Error::format("skip-gram file", "inconsistent header"));
        }
        let n = vlen * dim;
        let mut read_table = || -> Result<Vec<f64>> { (0..n).map(|_| binio::read_f64(r)).collect() };
        let input = read_table()?;
        let output = read_table()?;
        if input.iter().chain(&output).any(|x| !x.is_finite()) {
            return Err(Error::format("skip-gram file", "non-finite embedding value"));
        }
        Ok(SkipGramModel {
            vocab: vocab.clone(),
            dim,
            d1,
            d2,
            input,
            output,
        })
    }

    /// Text export of the input embeddings: `word dim1 ... dimD` per line.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        for (id, word, _) in self.vocab.iter() {
            write!(w, "{word}")?;
            for x in self.input_row(id) {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&x| (x - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest, IngestOptions};

    fn lines(text: &str) -> Corpus {
        ingest(
            text.as_bytes(),
            IngestOptions {
                min_count: 1,
                line_mode: true,
            },
        )
        .unwrap()
    }

    fn small(dim: usize, epochs: usize) -> SkipGramConfig {
        SkipGramConfig {
            dim,
            epochs,
            ..Default::default()
        }
    }

    #[test]
    fn six_tokens_give_two_pairs() {
        let ids = [1, 2, 3, 4, 5, 6];
        assert_eq!(extract_pairs(&ids, 5, 10), [(1, 6), (6, 1)]);
        assert!(extract_pairs(&ids[..5], 5, 10).is_empty());
    }

    #[test]
    fn rejects_corpus_without_pairs() {
        let c = lines("a b c\nd e");
        assert!(matches!(SkipGramModel::train(&c, &small(4, 1)), Err(Error::Training(_))));
    }

    #[test]
    fn rejects_bad_band() {
        let c = lines("a b c d e f g");
        let cfg = SkipGramConfig {
            d1: 4,
            d2: 3,
            ..small(4, 1)
        };
        assert!(SkipGramModel::train(&c, &cfg).is_err());
    }

    #[test]
    fn zero_epochs_keep_initialization() {
        let c = lines("a b c d e f g h");
        let cfg = small(8, 0);
        let trained = SkipGramModel::train(&c, &cfg).unwrap();
        let init = SkipGramModel::initialize(c.vocab.clone(), &cfg).unwrap();
        assert_eq!(trained, init);
    }

    #[test]
    fn zero_output_embeddings_give_uniform_scores() {
        let c = lines("a b c d e f g h");
        let m = SkipGramModel::initialize(c.vocab.clone(), &small(4, 0)).unwrap();
        let v = c.vocab.len();
        let topics = m.predict_topics("a", 100).unwrap();
        assert_eq!(topics.len(), v - 2);
        for (w, p) in &topics {
            assert_ne!(w, "a");
            assert!((p - 1.0 / (v - 2) as f64).abs() < 1e-12);
        }
        let dist = m.relatedness_dist("a").unwrap();
        assert!(dist.iter().all(|p| (p - 1.0 / v as f64).abs() < 1e-12));
    }

    #[test]
    fn oov_queries_fail() {
        let c = lines("a b c d e f g h");
        let m = SkipGramModel::initialize(c.vocab.clone(), &small(4, 0)).unwrap();
        assert!(matches!(m.predict_topics("zebra", 3), Err(Error::OutOfVocabulary(_))));
        assert!(m.relatedness_dist("zebra").is_err());
        assert!(m.predict_topics("a", 0).is_err());
    }

    #[test]
    fn same_seed_same_bits() {
        let c = lines("a b c d e f g h i j k\nk j i h g f e d c b a");
        let cfg = small(6, 3);
        let m1 = SkipGramModel::train(&c, &cfg).unwrap();
        let m2 = SkipGramModel::train(&c, &cfg).unwrap();
        let (mut b1, mut b2) = (Vec::new(), Vec::new());
        m1.write(&mut b1).unwrap();
        m2.write(&mut b2).unwrap();
        assert_eq!(b1, b2);
        let back = SkipGramModel::read(&mut b1.as_slice(), &c.vocab).unwrap();
        assert_eq!(back, m1);
        let other = lines("x y z");
        assert!(matches!(
            SkipGramModel::read(&mut b1.as_slice(), &other.vocab),
            Err(Error::VocabMismatch { .. })
        ));
    }

    #[test]
    fn text_export_has_one_line_per_word() {
        let c = lines("a b c d e f");
        let m = SkipGramModel::initialize(c.vocab.clone(), &small(3, 0)).unwrap();
        let mut out = Vec::new();
        m.write_text(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), c.vocab.len());
        assert_eq!(text.lines().next().unwrap().split(' ').count(), 4);
    }
}
