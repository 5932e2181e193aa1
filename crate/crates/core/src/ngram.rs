//! Interpolated modified Kneser-Ney n-gram language model.
//!
//! Adjusted counts follow the usual convention: the highest order uses raw
//! counts, lower orders use the number of distinct left extensions, except
//! for n-grams starting with `<s>` which keep raw counts because nothing can
//! precede the sentence start. Three discounts per order are estimated from
//! counts-of-counts of the adjusted counts.
//!
//! After training the interpolated estimates are folded into backoff form:
//! every observed n-gram stores its full probability and every observed
//! context stores its backoff weight, so a query walks down at most `order`
//! tables.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::binio;
use crate::corpus::{Corpus, Vocabulary};
use crate::error::{Error, Result};

const LM_MAGIC: &[u8; 4] = b"PGLM";
pub const MAX_ORDER: usize = 6;
pub const FALLBACK_DISCOUNT: f64 = 0.75;

/// Anything that can assign conditional log-probabilities over vocabulary ids.
///
/// Ids beyond the vocabulary are reserved for the begin and end markers.
pub trait LanguageModel {
    fn vocab(&self) -> &Vocabulary;

    /// Longest history the model conditions on.
    fn max_history(&self) -> usize;

    fn bos(&self) -> u32;

    fn eos(&self) -> u32;

    /// Natural-log probability of `word` after `history` (oldest first).
    fn logprob(&self, history: &[u32], word: u32) -> f64;

    /// Add-one smoothed unigram log-probability from corpus frequencies.
    fn unigram_logprob(&self, word: u32) -> f64 {
        let vocab = self.vocab();
        let n = vocab.total() as f64;
        ((vocab.count(word) + 1) as f64 / (n + vocab.len() as f64)).ln()
    }

    /// Sum of per-token log-probabilities with histories clipped at the
    /// sequence start. With `markers`, `<s>` is prepended and `</s>` scored.
    fn logprob_seq(&self, tokens: &[u32], markers: bool) -> f64 {
        let mut seq = Vec::with_capacity(tokens.len() + 2);
        if markers {
            seq.push(self.bos());
        }
        seq.extend_from_slice(tokens);
        if markers {
            seq.push(self.eos());
        }
        let first = usize::from(markers);
        let h = self.max_history();
        (first..seq.len())
            .map(|i| self.logprob(&seq[i.saturating_sub(h)..i], seq[i]))
            .sum()
    }

    fn ids(&self, words: &[&str]) -> Vec<u32> {
        self.vocab().ids(words)
    }
}

#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    vocab: Vocabulary,
    /// `discounts[k-1]` holds (D1, D2, D3+) for order k.
    discounts: Vec<[f64; 3]>,
    /// `probs[k-1]` maps observed k-grams to their interpolated probability.
    probs: Vec<HashMap<Box<[u32]>, f64>>,
    /// `backoffs[k-1]` maps observed (k-1)-token contexts to their weight; entry 0 is unused.
    backoffs: Vec<HashMap<Box<[u32]>, f64>>,
    /// Mass the unigram level hands to the uniform distribution.
    unigram_gamma: f64,
}

#[derive(Debug, Default, Clone, Copy)]
struct ContextStats {
    total: u64,
    n1: u64,
    n2: u64,
    n3: u64,
}

fn estimate_discounts(adjusted: &HashMap<Vec<u32>, u64>) -> [f64; 3] {
    let mut n = [0u64; 5];
    for &c in adjusted.values() {
        if (1..=4).contains(&c) {
            n[c as usize] += 1;
        }
    }
    let (n1, n2, n3, n4) = (n[1] as f64, n[2] as f64, n[3] as f64, n[4] as f64);
    if n1 == 0.0 || n2 == 0.0 || n3 == 0.0 {
        return [FALLBACK_DISCOUNT; 3];
    }
    let y = n1 / (n1 + 2.0 * n2);
    let d = [
        1.0 - 2.0 * y * n2 / n1,
        2.0 - 3.0 * y * n3 / n2,
        3.0 - 4.0 * y * n4 / n3,
    ];
    let valid = d.iter().enumerate().all(|(i, &di)| di > 0.0 && di < (i + 1) as f64);
    if valid {
        d
    } else {
        [FALLBACK_DISCOUNT; 3]
    }
}

fn discount_for(d: &[f64; 3], count: u64) -> f64 {
    match count {
        0 => 0.0,
        1 => d[0],
        2 => d[1],
        _ => d[2],
    }
}

impl NGramModel {
    pub fn train(corpus: &Corpus, order: usize) -> Result<NGramModel> {
        Self::train_ids(&corpus.id_sequences(), corpus.vocab.clone(), order)
    }

    /// Trains on sentences already mapped to ids of `vocab`.
    pub fn train_ids(sentences: &[Vec<u32>], vocab: Vocabulary, order: usize) -> Result<NGramModel> {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "order must be in 2..={MAX_ORDER}, got {order}"
            )));
        }
        let tokens: usize = sentences.iter().map(Vec::len).sum();
        if tokens < order {
            return Err(Error::Training(format!(
                "corpus has {tokens} tokens, fewer than order {order}"
            )));
        }
        let v = vocab.len() as u32;
        let (bos, eos) = (v, v + 1);
        if let Some(bad) = sentences.iter().flatten().find(|&&id| id >= v) {
            return Err(Error::InvalidArgument(format!("token id {bad} outside vocabulary")));
        }

        // raw[k-1]: counts of k-grams ending at a non-<s> position
        let mut raw: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            let mut seq = Vec::with_capacity(s.len() + 2);
            seq.push(bos);
            seq.extend_from_slice(s);
            seq.push(eos);
            for end in 1..seq.len() {
                for k in 1..=order.min(end + 1) {
                    *raw[k - 1].entry(seq[end + 1 - k..=end].to_vec()).or_default() += 1;
                }
            }
        }

        let mut adjusted: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        adjusted[order - 1] = raw[order - 1].clone();
        for k in (1..order).rev() {
            let mut ext: HashMap<&[u32], u64> = HashMap::new();
            for longer in raw[k].keys() {
                *ext.entry(&longer[1..]).or_default() += 1;
            }
            for (g, &c) in &raw[k - 1] {
                let a = if g[0] == bos {
                    c
                } else {
                    ext.get(g.as_slice()).copied().unwrap_or(0)
                };
                adjusted[k - 1].insert(g.clone(), a);
            }
        }

        let discounts: Vec<[f64; 3]> = adjusted.iter().map(estimate_discounts).collect();

        let mut ctx_stats: Vec<HashMap<Vec<u32>, ContextStats>> = vec![HashMap::new(); order];
        for (k, table) in adjusted.iter().enumerate() {
            for (g, &a) in table {
                let st = ctx_stats[k].entry(g[..g.len() - 1].to_vec()).or_default();
                st.total += a;
                match a {
                    0 => {}
                    1 => st.n1 += 1,
                    2 => st.n2 += 1,
                    _ => st.n3 += 1,
                }
            }
        }

        let gamma = |d: &[f64; 3], st: &ContextStats| {
            (d[0] * st.n1 as f64 + d[1] * st.n2 as f64 + d[2] * st.n3 as f64) / st.total as f64
        };

        let mut model = NGramModel {
            order,
            vocab,
            discounts: discounts.clone(),
            probs: vec![HashMap::new(); order],
            backoffs: vec![HashMap::new(); order],
            unigram_gamma: 0.0,
        };

        let root = ctx_stats[0].get(&Vec::new()).copied().unwrap_or_default();
        model.unigram_gamma = gamma(&discounts[0], &root);
        let uniform = model.unigram_gamma / model.predict_size() as f64;
        for (g, &a) in &adjusted[0] {
            let p = (a as f64 - discount_for(&discounts[0], a)).max(0.0) / root.total as f64 + uniform;
            model.probs[0].insert(g.clone().into_boxed_slice(), p);
        }

        for k in 2..=order {
            let d = discounts[k - 1];
            let mut backoffs = HashMap::new();
            for (h, st) in &ctx_stats[k - 1] {
                if st.total > 0 {
                    backoffs.insert(h.clone().into_boxed_slice(), gamma(&d, st));
                }
            }
            let mut probs = HashMap::new();
            for (g, &a) in &adjusted[k - 1] {
                let h = &g[..k - 1];
                let st = &ctx_stats[k - 1][h];
                let lower = model.prob(&g[1..k - 1], g[k - 1]);
                let p = (a as f64 - discount_for(&d, a)).max(0.0) / st.total as f64
                    + backoffs[h] * lower;
                probs.insert(g.clone().into_boxed_slice(), p);
            }
            model.probs[k - 1] = probs;
            model.backoffs[k - 1] = backoffs;
        }
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of predictable symbols: the vocabulary (with UNK) plus `</s>`.
    pub fn predict_size(&self) -> usize {
        self.vocab.len() + 1
    }

    /// Ids that carry probability mass: every vocabulary id and `</s>`.
    pub fn predictable(&self) -> impl Iterator<Item = u32> {
        let eos = self.eos();
        (0..self.vocab.len() as u32).chain(std::iter::once(eos))
    }

    pub fn discounts(&self, order: usize) -> [f64; 3] {
        self.discounts[order - 1]
    }

    /// Backoff weight of an observed context, `None` for unseen contexts.
    pub fn backoff_weight(&self, context: &[u32]) -> Option<f64> {
        if context.is_empty() {
            return Some(self.unigram_gamma);
        }
        self.backoffs.get(context.len())?.get(context).copied()
    }

    /// p(word | history); the history is clipped to the last `order - 1` ids.
    pub fn prob(&self, history: &[u32], word: u32) -> f64 {
        let history = &history[history.len().saturating_sub(self.order - 1)..];
        if history.is_empty() {
            return self.probs[0]
                .get(&[word][..])
                .copied()
                .unwrap_or(self.unigram_gamma / self.predict_size() as f64);
        }
        let k = history.len() + 1;
        let mut key = [0u32; MAX_ORDER];
        key[..k - 1].copy_from_slice(history);
        key[k - 1] = word;
        if let Some(&p) = self.probs[k - 1].get(&key[..k]) {
            return p;
        }
        let lower = self.prob(&history[1..], word);
        match self.backoffs[k - 1].get(history) {
            Some(&g) => g * lower,
            None => lower,
        }
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        binio::write_magic(w, LM_MAGIC)?;
        binio::write_u32(w, self.order as u32)?;
        binio::write_u64(w, self.vocab.hash())?;
        binio::write_u32(w, self.vocab.len() as u32)?;
        binio::write_f64(w, self.unigram_gamma)?;
        for k in 1..=self.order {
            for &d in &self.discounts[k - 1] {
                binio::write_f64(w, d)?;
            }
            for table in [&self.probs[k - 1], &self.backoffs[k - 1]] {
                let mut entries: Vec<_> = table.iter().collect();
                entries.sort_by(|a, b| a.0.cmp(b.0));
                binio::write_u32(w, entries.len() as u32)?;
                for (ids, &p) in entries {
                    binio::write_ids(w, ids)?;
                    binio::write_f64(w, p)?;
                }
            }
        }
        Ok(())
    }

    /// Loads a model, refusing it unless it was trained against `vocab`.
    pub fn read<R: Read>(r: &mut R, vocab: &Vocabulary) -> Result<NGramModel> {
        binio::expect_magic(r, LM_MAGIC, "language model file")?;
        let order = binio::read_u32(r)? as usize;
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(Error::format("language model file", format!("bad order {order}")));
        }
        let hash = binio::read_u64(r)?;
        if hash != vocab.hash() {
            return Err(Error::VocabMismatch {
                expected: vocab.hash(),
                found: hash,
            });
        }
        let vlen = binio::read_u32(r)? as usize;
        if vlen != vocab.len() {
            return Err(Error::format("language model file", "vocabulary size differs"));
        }
        let unigram_gamma = binio::read_f64(r)?;
        let mut discounts = Vec::with_capacity(order);
        let mut probs = Vec::with_capacity(order);
        let mut backoffs = Vec::with_capacity(order);
        for k in 1..=order {
            discounts.push([binio::read_f64(r)?, binio::read_f64(r)?, binio::read_f64(r)?]);
            for (len, out) in [(k, &mut probs), (k - 1, &mut backoffs)] {
                let n = binio::read_u32(r)? as usize;
                let mut table = HashMap::with_capacity(n);
                for _ in 0..n {
                    let ids = binio::read_ids(r, len)?;
                    table.insert(ids.into_boxed_slice(), binio::read_f64(r)?);
                }
                out.push(table);
            }
        }
        Ok(NGramModel {
            order,
            vocab: vocab.clone(),
            discounts,
            probs,
            backoffs,
            unigram_gamma,
        })
    }
}

impl LanguageModel for NGramModel {
    fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn max_history(&self) -> usize {
        self.order - 1
    }

    fn bos(&self) -> u32 {
        self.vocab.len() as u32
    }

    fn eos(&self) -> u32 {
        self.vocab.len() as u32 + 1
    }

    fn logprob(&self, history: &[u32], word: u32) -> f64 {
        self.prob(history, word).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest, IngestOptions};

    fn corpus(lines: &str) -> Corpus {
        ingest(
            lines.as_bytes(),
            IngestOptions {
                min_count: 1,
                line_mode: true,
            },
        )
        .unwrap()
    }

    fn total_mass(m: &NGramModel, hist: &[u32]) -> f64 {
        m.predictable().map(|w| m.prob(hist, w)).sum()
    }

    #[test]
    fn prefers_the_frequent_continuation() {
        let c = corpus("a b\na b\na c");
        let m = NGramModel::train(&c, 2).unwrap();
        let [a, b, cc] = [c.vocab.id("a"), c.vocab.id("b"), c.vocab.id("c")];
        assert!(m.prob(&[a], b) > m.prob(&[a], cc));
        assert!((total_mass(&m, &[a]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_continuation_is_maximal() {
        let c = corpus("a a a a");
        let m = NGramModel::train(&c, 2).unwrap();
        let a = c.vocab.id("a");
        let best = m.predictable().max_by(|&x, &y| m.prob(&[a], x).total_cmp(&m.prob(&[a], y)));
        assert_eq!(best, Some(a));
    }

    #[test]
    fn degenerate_counts_fall_back() {
        let c = corpus("a a a a");
        let m = NGramModel::train(&c, 2).unwrap();
        assert_eq!(m.discounts(2), [FALLBACK_DISCOUNT; 3]);
    }

    #[test]
    fn rejects_bad_orders_and_tiny_corpora() {
        let c = corpus("a b");
        assert!(matches!(NGramModel::train(&c, 3), Err(Error::Training(_))));
        assert!(matches!(NGramModel::train(&c, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(NGramModel::train(&c, 7), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn single_token_sequence_uses_unigram_level() {
        let c = corpus("a b\na b\na c");
        let m = NGramModel::train(&c, 3).unwrap();
        let b = c.vocab.id("b");
        assert_eq!(m.logprob_seq(&[b], false), m.prob(&[], b).ln());
    }

    #[test]
    fn order_matters() {
        let c = corpus("a b c\na b c\nc a");
        let m = NGramModel::train(&c, 2).unwrap();
        let ids = c.vocab.ids(&["a", "b", "c"]);
        let rev: Vec<u32> = ids.iter().rev().copied().collect();
        assert!((m.logprob_seq(&ids, true) - m.logprob_seq(&rev, true)).abs() > 1e-3);
        assert_eq!(m.logprob_seq(&ids, true), m.logprob_seq(&ids, true));
    }

    #[test]
    fn add_one_unigram() {
        // 10 tokens, |V| = 5 including UNK
        let c = corpus("a a b b b\nc c d d d");
        let m = NGramModel::train(&c, 2).unwrap();
        assert_eq!(c.vocab.len(), 5);
        let a = c.vocab.id("a");
        assert!((m.unigram_logprob(a) - (3.0f64 / 15.0).ln()).abs() < 1e-12);
        assert!((m.unigram_logprob(0) - (1.0f64 / 15.0).ln()).abs() < 1e-12);
        let mass: f64 = (0..5).map(|w| m.unigram_logprob(w).exp()).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn more_evidence_never_lowers_the_estimate() {
        let base = "a b\na c\nb c a\nc b";
        let m1 = NGramModel::train(&corpus(base), 2).unwrap();
        let c2 = corpus(&format!("{base}\na b"));
        let m2 = NGramModel::train(&c2, 2).unwrap();
        let c1 = corpus(base);
        let p1 = m1.prob(&[c1.vocab.id("a")], c1.vocab.id("b"));
        let p2 = m2.prob(&[c2.vocab.id("a")], c2.vocab.id("b"));
        assert!(p2 >= p1, "{p2} < {p1}");
    }

    #[test]
    fn persisted_model_round_trips() {
        let c = corpus("the hare ran fast\nthe hair was cut\na hare and a hair");
        let m = NGramModel::train(&c, 3).unwrap();
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let back = NGramModel::read(&mut buf.as_slice(), &c.vocab).unwrap();
        let ids = c.vocab.ids(&["the", "hare", "was", "cut"]);
        assert_eq!(back.logprob_seq(&ids, true), m.logprob_seq(&ids, true));

        let mut again = Vec::new();
        back.write(&mut again).unwrap();
        assert_eq!(buf, again);

        let other = corpus("something else entirely");
        assert!(matches!(
            NGramModel::read(&mut buf.as_slice(), &other.vocab),
            Err(Error::VocabMismatch { .. })
        ));
    }
}
