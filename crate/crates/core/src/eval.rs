//! Rating statistics: per-rater z-scoring, rater filtering by agreement,
//! clipped standardization, Spearman correlation with tied ranks,
//! permutation p-values and pairwise system comparison.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Read;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_MIN_CORR: f64 = 0.2;
pub const MIN_SHARED_ITEMS: usize = 3;
pub const CLIP: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Rating {
    pub item: String,
    pub rater: String,
    /// `None` for an N/A answer.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingsTable {
    pub records: Vec<Rating>,
}

impl RatingsTable {
    pub fn new(records: Vec<Rating>) -> Result<RatingsTable> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert((r.item.as_str(), r.rater.as_str())) {
                return Err(Error::Stats(format!(
                    "duplicate rating of item {:?} by rater {:?}",
                    r.item, r.rater
                )));
            }
        }
        Ok(RatingsTable { records })
    }

    /// Parses `item_id,rater_id,score` CSV with `NA` for N/A. A header row is optional.
    pub fn from_csv<R: Read>(mut reader: R) -> Result<RatingsTable> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::Encoding(e.to_string()))?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(Error::Stats(format!("line {}: expected 3 fields", i + 1)));
            }
            if i == 0 && f[0] == "item_id" {
                continue;
            }
            let score = match f[2] {
                "NA" => None,
                s => Some(
                    s.parse::<f64>()
                        .map_err(|_| Error::Stats(format!("line {}: bad score {s:?}", i + 1)))?,
                ),
            };
            records.push(Rating {
                item: f[0].to_string(),
                rater: f[1].to_string(),
                score,
            });
        }
        RatingsTable::new(records)
    }

    pub fn raters(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.rater.as_str()).collect()
    }

    fn scores_of(&self, rater: &str) -> BTreeMap<&str, f64> {
        self.records
            .iter()
            .filter(|r| r.rater == rater)
            .filter_map(|r| r.score.map(|s| (r.item.as_str(), s)))
            .collect()
    }

    /// Mean score per item over non-N/A ratings; items rated only N/A get 0.
    pub fn item_means(&self) -> BTreeMap<String, f64> {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in &self.records {
            let e = acc.entry(r.item.clone()).or_default();
            if let Some(s) = r.score {
                e.0 += s;
                e.1 += 1;
            }
        }
        acc.into_iter()
            .map(|(k, (sum, n))| (k, if n == 0 { 0.0 } else { sum / n as f64 }))
            .collect()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64], mu: f64) -> f64 {
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Replaces each rater's scores by (x - mean) / std with population std.
/// Raters without variance are dropped.
pub fn zscore_raters(t: &RatingsTable) -> Result<RatingsTable> {
    if t.records.is_empty() {
        return Err(Error::Stats("empty ratings table".into()));
    }
    let mut out = Vec::with_capacity(t.records.len());
    for rater in t.raters() {
        let scores: Vec<f64> = t.scores_of(rater).into_values().collect();
        let mu = if scores.is_empty() { 0.0 } else { mean(&scores) };
        let sd = if scores.is_empty() { 0.0 } else { population_std(&scores, mu) };
        if sd == 0.0 {
            log::warn!("dropping rater {rater}: scores have no variance");
            continue;
        }
        out.extend(t.records.iter().filter(|r| r.rater == rater).map(|r| Rating {
            item: r.item.clone(),
            rater: r.rater.clone(),
            score: r.score.map(|s| (s - mu) / sd),
        }));
    }
    Ok(RatingsTable { records: out })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilterReport {
    pub dropped: Vec<String>,
    /// Raters sharing fewer than three items with every co-rater; kept.
    pub uncheckable: Vec<String>,
}

/// Drops raters whose best Spearman correlation with any co-rater is below `min_corr`.
pub fn filter_raters(t: &RatingsTable, min_corr: f64) -> (RatingsTable, FilterReport) {
    let raters: Vec<&str> = t.raters().into_iter().collect();
    let scores: Vec<BTreeMap<&str, f64>> = raters.iter().map(|r| t.scores_of(r)).collect();
    let mut report = FilterReport::default();
    let mut keep: HashSet<&str> = HashSet::new();
    for (i, rater) in raters.iter().enumerate() {
        let mut best: Option<f64> = None;
        for (j, other) in scores.iter().enumerate() {
            if i == j {
                continue;
            }
            let (x, y): (Vec<f64>, Vec<f64>) = scores[i]
                .iter()
                .filter_map(|(item, &s)| other.get(item).map(|&o| (s, o)))
                .unzip();
            if x.len() < MIN_SHARED_ITEMS {
                continue;
            }
            if let Ok(rho) = spearman(&x, &y) {
                best = Some(best.map_or(rho, |b: f64| b.max(rho)));
            }
        }
        match best {
            None => {
                report.uncheckable.push(rater.to_string());
                keep.insert(rater);
            }
            Some(b) if b >= min_corr => {
                keep.insert(rater);
            }
            Some(_) => report.dropped.push(rater.to_string()),
        }
    }
    let records = t
        .records
        .iter()
        .filter(|r| keep.contains(r.rater.as_str()))
        .cloned()
        .collect();
    (RatingsTable { records }, report)
}

/// Standardizes to zero mean and unit (population) variance, then clamps to ±2.
pub fn clip_standardize(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::Stats("need at least two values".into()));
    }
    let mu = mean(values);
    let sd = population_std(values, mu);
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::Stats("cannot standardize a constant list".into()));
    }
    Ok(values.iter().map(|x| ((x - mu) / sd).clamp(-CLIP, CLIP)).collect())
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Stats("correlation of a constant vector".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Stats("spearman needs at least three pairs".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Stats("NaN in input".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Two-sided permutation p-value for Spearman's rho, seeded.
pub fn spearman_permutation_p(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<f64> {
    let observed = spearman(x, y)?.abs();
    let rx = average_ranks(x);
    let mut ry = average_ranks(y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..permutations {
        ry.shuffle(&mut rng);
        if pearson(&rx, &ry)?.abs() >= observed - 1e-12 {
            extreme += 1;
        }
    }
    Ok((extreme + 1) as f64 / (permutations + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub win: f64,
    pub lose: f64,
    pub tie: f64,
}

/// Percentages of items where system A's mean score is higher, lower, or equal.
pub fn pairwise_compare(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> Result<Comparison> {
    if a.is_empty() || a.len() != b.len() || a.keys().any(|k| !b.contains_key(k)) {
        return Err(Error::Stats("systems were rated on different item sets".into()));
    }
    let (mut win, mut lose, mut tie) = (0usize, 0usize, 0usize);
    for (k, va) in a {
        let vb = b[k];
        if *va > vb {
            win += 1;
        } else if *va < vb {
            lose += 1;
        } else {
            tie += 1;
        }
    }
    let n = a.len() as f64;
    Ok(Comparison {
        win: 100.0 * win as f64 / n,
        lose: 100.0 * lose as f64 / n,
        tie: 100.0 * tie as f64 / n,
    })
}
