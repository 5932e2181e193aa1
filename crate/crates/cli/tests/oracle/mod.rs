//! Independent reference computations. Nothing here calls into the library
//! code under test except for plain data accessors.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use punforge_core::wordnet::{SynsetGraph, SynsetId, WnPos};

/// Direct interpolated modified Kneser-Ney, recomputed from raw windows on
/// every query.
pub struct KnReference {
    order: usize,
    v: usize,
    /// adjusted[k-1]: k-gram -> adjusted count
    adjusted: Vec<BTreeMap<Vec<u32>, u64>>,
    discounts: Vec<[f64; 3]>,
}

impl KnReference {
    pub fn new(sentences: &[Vec<u32>], v: usize, order: usize) -> KnReference {
        let (bos, eos) = (v as u32, v as u32 + 1);
        let padded: Vec<Vec<u32>> = sentences
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| {
                let mut p = vec![bos];
                p.extend(s);
                p.push(eos);
                p
            })
            .collect();

        let windows = |k: usize| -> Vec<Vec<u32>> {
            let mut out = Vec::new();
            for p in &padded {
                if p.len() < k {
                    continue;
                }
                for start in 0..=p.len() - k {
                    let w = p[start..start + k].to_vec();
                    // a lone <s> is never predicted
                    if k == 1 && w[0] == bos {
                        continue;
                    }
                    out.push(w);
                }
            }
            out
        };

        let mut adjusted = Vec::new();
        for k in 1..=order {
            let mut raw: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
            for w in windows(k) {
                *raw.entry(w).or_insert(0) += 1;
            }
            if k == order {
                adjusted.push(raw);
                continue;
            }
            let mut left: BTreeMap<Vec<u32>, BTreeSet<u32>> = BTreeMap::new();
            for w in windows(k + 1) {
                left.entry(w[1..].to_vec()).or_default().insert(w[0]);
            }
            let adj = raw
                .into_iter()
                .map(|(g, c)| {
                    let a = if g[0] == bos { c } else { left.get(&g).map_or(0, |s| s.len() as u64) };
                    (g, a)
                })
                .collect();
            adjusted.push(adj);
        }

        let discounts = adjusted
            .iter()
            .map(|table| {
                let nc = |c: u64| table.values().filter(|&&a| a == c).count() as f64;
                let (n1, n2, n3, n4) = (nc(1), nc(2), nc(3), nc(4));
                if n1 == 0.0 || n2 == 0.0 || n3 == 0.0 {
                    return [0.75; 3];
                }
                let y = n1 / (n1 + 2.0 * n2);
                let ns = [n1, n2, n3, n4];
                let mut d = [0.0; 3];
                for c in 1..=3usize {
                    d[c - 1] = c as f64 - (c + 1) as f64 * y * ns[c] / ns[c - 1];
                }
                if (1..=3).all(|c| d[c - 1] > 0.0 && d[c - 1] < c as f64) {
                    d
                } else {
                    [0.75; 3]
                }
            })
            .collect();

        KnReference {
            order,
            v,
            adjusted,
            discounts,
        }
    }

    pub fn discounts(&self, k: usize) -> [f64; 3] {
        self.discounts[k - 1]
    }

    fn d(&self, k: usize, c: u64) -> f64 {
        match c {
            0 => 0.0,
            1 => self.discounts[k - 1][0],
            2 => self.discounts[k - 1][1],
            _ => self.discounts[k - 1][2],
        }
    }

    pub fn prob(&self, history: &[u32], w: u32) -> f64 {
        let h = &history[history.len().saturating_sub(self.order - 1)..];
        self.interp(h, w)
    }

    fn interp(&self, h: &[u32], w: u32) -> f64 {
        let k = h.len() + 1;
        let mut total = 0u64;
        let mut nn = [0u64; 3];
        let mut c_hw = 0u64;
        for (g, &a) in &self.adjusted[k - 1] {
            if &g[..k - 1] != h {
                continue;
            }
            total += a;
            nn[(a.min(3) - 1) as usize] += 1;
            if g[k - 1] == w {
                c_hw = a;
            }
        }
        let lower = if k == 1 {
            1.0 / (self.v + 1) as f64
        } else {
            self.interp(&h[1..], w)
        };
        if total == 0 {
            return lower;
        }
        let gamma = (0..3).map(|j| self.discounts[k - 1][j] * nn[j] as f64).sum::<f64>() / total as f64;
        (c_hw as f64 - self.d(k, c_hw)).max(0.0) / total as f64 + gamma * lower
    }
}

/// Every (center, context) pair with distance in `d1..=d2`, sorted.
pub fn brute_pairs(ids: &[u32], d1: usize, d2: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for i in 0..ids.len() {
        for j in 0..ids.len() {
            let dist = i.abs_diff(j);
            if dist >= d1 && dist <= d2 {
                out.push((ids[i], ids[j]));
            }
        }
    }
    out.sort_unstable();
    out
}

pub struct KaoEnumeration {
    pub p_pun: f64,
    pub f_pun: Vec<f64>,
    pub f_alt: Vec<f64>,
    /// KL(P(f|pun) || P(f|alt)) + KL(P(f|alt) || P(f|pun)) over all 2^n assignments.
    pub joint_sym_kl: f64,
}

/// Sums the joint P(z, f, x) over every meaning and assignment vector.
pub fn kao_enumerate(unigram: &[f64], rel_pun: &[f64], rel_alt: &[f64]) -> KaoEnumeration {
    let n = unigram.len();
    let joint = |rel: &[f64], f: usize| -> f64 {
        let mut p = 0.5;
        for i in 0..n {
            let word = if f >> i & 1 == 1 { rel[i] } else { unigram[i] };
            p *= 0.5 * word;
        }
        p
    };
    let outcomes = 1usize << n;
    let jp: Vec<f64> = (0..outcomes).map(|f| joint(rel_pun, f)).collect();
    let ja: Vec<f64> = (0..outcomes).map(|f| joint(rel_alt, f)).collect();
    let (zp, za): (f64, f64) = (jp.iter().sum(), ja.iter().sum());
    let marginal = |j: &[f64], z: f64, i: usize| {
        (0..outcomes).filter(|f| f >> i & 1 == 1).map(|f| j[f]).sum::<f64>() / z
    };
    let mut kl = 0.0;
    for f in 0..outcomes {
        let (p, q) = (jp[f] / zp, ja[f] / za);
        kl += p * (p / q).ln() + q * (q / p).ln();
    }
    KaoEnumeration {
        p_pun: zp / (zp + za),
        f_pun: (0..n).map(|i| marginal(&jp, zp, i)).collect(),
        f_alt: (0..n).map(|i| marginal(&ja, za, i)).collect(),
        joint_sym_kl: kl,
    }
}

/// All-pairs shortest paths with unit weights; `usize::MAX` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Shortest undirected hypernym distance, with one virtual root per part of
/// speech above every synset that has no hypernym.
pub fn hypernym_bfs(g: &SynsetGraph, a: SynsetId, b: SynsetId) -> Option<usize> {
    let n = g.len();
    let root = |pos: WnPos| match pos {
        WnPos::Noun => n,
        WnPos::Verb => n + 1,
    };
    let mut adj = vec![Vec::new(); n + 2];
    for i in 0..n {
        let id = SynsetId(i as u32);
        let mut any = false;
        for h in g.hypernyms(id) {
            adj[i].push(h.0 as usize);
            adj[h.0 as usize].push(i);
            any = true;
        }
        if !any {
            let r = root(g.synset(id).pos);
            adj[i].push(r);
            adj[r].push(i);
        }
    }
    let mut dist = vec![usize::MAX; n + 2];
    let mut q = VecDeque::from([a.0 as usize]);
    dist[a.0 as usize] = 0;
    while let Some(x) = q.pop_front() {
        if x == b.0 as usize {
            return Some(dist[x]);
        }
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    None
}

/// Average ranks by counting: rank_i = #{x_j < x_i} + (#{x_j = x_i} + 1) / 2.
pub fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let less = x.iter().filter(|&&xj| xj < xi).count() as f64;
            let equal = x.iter().filter(|&&xj| xj == xi).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn textbook_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}

pub fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
    textbook_pearson(&brute_ranks(x), &brute_ranks(y))
}
