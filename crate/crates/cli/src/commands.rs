use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use punforge_core::corpus::tokenize;
use punforge_core::eval::{self, RatingsTable};
use punforge_core::generator::{generate, Pipeline, Resources};
use punforge_core::kao::{self, SkipGramTables};
use punforge_core::surprisal::report;
use punforge_core::{
    load_wordnet, Error, InvertedIndex, NGramModel, PunOccurrence, PunPair, Result, RunConfig, Sentence,
    SkipGramModel, SurprisalReport, Token,
};

use crate::args::{
    Command, CorrelateArgs, GenerateArgs, IndexArgs, PipelineArg, ScoreArgs, TrainLmArgs, TrainSkipgramArgs,
};
use crate::io::{create, load_corpus, load_lm, load_skipgram, open, output};

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<()> {
    match cmd {
        Command::Index(a) => index(a, cfg),
        Command::TrainLm(a) => train_lm(a, cfg),
        Command::TrainSkipgram(a) => train_skipgram(a, cfg),
        Command::Score(a) => score(a, cfg),
        Command::Generate(a) => generate_cmd(a, cfg),
        Command::Correlate(a) => correlate(a, cfg),
    }
}

fn wordnet_dir(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.wordnet.as_ref().map(PathBuf::from)
}

fn index(a: &IndexArgs, cfg: &RunConfig) -> Result<()> {
    let (mut corpus, _) = load_corpus(&a.corpus, cfg)?;
    if let Some(dir) = wordnet_dir(cfg) {
        let lexicon = load_wordnet(&dir)?.tag_lexicon();
        corpus.retag(&lexicon);
    }
    let index = InvertedIndex::build(&corpus);
    let mut w = create(&a.out)?;
    corpus.write(&mut w, Some(&index))?;
    w.flush()?;

    let vocab_path = a.vocab_out.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".vocab.tsv");
        PathBuf::from(p)
    });
    let mut v = create(&vocab_path)?;
    corpus.vocab.write_tsv(&mut v)?;
    v.flush()?;
    log::info!("indexed {} terms into {}", index.term_count(), a.out.display());
    Ok(())
}

fn train_lm(a: &TrainLmArgs, cfg: &RunConfig) -> Result<()> {
    let (corpus, _) = load_corpus(&a.corpus, cfg)?;
    let lm = NGramModel::train(&corpus, cfg.order)?;
    let mut w = create(&a.out)?;
    lm.write(&mut w)?;
    w.flush()?;
    log::info!("wrote order-{} model to {}", cfg.order, a.out.display());
    Ok(())
}

fn train_skipgram(a: &TrainSkipgramArgs, cfg: &RunConfig) -> Result<()> {
    let (corpus, _) = load_corpus(&a.corpus, cfg)?;
    let sg = SkipGramModel::train(&corpus, &cfg.skipgram())?;
    let mut w = create(&a.out)?;
    sg.write(&mut w)?;
    w.flush()?;
    if let Some(path) = &a.text_out {
        let mut t = create(path)?;
        sg.write_text(&mut t)?;
        t.flush()?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct ScoreInput {
    sentence: String,
    pun_word: String,
    alt_word: String,
    #[serde(default)]
    pun_position: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ScoreOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<Value>,
    line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pun_position: Option<usize>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    report: Option<SurprisalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ambiguity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distinctiveness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn score_one(
    rec: &ScoreInput,
    lm: &NGramModel,
    sg: Option<&SkipGramModel>,
    cfg: &RunConfig,
) -> Result<(usize, SurprisalReport, Option<(f64, Option<f64>)>)> {
    let pair = PunPair::new(&rec.pun_word, &rec.alt_word)?;
    let sentence = Sentence {
        id: 0,
        tokens: tokenize(&rec.sentence).into_iter().map(Token::untagged).collect(),
    };
    let occ = match rec.pun_position {
        Some(p) => PunOccurrence::new(&sentence, p, &pair)?,
        None => PunOccurrence::first(&sentence, &pair)?,
    };
    let r = report(lm, &occ, &pair, &cfg.surprisal())?;
    let kao = match sg {
        Some(sg) => {
            let post = kao::posterior(&SkipGramTables::new(sg), &sentence, &pair)?;
            Some((kao::ambiguity(&post), kao::distinctiveness(&post).ok()))
        }
        None => None,
    };
    Ok((occ.position, r, kao))
}

fn score(a: &ScoreArgs, cfg: &RunConfig) -> Result<()> {
    let (corpus, _) = load_corpus(&a.corpus, cfg)?;
    let lm = load_lm(&a.lm, &corpus)?;
    let sg = a.skipgram.as_deref().map(|p| load_skipgram(p, &corpus)).transpose()?;

    let lines: Vec<(usize, String)> = open(&a.input)?
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .collect::<std::io::Result<_>>()?;
    let outputs: Vec<ScoreOutput> = lines
        .par_iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let parsed: std::result::Result<ScoreInput, String> =
                serde_json::from_str(l).map_err(|e| format!("malformed record: {e}"));
            let id = serde_json::from_str::<Value>(l).ok().and_then(|v| v.get("id").cloned());
            let mut out = ScoreOutput {
                id,
                line: *n,
                pun_position: None,
                report: None,
                ambiguity: None,
                distinctiveness: None,
                error: None,
            };
            match parsed.and_then(|rec| score_one(&rec, &lm, sg.as_ref(), cfg).map_err(|e| e.to_string())) {
                Ok((pos, r, kao)) => {
                    out.pun_position = Some(pos);
                    out.report = Some(r);
                    if let Some((amb, dist)) = kao {
                        out.ambiguity = Some(amb);
                        out.distinctiveness = dist;
                    }
                }
                Err(e) => {
                    log::warn!("line {n}: {e}");
                    out.error = Some(e);
                }
            }
            out
        })
        .collect();

    let mut w = output(a.out.as_deref())?;
    for o in outputs {
        writeln!(w, "{}", json(&o))?;
    }
    w.flush()?;
    Ok(())
}

fn read_pairs(path: &Path) -> Result<Vec<(usize, std::result::Result<PunPair, String>)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let pair = match line.split('\t').collect::<Vec<_>>()[..] {
            [p, a] => PunPair::new(p, a).map_err(|e| e.to_string()),
            _ => Err("expected pun_word<TAB>alt_word".to_string()),
        };
        out.push((i + 1, pair));
    }
    Ok(out)
}

#[derive(Serialize)]
struct PairError<'a> {
    line: usize,
    error: &'a str,
}

fn generate_cmd(a: &GenerateArgs, cfg: &RunConfig) -> Result<()> {
    let dir = wordnet_dir(cfg)
        .ok_or_else(|| Error::InvalidArgument("a WordNet directory is required (--wordnet or PUNGEN_WORDNET)".into()))?;
    let wordnet = load_wordnet(&dir)?;
    let lexicon = wordnet.tag_lexicon();
    let (corpus, index) = load_corpus(&a.corpus, cfg)?;
    let index = index.unwrap_or_else(|| InvertedIndex::build(&corpus));
    let lm = load_lm(&a.lm, &corpus)?;
    let sg = load_skipgram(&a.skipgram, &corpus)?;
    let pairs = read_pairs(&a.pairs)?;

    let res = Resources {
        corpus: &corpus,
        index: &index,
        lm: &lm,
        skipgram: &sg,
        wordnet: &wordnet,
        lexicon: &lexicon,
    };
    res.check()?;
    let pipeline = match a.pipeline {
        PipelineArg::Swap => Pipeline::RetrieveSwap,
        PipelineArg::SwapTopic => Pipeline::RetrieveSwapTopic,
    };
    let gen_cfg = cfg.generator(pipeline);
    let version = wordnet.version();

    let blocks: Vec<Vec<String>> = pairs
        .par_iter()
        .map(|(line, pair)| {
            let pair = match pair {
                Ok(p) => p,
                Err(e) => return vec![json(&PairError { line: *line, error: e })],
            };
            match generate(pair, &res, &gen_cfg) {
                Ok(out) => {
                    let mut lines: Vec<String> = out.records(version).iter().map(|r| json(r)).collect();
                    lines.extend(out.failure_record(version).as_ref().map(|f| json(f)));
                    lines
                }
                Err(e) => {
                    log::warn!("pair on line {line}: {e}");
                    vec![json(&PairError {
                        line: *line,
                        error: &e.to_string(),
                    })]
                }
            }
        })
        .collect();

    let mut w = output(a.out.as_deref())?;
    for line in blocks.iter().flatten() {
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records serialize")
}

/// Numeric fields of each JSON-lines record keyed by its `id`.
fn read_metric_scores(path: &Path) -> Result<BTreeMap<String, BTreeMap<String, f64>>> {
    let mut out = BTreeMap::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: &str| Error::InvalidArgument(format!("{}:{}: {m}", path.display(), i + 1));
        let v: Value = serde_json::from_str(&line).map_err(|e| bad(&e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| bad("expected a JSON object"))?;
        let id = match obj.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => continue,
        };
        let metrics = obj
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "id" | "line" | "pun_position"))
            .filter_map(|(k, v)| v.as_f64().map(|x| (k.clone(), x)))
            .collect();
        out.insert(id, metrics);
    }
    Ok(out)
}

const METRIC_ORDER: [&str; 6] = ["s_local", "s_global", "s_ratio", "unusualness", "ambiguity", "distinctiveness"];

fn correlate(a: &CorrelateArgs, cfg: &RunConfig) -> Result<()> {
    let table = RatingsTable::from_csv(open(&a.ratings)?)?;
    let (filtered, report) = eval::filter_raters(&table, cfg.min_corr);
    for r in &report.dropped {
        log::info!("dropped rater {r}: low agreement");
    }
    for r in &report.uncheckable {
        log::warn!("rater {r} shares fewer than {} items with every co-rater", eval::MIN_SHARED_ITEMS);
    }
    let funniness = eval::zscore_raters(&filtered)?.item_means();
    let scores = read_metric_scores(&a.scores)?;

    let mut names: Vec<String> = METRIC_ORDER
        .iter()
        .filter(|m| scores.values().any(|s| s.contains_key(**m)))
        .map(|m| m.to_string())
        .collect();
    let mut extra: Vec<String> = scores
        .values()
        .flat_map(|s| s.keys())
        .filter(|k| !METRIC_ORDER.contains(&k.as_str()))
        .cloned()
        .collect();
    extra.sort();
    extra.dedup();
    names.extend(extra);

    let mut w = output(a.out.as_deref())?;
    writeln!(w, "metric\tn\tspearman\tp_value")?;
    for name in names {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (id, metrics) in &scores {
            if let (Some(&m), Some(&f)) = (metrics.get(&name), funniness.get(id)) {
                x.push(m);
                y.push(f);
            }
        }
        if a.clip {
            match eval::clip_standardize(&x) {
                Ok(c) => x = c,
                Err(e) => {
                    writeln!(w, "{name}\t{}\tNA\tNA", x.len())?;
                    log::warn!("{name}: {e}");
                    continue;
                }
            }
        }
        match eval::spearman(&x, &y).and_then(|rho| {
            eval::spearman_permutation_p(&x, &y, cfg.permutations, cfg.seed).map(|p| (rho, p))
        }) {
            Ok((rho, p)) => writeln!(w, "{name}\t{}\t{rho:.4}\t{p:.4}", x.len())?,
            Err(e) => {
                log::warn!("{name}: {e}");
                writeln!(w, "{name}\t{}\tNA\tNA", x.len())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
