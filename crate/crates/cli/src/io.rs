use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use punforge_core::corpus::{ingest, ingest_tagged};
use punforge_core::{Corpus, IngestOptions, InvertedIndex, NGramModel, Result, RunConfig, SkipGramModel};

use crate::args::CorpusArgs;

const CORPUS_MAGIC: &[u8; 4] = b"PGC1";

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

/// A file when given, standard output otherwise.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Loads a binary corpus (with its index, if present) or ingests text.
pub fn load_corpus(args: &CorpusArgs, cfg: &RunConfig) -> Result<(Corpus, Option<InvertedIndex>)> {
    let mut bytes = Vec::new();
    open(&args.corpus)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(CORPUS_MAGIC) {
        log::info!("reading binary corpus {}", args.corpus.display());
        return Corpus::read(&mut bytes.as_slice());
    }
    log::info!("ingesting text corpus {}", args.corpus.display());
    let corpus = if args.tagged {
        ingest_tagged(bytes.as_slice(), cfg.min_count)?
    } else {
        ingest(
            bytes.as_slice(),
            IngestOptions {
                min_count: cfg.min_count,
                line_mode: args.line_mode,
            },
        )?
    };
    log::info!(
        "{} sentences, {} tokens, {} types",
        corpus.sentences.len(),
        corpus.token_count(),
        corpus.vocab.len()
    );
    Ok((corpus, None))
}

pub fn load_lm(path: &Path, corpus: &Corpus) -> Result<NGramModel> {
    NGramModel::read(&mut open(path)?, &corpus.vocab)
}

pub fn load_skipgram(path: &Path, corpus: &Corpus) -> Result<SkipGramModel> {
    SkipGramModel::read(&mut open(path)?, &corpus.vocab)
}
