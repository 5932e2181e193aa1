//! Sentence splitting, tokenization, lexicon tagging and vocabulary construction.
//!
//! Every downstream model (n-gram LM, skip-gram, index) keys on the ids
//! assigned here, so the normal form is fixed: text is lowercased, every
//! punctuation character becomes its own token, and apostrophes or hyphens
//! survive only between two alphanumeric characters.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::binio;
use crate::error::{Error, Result};
use crate::retrieval::InvertedIndex;

pub const UNK: &str = "<unk>";
pub const UNK_ID: u32 = 0;

const CORPUS_MAGIC: &[u8; 4] = b"PGC1";
pub(crate) const INDEX_MAGIC: &[u8; 4] = b"PGIX";

/// Closed-class pronouns. These map to `person.n.01` during type checks.
pub const PRONOUNS: [&str; 23] = [
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "myself",
    "yourself", "himself", "herself", "itself", "ourselves", "themselves", "someone", "anyone",
    "everyone", "nobody",
];

/// Function words that never count as content words and are never tagged as nouns.
pub const STOPWORDS: [&str; 50] = [
    "the", "a", "an", "and", "or", "but", "if", "of", "to", "in", "on", "at", "by", "for", "with",
    "from", "as", "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had",
    "do", "does", "did", "not", "no", "so", "that", "this", "these", "those", "there", "then",
    "than", "too", "very", "can", "will", "just", "my", "your", "his", "its",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Pronoun,
    Verb,
    Other,
    Unknown,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Pronoun => "PRONOUN",
            Pos::Verb => "VERB",
            Pos::Other => "OTHER",
            Pos::Unknown => "UNKNOWN",
        }
    }

    fn code(self) -> u8 {
        match self {
            Pos::Noun => 0,
            Pos::Pronoun => 1,
            Pos::Verb => 2,
            Pos::Other => 3,
            Pos::Unknown => 4,
        }
    }

    fn from_code(code: u8) -> Option<Pos> {
        Some(match code {
            0 => Pos::Noun,
            1 => Pos::Pronoun,
            2 => Pos::Verb,
            3 => Pos::Other,
            4 => Pos::Unknown,
            _ => return None,
        })
    }

    pub fn is_nominal(self) -> bool {
        matches!(self, Pos::Noun | Pos::Pronoun)
    }
}

impl std::str::FromStr for Pos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pos> {
        Ok(match s {
            "NOUN" => Pos::Noun,
            "PRONOUN" => Pos::Pronoun,
            "VERB" => Pos::Verb,
            "OTHER" => Pos::Other,
            "UNKNOWN" => Pos::Unknown,
            _ => return Err(Error::InvalidArgument(format!("unknown tag {s:?}"))),
        })
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub pos: Pos,
}

impl Token {
    /// Builds a token, lowercasing the surface. Fails on empty or whitespace-bearing input.
    pub fn new(surface: &str, pos: Pos) -> Result<Token> {
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("bad token surface {surface:?}")));
        }
        Ok(Token {
            surface: surface.to_lowercase(),
            pos,
        })
    }

    /// Wraps an already-lowercased surface form with tag UNKNOWN.
    pub fn untagged(surface: String) -> Token {
        Token {
            surface,
            pos: Pos::Unknown,
        }
    }

    pub fn is_punct(&self) -> bool {
        !self.surface.chars().any(char::is_alphanumeric)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: u32,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Space-joined surface forms; re-tokenizing yields the same tokens.
    pub fn detokenize(&self) -> String {
        self.surfaces().collect::<Vec<_>>().join(" ")
    }

    pub fn positions_of<'a>(&'a self, word: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.tokens
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.surface == word)
            .map(|(i, _)| i)
    }
}

/// Word/id bijection with corpus frequencies. Id 0 is always [`UNK`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from raw counts. Words below `min_count` fold into UNK.
    pub fn from_counts(counts: &HashMap<String, u64>, min_count: u64) -> Vocabulary {
        let mut kept: Vec<(&String, u64)> = Vec::new();
        let mut unk = 0;
        for (w, &c) in counts {
            if c >= min_count.max(1) && w != UNK {
                kept.push((w, c));
            } else {
                unk += c;
            }
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut words = Vec::with_capacity(kept.len() + 1);
        let mut freqs = Vec::with_capacity(kept.len() + 1);
        words.push(UNK.to_string());
        freqs.push(unk);
        for (w, c) in kept {
            words.push(w.clone());
            freqs.push(c);
        }
        Self::from_parts(words, freqs)
    }

    fn from_parts(words: Vec<String>, counts: Vec<u64>) -> Vocabulary {
        let index = words
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocabulary {
            words,
            counts,
            index,
        }
    }

    /// Number of entries including UNK.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.len() <= 1
    }

    pub fn id(&self, word: &str) -> u32 {
        self.index.get(word).copied().unwrap_or(UNK_ID)
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.count(self.id(word))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, u64)> {
        self.words
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(i, (w, &c))| (i as u32, w.as_str(), c))
    }

    pub fn ids(&self, words: &[&str]) -> Vec<u32> {
        words.iter().map(|w| self.id(w)).collect()
    }

    /// Stable fingerprint used to pair trained resources with their corpus.
    pub fn hash(&self) -> u64 {
        let mut h = Sha256::new();
        for (w, c) in self.words.iter().zip(&self.counts) {
            h.update((w.len() as u64).to_le_bytes());
            h.update(w.as_bytes());
            h.update(c.to_le_bytes());
        }
        let digest = h.finalize();
        let mut first = [0u8; 8];
        first.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(first)
    }

    /// Writes the `word<TAB>id<TAB>count` dump.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> Result<()> {
        for (id, word, count) in self.iter() {
            writeln!(w, "{word}\t{id}\t{count}")?;
        }
        Ok(())
    }

    pub(crate) fn write_bin<W: Write>(&self, w: &mut W) -> Result<()> {
        binio::write_u32(w, self.words.len() as u32)?;
        for (word, &c) in self.words.iter().zip(&self.counts) {
            binio::write_str(w, word)?;
            binio::write_u64(w, c)?;
        }
        Ok(())
    }

    pub(crate) fn read_bin<R: Read>(r: &mut R) -> Result<Vocabulary> {
        let n = binio::read_u32(r)? as usize;
        if n == 0 {
            return Err(Error::format("corpus file", "vocabulary lacks UNK entry"));
        }
        let mut words = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        for _ in 0..n {
            words.push(binio::read_str(r, "corpus file")?);
            counts.push(binio::read_u64(r)?);
        }
        if words[0] != UNK {
            return Err(Error::format("corpus file", "first vocabulary entry is not UNK"));
        }
        Ok(Self::from_parts(words, counts))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    pub min_count: u64,
    /// Treat every line as exactly one sentence.
    pub line_mode: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            min_count: 1,
            line_mode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub vocab: Vocabulary,
}

impl Corpus {
    /// Assembles a corpus from token lists, assigning ids in order.
    pub fn from_token_lists(lists: Vec<Vec<Token>>, min_count: u64) -> Corpus {
        let sentences: Vec<Sentence> = lists
            .into_iter()
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(i, tokens)| Sentence {
                id: i as u32,
                tokens,
            })
            .collect();
        let mut counts: HashMap<String, u64> = HashMap::new();
        for t in sentences.iter().flat_map(|s| &s.tokens) {
            *counts.entry(t.surface.clone()).or_default() += 1;
        }
        let vocab = Vocabulary::from_counts(&counts, min_count);
        Corpus { sentences, vocab }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn sentence_ids(&self, sentence: &Sentence) -> Vec<u32> {
        sentence.surfaces().map(|w| self.vocab.id(w)).collect()
    }

    pub fn id_sequences(&self) -> Vec<Vec<u32>> {
        self.sentences.iter().map(|s| self.sentence_ids(s)).collect()
    }

    pub fn retag(&mut self, lexicon: &TagLexicon) {
        for s in &mut self.sentences {
            lexicon.tag_in_place(s);
        }
    }

    /// Serializes the `PGC1` container, optionally followed by a `PGIX` index section.
    pub fn write<W: Write>(&self, w: &mut W, index: Option<&InvertedIndex>) -> Result<()> {
        binio::write_magic(w, CORPUS_MAGIC)?;
        self.vocab.write_bin(w)?;
        binio::write_u32(w, self.sentences.len() as u32)?;
        for s in &self.sentences {
            binio::write_u32(w, s.id)?;
            binio::write_u32(w, s.tokens.len() as u32)?;
            for t in &s.tokens {
                binio::write_str(w, &t.surface)?;
                w.write_all(&[t.pos.code()])?;
            }
        }
        if let Some(index) = index {
            binio::write_magic(w, INDEX_MAGIC)?;
            index.write_section(w)?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R) -> Result<(Corpus, Option<InvertedIndex>)> {
        binio::expect_magic(r, CORPUS_MAGIC, "corpus file")?;
        let vocab = Vocabulary::read_bin(r)?;
        let n = binio::read_u32(r)? as usize;
        let mut sentences = Vec::with_capacity(n);
        for _ in 0..n {
            let id = binio::read_u32(r)?;
            let len = binio::read_u32(r)? as usize;
            let mut tokens = Vec::with_capacity(len);
            for _ in 0..len {
                let surface = binio::read_str(r, "corpus file")?;
                let mut code = [0u8; 1];
                r.read_exact(&mut code)?;
                let pos = Pos::from_code(code[0])
                    .ok_or_else(|| Error::format("corpus file", format!("bad tag code {}", code[0])))?;
                tokens.push(Token { surface, pos });
            }
            sentences.push(Sentence { id, tokens });
        }
        let corpus = Corpus { sentences, vocab };

        let mut tag = [0u8; 4];
        let mut filled = 0;
        while filled < 4 {
            let k = r.read(&mut tag[filled..])?;
            if k == 0 {
                break;
            }
            filled += k;
        }
        match filled {
            0 => Ok((corpus, None)),
            4 if &tag == INDEX_MAGIC => {
                let index = InvertedIndex::read_section(r, &corpus)?;
                Ok((corpus, Some(index)))
            }
            _ => Err(Error::format("corpus file", "trailing bytes after sentence table")),
        }
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '-' | '\u{2019}')
}

/// Splits one sentence's text into lowercase tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut tokens = Vec::new();
    let mut word = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            word.push(c);
        } else if is_joiner(c)
            && !word.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            word.push(c);
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Splits free-running text into sentence strings: at newlines, and after
/// `.`, `!` or `?` when followed by whitespace.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for line in text.lines() {
        let mut start = 0;
        let mut iter = line.char_indices().peekable();
        while let Some((i, c)) = iter.next() {
            if matches!(c, '.' | '!' | '?') {
                let next_is_space = iter.peek().is_none_or(|&(_, n)| n.is_whitespace());
                if next_is_space {
                    let end = i + c.len_utf8();
                    out.push(&line[start..end]);
                    start = end;
                }
            }
        }
        if start < line.len() {
            out.push(&line[start..]);
        }
    }
    out.retain(|s| !s.trim().is_empty());
    out
}

fn read_text<R: Read>(mut reader: R) -> Result<String> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| Error::Encoding(e.to_string()))
}

/// Reads raw text, splits and tokenizes it, and builds the vocabulary.
/// Tokens come out tagged [`Pos::Unknown`]; see [`TagLexicon`].
pub fn ingest<R: Read>(reader: R, opts: IngestOptions) -> Result<Corpus> {
    let text = read_text(reader)?;
    let pieces: Vec<&str> = if opts.line_mode {
        text.lines().collect()
    } else {
        split_sentences(&text)
    };
    let lists = pieces
        .into_iter()
        .map(|s| tokenize(s).into_iter().map(Token::untagged).collect())
        .collect();
    Ok(Corpus::from_token_lists(lists, opts.min_count))
}

/// Parses one pre-tagged line of `surface_TAG` items.
pub fn parse_tagged_line(line: &str) -> Result<Vec<Token>> {
    line.split_whitespace()
        .map(|item| {
            let (surface, tag) = item
                .rsplit_once('_')
                .ok_or_else(|| Error::InvalidArgument(format!("untagged item {item:?}")))?;
            Token::new(surface, tag.parse()?)
        })
        .collect()
}

/// Reads pre-tagged input, one sentence per line. Supplied tags are kept as-is.
pub fn ingest_tagged<R: Read>(reader: R, min_count: u64) -> Result<Corpus> {
    let text = read_text(reader)?;
    let lists = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_tagged_line)
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus::from_token_lists(lists, min_count))
}

/// Lexicon-driven tagger: pronoun list first, then noun/verb index membership.
#[derive(Debug, Clone, Default)]
pub struct TagLexicon {
    nouns: HashSet<String>,
    verbs: HashSet<String>,
}

impl TagLexicon {
    pub fn new(nouns: impl IntoIterator<Item = String>, verbs: impl IntoIterator<Item = String>) -> Self {
        TagLexicon {
            nouns: nouns.into_iter().collect(),
            verbs: verbs.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nouns.is_empty() && self.verbs.is_empty()
    }

    pub fn tag_word(&self, word: &str) -> Pos {
        if PRONOUNS.contains(&word) {
            Pos::Pronoun
        } else if !word.chars().any(char::is_alphabetic) || STOPWORDS.contains(&word) {
            Pos::Other
        } else if self.is_empty() {
            Pos::Unknown
        } else if self.nouns.contains(word) {
            Pos::Noun
        } else if self.verbs.contains(word) {
            Pos::Verb
        } else {
            Pos::Other
        }
    }

    pub fn tag_in_place(&self, sentence: &mut Sentence) {
        for t in &mut sentence.tokens {
            t.pos = self.tag_word(&t.surface);
        }
    }
}

pub fn tag(sentence: &Sentence, lexicon: &TagLexicon) -> Sentence {
    let mut out = sentence.clone();
    lexicon.tag_in_place(&mut out);
    out
}
