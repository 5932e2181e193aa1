//! WordNet database reader (noun and verb hypernym graphs), path similarity,
//! and the type-consistency test used when inserting topic words.

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus::{Pos, TagLexicon, Token};
use crate::error::{Error, Result};

pub const PERSON: &str = "person.n.01";
pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WnPos {
    Noun,
    Verb,
}

impl WnPos {
    fn letter(self) -> char {
        match self {
            WnPos::Noun => 'n',
            WnPos::Verb => 'v',
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            WnPos::Noun => "noun",
            WnPos::Verb => "verb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId(pub u32);

#[derive(Debug, Clone)]
pub struct Synset {
    pub pos: WnPos,
    pub offset: u64,
    pub lemmas: Vec<String>,
    /// `lemma.pos.NN` name, e.g. `person.n.01`.
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct SynsetGraph {
    synsets: Vec<Synset>,
    hypernyms: Vec<Vec<u32>>,
    /// Undirected hypernym edges plus the two virtual roots at the end.
    adjacency: Vec<Vec<u32>>,
    by_name: HashMap<String, u32>,
    lemma_index: HashMap<(WnPos, String), Vec<u32>>,
    person: Option<u32>,
    version: String,
}

fn normalize_lemma(word: &str) -> String {
    word.trim().to_lowercase().replace(' ', "_")
}

/// Incremental construction, used by the file loader and for synthetic graphs.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    synsets: Vec<Synset>,
    hypernyms: Vec<Vec<u32>>,
    lemma_index: HashMap<(WnPos, String), Vec<u32>>,
    version: Option<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a synset; it becomes the next sense of each of its lemmas.
    pub fn add_synset(&mut self, pos: WnPos, lemmas: &[&str]) -> SynsetId {
        let id = self.push(pos, 0, lemmas.iter().map(|l| normalize_lemma(l)).collect());
        for l in &self.synsets[id as usize].lemmas {
            self.lemma_index.entry((pos, l.clone())).or_default().push(id);
        }
        SynsetId(id)
    }

    fn push(&mut self, pos: WnPos, offset: u64, lemmas: Vec<String>) -> u32 {
        let id = self.synsets.len() as u32;
        self.synsets.push(Synset {
            pos,
            offset,
            lemmas,
            name: String::new(),
        });
        self.hypernyms.push(Vec::new());
        id
    }

    pub fn add_hypernym(&mut self, child: SynsetId, parent: SynsetId) -> Result<()> {
        let (c, p) = (&self.synsets[child.0 as usize], &self.synsets[parent.0 as usize]);
        if c.pos != p.pos {
            return Err(Error::InvalidArgument("hypernym edge crosses parts of speech".into()));
        }
        if !self.hypernyms[child.0 as usize].contains(&parent.0) {
            self.hypernyms[child.0 as usize].push(parent.0);
        }
        Ok(())
    }

    pub fn version(&mut self, v: &str) -> &mut Self {
        self.version = Some(v.to_string());
        self
    }

    pub fn build(self) -> SynsetGraph {
        let GraphBuilder {
            mut synsets,
            hypernyms,
            lemma_index,
            version,
        } = self;

        for id in 0..synsets.len() {
            let s = &synsets[id];
            let head = s.lemmas.first().cloned().unwrap_or_else(|| format!("synset{id}"));
            let sense = lemma_index
                .get(&(s.pos, head.clone()))
                .and_then(|ids| ids.iter().position(|&x| x as usize == id))
                .map_or(1, |i| i + 1);
            synsets[id].name = format!("{head}.{}.{sense:02}", s.pos.letter());
        }

        let n = synsets.len();
        let roots = [n as u32, n as u32 + 1];
        let mut adjacency = vec![Vec::new(); n + 2];
        for (child, parents) in hypernyms.iter().enumerate() {
            for &p in parents {
                adjacency[child].push(p);
                adjacency[p as usize].push(child as u32);
            }
            if parents.is_empty() {
                let root = match synsets[child].pos {
                    WnPos::Noun => roots[0],
                    WnPos::Verb => roots[1],
                };
                adjacency[child].push(root);
                adjacency[root as usize].push(child as u32);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }

        let by_name: HashMap<String, u32> = synsets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), i as u32))
            .collect();
        let person = by_name.get(PERSON).copied();
        SynsetGraph {
            synsets,
            hypernyms,
            adjacency,
            by_name,
            lemma_index,
            person,
            version: version.unwrap_or_else(|| "unknown".to_string()),
        }
    }
}

fn parse_err(file: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::WordNet {
        file: file.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn read_db_file(dir: &Path, name: &str) -> Result<(PathBuf, String)> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path).map_err(|e| parse_err(&path, 0, e.to_string()))?;
    Ok((path, text))
}

fn header_version(text: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.starts_with(' '))
        .find_map(|l| {
            let at = l.find("WordNet ")?;
            let rest = &l[at + "WordNet ".len()..];
            let v: String = rest.chars().take_while(|c| c.is_ascii_digit() || *c == '.').collect();
            (!v.is_empty() && v.contains('.')).then(|| format!("WordNet {}", v.trim_end_matches('.')))
        })
}

#[derive(Debug)]
struct DataRecord {
    offset: u64,
    lemmas: Vec<String>,
    hypernyms: Vec<u64>,
}

fn parse_data_line(line: &str, pos: WnPos, path: &Path, lineno: usize) -> Result<DataRecord> {
    let body = line.split(" | ").next().unwrap_or(line);
    let f: Vec<&str> = body.split_whitespace().collect();
    let err = |m: &str| parse_err(path, lineno, m.to_string());
    if f.len() < 4 {
        return Err(err("truncated synset record"));
    }
    let offset: u64 = f[0].parse().map_err(|_| err("bad synset offset"))?;
    let ss_type = f[2];
    let expected = pos.letter().to_string();
    if ss_type != expected {
        return Err(err(&format!("synset type {ss_type:?} in {} file", pos.suffix())));
    }
    let w_cnt = usize::from_str_radix(f[3], 16).map_err(|_| err("bad word count"))?;
    let mut i = 4;
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = f.get(i).ok_or_else(|| err("missing lemma"))?;
        let word = word.split('(').next().unwrap_or(word);
        lemmas.push(normalize_lemma(word));
        i += 2;
    }
    let p_cnt: usize = f
        .get(i)
        .ok_or_else(|| err("missing pointer count"))?
        .parse()
        .map_err(|_| err("bad pointer count"))?;
    i += 1;
    let mut hypernyms = Vec::new();
    for _ in 0..p_cnt {
        if i + 3 >= f.len() {
            return Err(err("truncated pointer list"));
        }
        let (sym, target, tpos) = (f[i], f[i + 1], f[i + 2]);
        if (sym == "@" || sym == "@i") && tpos == expected {
            hypernyms.push(target.parse().map_err(|_| err("bad pointer offset"))?);
        }
        i += 4;
    }
    Ok(DataRecord {
        offset,
        lemmas,
        hypernyms,
    })
}

fn parse_index_line(line: &str, path: &Path, lineno: usize) -> Result<(String, Vec<u64>)> {
    let f: Vec<&str> = line.split_whitespace().collect();
    let err = |m: &str| parse_err(path, lineno, m.to_string());
    if f.len() < 4 {
        return Err(err("truncated index record"));
    }
    let n: usize = f[2].parse().map_err(|_| err("bad synset count"))?;
    let p: usize = f[3].parse().map_err(|_| err("bad pointer count"))?;
    let start = 4 + p + 2;
    if f.len() < start + n {
        return Err(err("index record lists fewer offsets than declared"));
    }
    let offsets = f[start..start + n]
        .iter()
        .map(|s| s.parse().map_err(|_| err("bad synset offset")))
        .collect::<Result<Vec<u64>>>()?;
    Ok((normalize_lemma(f[0]), offsets))
}

/// Loads `index.{noun,verb}` and `data.{noun,verb}` from a WordNet dict directory.
pub fn load_wordnet(dir: impl AsRef<Path>) -> Result<SynsetGraph> {
    let dir = dir.as_ref();
    let mut b = GraphBuilder::new();
    let mut offsets: HashMap<(WnPos, u64), u32> = HashMap::new();
    let mut pending: Vec<(u32, WnPos, Vec<u64>, PathBuf, usize)> = Vec::new();

    for pos in [WnPos::Noun, WnPos::Verb] {
        let (path, text) = read_db_file(dir, &format!("data.{}", pos.suffix()))?;
        if b.version.is_none() {
            b.version = header_version(&text);
        }
        for (k, line) in text.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let rec = parse_data_line(line, pos, &path, k + 1)?;
            let id = b.push(pos, rec.offset, rec.lemmas);
            offsets.insert((pos, rec.offset), id);
            pending.push((id, pos, rec.hypernyms, path.clone(), k + 1));
        }
    }
    for (id, pos, targets, path, line) in pending {
        for t in targets {
            let parent = *offsets
                .get(&(pos, t))
                .ok_or_else(|| parse_err(&path, line, format!("dangling hypernym offset {t:08}")))?;
            if !b.hypernyms[id as usize].contains(&parent) {
                b.hypernyms[id as usize].push(parent);
            }
        }
    }

    for pos in [WnPos::Noun, WnPos::Verb] {
        let (path, text) = read_db_file(dir, &format!("index.{}", pos.suffix()))?;
        for (k, line) in text.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let (lemma, offs) = parse_index_line(line, &path, k + 1)?;
            let ids = offs
                .iter()
                .map(|o| {
                    offsets
                        .get(&(pos, *o))
                        .copied()
                        .ok_or_else(|| parse_err(&path, k + 1, format!("unknown synset offset {o:08}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            b.lemma_index.insert((pos, lemma), ids);
        }
    }

    if b.version.is_none() {
        let name = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
        b.version = Some(format!("unversioned ({name})"));
    }
    let graph = b.build();
    if graph.person.is_none() {
        return Err(parse_err(&dir.join("index.noun"), 0, format!("{PERSON} not found")));
    }
    Ok(graph)
}

impl SynsetGraph {
    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn synset(&self, id: SynsetId) -> &Synset {
        &self.synsets[id.0 as usize]
    }

    pub fn by_name(&self, name: &str) -> Option<SynsetId> {
        self.by_name.get(name).copied().map(SynsetId)
    }

    pub fn person(&self) -> Option<SynsetId> {
        self.person.map(SynsetId)
    }

    pub fn hypernyms(&self, id: SynsetId) -> impl Iterator<Item = SynsetId> + '_ {
        self.hypernyms[id.0 as usize].iter().map(|&h| SynsetId(h))
    }

    /// Senses of a word; pronouns map to `person.n.01`. Other tags have none.
    pub fn synsets_of(&self, word: &str, pos: Pos) -> Vec<SynsetId> {
        let wn_pos = match pos {
            Pos::Pronoun => return self.person().into_iter().collect(),
            Pos::Noun => WnPos::Noun,
            Pos::Verb => WnPos::Verb,
            Pos::Other | Pos::Unknown => return Vec::new(),
        };
        self.lemma_index
            .get(&(wn_pos, normalize_lemma(word)))
            .map(|ids| ids.iter().map(|&i| SynsetId(i)).collect())
            .unwrap_or_default()
    }

    /// Tagger lexicon from the noun and verb indexes.
    pub fn tag_lexicon(&self) -> TagLexicon {
        let lemmas = |p: WnPos| {
            self.lemma_index
                .keys()
                .filter(move |(q, _)| *q == p)
                .map(|(_, l)| l.clone())
                .collect::<Vec<_>>()
        };
        TagLexicon::new(lemmas(WnPos::Noun), lemmas(WnPos::Verb))
    }

    /// Shortest undirected hypernym-graph distance from any source to any
    /// target, exploring at most `limit` edges.
    fn distance(&self, sources: &[u32], targets: &[u32], limit: usize) -> Option<usize> {
        let mut dist: HashMap<u32, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist.insert(s, 0).is_none() {
                queue.push_back(s);
            }
        }
        while let Some(node) = queue.pop_front() {
            let d = dist[&node];
            if targets.contains(&node) {
                return Some(d);
            }
            if d == limit {
                continue;
            }
            for &next in &self.adjacency[node as usize] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(next) {
                    e.insert(d + 1);
                    queue.push_back(next);
                }
            }
        }
        None
    }

    /// 1 / (1 + shortest path length).
    pub fn path_similarity(&self, a: SynsetId, b: SynsetId) -> Result<f64> {
        if self.synset(a).pos != self.synset(b).pos {
            return Err(Error::InvalidArgument(format!(
                "path similarity across parts of speech: {} vs {}",
                self.synset(a).name,
                self.synset(b).name
            )));
        }
        let d = self
            .distance(&[a.0], &[b.0], usize::MAX)
            .expect("virtual root connects every same-POS pair");
        Ok(1.0 / (1.0 + d as f64))
    }

    /// True iff some sense pair has path similarity strictly above `threshold`.
    pub fn type_consistent(&self, w1: &Token, w2: &Token, threshold: f64) -> bool {
        let nominal = |t: &Token| match t.pos {
            Pos::Pronoun => Pos::Pronoun,
            _ => Pos::Noun,
        };
        let s1: Vec<u32> = self.synsets_of(&w1.surface, nominal(w1)).iter().map(|s| s.0).collect();
        let s2: Vec<u32> = self.synsets_of(&w2.surface, nominal(w2)).iter().map(|s| s.0).collect();
        if s1.is_empty() || s2.is_empty() || threshold >= 1.0 {
            return false;
        }
        // largest distance d with 1/(1+d) > threshold
        let limit = if threshold <= 0.0 {
            usize::MAX
        } else {
            let mut d = 0usize;
            while 1.0 / (2.0 + d as f64) > threshold {
                d += 1;
            }
            d
        };
        self.distance(&s1, &s2, limit).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (SynsetGraph, [SynsetId; 5]) {
        let mut b = GraphBuilder::new();
        let entity = b.add_synset(WnPos::Noun, &["entity"]);
        let person = b.add_synset(WnPos::Noun, &["person", "individual"]);
        let traveler = b.add_synset(WnPos::Noun, &["traveler"]);
        let passenger = b.add_synset(WnPos::Noun, &["passenger"]);
        let vessel = b.add_synset(WnPos::Noun, &["vessel"]);
        let ship = b.add_synset(WnPos::Noun, &["ship"]);
        b.add_hypernym(person, entity).unwrap();
        b.add_hypernym(vessel, entity).unwrap();
        b.add_hypernym(traveler, person).unwrap();
        b.add_hypernym(passenger, traveler).unwrap();
        b.add_hypernym(ship, vessel).unwrap();
        (b.build(), [entity, person, traveler, passenger, ship])
    }

    fn noun(w: &str) -> Token {
        Token::new(w, Pos::Noun).unwrap()
    }

    #[test]
    fn names_and_pronouns() {
        let (g, [_, person, ..]) = toy();
        assert_eq!(g.synset(person).name, PERSON);
        assert_eq!(g.synsets_of("i", Pos::Pronoun), [person]);
        assert!(g.synsets_of("zzzz-not-a-word", Pos::Noun).is_empty());
        assert_eq!(g.synsets_of("Individual", Pos::Noun), [person]);
    }

    #[test]
    fn similarity_basics() {
        let (g, [entity, person, traveler, passenger, ship]) = toy();
        assert_eq!(g.path_similarity(person, person).unwrap(), 1.0);
        assert_eq!(g.path_similarity(traveler, person).unwrap(), 0.5);
        assert_eq!(g.path_similarity(passenger, ship).unwrap(), 1.0 / 6.0);
        assert_eq!(g.path_similarity(ship, passenger).unwrap(), 1.0 / 6.0);
        assert_eq!(g.path_similarity(entity, passenger).unwrap(), 0.25);
    }

    #[test]
    fn type_consistency_threshold_is_strict() {
        let (g, _) = toy();
        assert!(g.type_consistent(&noun("person"), &noun("passenger"), 0.3));
        assert!(!g.type_consistent(&noun("person"), &noun("ship"), 0.3));
        // distance 2 gives exactly 1/3
        assert!(!g.type_consistent(&noun("person"), &noun("passenger"), 1.0 / 3.0));
        assert!(g.type_consistent(&noun("ship"), &noun("ship"), 0.99));
        assert!(!g.type_consistent(&noun("ship"), &noun("ship"), 1.0));
        assert!(!g.type_consistent(&noun("ship"), &noun("unicorn"), 0.1));
        let he = Token::new("he", Pos::Pronoun).unwrap();
        assert!(g.type_consistent(&he, &noun("traveler"), 0.3));
    }

    #[test]
    fn disjoint_roots_meet_at_virtual_root() {
        let mut b = GraphBuilder::new();
        let a = b.add_synset(WnPos::Noun, &["a"]);
        let c = b.add_synset(WnPos::Noun, &["c"]);
        let v = b.add_synset(WnPos::Verb, &["run"]);
        let g = b.build();
        assert_eq!(g.path_similarity(a, c).unwrap(), 1.0 / 3.0);
        assert!(g.path_similarity(a, v).is_err());
    }

    #[test]
    fn cross_pos_edges_are_rejected() {
        let mut b = GraphBuilder::new();
        let a = b.add_synset(WnPos::Noun, &["a"]);
        let v = b.add_synset(WnPos::Verb, &["run"]);
        assert!(b.add_hypernym(a, v).is_err());
    }

    #[test]
    fn parses_database_lines() {
        let p = Path::new("data.noun");
        let rec = parse_data_line(
            "00007846 03 n 03 person 0 individual 0 someone 0 002 @ 00004258 n 0000 ~ 00007000 n 0000 | a human being",
            WnPos::Noun,
            p,
            1,
        )
        .unwrap();
        assert_eq!(rec.offset, 7846);
        assert_eq!(rec.lemmas, ["person", "individual", "someone"]);
        assert_eq!(rec.hypernyms, [4258]);
        assert!(parse_data_line("00007846 03 v 01 x 0 000 | g", WnPos::Noun, p, 3).is_err());
        let err = parse_data_line("00007846 03 n 01 x 0 002 @ 1 n", WnPos::Noun, p, 7).unwrap_err();
        assert!(err.to_string().contains("data.noun:7"), "{err}");

        let (lemma, offs) =
            parse_index_line("person n 3 2 @ ~ 3 1 00007846 09 10", Path::new("index.noun"), 1).unwrap();
        assert_eq!(lemma, "person");
        assert_eq!(offs, [7846, 9, 10]);
    }

    #[test]
    fn version_from_header() {
        let text = "  1 license\n 29 WordNet 3.0 Copyright 2006 by Princeton University.\n00001 ...";
        assert_eq!(header_version(text).as_deref(), Some("WordNet 3.0"));
        assert_eq!(header_version("00001 x"), None);
    }
}
