//! Deterministic generators for the bundled mini-corpus, pun pairs and a
//! small WordNet-format database. The files under `data/` are produced by
//! these functions; `examples/write_fixtures.rs` regenerates them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

pub const CORPUS_SEED: u64 = 20_180_605;

/// Person nouns planted both next to "hare" (n-gram collocations) and at
/// skip-gram distance from it.
pub const PLANTED_TOPICS: [&str; 3] = ["hunter", "farmer", "poacher"];

pub const PAIRS_TSV: &str = "hare\thair\nknight\tnight\ndyed\tdied\n";

const SUBJECTS: [&str; 6] = ["he", "she", "i", "you", "we", "they"];
const PEOPLE: [&str; 6] = ["boy", "girl", "man", "woman", "child", "friend"];
const GET_VERBS: [&str; 5] = ["got", "needs", "wanted", "had", "gets"];
const TAILS: [&str; 6] = ["", "today", "yesterday", "last week", "in town", "before dinner"];
const MOVES: [&str; 5] = ["walked", "ran", "wandered", "hurried", "crept"];
const PREPS: [&str; 4] = ["across", "through", "along", "past"];
const PLACES: [&str; 6] = ["field", "meadow", "forest", "river", "hill", "farm"];
const ADJS: [&str; 6] = ["old", "quiet", "green", "wide", "cold", "dark"];
const SEES: [&str; 4] = ["saw", "spotted", "found", "watched"];
const ANIMALS: [&str; 4] = ["dog", "bird", "cat", "horse"];
const THINGS: [&str; 6] = ["bread", "apple", "book", "letter", "rope", "paper"];
const ACTS: [&str; 5] = ["cut", "took", "carried", "dropped", "bought"];
const ROYALS: [&str; 3] = ["king", "queen", "princess"];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().expect("non-empty")
}

fn subject(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.8) {
        pick(rng, &SUBJECTS).to_string()
    } else {
        format!("the {}", pick(rng, &PEOPLE))
    }
}

fn possessive(subject: &str) -> &'static str {
    match subject {
        "he" => "his",
        "she" => "her",
        "i" => "my",
        "you" => "your",
        "we" => "our",
        "they" => "their",
        _ => "her",
    }
}

fn line(words: &[&str]) -> String {
    let mut s = words
        .iter()
        .filter(|w| !w.is_empty())
        .copied()
        .collect::<Vec<_>>()
        .join(" ");
    s.push_str(" .");
    s
}

/// About two thousand synthetic sentences, one per line.
pub fn mini_corpus_text() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out: Vec<String> = Vec::new();

    for _ in 0..380 {
        let s = subject(&mut rng);
        let (v, t) = (pick(&mut rng, &GET_VERBS), pick(&mut rng, &TAILS));
        out.push(line(&[&s, v, "a", "hair", "cut", t]));
    }
    for _ in 0..150 {
        let topic = pick(&mut rng, &PLANTED_TOPICS);
        let v = pick(&mut rng, &GET_VERBS);
        let t = pick(&mut rng, &["for dinner", "at dawn", "in the field"]);
        out.push(line(&["the", topic, v, "a", "hare", t]));
    }
    for _ in 0..200 {
        let topic = pick(&mut rng, &PLANTED_TOPICS);
        let adj = if rng.gen_bool(0.5) { pick(&mut rng, &ADJS) } else { "" };
        out.push(line(&[
            "the",
            topic,
            pick(&mut rng, &MOVES),
            pick(&mut rng, &PREPS),
            "the",
            adj,
            pick(&mut rng, &PLACES),
            "and",
            pick(&mut rng, &SEES),
            "a",
            "hare",
        ]));
    }
    for _ in 0..150 {
        let adj = if rng.gen_bool(0.5) { pick(&mut rng, &ADJS) } else { "" };
        out.push(line(&[
            "the",
            "greyhound",
            pick(&mut rng, &MOVES),
            pick(&mut rng, &PREPS),
            "the",
            adj,
            pick(&mut rng, &PLACES),
            "and",
            "chased",
            "a",
            "hare",
        ]));
    }
    for _ in 0..100 {
        let s = subject(&mut rng);
        out.push(line(&[
            "the",
            "barber",
            "cut",
            possessive(&s),
            "hair",
            "and",
            "smiled",
            "at",
            "the",
            pick(&mut rng, &PEOPLE),
        ]));
    }
    for _ in 0..100 {
        let s = subject(&mut rng);
        let v = pick(&mut rng, &["stayed up", "worked", "read", "walked home"]);
        out.push(line(&[&s, v, "late", "at", "night", pick(&mut rng, &TAILS)]));
    }
    for _ in 0..100 {
        let r = pick(&mut rng, &ROYALS);
        out.push(line(&[
            "the",
            r,
            "rode",
            pick(&mut rng, &PREPS),
            "the",
            pick(&mut rng, &ADJS),
            "castle",
            "and",
            "praised",
            "the",
            "knight",
        ]));
    }
    for _ in 0..900 {
        let words: Vec<String> = match rng.gen_range(0..3) {
            0 => vec![
                "the".into(),
                pick(&mut rng, &ADJS).into(),
                pick(&mut rng, &ANIMALS).into(),
                pick(&mut rng, &MOVES).into(),
                pick(&mut rng, &PREPS).into(),
                "the".into(),
                pick(&mut rng, &PLACES).into(),
            ],
            1 => vec![
                subject(&mut rng),
                pick(&mut rng, &ACTS).into(),
                "the".into(),
                pick(&mut rng, &THINGS).into(),
                pick(&mut rng, &TAILS).into(),
            ],
            _ => vec![
                "the".into(),
                pick(&mut rng, &PEOPLE).into(),
                pick(&mut rng, &SEES).into(),
                "a".into(),
                pick(&mut rng, &ANIMALS).into(),
                "near".into(),
                "the".into(),
                pick(&mut rng, &PLACES).into(),
            ],
        };
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        out.push(line(&refs));
    }
    out.shuffle(&mut rng);
    let mut text = out.join("\n");
    text.push('\n');
    text
}

struct NounSpec {
    lemmas: &'static [&'static str],
    hypernyms: &'static [&'static str],
    gloss: &'static str,
}

macro_rules! syn {
    ([$($l:expr),+] <- [$($h:expr),*] ; $g:expr) => {
        NounSpec { lemmas: &[$($l),+], hypernyms: &[$($h),*], gloss: $g }
    };
}

/// Synsets keyed by their head lemma; each head names a single first sense.
const NOUNS: &[NounSpec] = &[
    syn!(["entity"] <- []; "that which is perceived to have its own distinct existence"),
    syn!(["physical_entity"] <- ["entity"]; "an entity that has physical existence"),
    syn!(["abstraction"] <- ["entity"]; "a general concept"),
    syn!(["object"] <- ["physical_entity"]; "a tangible and visible entity"),
    syn!(["whole"] <- ["object"]; "an assemblage of parts regarded as a single entity"),
    syn!(["living_thing"] <- ["whole"]; "a living entity"),
    syn!(["organism", "being"] <- ["living_thing"]; "a living thing that can act or function independently"),
    syn!(["causal_agent", "cause"] <- ["physical_entity"]; "any entity that produces an effect"),
    syn!(["person", "individual", "someone", "somebody", "mortal", "soul"] <- ["organism", "causal_agent"]; "a human being"),
    syn!(["traveler", "traveller"] <- ["person"]; "a person who changes location"),
    syn!(["passenger", "rider"] <- ["traveler"]; "a traveler riding in a vehicle who is not operating it"),
    syn!(["worker"] <- ["person"]; "a person who works at a specific occupation"),
    syn!(["skilled_worker"] <- ["worker"]; "a worker who has acquired special skills"),
    syn!(["barber"] <- ["skilled_worker"]; "a hairdresser who cuts hair and shaves beards"),
    syn!(["hunter", "huntsman"] <- ["person"]; "someone who hunts game"),
    syn!(["poacher"] <- ["hunter"]; "someone who hunts or fishes illegally"),
    syn!(["creator"] <- ["person"]; "a person who grows or makes or invents things"),
    syn!(["farmer", "husbandman"] <- ["creator"]; "a person who operates a farm"),
    syn!(["adult", "grownup"] <- ["person"]; "a fully developed person"),
    syn!(["man"] <- ["adult"]; "an adult person who is male"),
    syn!(["woman"] <- ["adult"]; "an adult female person"),
    syn!(["juvenile"] <- ["person"]; "a young person"),
    syn!(["child", "kid"] <- ["juvenile"]; "a young person of either sex"),
    syn!(["boy"] <- ["juvenile"]; "a youthful male person"),
    syn!(["girl"] <- ["juvenile"]; "a young woman"),
    syn!(["friend"] <- ["person"]; "a person you know well and regard with affection"),
    syn!(["leader"] <- ["person"]; "a person who rules or guides or inspires others"),
    syn!(["ruler", "swayer"] <- ["leader"]; "a person who rules or commands"),
    syn!(["sovereign"] <- ["ruler"]; "a nation's ruler or head of state"),
    syn!(["king", "male_monarch"] <- ["sovereign"]; "a male sovereign"),
    syn!(["queen", "female_monarch"] <- ["sovereign"]; "a female sovereign ruler"),
    syn!(["aristocrat", "noble"] <- ["leader"]; "a member of the aristocracy"),
    syn!(["princess"] <- ["aristocrat"]; "a female member of a royal family"),
    syn!(["knight"] <- ["aristocrat"]; "originally a person of noble birth trained to arms"),
    syn!(["animal", "beast", "creature"] <- ["organism"]; "a living organism capable of voluntary movement"),
    syn!(["chordate"] <- ["animal"]; "any animal of the phylum Chordata"),
    syn!(["vertebrate"] <- ["chordate"]; "animals having a bony or cartilaginous skeleton"),
    syn!(["bird"] <- ["vertebrate"]; "warm-blooded egg-laying vertebrates"),
    syn!(["mammal"] <- ["vertebrate"]; "any warm-blooded vertebrate having the skin covered with hair"),
    syn!(["placental"] <- ["mammal"]; "mammals having a placenta"),
    syn!(["carnivore"] <- ["placental"]; "a terrestrial or aquatic flesh-eating mammal"),
    syn!(["canine", "canid"] <- ["carnivore"]; "any of various fissiped mammals"),
    syn!(["dog", "domestic_dog"] <- ["canine"]; "a member of the genus Canis"),
    syn!(["hunting_dog"] <- ["dog"]; "a dog used in hunting game"),
    syn!(["hound", "hound_dog"] <- ["hunting_dog"]; "any of several breeds of dog used for hunting"),
    syn!(["greyhound"] <- ["hound"]; "a tall slender dog of an ancient breed noted for speed"),
    syn!(["feline", "felid"] <- ["carnivore"]; "any of various lithe-bodied roundheaded fissiped mammals"),
    syn!(["cat", "true_cat"] <- ["feline"]; "feline mammal usually having thick soft fur"),
    syn!(["ungulate"] <- ["placental"]; "any of a number of mammals with hooves"),
    syn!(["horse", "equus_caballus"] <- ["ungulate"]; "solid-hoofed herbivorous quadruped"),
    syn!(["lagomorph", "gnawing_mammal"] <- ["placental"]; "relative large gnawing animals"),
    syn!(["leporid", "leporid_mammal"] <- ["lagomorph"]; "rabbits and hares"),
    syn!(["hare"] <- ["leporid"]; "swift timid long-eared mammal larger than a rabbit"),
    syn!(["rabbit", "coney", "cony"] <- ["leporid"]; "any of various burrowing animals"),
    syn!(["natural_object"] <- ["whole"]; "an object occurring naturally"),
    syn!(["covering", "natural_covering", "cover"] <- ["natural_object"]; "a natural object that covers or envelops"),
    syn!(["body_covering"] <- ["covering"]; "any covering for the body or a body part"),
    syn!(["hair"] <- ["body_covering"]; "a covering for the body that consists of a dense growth of threadlike structures"),
    syn!(["artifact", "artefact"] <- ["whole"]; "a man-made object"),
    syn!(["instrumentality", "instrumentation"] <- ["artifact"]; "an artifact that is instrumental in accomplishing some end"),
    syn!(["conveyance", "transport"] <- ["instrumentality"]; "something that serves as a means of transportation"),
    syn!(["vehicle"] <- ["conveyance"]; "a conveyance that transports people or objects"),
    syn!(["craft"] <- ["vehicle"]; "a vehicle designed for navigation in or on water or air"),
    syn!(["vessel", "watercraft"] <- ["craft"]; "a craft designed for water transportation"),
    syn!(["ship"] <- ["vessel"]; "a vessel that carries passengers or freight"),
    syn!(["structure", "construction"] <- ["artifact"]; "a thing constructed"),
    syn!(["building", "edifice"] <- ["structure"]; "a structure that has a roof and walls"),
    syn!(["castle"] <- ["building"]; "a large and stately mansion"),
    syn!(["farm"] <- ["building"]; "workplace consisting of farm buildings and cultivated land"),
    syn!(["creation"] <- ["artifact"]; "an artifact that has been brought into existence"),
    syn!(["book", "volume"] <- ["creation"]; "physical objects consisting of a number of pages bound together"),
    syn!(["letter", "missive"] <- ["creation"]; "a written message addressed to a person or organization"),
    syn!(["paper"] <- ["creation"]; "a material made of cellulose pulp"),
    syn!(["rope"] <- ["artifact"]; "a strong line"),
    syn!(["food", "solid_food"] <- ["physical_entity"]; "any solid substance used as a source of nourishment"),
    syn!(["bread", "breadstuff"] <- ["food"]; "food made from dough of flour or meal"),
    syn!(["apple"] <- ["food"]; "fruit with red or yellow or green skin"),
    syn!(["dinner"] <- ["food"]; "the main meal of the day"),
    syn!(["location"] <- ["physical_entity"]; "a point or extent in space"),
    syn!(["region"] <- ["location"]; "a large indefinite location on the surface of the Earth"),
    syn!(["field"] <- ["region"]; "a piece of land cleared of trees and usually enclosed"),
    syn!(["meadow", "hayfield"] <- ["field"]; "a field where grass or alfalfa are grown to be made into hay"),
    syn!(["forest", "wood", "woods"] <- ["region"]; "the trees and other plants in a large densely wooded area"),
    syn!(["town"] <- ["region"]; "an urban area with a fixed boundary that is smaller than a city"),
    syn!(["geological_formation", "formation"] <- ["object"]; "the geological features of the earth"),
    syn!(["hill"] <- ["geological_formation"]; "a local and well-defined elevation of the land"),
    syn!(["body_of_water", "water"] <- ["object"]; "the part of the earth's surface covered with water"),
    syn!(["river"] <- ["body_of_water"]; "a large natural stream of water"),
    syn!(["measure", "quantity"] <- ["abstraction"]; "how much there is or how many there are of something"),
    syn!(["time_period", "period"] <- ["measure"]; "an amount of time"),
    syn!(["night", "nighttime", "dark"] <- ["time_period"]; "the time after sunset and before sunrise"),
    syn!(["dawn", "dawning", "morning"] <- ["time_period"]; "the first light of day"),
    syn!(["week", "hebdomad"] <- ["time_period"]; "any period of seven consecutive days"),
    syn!(["today"] <- ["time_period"]; "the present time or age"),
    syn!(["act", "deed"] <- ["abstraction"]; "something that people do or cause to happen"),
    syn!(["cut", "cutting"] <- ["act"]; "the act of cutting something into parts"),
    syn!(["haircut"] <- ["cut"]; "the act of cutting the hair"),
];

struct VerbSpec {
    lemmas: &'static [&'static str],
    hypernyms: &'static [&'static str],
    gloss: &'static str,
}

const VERBS: &[VerbSpec] = &[
    VerbSpec { lemmas: &["travel", "go", "move"], hypernyms: &[], gloss: "change location" },
    VerbSpec { lemmas: &["walk"], hypernyms: &["travel"], gloss: "use one's feet to advance" },
    VerbSpec { lemmas: &["run"], hypernyms: &["travel"], gloss: "move fast by using one's feet" },
    VerbSpec { lemmas: &["wander", "roam"], hypernyms: &["travel"], gloss: "move about aimlessly" },
    VerbSpec { lemmas: &["hurry", "speed"], hypernyms: &["travel"], gloss: "move fast" },
    VerbSpec { lemmas: &["creep", "crawl"], hypernyms: &["travel"], gloss: "move slowly" },
    VerbSpec { lemmas: &["ride"], hypernyms: &["travel"], gloss: "sit and travel on the back of an animal" },
    VerbSpec { lemmas: &["perceive", "comprehend"], hypernyms: &[], gloss: "to become aware of through the senses" },
    VerbSpec { lemmas: &["see"], hypernyms: &["perceive"], gloss: "perceive by sight" },
    VerbSpec { lemmas: &["spot", "recognize"], hypernyms: &["see"], gloss: "detect with the senses" },
    VerbSpec { lemmas: &["watch", "observe"], hypernyms: &["see"], gloss: "look attentively" },
    VerbSpec { lemmas: &["get", "acquire"], hypernyms: &[], gloss: "come into the possession of something" },
    VerbSpec { lemmas: &["find", "regain"], hypernyms: &["get"], gloss: "come upon after searching" },
    VerbSpec { lemmas: &["buy", "purchase"], hypernyms: &["get"], gloss: "obtain by purchase" },
    VerbSpec { lemmas: &["need", "require", "want"], hypernyms: &[], gloss: "require as useful, just, or proper" },
    VerbSpec { lemmas: &["have", "own", "possess"], hypernyms: &[], gloss: "have ownership or possession of" },
    VerbSpec { lemmas: &["take"], hypernyms: &["get"], gloss: "get into one's hands" },
    VerbSpec { lemmas: &["carry"], hypernyms: &["travel"], gloss: "move while supporting" },
    VerbSpec { lemmas: &["drop"], hypernyms: &[], gloss: "let fall to the ground" },
    VerbSpec { lemmas: &["cut"], hypernyms: &[], gloss: "separate with or as if with an instrument" },
    VerbSpec { lemmas: &["wash", "launder"], hypernyms: &[], gloss: "cleanse with a cleaning agent" },
    VerbSpec { lemmas: &["chase", "pursue"], hypernyms: &["travel"], gloss: "go after with the intent to catch" },
    VerbSpec { lemmas: &["hunt", "hunt_down"], hypernyms: &["chase"], gloss: "pursue for food or sport" },
    VerbSpec { lemmas: &["praise"], hypernyms: &[], gloss: "express approval of" },
    VerbSpec { lemmas: &["smile"], hypernyms: &[], gloss: "change one's facial expression" },
    VerbSpec { lemmas: &["work"], hypernyms: &[], gloss: "exert oneself by doing mental or physical work" },
    VerbSpec { lemmas: &["read"], hypernyms: &["perceive"], gloss: "interpret something that is written" },
    VerbSpec { lemmas: &["stay", "remain"], hypernyms: &[], gloss: "stay the same; remain in a certain state" },
];

const HEADER: &str = "  1 Synthetic mini lexical database in the WordNet file layout.\n  2 Generated for tests; not derived from any WordNet release.\n";

struct Rec {
    lemmas: Vec<String>,
    hypernyms: Vec<usize>,
    hyponyms: Vec<usize>,
    gloss: String,
}

fn records(specs: impl Iterator<Item = (Vec<String>, Vec<String>, String)>) -> Vec<Rec> {
    let specs: Vec<_> = specs.collect();
    let head = |name: &str| {
        specs
            .iter()
            .position(|(l, _, _)| l[0] == name)
            .unwrap_or_else(|| panic!("unknown synset head {name}"))
    };
    let mut recs: Vec<Rec> = specs
        .iter()
        .map(|(l, h, g)| Rec {
            lemmas: l.clone(),
            hypernyms: h.iter().map(|x| head(x)).collect(),
            hyponyms: Vec::new(),
            gloss: g.clone(),
        })
        .collect();
    for i in 0..recs.len() {
        for h in recs[i].hypernyms.clone() {
            recs[h].hyponyms.push(i);
        }
    }
    recs
}

/// Renders `data.<pos>` and `index.<pos>` contents with real byte offsets.
fn render(recs: &[Rec], pos: char, lex_file: u32) -> (String, String) {
    let body = |offsets: &[usize], i: usize| {
        let r = &recs[i];
        let mut s = String::new();
        let _ = write!(s, "{:08} {:02} {} {:02x}", offsets[i], lex_file, pos, r.lemmas.len());
        for l in &r.lemmas {
            let _ = write!(s, " {l} 0");
        }
        let _ = write!(s, " {:03}", r.hypernyms.len() + r.hyponyms.len());
        for &h in &r.hypernyms {
            let _ = write!(s, " @ {:08} {pos} 0000", offsets[h]);
        }
        for &h in &r.hyponyms {
            let _ = write!(s, " ~ {:08} {pos} 0000", offsets[h]);
        }
        if pos == 'v' {
            s.push_str(" 01 + 02 00");
        }
        let _ = writeln!(s, " | {}  ", r.gloss);
        s
    };
    // Offsets are fixed-width, so line lengths do not depend on their values.
    let zeros = vec![0usize; recs.len()];
    let mut offsets = Vec::with_capacity(recs.len());
    let mut at = HEADER.len();
    for i in 0..recs.len() {
        offsets.push(at);
        at += body(&zeros, i).len();
    }
    let mut data = HEADER.to_string();
    for i in 0..recs.len() {
        data.push_str(&body(&offsets, i));
    }

    let mut senses: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
    for (i, r) in recs.iter().enumerate() {
        for l in &r.lemmas {
            senses.entry(l).or_default().push(i);
        }
    }
    let mut index = HEADER.to_string();
    for (lemma, ids) in senses {
        let has_hyper = ids.iter().any(|&i| !recs[i].hypernyms.is_empty());
        let has_hypo = ids.iter().any(|&i| !recs[i].hyponyms.is_empty());
        let ptrs: Vec<&str> = [(has_hyper, "@"), (has_hypo, "~")]
            .iter()
            .filter(|(b, _)| *b)
            .map(|(_, p)| *p)
            .collect();
        let _ = write!(index, "{lemma} {pos} {} {}", ids.len(), ptrs.len());
        for p in &ptrs {
            let _ = write!(index, " {p}");
        }
        let _ = write!(index, " {} 0", ids.len());
        for &i in &ids {
            let _ = write!(index, " {:08}", offsets[i]);
        }
        index.push_str("  \n");
    }
    (data, index)
}

/// `(file name, contents)` for data.noun, index.noun, data.verb, index.verb.
pub fn mini_wordnet_files() -> Vec<(&'static str, String)> {
    let to_owned = |l: &[&str]| l.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let nouns = records(NOUNS.iter().map(|s| (to_owned(s.lemmas), to_owned(s.hypernyms), s.gloss.to_string())));
    let verbs = records(VERBS.iter().map(|s| (to_owned(s.lemmas), to_owned(s.hypernyms), s.gloss.to_string())));
    let (dn, inn) = render(&nouns, 'n', 3);
    let (dv, iv) = render(&verbs, 'v', 29);
    vec![("data.noun", dn), ("index.noun", inn), ("data.verb", dv), ("index.verb", iv)]
}

pub fn write_mini_wordnet(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in mini_wordnet_files() {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// Writes `mini-corpus.txt`, `pairs.tsv` and `mini-wordnet/` under `dir`.
pub fn write_all(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("mini-corpus.txt"), mini_corpus_text())?;
    fs::write(dir.join("pairs.tsv"), PAIRS_TSV)?;
    write_mini_wordnet(&dir.join("mini-wordnet"))
}
