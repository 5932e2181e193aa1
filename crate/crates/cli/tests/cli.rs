use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn punforge(args: &[&str]) -> Output {
    punforge_env(args, &[])
}

fn punforge_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_punforge"));
    for (k, _) in std::env::vars() {
        if k.starts_with("PUNGEN_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).envs(env.iter().copied()).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CORPUS: &str = "\
he got a hair cut today .
she needs a hair cut soon .
the hunter saw a hare in the field .
the greyhound chased a hare at dawn .
the knight rode to the castle at night .
we had a long night at home .
";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Fixture {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        std::fs::write(f.path("corpus.txt"), CORPUS).unwrap();
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn train_lm(&self, corpus: &str, out: &str) {
        let o = punforge(&["train-lm", "--corpus", &self.arg(corpus), "--line-mode", "--order", "3", "--out", &self.arg(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
}

#[test]
fn bare_invocation_prints_usage_and_fails() {
    let o = punforge(&[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn help_succeeds() {
    let o = punforge(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["index", "train-lm", "train-skipgram", "score", "generate", "correlate"] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&punforge(&["score", "--bogus"])), 1);
}

#[test]
fn missing_input_is_a_data_error() {
    let f = Fixture::new();
    let o = punforge(&["train-lm", "--corpus", &f.arg("absent.txt"), "--out", &f.arg("lm.bin")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("absent.txt"));
}

#[test]
fn score_reports_per_line_errors_and_keeps_order() {
    let f = Fixture::new();
    f.train_lm("corpus.txt", "lm.bin");
    let sg = punforge(&[
        "train-skipgram",
        "--corpus",
        &f.arg("corpus.txt"),
        "--line-mode",
        "--dim",
        "8",
        "--epochs",
        "2",
        "--d1",
        "1",
        "--d2",
        "3",
        "--out",
        &f.arg("sg.bin"),
    ]);
    assert_eq!(code(&sg), 0, "{}", stderr(&sg));
    std::fs::write(
        f.path("in.jsonl"),
        concat!(
            r#"{"id": "a", "sentence": "the greyhound got a hare cut .", "pun_word": "hare", "alt_word": "hair"}"#,
            "\n",
            r#"{"id": "b", "sentence": "no pun here .", "pun_word": "hare", "alt_word": "hair"}"#,
            "\n",
            "not json\n",
            r#"{"id": 4, "sentence": "a hare and a hare", "pun_word": "hare", "alt_word": "hair", "pun_position": 4}"#,
            "\n",
        ),
    )
    .unwrap();
    let o = punforge(&[
        "score",
        "--input",
        &f.arg("in.jsonl"),
        "--corpus",
        &f.arg("corpus.txt"),
        "--line-mode",
        "--lm",
        &f.arg("lm.bin"),
        "--skipgram",
        &f.arg("sg.bin"),
        "--out",
        &f.arg("out.jsonl"),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = std::fs::read_to_string(f.path("out.jsonl")).unwrap();
    let recs: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 4);
    assert_eq!(recs.iter().map(|r| r["line"].as_u64().unwrap()).collect::<Vec<_>>(), [1, 2, 3, 4]);

    assert_eq!(recs[0]["id"], "a");
    assert_eq!(recs[0]["pun_position"], 4);
    for key in ["s_local", "s_global", "s_ratio", "unusualness", "ambiguity"] {
        assert!(recs[0][key].is_f64(), "missing {key}: {}", recs[0]);
    }
    assert!(recs[0].get("error").is_none());

    assert_eq!(recs[1]["id"], "b");
    assert!(recs[1]["error"].as_str().unwrap().contains("hare"));
    assert!(recs[1].get("s_local").is_none());
    assert!(recs[2]["error"].as_str().unwrap().contains("malformed"));
    assert_eq!(recs[3]["pun_position"], 4);
}

#[test]
fn mismatched_vocabulary_is_rejected() {
    let f = Fixture::new();
    std::fs::write(f.path("other.txt"), "a completely different corpus .\n").unwrap();
    f.train_lm("other.txt", "lm.bin");
    std::fs::write(
        f.path("in.jsonl"),
        r#"{"sentence": "a hare cut", "pun_word": "hare", "alt_word": "hair"}"#,
    )
    .unwrap();
    let o = punforge(&[
        "score",
        "--input",
        &f.arg("in.jsonl"),
        "--corpus",
        &f.arg("corpus.txt"),
        "--line-mode",
        "--lm",
        &f.arg("lm.bin"),
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).to_lowercase().contains("vocabulary"), "{}", stderr(&o));
}

#[test]
fn generate_requires_wordnet() {
    let f = Fixture::new();
    f.train_lm("corpus.txt", "lm.bin");
    std::fs::write(f.path("pairs.tsv"), "hare\thair\n").unwrap();
    let o = punforge(&[
        "generate",
        "--pairs",
        &f.arg("pairs.tsv"),
        "--corpus",
        &f.arg("corpus.txt"),
        "--line-mode",
        "--lm",
        &f.arg("lm.bin"),
        "--skipgram",
        &f.arg("sg.bin"),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("WordNet"));
}

fn resolved_order(f: &Fixture, extra: &[&str], env: &[(&str, &str)]) -> String {
    let mut args = vec!["-vv", "train-lm", "--corpus", "CORPUS", "--line-mode", "--out", "OUT"];
    let (corpus, out) = (f.arg("corpus.txt"), f.arg("lm.bin"));
    args[3] = &corpus;
    args[6] = &out;
    args.extend(extra);
    let o = punforge_env(&args, env);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let log = stderr(&o);
    let at = log.find("order: ").expect("config is logged at debug level");
    log[at + 7..].chars().take_while(char::is_ascii_digit).collect()
}

#[test]
fn flags_override_file_override_environment() {
    let f = Fixture::new();
    std::fs::write(f.path("cfg.json"), r#"{"order": 3}"#).unwrap();
    let cfg = f.arg("cfg.json");
    let env = [("PUNGEN_ORDER", "5")];
    assert_eq!(resolved_order(&f, &[], &[]), "4");
    assert_eq!(resolved_order(&f, &[], &env), "5");
    assert_eq!(resolved_order(&f, &["--config", &cfg], &env), "3");
    assert_eq!(resolved_order(&f, &["--config", &cfg, "--order", "2"], &env), "2");
}

#[test]
fn invalid_configuration_is_a_usage_error() {
    let f = Fixture::new();
    std::fs::write(f.path("cfg.json"), r#"{"pool": 5, "keep": 10}"#).unwrap();
    let o = punforge(&["--config", &f.arg("cfg.json"), "train-lm", "--corpus", &f.arg("corpus.txt"), "--out", &f.arg("x")]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    std::fs::write(f.path("typo.json"), r#"{"ordr": 3}"#).unwrap();
    let o = punforge(&["--config", &f.arg("typo.json"), "train-lm", "--corpus", &f.arg("corpus.txt"), "--out", &f.arg("x")]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let o = punforge_env(
        &["train-lm", "--corpus", &f.arg("corpus.txt"), "--out", &f.arg("x")],
        &[("PUNGEN_ORDER", "nine")],
    );
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

fn write_ratings(path: &Path) {
    let mut csv = String::from("item_id,rater_id,score\n");
    let base = [1.0, 2.0, 4.0, 3.0, 5.0, 2.0];
    for (i, b) in base.iter().enumerate() {
        csv.push_str(&format!("s{i},r1,{b}\n"));
        csv.push_str(&format!("s{i},r2,{}\n", b + (i % 2) as f64));
        csv.push_str(&format!("s{i},r3,{}\n", 6.0 - b));
    }
    csv.push_str("s6,r1,NA\n");
    std::fs::write(path, csv).unwrap();
}

#[test]
fn correlate_writes_a_table() {
    let f = Fixture::new();
    write_ratings(&f.path("ratings.csv"));
    let mut scores = String::new();
    for i in 0..7 {
        scores.push_str(&format!(
            "{{\"id\": \"s{i}\", \"s_local\": {}, \"s_ratio\": {}, \"degenerate\": false}}\n",
            i as f64 * 0.5,
            (7 - i) as f64
        ));
    }
    std::fs::write(f.path("scores.jsonl"), scores).unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec![
            "correlate".to_string(),
            "--ratings".into(),
            f.arg("ratings.csv"),
            "--scores".into(),
            f.arg("scores.jsonl"),
            "--permutations".into(),
            "200".into(),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = punforge(&refs);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        String::from_utf8(o.stdout).unwrap()
    };
    let table = run(&[]);
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["metric", "n", "spearman", "p_value"]);
    assert_eq!(rows[1][0], "s_local");
    assert_eq!(rows[2][0], "s_ratio");
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][1], "7");
    let rho: f64 = rows[1][2].parse().unwrap();
    let rho_ratio: f64 = rows[2][2].parse().unwrap();
    assert!((rho + rho_ratio).abs() < 1e-9, "reversed metric should flip the sign");
    assert_eq!(table, run(&[]), "same seed, same p-values");
    assert!(run(&["--clip"]).starts_with("metric\t"));
}
