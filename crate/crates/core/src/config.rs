//! Run configuration with layered sources: flags > JSON file > `PUNGEN_*` env > defaults.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{GeneratorConfig, Pipeline};
use crate::retrieval::{PositionMode, RetrievalConfig};
use crate::skipgram::SkipGramConfig;
use crate::surprisal::SurprisalConfig;

pub const ENV_PREFIX: &str = "PUNGEN_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub order: usize,
    pub dim: usize,
    pub d1: usize,
    pub d2: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub step_size: f64,
    /// Local context window.
    pub d: usize,
    pub topic_k: usize,
    pub threshold: f64,
    pub pool: usize,
    pub keep: usize,
    pub max_outputs: usize,
    pub min_count: u64,
    pub seed: u64,
    pub permutations: usize,
    pub min_corr: f64,
    pub position_mode: PositionMode,
    pub rerank_surprisal: bool,
    pub wordnet: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sg = SkipGramConfig::default();
        let rt = RetrievalConfig::default();
        RunConfig {
            order: 4,
            dim: sg.dim,
            d1: sg.d1,
            d2: sg.d2,
            epochs: sg.epochs,
            negatives: sg.negatives,
            step_size: sg.step_size,
            d: SurprisalConfig::default().window,
            topic_k: 100,
            threshold: crate::wordnet::DEFAULT_THRESHOLD,
            pool: rt.pool,
            keep: rt.keep,
            max_outputs: 10,
            min_count: 1,
            seed: 0,
            permutations: 10_000,
            min_corr: crate::eval::DEFAULT_MIN_CORR,
            position_mode: rt.mode,
            rerank_surprisal: false,
            wordnet: None,
        }
    }
}

/// Every field optional; used for each configuration layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub order: Option<usize>,
    pub dim: Option<usize>,
    pub d1: Option<usize>,
    pub d2: Option<usize>,
    pub epochs: Option<usize>,
    pub negatives: Option<usize>,
    pub step_size: Option<f64>,
    pub d: Option<usize>,
    pub topic_k: Option<usize>,
    pub threshold: Option<f64>,
    pub pool: Option<usize>,
    pub keep: Option<usize>,
    pub max_outputs: Option<usize>,
    pub min_count: Option<u64>,
    pub seed: Option<u64>,
    pub permutations: Option<usize>,
    pub min_corr: Option<f64>,
    pub position_mode: Option<PositionMode>,
    pub rerank_surprisal: Option<bool>,
    pub wordnet: Option<String>,
}

macro_rules! fields {
    ($m:ident) => {
        $m!(
            order, dim, d1, d2, epochs, negatives, step_size, d, topic_k, threshold, pool, keep,
            max_outputs, min_count, seed, permutations, min_corr, position_mode, rerank_surprisal
        )
    };
}

impl PartialConfig {
    pub fn from_json_str(text: &str) -> Result<PartialConfig> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config file: {e}")))
    }

    pub fn from_json_file(path: &Path) -> Result<PartialConfig> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Reads `PUNGEN_<FIELD>` variables from the given map.
    pub fn from_env_map(vars: &HashMap<String, String>) -> Result<PartialConfig> {
        let mut p = PartialConfig::default();
        macro_rules! read {
            ($($f:ident),*) => {$(
                let key = format!("{}{}", ENV_PREFIX, stringify!($f).to_uppercase());
                if let Some(v) = vars.get(&key) {
                    p.$f = Some(serde_json::from_str(v)
                        .or_else(|_| serde_json::from_value(serde_json::Value::String(v.clone())))
                        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {v:?}")))?);
                }
            )*};
        }
        fields!(read);
        p.wordnet = vars.get(&format!("{ENV_PREFIX}WORDNET")).cloned();
        Ok(p)
    }

    pub fn from_env() -> Result<PartialConfig> {
        let vars: HashMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
        Self::from_env_map(&vars)
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        let mut out = self;
        macro_rules! take {
            ($($f:ident),*) => {$( if out.$f.is_none() { out.$f = lower.$f; } )*};
        }
        fields!(take);
        if out.wordnet.is_none() {
            out.wordnet = lower.wordnet;
        }
        out
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        macro_rules! set {
            ($($f:ident),*) => {$( if let Some(v) = self.$f { c.$f = v; } )*};
        }
        fields!(set);
        c.wordnet = self.wordnet;
        c.validate()?;
        Ok(c)
    }
}

impl RunConfig {
    /// Layers flags over the config file over the environment over defaults.
    pub fn layered(flags: PartialConfig, file: Option<&Path>) -> Result<RunConfig> {
        let file = match file {
            Some(p) => PartialConfig::from_json_file(p)?,
            None => PartialConfig::default(),
        };
        flags.over(file).over(PartialConfig::from_env()?).resolve()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.d1 == 0 || self.d1 > self.d2 {
            return bad("need 1 <= d1 <= d2");
        }
        if self.keep == 0 || self.pool < self.keep {
            return bad("need pool >= keep >= 1");
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad("threshold must lie in [0, 1]");
        }
        if !(-1.0..=1.0).contains(&self.min_corr) {
            return bad("min_corr must lie in [-1, 1]");
        }
        if self.topic_k == 0 || self.dim == 0 || self.d == 0 {
            return bad("topic_k, dim and d must be positive");
        }
        Ok(())
    }

    pub fn skipgram(&self) -> SkipGramConfig {
        SkipGramConfig {
            dim: self.dim,
            d1: self.d1,
            d2: self.d2,
            epochs: self.epochs,
            negatives: self.negatives,
            step_size: self.step_size,
            seed: self.seed,
        }
    }

    pub fn surprisal(&self) -> SurprisalConfig {
        SurprisalConfig {
            window: self.d,
            ..Default::default()
        }
    }

    pub fn generator(&self, pipeline: Pipeline) -> GeneratorConfig {
        GeneratorConfig {
            retrieval: RetrievalConfig {
                pool: self.pool,
                keep: self.keep,
                mode: self.position_mode,
                ..Default::default()
            },
            topic_k: self.topic_k,
            threshold: self.threshold,
            max_outputs: self.max_outputs,
            rerank_surprisal: self.rerank_surprisal,
            pipeline,
            surprisal: self.surprisal(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!((c.d, c.d1, c.d2, c.dim), (2, 5, 10, 300));
        assert_eq!((c.pool, c.keep, c.topic_k), (500, 100, 100));
        assert_eq!(c.threshold, 0.3);
    }

    #[test]
    fn precedence() {
        let flags = PartialConfig {
            seed: Some(7),
            ..Default::default()
        };
        let file = PartialConfig::from_json_str(r#"{"seed": 3, "dim": 50}"#).unwrap();
        let env: HashMap<String, String> = [
            ("PUNGEN_DIM".to_string(), "20".to_string()),
            ("PUNGEN_D".to_string(), "3".to_string()),
            ("PUNGEN_POSITION_MODE".to_string(), "absolute".to_string()),
        ]
        .into();
        let env = PartialConfig::from_env_map(&env).unwrap();
        let c = flags.over(file).over(env).resolve().unwrap();
        assert_eq!((c.seed, c.dim, c.d), (7, 50, 3));
        assert_eq!(c.position_mode, PositionMode::Absolute);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(PartialConfig::from_json_str(r#"{"sed": 1}"#).is_err());
        let env: HashMap<String, String> = [("PUNGEN_DIM".to_string(), "x".to_string())].into();
        assert!(PartialConfig::from_env_map(&env).is_err());
        let p = PartialConfig {
            d1: Some(11),
            ..Default::default()
        };
        assert!(p.resolve().is_err());
    }
}
