//! Run configuration: a sectioned TOML file, overridden by command-line flags.
//!
//! ```toml
//! seed = 42
//! out_dir = "runs/holdout"
//!
//! [data]
//! jsonl = "data/pheme.jsonl"          # or pheme_root = "data/pheme"
//! embedding_store = "data/bert.jsonl"
//! lexicon_dir = "lexicons"            # optional, bundled lists otherwise
//!
//! [split]
//! train_fraction = 0.7
//! cv_k = 5
//!
//! [provider]
//! mode = "remote"
//! endpoint = "http://127.0.0.1:8080"
//!
//! [train]
//! algorithms = ["svm", "logreg", "gnb", "adaboost", "knn", "mlp"]
//! representations = ["features39", "embedding"]
//! epochs = 100
//!
//! [train.mlp]
//! epochs = 200
//!
//! [cv]
//! algorithms = ["knn", "mlp"]
//! representations = ["embedding"]
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rumour_core::classifiers::{Algorithm, TrainConfig};
use rumour_core::embedding::{ProviderConfig, ProviderMode};
use rumour_core::eval::{config_hash, Representation};
use rumour_core::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub pheme_root: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
    pub embedding_store: Option<PathBuf>,
    pub lexicon_dir: Option<PathBuf>,
    pub train_fraction: f64,
    pub cv_k: usize,
    pub provider: ProviderConfig,
    pub algorithms: Vec<Algorithm>,
    pub representations: Vec<Representation>,
    pub cv_algorithms: Vec<Algorithm>,
    pub cv_representations: Vec<Representation>,
    /// Training settings after applying `[train]` and `[train.<algo>]`,
    /// without the seed (which comes from `seed`).
    pub train: BTreeMap<Algorithm, TrainConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out_dir: PathBuf::from("out"),
            pheme_root: None,
            jsonl: None,
            embedding_store: None,
            lexicon_dir: None,
            train_fraction: 0.7,
            cv_k: 5,
            provider: ProviderConfig::default(),
            algorithms: Algorithm::ALL.to_vec(),
            representations: vec![Representation::Features39, Representation::Embedding],
            cv_algorithms: vec![Algorithm::Knn, Algorithm::Mlp],
            cv_representations: vec![Representation::Embedding],
            train: Algorithm::ALL
                .iter()
                .map(|&a| (a, TrainConfig::new(a)))
                .collect(),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn expect_table<'a>(v: &'a toml::Value, name: &str) -> Result<&'a toml::Table> {
    v.as_table().ok_or_else(|| bad(format!("[{name}] must be a table")))
}

fn get_str(t: &toml::Table, key: &str) -> Result<Option<String>> {
    match t.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(|s| Some(s.to_string()))
            .ok_or_else(|| bad(format!("{key} must be a string"))),
    }
}

fn get_int(t: &toml::Table, key: &str) -> Result<Option<i64>> {
    match t.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .map(Some)
            .ok_or_else(|| bad(format!("{key} must be an integer"))),
    }
}

fn get_uint(t: &toml::Table, key: &str) -> Result<Option<u64>> {
    get_int(t, key)?
        .map(|n| u64::try_from(n).map_err(|_| bad(format!("{key} must be non-negative"))))
        .transpose()
}

fn get_list(t: &toml::Table, key: &str) -> Result<Option<Vec<String>>> {
    match t.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_array()
            .and_then(|a| a.iter().map(|x| x.as_str().map(String::from)).collect())
            .map(Some)
            .ok_or_else(|| bad(format!("{key} must be a list of strings"))),
    }
}

fn check_keys(t: &toml::Table, section: &str, allowed: &[&str]) -> Result<()> {
    match t.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(bad(format!("unknown key {k:?} in {section}"))),
        None => Ok(()),
    }
}

pub fn parse_algorithms(names: &[String]) -> Result<Vec<Algorithm>> {
    names.iter().map(|n| n.parse()).collect()
}

pub fn parse_representations(names: &[String]) -> Result<Vec<Representation>> {
    names.iter().map(|n| Representation::parse(n)).collect()
}

const TRAIN_LISTS: [&str; 2] = ["algorithms", "representations"];

/// Overlay the scalar keys of `table` onto `cfg`. Nested tables and the
/// list keys are skipped; any other unknown key is an error.
fn overlay_train(cfg: &TrainConfig, table: &toml::Table, section: &str) -> Result<TrainConfig> {
    let mut json = serde_json::to_value(cfg).expect("TrainConfig serializes");
    let obj = json.as_object_mut().expect("TrainConfig is an object");
    for (key, value) in table {
        if value.is_table() || TRAIN_LISTS.contains(&key.as_str()) {
            continue;
        }
        if key == "algorithm" || key == "seed" || !obj.contains_key(key) {
            return Err(bad(format!("unknown key {key:?} in {section}")));
        }
        let v = serde_json::to_value(value).map_err(|e| bad(format!("{section}.{key}: {e}")))?;
        obj.insert(key.clone(), v);
    }
    serde_json::from_value(json).map_err(|e| bad(format!("{section}: {e}")))
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let root: toml::Table = toml::from_str(text).map_err(|e| bad(format!("config: {e}")))?;
        let mut cfg = RunConfig::default();
        check_keys(
            &root,
            "the top level",
            &["seed", "out_dir", "data", "split", "provider", "train", "cv"],
        )?;
        let path = |s: String| base_dir.join(s);

        if let Some(seed) = get_uint(&root, "seed")? {
            cfg.seed = seed;
        }
        if let Some(out) = get_str(&root, "out_dir")? {
            cfg.out_dir = path(out);
        }
        if let Some(v) = root.get("data") {
            let t = expect_table(v, "data")?;
            check_keys(t, "[data]", &["pheme_root", "jsonl", "embedding_store", "lexicon_dir"])?;
            cfg.pheme_root = get_str(t, "pheme_root")?.map(path);
            cfg.jsonl = get_str(t, "jsonl")?.map(path);
            cfg.embedding_store = get_str(t, "embedding_store")?.map(path);
            cfg.lexicon_dir = get_str(t, "lexicon_dir")?.map(path);
        }
        if let Some(v) = root.get("split") {
            let t = expect_table(v, "split")?;
            check_keys(t, "[split]", &["train_fraction", "cv_k"])?;
            if let Some(f) = t.get("train_fraction") {
                cfg.train_fraction = f
                    .as_float()
                    .or_else(|| f.as_integer().map(|i| i as f64))
                    .ok_or_else(|| bad("train_fraction must be a number"))?;
            }
            if let Some(k) = get_uint(t, "cv_k")? {
                cfg.cv_k = k as usize;
            }
        }
        if let Some(v) = root.get("provider") {
            let t = expect_table(v, "provider")?;
            check_keys(
                t,
                "[provider]",
                &["mode", "store_path", "endpoint", "batch_size", "timeout_ms", "max_retries", "dim"],
            )?;
            let p = &mut cfg.provider;
            if let Some(mode) = get_str(t, "mode")? {
                p.mode = parse_mode(&mode)?;
            }
            if let Some(s) = get_str(t, "store_path")? {
                p.store_path = Some(path(s));
            }
            if let Some(e) = get_str(t, "endpoint")? {
                p.endpoint = Some(e);
            }
            if let Some(n) = get_uint(t, "batch_size")? {
                p.batch_size = n as usize;
            }
            if let Some(n) = get_uint(t, "timeout_ms")? {
                p.timeout_ms = n;
            }
            if let Some(n) = get_uint(t, "max_retries")? {
                p.max_retries = u32::try_from(n).map_err(|_| bad("max_retries too large"))?;
            }
            if let Some(n) = get_uint(t, "dim")? {
                p.dim = n as usize;
            }
        }
        if let Some(v) = root.get("train") {
            let t = expect_table(v, "train")?;
            if let Some(names) = get_list(t, "algorithms")? {
                cfg.algorithms = parse_algorithms(&names)?;
            }
            if let Some(names) = get_list(t, "representations")? {
                cfg.representations = parse_representations(&names)?;
            }
            for (k, v) in t {
                if v.is_table() && k.parse::<Algorithm>().is_err() {
                    return Err(bad(format!("unknown algorithm section [train.{k}]")));
                }
            }
            for (algo, tc) in cfg.train.iter_mut() {
                let mut merged = overlay_train(tc, t, "[train]")?;
                if let Some(sub) = t.get(algo.as_str()) {
                    let section = format!("[train.{algo}]");
                    merged = overlay_train(&merged, expect_table(sub, &section)?, &section)?;
                }
                *tc = merged;
            }
        }
        if let Some(v) = root.get("cv") {
            let t = expect_table(v, "cv")?;
            check_keys(t, "[cv]", &["algorithms", "representations"])?;
            if let Some(names) = get_list(t, "algorithms")? {
                cfg.cv_algorithms = parse_algorithms(&names)?;
            }
            if let Some(names) = get_list(t, "representations")? {
                cfg.cv_representations = parse_representations(&names)?;
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Training config for one algorithm with the run seed applied.
    pub fn train_config(&self, algorithm: Algorithm) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train[&algorithm].clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(bad(format!("train_fraction must be in (0, 1], got {}", self.train_fraction)));
        }
        if self.cv_k < 2 {
            return Err(bad(format!("cv_k must be at least 2, got {}", self.cv_k)));
        }
        for algo in Algorithm::ALL {
            self.train_config(algo).validate()?;
        }
        Ok(())
    }

    /// Every configured input path must exist before a run starts.
    pub fn check_paths(&self) -> Result<()> {
        let inputs = [
            ("data.jsonl", &self.jsonl),
            ("data.pheme_root", &self.pheme_root),
            ("data.embedding_store", &self.embedding_store),
            ("data.lexicon_dir", &self.lexicon_dir),
        ];
        for (key, path) in inputs {
            if let Some(p) = path.as_ref().filter(|p| !p.exists()) {
                return Err(bad(format!("{key}: {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// Hash of everything that affects results; the output directory is left out.
    pub fn hash(&self) -> String {
        config_hash(&RunConfig {
            out_dir: PathBuf::new(),
            ..self.clone()
        })
    }
}

pub fn parse_mode(s: &str) -> Result<ProviderMode> {
    match s {
        "precomputed" => Ok(ProviderMode::Precomputed),
        "remote" => Ok(ProviderMode::Remote),
        _ => Err(bad(format!("unknown provider mode {s:?}"))),
    }
}
