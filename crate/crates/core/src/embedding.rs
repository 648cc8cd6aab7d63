//! Sentence embeddings behind a provider boundary.
//!
//! Vectors come either from a precomputed store file or from a remote HTTP
//! service. The store is JSONL: a header line `{"dim":768,"model_tag":"..."}`
//! followed by one `{"id":"...","v":[...]}` line per tweet. Values are written
//! as the shortest decimal that round-trips a 32-bit float (at most 9
//! significant digits) and parsed back with correct rounding, so a store
//! survives save/load bit for bit.

use std::borrow::Cow;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use unicode_normalization::UnicodeNormalization;

use crate::{Error, Result};

pub const DEFAULT_DIM: usize = 768;

/// NFC-normalize, drop control characters, collapse whitespace runs to a
/// single space and trim.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.nfc() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else if !c.is_control() {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    pub tweet_id: String,
    pub values: Vec<f32>,
}

fn check_finite(id: &str, values: &[f32]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Validation(format!(
            "embedding for {id} has a non-finite value at index {i}"
        ))),
        None => Ok(()),
    }
}

/// An id-keyed set of equal-length vectors, kept in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    model_tag: String,
    entries: IndexMap<String, Vec<f32>>,
}

#[derive(Serialize, Deserialize)]
struct StoreHeader {
    dim: usize,
    model_tag: String,
}

#[derive(Serialize)]
struct StoreLineOut<'a> {
    id: &'a str,
    v: &'a [f32],
}

#[derive(Deserialize)]
struct StoreLineIn<'a> {
    #[serde(borrow)]
    id: Cow<'a, str>,
    #[serde(borrow)]
    v: Vec<&'a RawValue>,
}

impl EmbeddingStore {
    pub fn new(dim: usize, model_tag: impl Into<String>) -> Self {
        EmbeddingStore {
            dim,
            model_tag: model_tag.into(),
            entries: IndexMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Insert a vector. Re-inserting an id with identical values is a no-op;
    /// different values for a known id are rejected.
    pub fn insert(&mut self, id: impl Into<String>, values: Vec<f32>) -> Result<()> {
        let id = id.into();
        if values.len() != self.dim {
            return Err(Error::Shape(format!(
                "embedding for {id} has length {}, store dim is {}",
                values.len(),
                self.dim
            )));
        }
        check_finite(&id, &values)?;
        match self.entries.get(&id) {
            Some(existing) if *existing == values => Ok(()),
            Some(_) => Err(Error::Validation(format!(
                "conflicting embeddings for id {id}"
            ))),
            None => {
                self.entries.insert(id, values);
                Ok(())
            }
        }
    }
}

/// Write a store atomically (temporary file in the same directory, then
/// rename), so a failed write never leaves a partial store behind.
pub fn save_store(store: &EmbeddingStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let tmp = tmp_path(path);
    let result = write_store(store, &tmp).and_then(|()| {
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    });
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

fn write_store(store: &EmbeddingStore, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::io(path, e);
    let mut out = BufWriter::new(fs::File::create(path).map_err(io)?);
    let header = StoreHeader {
        dim: store.dim,
        model_tag: store.model_tag.clone(),
    };
    serde_json::to_writer(&mut out, &header).map_err(|e| io(e.into()))?;
    out.write_all(b"\n").map_err(io)?;
    for (id, v) in &store.entries {
        serde_json::to_writer(&mut out, &StoreLineOut { id, v }).map_err(|e| io(e.into()))?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn load_store(path: impl AsRef<Path>) -> Result<EmbeddingStore> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::PathNotFound(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    let mut lines = BufReader::new(file).lines();
    let header_line = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .ok_or_else(|| Error::parse(path, "missing store header"))?;
    let header: StoreHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::parse(path, format!("bad store header: {e}")))?;
    if header.dim == 0 {
        return Err(Error::parse(path, "store header has dim 0"));
    }

    let mut store = EmbeddingStore::new(header.dim, header.model_tag);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let rec: StoreLineIn = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, format!("line {lineno}: {e}")))?;
        if rec.v.len() != store.dim {
            return Err(Error::Shape(format!(
                "{} line {lineno}: vector for {} has length {}, header says {}",
                path.display(),
                rec.id,
                rec.v.len(),
                store.dim
            )));
        }
        let values = rec
            .v
            .iter()
            .map(|raw| raw.get().parse::<f32>())
            .collect::<std::result::Result<Vec<f32>, _>>()
            .map_err(|e| Error::parse(path, format!("line {lineno}: {e}")))?;
        if store.contains(&rec.id) {
            return Err(Error::Validation(format!(
                "{} line {lineno}: duplicate id {}",
                path.display(),
                rec.id
            )));
        }
        store.insert(rec.id.into_owned(), values)?;
    }
    Ok(store)
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

/// One text to embed, keyed by its tweet id.
#[derive(Debug, Clone, Copy)]
pub struct TextItem<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

pub trait EmbeddingProvider {
    fn dim(&self) -> usize;

    fn model_tag(&self) -> &str;

    /// Embed `items`, returning one vector per item in input order.
    fn embed_batch(&mut self, items: &[TextItem<'_>]) -> Result<Vec<EmbeddingVector>>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn model_tag(&self) -> &str {
        (**self).model_tag()
    }

    fn embed_batch(&mut self, items: &[TextItem<'_>]) -> Result<Vec<EmbeddingVector>> {
        (**self).embed_batch(items)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderMode {
    Precomputed,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub mode: ProviderMode,
    pub store_path: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub batch_size: usize,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub dim: usize,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            mode: ProviderMode::Precomputed,
            store_path: None,
            endpoint: None,
            batch_size: 64,
            timeout_ms: 30_000,
            max_retries: 3,
            dim: DEFAULT_DIM,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        match self.mode {
            ProviderMode::Precomputed if self.store_path.is_none() => Err(Error::Config(
                "precomputed mode requires a store path".into(),
            )),
            ProviderMode::Remote if self.endpoint.is_none() => {
                Err(Error::Config("remote mode requires an endpoint".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Serves vectors from a loaded store; never embeds new text.
pub struct PrecomputedProvider {
    store: EmbeddingStore,
}

impl PrecomputedProvider {
    pub fn new(store: EmbeddingStore) -> Self {
        PrecomputedProvider { store }
    }

    pub fn store(&self) -> &EmbeddingStore {
        &self.store
    }
}

impl EmbeddingProvider for PrecomputedProvider {
    fn dim(&self) -> usize {
        self.store.dim()
    }

    fn model_tag(&self) -> &str {
        self.store.model_tag()
    }

    fn embed_batch(&mut self, items: &[TextItem<'_>]) -> Result<Vec<EmbeddingVector>> {
        items
            .iter()
            .map(|item| {
                self.store
                    .get(item.id)
                    .map(|v| EmbeddingVector {
                        tweet_id: item.id.to_string(),
                        values: v.to_vec(),
                    })
                    .ok_or_else(|| Error::MissingVector(item.id.to_string()))
            })
            .collect()
    }
}

/// Serves what the store already holds and forwards only the misses to an
/// inner provider; new vectors are added to the store.
pub struct CachedProvider<P> {
    store: EmbeddingStore,
    inner: P,
}

impl<P: EmbeddingProvider> CachedProvider<P> {
    pub fn new(store: EmbeddingStore, inner: P) -> Result<Self> {
        if store.dim() != inner.dim() {
            return Err(Error::Protocol(format!(
                "cache dim {} does not match provider dim {}",
                store.dim(),
                inner.dim()
            )));
        }
        Ok(CachedProvider { store, inner })
    }

    pub fn store(&self) -> &EmbeddingStore {
        &self.store
    }

    pub fn into_store(self) -> EmbeddingStore {
        self.store
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for CachedProvider<P> {
    fn dim(&self) -> usize {
        self.store.dim()
    }

    fn model_tag(&self) -> &str {
        self.store.model_tag()
    }

    fn embed_batch(&mut self, items: &[TextItem<'_>]) -> Result<Vec<EmbeddingVector>> {
        let misses: Vec<TextItem<'_>> = items
            .iter()
            .filter(|item| !self.store.contains(item.id))
            .copied()
            .collect();
        if !misses.is_empty() {
            for v in self.inner.embed_batch(&misses)? {
                self.store.insert(v.tweet_id, v.values)?;
            }
        }
        items
            .iter()
            .map(|item| {
                Ok(EmbeddingVector {
                    tweet_id: item.id.to_string(),
                    values: self
                        .store
                        .get(item.id)
                        .ok_or_else(|| Error::MissingVector(item.id.to_string()))?
                        .to_vec(),
                })
            })
            .collect()
    }
}

#[cfg(feature = "remote")]
pub use remote::RemoteProvider;

#[cfg(feature = "remote")]
mod remote {
    use std::collections::HashMap;
    use std::time::Duration;

    use serde::{Deserialize, Serialize};

    use super::*;

    #[derive(Serialize)]
    struct EmbedRequest<'a> {
        texts: &'a [String],
    }

    #[derive(Deserialize)]
    struct EmbedResponse {
        dim: usize,
        vectors: Vec<Vec<f64>>,
    }

    #[derive(Deserialize)]
    struct InfoResponse {
        model: String,
        dim: usize,
    }

    /// Client for the embedding service:
    ///
    /// * `GET  <endpoint>/healthz`  → 200 once the model is ready
    /// * `GET  <endpoint>/v1/info`  → `{"model": "...", "dim": 768}`
    /// * `POST <endpoint>/v1/embed` with `{"texts": [...]}` →
    ///   `{"dim": 768, "vectors": [[...], ...]}`
    ///
    /// Texts are normalized before sending. Identical texts are embedded once
    /// per provider and served from memory afterwards.
    pub struct RemoteProvider {
        agent: ureq::Agent,
        endpoint: String,
        dim: usize,
        model_tag: String,
        batch_size: usize,
        max_retries: u32,
        requests: usize,
        memo: HashMap<String, Vec<f32>>,
    }

    impl RemoteProvider {
        /// Check health, read `/v1/info` and verify the advertised dimension.
        pub fn connect(config: &ProviderConfig) -> Result<Self> {
            config.validate()?;
            let endpoint = config
                .endpoint
                .clone()
                .ok_or_else(|| Error::Config("remote mode requires an endpoint".into()))?;
            let agent: ureq::Agent = ureq::Agent::config_builder()
                .timeout_global(Some(Duration::from_millis(config.timeout_ms.max(1))))
                .build()
                .into();
            let mut provider = RemoteProvider {
                agent,
                endpoint: endpoint.trim_end_matches('/').to_string(),
                dim: config.dim,
                model_tag: String::new(),
                batch_size: config.batch_size,
                max_retries: config.max_retries,
                requests: 0,
                memo: HashMap::new(),
            };
            provider.with_retries(|p| p.get_text("/healthz").map(drop))?;
            let info: InfoResponse = provider.with_retries(|p| {
                let body = p.get_text("/v1/info")?;
                serde_json::from_str(&body)
                    .map_err(|e| Error::Protocol(format!("bad /v1/info response: {e}")))
            })?;
            if info.dim != config.dim {
                return Err(Error::Protocol(format!(
                    "service dim {} does not match configured dim {}",
                    info.dim, config.dim
                )));
            }
            provider.model_tag = info.model;
            Ok(provider)
        }

        /// Number of HTTP requests sent so far.
        pub fn requests_sent(&self) -> usize {
            self.requests
        }

        fn url(&self, route: &str) -> String {
            format!("{}{route}", self.endpoint)
        }

        fn get_text(&mut self, route: &str) -> Result<String> {
            self.requests += 1;
            let mut resp = self
                .agent
                .get(&self.url(route))
                .call()
                .map_err(|e| Error::Transport(format!("GET {route}: {e}")))?;
            resp.body_mut()
                .read_to_string()
                .map_err(|e| Error::Transport(format!("GET {route}: {e}")))
        }

        fn post_embed(&mut self, texts: &[String]) -> Result<EmbedResponse> {
            self.requests += 1;
            let mut resp = self
                .agent
                .post(&self.url("/v1/embed"))
                .send_json(EmbedRequest { texts })
                .map_err(|e| Error::Transport(format!("POST /v1/embed: {e}")))?;
            let body = resp
                .body_mut()
                .read_to_string()
                .map_err(|e| Error::Transport(format!("POST /v1/embed: {e}")))?;
            serde_json::from_str(&body)
                .map_err(|e| Error::Protocol(format!("bad /v1/embed response: {e}")))
        }

        fn with_retries<T>(&mut self, mut op: impl FnMut(&mut Self) -> Result<T>) -> Result<T> {
            let mut attempt = 0;
            loop {
                match op(self) {
                    Err(Error::Transport(msg)) if attempt < self.max_retries => {
                        attempt += 1;
                        log::warn!("{msg}; retry {attempt}/{}", self.max_retries);
                        std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
                    }
                    other => return other,
                }
            }
        }

        fn embed_texts(&mut self, texts: &[String]) -> Result<Vec<Vec<f32>>> {
            let resp = self.with_retries(|p| p.post_embed(texts))?;
            if resp.dim != self.dim {
                return Err(Error::Protocol(format!(
                    "response dim {} does not match configured dim {}",
                    resp.dim, self.dim
                )));
            }
            if resp.vectors.len() != texts.len() {
                return Err(Error::Protocol(format!(
                    "sent {} texts, received {} vectors",
                    texts.len(),
                    resp.vectors.len()
                )));
            }
            resp.vectors
                .into_iter()
                .map(|v| {
                    if v.len() != self.dim {
                        return Err(Error::Protocol(format!(
                            "vector of length {} in a dim {} response",
                            v.len(),
                            self.dim
                        )));
                    }
                    let v: Vec<f32> = v.into_iter().map(|x| x as f32).collect();
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Protocol("non-finite value in response".into()));
                    }
                    Ok(v)
                })
                .collect()
        }
    }

    impl EmbeddingProvider for RemoteProvider {
        fn dim(&self) -> usize {
            self.dim
        }

        fn model_tag(&self) -> &str {
            &self.model_tag
        }

        fn embed_batch(&mut self, items: &[TextItem<'_>]) -> Result<Vec<EmbeddingVector>> {
            let normalized: Vec<String> = items.iter().map(|i| normalize_text(i.text)).collect();
            let mut pending: Vec<String> = Vec::new();
            for text in &normalized {
                if !self.memo.contains_key(text) && !pending.contains(text) {
                    pending.push(text.clone());
                }
            }
            for (n, chunk) in pending.chunks(self.batch_size).enumerate() {
                let vectors = self.embed_texts(chunk)?;
                log::info!("embedded batch {} ({} texts)", n + 1, chunk.len());
                for (text, v) in chunk.iter().zip(vectors) {
                    self.memo.insert(text.clone(), v);
                }
            }
            Ok(items
                .iter()
                .zip(&normalized)
                .map(|(item, text)| EmbeddingVector {
                    tweet_id: item.id.to_string(),
                    values: self.memo[text].clone(),
                })
                .collect())
        }
    }
}

/// Build the provider described by `config` and embed `items` with it.
pub fn embed_batch(items: &[TextItem<'_>], config: &ProviderConfig) -> Result<Vec<EmbeddingVector>> {
    config.validate()?;
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let vectors = match config.mode {
        ProviderMode::Precomputed => {
            let path = config.store_path.as_ref().expect("validated");
            PrecomputedProvider::new(load_store(path)?).embed_batch(items)?
        }
        #[cfg(feature = "remote")]
        ProviderMode::Remote => RemoteProvider::connect(config)?.embed_batch(items)?,
        #[cfg(not(feature = "remote"))]
        ProviderMode::Remote => {
            return Err(Error::Config(
                "remote embedding support was not compiled in".into(),
            ))
        }
    };
    if let Some(v) = vectors.iter().find(|v| v.values.len() != config.dim) {
        return Err(Error::Protocol(format!(
            "vector for {} has length {}, configured dim is {}",
            v.tweet_id,
            v.values.len(),
            config.dim
        )));
    }
    Ok(vectors)
}
