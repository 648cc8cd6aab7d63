//! Corpus ingestion, canonical JSONL interchange, stratified hold-out splits
//! and k-fold plans.
//!
//! The PHEME tree is laid out as
//! `<root>/<event>/(rumours|non-rumours)/<thread-id>/source-tweet/<id>.json`.
//! Only source tweets are loaded; reactions are ignored.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::DateTime;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "rumour")]
    Rumour,
    #[serde(rename = "non-rumour")]
    NonRumour,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::Rumour, ClassLabel::NonRumour];

    /// Class index used by the classifiers. Non-rumour is class 1, the
    /// positive class of the evaluation metrics.
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Rumour => 0,
            ClassLabel::NonRumour => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 1 {
            ClassLabel::NonRumour
        } else {
            ClassLabel::Rumour
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Rumour => "rumour",
            ClassLabel::NonRumour => "non-rumour",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rumour" => Some(ClassLabel::Rumour),
            "non-rumour" => Some(ClassLabel::NonRumour),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserMeta {
    pub verified: bool,
    pub has_description: bool,
    pub has_url: bool,
    pub followers_count: u64,
    pub friends_count: u64,
    pub statuses_count: u64,
}

/// One source tweet. Field order is the canonical JSONL key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    pub label: Option<ClassLabel>,
    /// UTC seconds since the Unix epoch.
    pub created_at: i64,
    pub is_retweet: bool,
    pub user: UserMeta,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
    #[serde(default)]
    pub user_mentions: Vec<String>,
}

impl Tweet {
    /// A tweet with only text set; handy for fixtures and the demo.
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            text: text.into(),
            label: None,
            created_at: 0,
            is_retweet: false,
            user: UserMeta::default(),
            hashtags: Vec::new(),
            urls: Vec::new(),
            user_mentions: Vec::new(),
        }
    }
}

/// An ordered collection of labeled tweets with pairwise distinct ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    name: String,
    tweets: Vec<Tweet>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, tweets: Vec<Tweet>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(tweets.len());
        for t in &tweets {
            if t.id.is_empty() {
                return Err(Error::Validation("tweet with empty id".into()));
            }
            if t.label.is_none() {
                return Err(Error::Validation(format!("tweet {} has no label", t.id)));
            }
            if !seen.insert(t.id.as_str()) {
                return Err(Error::Validation(format!("duplicate tweet id {}", t.id)));
            }
        }
        Ok(LabeledDataset {
            name: name.into(),
            tweets,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.tweets.iter().map(|t| t.id.as_str())
    }

    pub fn label_of(&self, tweet: &Tweet) -> ClassLabel {
        tweet.label.expect("labels are checked on construction")
    }

    /// Number of tweets per class, as `(rumour, non_rumour)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let rumour = self
            .tweets
            .iter()
            .filter(|t| t.label == Some(ClassLabel::Rumour))
            .count();
        (rumour, self.tweets.len() - rumour)
    }

    pub fn index_by_id(&self) -> HashMap<&str, usize> {
        self.tweets
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// PHEME tree
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawTweet {
    id_str: Option<String>,
    id: Option<u64>,
    text: Option<String>,
    full_text: Option<String>,
    created_at: Option<String>,
    #[serde(default)]
    user: RawUser,
    #[serde(default)]
    entities: RawEntities,
    retweeted_status: Option<serde_json::Value>,
}

#[derive(Deserialize, Default)]
struct RawUser {
    verified: Option<bool>,
    description: Option<String>,
    url: Option<String>,
    followers_count: Option<u64>,
    friends_count: Option<u64>,
    statuses_count: Option<u64>,
}

#[derive(Deserialize, Default)]
struct RawEntities {
    #[serde(default)]
    hashtags: Vec<RawHashtag>,
    #[serde(default)]
    urls: Vec<RawUrl>,
    #[serde(default)]
    user_mentions: Vec<RawMention>,
}

#[derive(Deserialize)]
struct RawHashtag {
    text: String,
}

#[derive(Deserialize)]
struct RawUrl {
    url: Option<String>,
    expanded_url: Option<String>,
}

#[derive(Deserialize)]
struct RawMention {
    screen_name: String,
}

const TWITTER_TIME_FORMAT: &str = "%a %b %d %H:%M:%S %z %Y";

/// Parse one Twitter-API JSON object into a [`Tweet`].
pub fn parse_twitter_json(path: &Path, json: &str, label: Option<ClassLabel>) -> Result<Tweet> {
    let raw: RawTweet = serde_json::from_str(json).map_err(|e| Error::parse(path, e))?;

    let id = raw
        .id_str
        .or_else(|| raw.id.map(|n| n.to_string()))
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .ok_or_else(|| Error::parse(path, "tweet has no id"))?;
    let text = raw.full_text.or(raw.text).unwrap_or_default();
    let created_at = match raw.created_at.as_deref() {
        Some(s) => DateTime::parse_from_str(s, TWITTER_TIME_FORMAT)
            .map_err(|e| Error::parse(path, format!("created_at {s:?}: {e}")))?
            .timestamp(),
        None => return Err(Error::parse(path, "missing created_at")),
    };
    let is_retweet = raw.retweeted_status.is_some() || text.starts_with("RT @");
    let non_empty = |s: &Option<String>| s.as_deref().is_some_and(|s| !s.trim().is_empty());

    Ok(Tweet {
        id,
        is_retweet,
        created_at,
        label,
        user: UserMeta {
            verified: raw.user.verified.unwrap_or(false),
            has_description: non_empty(&raw.user.description),
            has_url: non_empty(&raw.user.url),
            followers_count: raw.user.followers_count.unwrap_or(0),
            friends_count: raw.user.friends_count.unwrap_or(0),
            statuses_count: raw.user.statuses_count.unwrap_or(0),
        },
        hashtags: raw.entities.hashtags.into_iter().map(|h| h.text).collect(),
        urls: raw
            .entities
            .urls
            .into_iter()
            .filter_map(|u| u.expanded_url.or(u.url))
            .collect(),
        user_mentions: raw
            .entities
            .user_mentions
            .into_iter()
            .map(|m| m.screen_name)
            .collect(),
        text,
    })
}

fn visible_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        out.push(entry.path());
    }
    out.sort();
    Ok(out)
}

fn load_thread(thread: &Path, label: ClassLabel) -> Result<Tweet> {
    let source_dir = thread.join("source-tweet");
    if !source_dir.is_dir() {
        return Err(Error::Structure(format!(
            "{} has no source-tweet directory",
            thread.display()
        )));
    }
    let files: Vec<PathBuf> = visible_entries(&source_dir)?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
        .collect();
    match files.as_slice() {
        [file] => {
            let json = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
            parse_twitter_json(file, &json, Some(label))
        }
        [] => Err(Error::Structure(format!(
            "{} contains no source tweet",
            source_dir.display()
        ))),
        _ => Err(Error::Structure(format!(
            "{} contains {} source tweets",
            source_dir.display(),
            files.len()
        ))),
    }
}

/// Load every source tweet of a PHEME tree, ordered by event name and then
/// by numeric tweet id.
pub fn load_pheme(root: impl AsRef<Path>) -> Result<LabeledDataset> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::PathNotFound(root.to_path_buf()));
    }
    let events: Vec<PathBuf> = visible_entries(root)?
        .into_iter()
        .filter(|p| p.is_dir())
        .collect();
    if events.is_empty() {
        return Err(Error::Structure(format!(
            "no events found under {}",
            root.display()
        )));
    }

    let mut tweets = Vec::new();
    for event in &events {
        let mut event_tweets = Vec::new();
        let mut found_class_dir = false;
        for (sub, label) in [
            ("rumours", ClassLabel::Rumour),
            ("non-rumours", ClassLabel::NonRumour),
        ] {
            let class_dir = event.join(sub);
            if !class_dir.is_dir() {
                continue;
            }
            found_class_dir = true;
            for thread in visible_entries(&class_dir)?.into_iter().filter(|p| p.is_dir()) {
                event_tweets.push(load_thread(&thread, label)?);
            }
        }
        if !found_class_dir {
            return Err(Error::Structure(format!(
                "event {} has neither rumours/ nor non-rumours/",
                event.display()
            )));
        }
        event_tweets.sort_by(|a, b| id_order(&a.id, &b.id));
        tweets.extend(event_tweets);
    }

    let name = root
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "pheme".into());
    LabeledDataset::new(name, tweets)
}

/// Numeric order for digit-string ids, lexicographic otherwise.
fn id_order(a: &str, b: &str) -> std::cmp::Ordering {
    let numeric = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    if numeric(a) && numeric(b) {
        let (a, b) = (a.trim_start_matches('0'), b.trim_start_matches('0'));
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    } else {
        a.cmp(b)
    }
}

// ---------------------------------------------------------------------------
// Canonical JSONL
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct JsonlRecord {
    id: String,
    text: String,
    label: Option<String>,
    created_at: i64,
    is_retweet: bool,
    user: UserMeta,
    #[serde(default)]
    hashtags: Vec<String>,
    #[serde(default)]
    urls: Vec<String>,
    #[serde(default)]
    user_mentions: Vec<String>,
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::PathNotFound(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;

    let mut tweets = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, format!("line {}: {e}", lineno + 1)))?;
        let label = match rec.label.as_deref() {
            Some(s) => ClassLabel::parse(s).ok_or_else(|| {
                Error::Validation(format!("line {}: unknown label {s:?}", lineno + 1))
            })?,
            None => {
                return Err(Error::Validation(format!(
                    "line {}: missing label",
                    lineno + 1
                )))
            }
        };
        tweets.push(Tweet {
            id: rec.id,
            text: rec.text,
            label: Some(label),
            created_at: rec.created_at,
            is_retweet: rec.is_retweet,
            user: rec.user,
            hashtags: rec.hashtags,
            urls: rec.urls,
            user_mentions: rec.user_mentions,
        });
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    LabeledDataset::new(name, tweets)
}

pub fn save_jsonl(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for tweet in dataset.tweets() {
        serde_json::to_writer(&mut out, tweet).map_err(|e| Error::io(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Splits and folds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train_ids: BTreeSet<String>,
    pub test_ids: BTreeSet<String>,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Number of items of a class of size `n` that go to training.
///
/// The small epsilon keeps products such as `0.57 * 100` (which evaluates to
/// 56.999...) on the mathematically exact side of the floor.
pub fn train_count(train_fraction: f64, n: usize) -> usize {
    let exact = train_fraction * n as f64;
    ((exact + 1e-9).floor() as usize).min(n)
}

/// Shuffle each class with a generator seeded by `seed` and send the first
/// `floor(train_fraction * |class|)` ids to training.
pub fn stratified_split(
    dataset: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitResult> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must be in (0, 1], got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_ids = BTreeSet::new();
    let mut test_ids = BTreeSet::new();
    for class in ClassLabel::ALL {
        let mut ids: Vec<&str> = dataset
            .tweets()
            .iter()
            .filter(|t| t.label == Some(class))
            .map(|t| t.id.as_str())
            .collect();
        if ids.is_empty() {
            return Err(Error::Validation(format!("class {class} is empty")));
        }
        ids.shuffle(&mut rng);
        let n_train = train_count(train_fraction, ids.len());
        train_ids.extend(ids[..n_train].iter().map(|s| s.to_string()));
        test_ids.extend(ids[n_train..].iter().map(|s| s.to_string()));
    }
    Ok(SplitResult {
        train_ids,
        test_ids,
        seed,
        train_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle followed by round-robin assignment to `k` folds.
pub fn make_folds(ids: &[String], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if k > ids.len() {
        return Err(Error::Config(format!(
            "k = {k} exceeds the number of ids ({})",
            ids.len()
        )));
    }
    let mut order: Vec<&String> = ids.iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = BTreeMap::new();
    for (pos, id) in order.into_iter().enumerate() {
        if assignment.insert(id.clone(), pos % k).is_some() {
            return Err(Error::Validation(format!("duplicate id {id} in fold input")));
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        assignment,
    })
}
