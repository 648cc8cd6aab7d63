//! The 39 integer features: 9 context features from user and tweet metadata
//! followed by 30 content features from the tweet text.
//!
//! Text handling rules shared by the content features:
//!
//! * tokens are maximal runs of non-whitespace;
//! * link tokens (`http://`, `https://`, `www.`) are removed from the *body*
//!   before any surface count (case, punctuation, emoticons, digits), so URL
//!   paths and query strings do not leak into them;
//! * *words* are body tokens that are not `@mentions`, with leading and
//!   trailing non-alphanumeric characters stripped and lowercased; all
//!   lexicon matching is done on words.
//!
//! Word count and character count use the raw text.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use chrono::{DateTime, Datelike};
use regex::Regex;

use crate::dataset::Tweet;
use crate::{Error, Result};

pub const N_CONTEXT: usize = 9;
pub const N_CONTENT: usize = 30;
pub const N_FEATURES: usize = N_CONTEXT + N_CONTENT;
pub const SCHEMA_ID: &str = "tweet39-v1";

/// Human-readable slot names, in vector order.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "verified",
    "has_description",
    "has_url",
    "followers_count",
    "friends_count",
    "followers_over_500",
    "posted_on_weekday",
    "statuses_count",
    "is_retweet",
    "hashtag_count",
    "word_count",
    "char_count",
    "has_top_domain",
    "has_url_in_text",
    "url_count",
    "mentions_news_agency",
    "mention_count",
    "has_stock_symbol",
    "has_digits",
    "mentions_selected_user",
    "uppercase_count",
    "question_marks",
    "exclamation_marks",
    "has_multi_punct",
    "smile_count",
    "frown_count",
    "positive_words",
    "negative_words",
    "sentiment_score",
    "first_person_pronouns",
    "second_person_pronouns",
    "third_person_pronouns",
    "temporal_refs",
    "lexical_density",
    "slang_terms",
    "intensifiers",
    "has_repeated_chars",
    "has_all_caps_word",
    "title_capitalised",
];

/// Slots that only ever hold 0 or 1.
pub const BOOLEAN_SLOTS: [usize; 16] = [0, 1, 2, 5, 6, 8, 12, 13, 15, 17, 18, 19, 23, 36, 37, 38];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub values: [i64; N_FEATURES],
    pub schema_id: String,
}

impl FeatureVector {
    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

/// Word lists used by the content features.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicons {
    pub positive_words: BTreeSet<String>,
    pub negative_words: BTreeSet<String>,
    pub first_pronouns: BTreeSet<String>,
    pub second_pronouns: BTreeSet<String>,
    pub third_pronouns: BTreeSet<String>,
    pub temporal_refs: BTreeSet<String>,
    pub intensifiers: BTreeSet<String>,
    pub slang_terms: BTreeSet<String>,
    pub news_agencies: BTreeSet<String>,
    pub selected_users: BTreeSet<String>,
    pub top_domains: BTreeSet<String>,
    pub stop_words: BTreeSet<String>,
    pub smile_patterns: Vec<String>,
    pub frown_patterns: Vec<String>,
    /// Non-fatal problems found while loading (empty lists).
    pub warnings: Vec<String>,
}

/// File names of the word lists, in [`Lexicons`] field order.
pub const LEXICON_FILES: [&str; 12] = [
    "positive_words.txt",
    "negative_words.txt",
    "first_pronouns.txt",
    "second_pronouns.txt",
    "third_pronouns.txt",
    "temporal_refs.txt",
    "intensifiers.txt",
    "slang_terms.txt",
    "news_agencies.txt",
    "selected_users.txt",
    "top_domains.txt",
    "stop_words.txt",
];
pub const EMOTICON_FILE: &str = "emoticons.txt";

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        [$(($name, include_str!(concat!("../lexicons/", $name)))),*]
    };
}

const BUNDLED: [(&str, &str); 13] = bundled!(
    "positive_words.txt",
    "negative_words.txt",
    "first_pronouns.txt",
    "second_pronouns.txt",
    "third_pronouns.txt",
    "temporal_refs.txt",
    "intensifiers.txt",
    "slang_terms.txt",
    "news_agencies.txt",
    "selected_users.txt",
    "top_domains.txt",
    "stop_words.txt",
    "emoticons.txt",
);

fn parse_word_list(content: &str) -> BTreeSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

/// Emoticons keep their case (`:D` is not `:d`).
fn parse_emoticons(content: &str) -> (Vec<String>, Vec<String>) {
    let (mut smile, mut frown) = (Vec::new(), Vec::new());
    let mut section = None;
    for line in content.lines().map(str::trim) {
        match line {
            "" => {}
            "[smile]" => section = Some(true),
            "[frown]" => section = Some(false),
            l if l.starts_with('#') => {}
            l => {
                let list = match section {
                    Some(true) => &mut smile,
                    Some(false) => &mut frown,
                    None => continue,
                };
                if !list.iter().any(|p| p == l) {
                    list.push(l.to_string());
                }
            }
        }
    }
    (smile, frown)
}

impl Lexicons {
    fn from_sources<'a>(mut source: impl FnMut(&'a str) -> Result<String>) -> Result<Self>
    where
        Self: 'a,
    {
        let mut lex = Lexicons::default();
        let mut warnings = Vec::new();
        {
            let targets: [&mut BTreeSet<String>; 12] = [
                &mut lex.positive_words,
                &mut lex.negative_words,
                &mut lex.first_pronouns,
                &mut lex.second_pronouns,
                &mut lex.third_pronouns,
                &mut lex.temporal_refs,
                &mut lex.intensifiers,
                &mut lex.slang_terms,
                &mut lex.news_agencies,
                &mut lex.selected_users,
                &mut lex.top_domains,
                &mut lex.stop_words,
            ];
            for (name, target) in LEXICON_FILES.iter().zip(targets) {
                *target = parse_word_list(&source(name)?);
                if target.is_empty() {
                    warnings.push(format!("lexicon {name} is empty"));
                }
            }
        }
        let (smile, frown) = parse_emoticons(&source(EMOTICON_FILE)?);
        if smile.is_empty() {
            warnings.push(format!("{EMOTICON_FILE} has no [smile] entries"));
        }
        if frown.is_empty() {
            warnings.push(format!("{EMOTICON_FILE} has no [frown] entries"));
        }
        lex.smile_patterns = smile;
        lex.frown_patterns = frown;
        for w in &warnings {
            log::warn!("{w}");
        }
        lex.warnings = warnings;
        Ok(lex)
    }

    /// Load the 13 lexicon files from `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::PathNotFound(dir.to_path_buf()));
        }
        Self::from_sources(|name| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => Error::PathNotFound(path),
                _ => Error::io(path, e),
            })
        })
    }

    /// The lexicons shipped with the crate, compiled in.
    pub fn bundled() -> Self {
        Self::from_sources(|name| {
            Ok(BUNDLED
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, c)| c.to_string())
                .unwrap_or_default())
        })
        .expect("bundled lexicons are infallible")
    }
}

pub fn load_lexicons(dir: impl AsRef<Path>) -> Result<Lexicons> {
    Lexicons::load(dir)
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

fn hashtag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|[^\w&])#(\w+)").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|[^\w])@(\w{1,15})").unwrap())
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").unwrap())
}

fn is_link(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

fn strip_token(token: &str) -> &str {
    token.trim_matches(|c: char| !c.is_alphanumeric())
}

fn normalize_word(token: &str) -> String {
    strip_token(token).replace('\u{2019}', "'").to_lowercase()
}

/// Host part of a URL, lowercased and without a leading `www.`.
fn url_host(url: &str) -> String {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let host = rest
        .split(['/', ':', '?', '#'])
        .next()
        .unwrap_or("")
        .to_lowercase();
    host.strip_prefix("www.").map(str::to_string).unwrap_or(host)
}

fn domain_listed(host: &str, domains: &BTreeSet<String>) -> bool {
    let mut h = host;
    loop {
        if !h.is_empty() && domains.contains(h) {
            return true;
        }
        match h.split_once('.') {
            Some((_, rest)) => h = rest,
            None => return false,
        }
    }
}

/// `$` followed by 1 to 6 ASCII letters, not embedded in a longer word.
fn has_stock_symbol(text: &str) -> bool {
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c != '$' || (i > 0 && chars[i - 1].is_alphanumeric()) {
            continue;
        }
        let run = chars[i + 1..]
            .iter()
            .take_while(|c| c.is_ascii_alphabetic())
            .count();
        let next = chars.get(i + 1 + run);
        if (1..=6).contains(&run) && !next.is_some_and(|c| c.is_alphanumeric()) {
            return true;
        }
    }
    false
}

fn has_punct_run(text: &str) -> bool {
    let chars: Vec<char> = text.chars().collect();
    chars
        .windows(2)
        .any(|w| matches!(w[0], '?' | '!') && matches!(w[1], '?' | '!'))
}

fn has_repeated_letter(text: &str) -> bool {
    let lower: Vec<char> = text.chars().flat_map(char::to_lowercase).collect();
    lower
        .windows(3)
        .any(|w| w[0].is_alphabetic() && w[0] == w[1] && w[1] == w[2])
}

fn is_all_caps_word(token: &str) -> bool {
    let letters: Vec<char> = strip_token(token).chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

fn flag(b: bool) -> i64 {
    b as i64
}

fn count(n: usize) -> i64 {
    n as i64
}

/// Round `100 * num / den` half away from zero, with `den` clamped to 1.
fn percent(num: usize, den: usize) -> i64 {
    let den = den.max(1);
    ((200 * num + den) / (2 * den)) as i64
}

pub fn extract_context_features(tweet: &Tweet) -> [i64; N_CONTEXT] {
    let u = &tweet.user;
    let sat = |n: u64| i64::try_from(n).unwrap_or(i64::MAX);
    let weekday = DateTime::from_timestamp(tweet.created_at, 0)
        .map(|t| t.weekday().number_from_monday() <= 5)
        .unwrap_or(false);
    [
        flag(u.verified),
        flag(u.has_description),
        flag(u.has_url),
        sat(u.followers_count),
        sat(u.friends_count),
        flag(u.followers_count > 500),
        flag(weekday),
        sat(u.statuses_count),
        flag(tweet.is_retweet),
    ]
}

pub fn extract_content_features(tweet: &Tweet, lex: &Lexicons) -> [i64; N_CONTENT] {
    let text = tweet.text.as_str();
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let body_tokens: Vec<&str> = tokens.iter().copied().filter(|t| !is_link(t)).collect();
    let body = body_tokens.join(" ");
    let words: Vec<String> = body_tokens
        .iter()
        .filter(|t| !t.starts_with('@'))
        .map(|t| normalize_word(t))
        .filter(|w| !w.is_empty())
        .collect();
    let count_in = |set: &BTreeSet<String>| words.iter().filter(|w| set.contains(*w)).count();

    let hashtags = if tweet.hashtags.is_empty() {
        hashtag_re().captures_iter(text).count()
    } else {
        tweet.hashtags.len()
    };
    let urls: Vec<String> = if tweet.urls.is_empty() {
        url_re().find_iter(text).map(|m| m.as_str().to_string()).collect()
    } else {
        tweet.urls.clone()
    };
    let mentions: Vec<String> = if tweet.user_mentions.is_empty() {
        mention_re()
            .captures_iter(text)
            .map(|c| c[1].to_lowercase())
            .collect()
    } else {
        tweet.user_mentions.iter().map(|m| m.to_lowercase()).collect()
    };

    let smiles: usize = lex
        .smile_patterns
        .iter()
        .map(|p| body_tokens.iter().map(|t| t.matches(p.as_str()).count()).sum::<usize>())
        .sum();
    let frowns: usize = lex
        .frown_patterns
        .iter()
        .map(|p| body_tokens.iter().map(|t| t.matches(p.as_str()).count()).sum::<usize>())
        .sum();

    let positive = count_in(&lex.positive_words);
    let negative = count_in(&lex.negative_words);
    let content_words = words.iter().filter(|w| !lex.stop_words.contains(*w)).count();

    [
        count(hashtags),
        count(tokens.len()),
        count(text.chars().count()),
        flag(urls.iter().any(|u| domain_listed(&url_host(u), &lex.top_domains))),
        flag(!urls.is_empty()),
        count(urls.len()),
        flag(mentions.iter().any(|m| lex.news_agencies.contains(m))),
        count(mentions.len()),
        flag(has_stock_symbol(&body)),
        flag(body.chars().any(|c| c.is_ascii_digit())),
        flag(mentions.iter().any(|m| lex.selected_users.contains(m))),
        count(body.chars().filter(|c| c.is_uppercase()).count()),
        count(body.matches('?').count()),
        count(body.matches('!').count()),
        flag(has_punct_run(&body)),
        count(smiles),
        count(frowns),
        count(positive),
        count(negative),
        positive as i64 - negative as i64,
        count(count_in(&lex.first_pronouns)),
        count(count_in(&lex.second_pronouns)),
        count(count_in(&lex.third_pronouns)),
        count(count_in(&lex.temporal_refs)),
        percent(content_words, tokens.len()),
        count(count_in(&lex.slang_terms)),
        count(count_in(&lex.intensifiers)),
        flag(has_repeated_letter(&body)),
        flag(body_tokens
            .iter()
            .filter(|t| !t.starts_with('@'))
            .any(|t| is_all_caps_word(t))),
        flag(body.chars().find(|c| c.is_alphabetic()).is_some_and(|c| c.is_uppercase())),
    ]
}

/// Context features followed by content features.
pub fn extract_all(tweet: &Tweet, lex: &Lexicons) -> FeatureVector {
    let mut values = [0i64; N_FEATURES];
    values[..N_CONTEXT].copy_from_slice(&extract_context_features(tweet));
    values[N_CONTEXT..].copy_from_slice(&extract_content_features(tweet, lex));
    FeatureVector {
        values,
        schema_id: SCHEMA_ID.to_string(),
    }
}

/// CSV header of the feature matrix export: `id,f00,...,f38,label`.
pub fn csv_header() -> String {
    let mut cols = vec!["id".to_string()];
    cols.extend((0..N_FEATURES).map(|i| format!("f{i:02}")));
    cols.push("label".into());
    cols.join(",")
}

pub struct CsvRow<'a> {
    pub id: &'a str,
    pub features: &'a FeatureVector,
    pub label: &'a str,
}

impl fmt::Display for CsvRow<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        for v in &self.features.values {
            write!(f, ",{v}")?;
        }
        write!(f, ",{}", self.label)
    }
}

/// Parse a feature CSV written with [`csv_header`] into `(id, values, label)`.
pub fn parse_csv(content: &str) -> Result<Vec<(String, [i64; N_FEATURES], String)>> {
    let mut lines = content.lines();
    let header = lines.next().unwrap_or("");
    if header != csv_header() {
        return Err(Error::parse("<features csv>", "unexpected header"));
    }
    lines
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != N_FEATURES + 2 {
                return Err(Error::parse(
                    "<features csv>",
                    format!("row {} has {} columns", i + 1, cols.len()),
                ));
            }
            let mut values = [0i64; N_FEATURES];
            for (slot, col) in values.iter_mut().zip(&cols[1..=N_FEATURES]) {
                *slot = col
                    .parse()
                    .map_err(|e| Error::parse("<features csv>", format!("row {}: {e}", i + 1)))?;
            }
            Ok((cols[0].to_string(), values, cols[N_FEATURES + 1].to_string()))
        })
        .collect()
}
