use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use rumour_core::dataset::{
    load_jsonl, load_pheme, make_folds, save_jsonl, stratified_split, train_count,
};
use rumour_core::{ClassLabel, Error, LabeledDataset, Tweet, UserMeta};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn labeled(id: &str, label: ClassLabel) -> Tweet {
    Tweet {
        label: Some(label),
        ..Tweet::from_text(id, format!("tweet {id}"))
    }
}

fn dataset(n_rumour: usize, n_non: usize) -> LabeledDataset {
    let tweets = (0..n_rumour)
        .map(|i| labeled(&format!("r{i}"), ClassLabel::Rumour))
        .chain((0..n_non).map(|i| labeled(&format!("n{i}"), ClassLabel::NonRumour)))
        .collect();
    LabeledDataset::new("synthetic", tweets).unwrap()
}

#[test]
fn pheme_fixture_loads_four_tweets() {
    let ds = load_pheme(fixture("pheme_mini")).unwrap();
    assert_eq!(ds.len(), 4);
    assert_eq!(ds.class_counts(), (2, 2));
    let ids: Vec<&str> = ds.ids().collect();
    assert_eq!(
        ids,
        [
            "552783667052167168",
            "552784600502915072",
            "544269749405097984",
            "544271362022907904"
        ]
    );
    let t = &ds.tweets()[0];
    assert_eq!(t.label, Some(ClassLabel::Rumour));
    assert_eq!(t.hashtags, ["CharlieHebdo"]);
    assert_eq!(t.created_at, 1420628768);
    assert_eq!(t.user.followers_count, 1500);
    assert!(t.user.has_description && !t.user.has_url);
    assert_eq!(ds.tweets()[1].urls, ["http://www.bbc.co.uk/news"]);
    assert!(ds.tweets()[2].is_retweet);
    assert!(!ds.tweets()[3].is_retweet);
}

#[test]
fn pheme_load_is_deterministic() {
    let a = load_pheme(fixture("pheme_mini")).unwrap();
    let b = load_pheme(fixture("pheme_mini")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn pheme_errors() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_pheme(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Structure(ref m) if m.contains("no events found")));

    assert!(matches!(
        load_pheme(dir.path().join("missing")),
        Err(Error::PathNotFound(_))
    ));

    let thread = dir.path().join("ev/rumours/1/source-tweet");
    fs::create_dir_all(&thread).unwrap();
    assert!(matches!(load_pheme(dir.path()), Err(Error::Structure(_))));

    fs::write(thread.join("1.json"), "{not json").unwrap();
    let err = load_pheme(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Parse { ref path, .. } if path.ends_with("1.json")));

    let src = fixture("pheme_mini/sydneysiege/non-rumours/544271362022907904/source-tweet/544271362022907904.json");
    fs::copy(&src, thread.join("1.json")).unwrap();
    fs::copy(&src, thread.join("2.json")).unwrap();
    let err = load_pheme(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Structure(ref m) if m.contains("2 source tweets")));
}

#[test]
fn jsonl_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    let line = |id: &str, label: &str| {
        format!(
            r#"{{"id":"{id}","text":"t","label":"{label}","created_at":0,"is_retweet":false,"user":{{"verified":false,"has_description":false,"has_url":false,"followers_count":0,"friends_count":0,"statuses_count":0}},"hashtags":[],"urls":[],"user_mentions":[],"extra":1}}"#
        )
    };
    let body = [line("1", "rumour"), line("2", "non-rumour"), line("3", "rumour")].join("\n");
    fs::write(&path, body + "\n").unwrap();
    let ds = load_jsonl(&path).unwrap();
    assert_eq!(ds.len(), 3);
    assert_eq!(ds.ids().collect::<Vec<_>>(), ["1", "2", "3"]);

    fs::write(&path, line("1", "maybe")).unwrap();
    assert!(matches!(load_jsonl(&path), Err(Error::Validation(_))));

    fs::write(&path, [line("1", "rumour"), line("1", "rumour")].join("\n")).unwrap();
    assert!(matches!(load_jsonl(&path), Err(Error::Validation(_))));
}

#[test]
fn save_small_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    save_jsonl(&LabeledDataset::new("e", vec![]).unwrap(), &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "");

    let one = LabeledDataset::new("o", vec![labeled("1", ClassLabel::Rumour)]).unwrap();
    save_jsonl(&one, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with(r#"{"id":"1","text":"#));
}

#[test]
fn pheme_scale_split_counts() {
    let ds = dataset(1969, 3822);
    let split = stratified_split(&ds, 0.7, 42).unwrap();
    let count = |ids: &BTreeSet<String>, prefix: char| ids.iter().filter(|i| i.starts_with(prefix)).count();
    assert_eq!(count(&split.train_ids, 'r'), 1378);
    assert_eq!(count(&split.train_ids, 'n'), 2675);
    assert_eq!(count(&split.test_ids, 'r'), 591);
    assert_eq!(count(&split.test_ids, 'n'), 1147);

    let plan = make_folds(&split.train_ids.iter().cloned().collect::<Vec<_>>(), 5, 42).unwrap();
    let sizes = plan.fold_sizes();
    assert_eq!(sizes.iter().sum::<usize>(), 4053);
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
}

#[test]
fn split_boundaries() {
    let ds = dataset(3, 4);
    let all = stratified_split(&ds, 1.0, 1).unwrap();
    assert_eq!(all.train_ids.len(), 7);
    assert!(all.test_ids.is_empty());
    assert_eq!(stratified_split(&ds, 0.7, 9).unwrap(), stratified_split(&ds, 0.7, 9).unwrap());
    assert!(stratified_split(&ds, 0.0, 1).is_err());
    assert!(stratified_split(&ds, 1.5, 1).is_err());
    assert!(stratified_split(&dataset(0, 3), 0.5, 1).is_err());
}

#[test]
fn fold_examples() {
    let ids = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    assert_eq!(make_folds(&ids(10), 5, 3).unwrap().fold_sizes(), [2; 5]);
    let mut sizes = make_folds(&ids(11), 5, 3).unwrap().fold_sizes();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(sizes, [3, 2, 2, 2, 2]);
    assert!(make_folds(&ids(10), 1, 0).is_err());
    assert!(make_folds(&ids(3), 4, 0).is_err());
}

fn arb_tweet() -> impl Strategy<Value = Tweet> {
    (
        "\\PC{0,40}",
        any::<bool>(),
        -2_000_000_000i64..4_000_000_000,
        any::<bool>(),
        any::<[bool; 3]>(),
        any::<[u32; 3]>(),
        prop::collection::vec("[a-zA-Z0-9_]{1,10}", 0..3),
        prop::collection::vec("https?://[a-z]{1,8}\\.com/[a-z]{0,5}", 0..3),
        prop::collection::vec("[a-zA-Z0-9_]{1,15}", 0..3),
    )
        .prop_map(|(text, rumour, created_at, is_retweet, flags, counts, hashtags, urls, user_mentions)| Tweet {
            id: String::new(),
            text,
            label: Some(if rumour { ClassLabel::Rumour } else { ClassLabel::NonRumour }),
            created_at,
            is_retweet,
            user: UserMeta {
                verified: flags[0],
                has_description: flags[1],
                has_url: flags[2],
                followers_count: counts[0].into(),
                friends_count: counts[1].into(),
                statuses_count: counts[2].into(),
            },
            hashtags,
            urls,
            user_mentions,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jsonl_round_trip(tweets in prop::collection::vec(arb_tweet(), 50)) {
        let tweets: Vec<Tweet> = tweets
            .into_iter()
            .enumerate()
            .map(|(i, t)| Tweet { id: (1000 + i).to_string(), ..t })
            .collect();
        let ds = LabeledDataset::new("random", tweets).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        save_jsonl(&ds, &path).unwrap();
        let back = load_jsonl(&path).unwrap();
        prop_assert_eq!(back.tweets(), ds.tweets());
    }

    #[test]
    fn split_partitions_and_floors(
        n_r in 1usize..200,
        n_n in 1usize..200,
        fraction in 0.01f64..=1.0,
        seed in any::<u64>(),
    ) {
        let ds = dataset(n_r, n_n);
        let s = stratified_split(&ds, fraction, seed).unwrap();
        prop_assert!(s.train_ids.is_disjoint(&s.test_ids));
        prop_assert_eq!(s.train_ids.len() + s.test_ids.len(), n_r + n_n);
        let train_r = s.train_ids.iter().filter(|i| i.starts_with('r')).count();
        let train_n = s.train_ids.len() - train_r;
        prop_assert_eq!(train_r, (fraction * n_r as f64 + 1e-9).floor() as usize);
        prop_assert_eq!(train_r, train_count(fraction, n_r));
        prop_assert_eq!(train_n, train_count(fraction, n_n));
    }

    #[test]
    fn folds_cover_and_balance(n in 2usize..300, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let ids: Vec<String> = (0..n).map(|i| format!("id{i}")).collect();
        let plan = make_folds(&ids, k, seed).unwrap();
        prop_assert_eq!(plan.assignment.len(), n);
        prop_assert!(ids.iter().all(|i| plan.fold_of(i).is_some_and(|f| f < k)));
        let sizes = plan.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert_eq!(plan.clone(), make_folds(&ids, k, seed).unwrap());
    }
}
