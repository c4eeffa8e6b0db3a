mod common;

use std::collections::BTreeMap;
use std::io::Write;

use common::post;
use discourse_core::corpus::{
    filter_corpus, matches, prevalent_users, read_tweets, write_tweets, FilterReport, PostKind,
    RuleSet, TweetRecord,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn el(text: &str, date: (i32, u32, u32)) -> TweetRecord {
    post("1", "a", date, PostKind::Original, &[], text, "el")
}

#[test]
fn shipped_rules_golden_examples() {
    let rs = RuleSet::default_rules();
    assert!(matches(&rs, &el("Νέα στοιχεία #υποκλοπες", (2022, 8, 5))));
    assert!(!matches(&rs, &el("συνέντευξη #ανδρουλακης", (2022, 7, 1))));
    assert!(matches(&rs, &el("συνέντευξη #ανδρουλακης", (2022, 7, 20))));
    assert!(!matches(&rs, &el("δήλωση #κουκακη", (2022, 12, 1))));
    assert!(matches(&rs, &el("δήλωση #κουκακη", (2022, 11, 28))));
    let en = post(
        "1",
        "a",
        (2022, 8, 5),
        PostKind::Original,
        &[],
        "the predator spyware",
        "en",
    );
    assert!(!matches(&rs, &en));
}

#[test]
fn keyword_forms_fold_together() {
    let rs = RuleSet::default_rules();
    for text in [
        "ΥΠΟΚΛΟΠΕΣ παντού",
        "οι υποκλοπες συνεχίζονται",
        "Υποκλοπή;",
        "GreekWatergate",
    ] {
        assert!(matches(&rs, &el(text, (2022, 9, 1))), "{text}");
    }
    assert!(!matches(&rs, &el("καλημέρα", (2022, 9, 1))));
}

#[test]
fn study_window_is_inclusive() {
    let rs = RuleSet::default_rules();
    assert!(matches(&rs, &el("#υποκλοπες", (2022, 4, 1))));
    assert!(matches(&rs, &el("#υποκλοπες", (2023, 1, 14))));
    assert!(!matches(&rs, &el("#υποκλοπες", (2022, 3, 31))));
    assert!(!matches(&rs, &el("#υποκλοπες", (2023, 1, 15))));
}

fn random_corpus(rng: &mut ChaCha8Rng, n: usize) -> Vec<TweetRecord> {
    let texts = [
        "#υποκλοπες σήμερα",
        "#ανδρουλακης μιλά",
        "#κουκακη",
        "το predator ξανά",
        "καλημέρα σε όλους",
        "#pega και #spyware",
        "υποκλοπή στη βουλή",
    ];
    let langs = ["el", "el", "el", "en", "und"];
    (0..n)
        .map(|i| {
            let month = rng.gen_range(3..=12);
            let day = rng.gen_range(1..=28);
            post(
                &i.to_string(),
                &format!("u{}", rng.gen_range(0..9)),
                (2022, month, day),
                PostKind::Original,
                &[],
                texts.choose(rng).unwrap(),
                langs.choose(rng).unwrap(),
            )
        })
        .collect()
}

#[test]
fn filter_agrees_with_per_record_check() {
    let rs = RuleSet::default_rules();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let corpus = random_corpus(&mut rng, 500);
    let oracle: Vec<&TweetRecord> = corpus.iter().filter(|t| matches(&rs, t)).collect();
    let (kept, report) = filter_corpus(&rs, corpus.clone());
    assert_eq!(kept.iter().collect::<Vec<_>>(), oracle);
    assert_eq!(report.input, 500);
    assert_eq!(report.kept + report.dropped_total(), report.input);

    let (again, _) = filter_corpus(&rs, kept.clone());
    assert_eq!(again, kept);

    // shards merge into the report of the whole
    let mut merged = FilterReport::default();
    for shard in corpus.chunks(77) {
        merged += &filter_corpus(&rs, shard.to_vec()).1;
    }
    assert_eq!(merged, report);
}

#[test]
fn empty_and_all_matching_corpora() {
    let rs = RuleSet::default_rules();
    let (kept, report) = filter_corpus(&rs, Vec::new());
    assert!(kept.is_empty());
    assert_eq!(report.input, 0);
    let all: Vec<TweetRecord> = (0..5).map(|_| el("#υποκλοπες", (2022, 8, 1))).collect();
    assert_eq!(filter_corpus(&rs, all).1.kept, 5);
}

#[test]
fn archive_round_trip_through_file() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let corpus = random_corpus(&mut rng, 20);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write_tweets(&mut file, &corpus).unwrap();
    writeln!(file, "not a record").unwrap();
    file.flush().unwrap();
    let (back, report) = read_tweets(file.path(), false).unwrap();
    assert_eq!(back, corpus);
    assert_eq!(report.malformed, 1);
    assert!(read_tweets(file.path(), true).is_err());
}

#[test]
fn prevalent_users_against_hand_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let users = ["a", "b", "c", "d", "e"];
    let mut corpus = Vec::new();
    for i in 0..60 {
        let author = *users.choose(&mut rng).unwrap();
        let target = *users.choose(&mut rng).unwrap();
        let kind = *PostKind::ALL.choose(&mut rng).unwrap();
        let refs: Vec<&str> = if kind == PostKind::Original {
            vec![]
        } else {
            vec![target]
        };
        corpus.push(post(
            &i.to_string(),
            author,
            (2022, 8, 1),
            kind,
            &refs,
            "x",
            "el",
        ));
    }
    let k = 2;
    let p = prevalent_users(
        &corpus,
        &["e".to_string(), "d".to_string(), "c".to_string()],
        k,
    )
    .unwrap();

    let rank = |count: &dyn Fn(&TweetRecord) -> Option<String>| {
        let mut m: BTreeMap<String, u64> = BTreeMap::new();
        for t in &corpus {
            if let Some(u) = count(t) {
                *m.entry(u).or_default() += 1;
            }
        }
        let mut v: Vec<(String, u64)> = m.into_iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    };
    let posts = rank(&|t| Some(t.author_id.clone()));
    let replies = rank(&|t| (t.kind == PostKind::Reply).then(|| t.author_id.clone()));
    let quotes = rank(&|t| (t.kind == PostKind::Quote).then(|| t.author_id.clone()));
    let quoted = rank(&|t| {
        (t.kind == PostKind::Quote && t.referenced_user_ids[0] != t.author_id)
            .then(|| t.referenced_user_ids[0].clone())
    });
    assert_eq!(p.most_posts, posts);
    assert_eq!(p.most_replies, replies);
    assert_eq!(p.most_quotes, quotes);
    assert_eq!(p.most_quoted, quoted);
    let mut union: Vec<String> = [posts, replies, quotes, quoted]
        .iter()
        .flatten()
        .map(|(u, _)| u.clone())
        .chain(["e".to_string(), "d".to_string()])
        .collect();
    union.sort();
    union.dedup();
    assert_eq!(p.union.into_iter().collect::<Vec<_>>(), union);
}
