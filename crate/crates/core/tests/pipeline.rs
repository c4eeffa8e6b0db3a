mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use common::{fixture_dir, post};
use discourse_core::corpus::{PostKind, TweetRecord};
use discourse_core::graph::InteractionGraph;
use discourse_core::pipeline::{
    compute_stats, pi_series, run_all, stance_shares, PipelineConfig, PipelineError, Session,
    Stage, StatsOptions,
};
use discourse_core::polarization::PiOptions;
use discourse_core::stance::{Stance, StanceAssignment, StanceMap};

const BUNDLE: &[&str] = &[
    "stats_daily.csv",
    "pi_series.csv",
    "ablation.csv",
    "sweep.csv",
    "stance.csv",
    "influencers.csv",
    "communities.csv",
    "summary.html",
    "run_manifest.json",
];

fn fixture_config(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(fixture_dir().join("config.toml")).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn csv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            headers
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

#[test]
fn fixture_bundle_is_complete_and_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_all(&fixture_config(a.path())).unwrap();
    run_all(&fixture_config(b.path())).unwrap();
    let (fa, fb) = (read_dir(a.path()), read_dir(b.path()));
    for name in BUNDLE {
        assert!(fa.contains_key(*name), "missing {name}");
    }
    assert!(fa
        .keys()
        .any(|k| k.starts_with("graph_") && k.ends_with(".graphml")));
    assert_eq!(fa, fb);
}

#[test]
fn fixture_has_two_dominant_opposite_communities() {
    let out = tempfile::tempdir().unwrap();
    run_all(&fixture_config(out.path())).unwrap();
    let rows = csv_rows(&out.path().join("communities.csv"));
    let sizes: Vec<usize> = rows.iter().map(|r| r["size"].parse().unwrap()).collect();
    let total: usize = sizes.iter().sum();
    assert!(sizes.len() >= 2);
    assert!(
        (sizes[0] + sizes[1]) as f64 >= 0.8 * total as f64,
        "{sizes:?}"
    );
    let leans: Vec<f64> = rows[..2]
        .iter()
        .map(|r| r["lean"].parse().unwrap())
        .collect();
    assert!(leans[0] * leans[1] < 0.0, "{leans:?}");
}

#[test]
fn sweep_at_zero_matches_default_run() {
    let out = tempfile::tempdir().unwrap();
    run_all(&fixture_config(out.path())).unwrap();
    let sweep = csv_rows(&out.path().join("sweep.csv"));
    let ablation = csv_rows(&out.path().join("ablation.csv"));
    let total = ablation
        .iter()
        .find(|r| r["date"] == "total" && r["drop_isolated"] == "true")
        .unwrap();
    let zero = sweep.iter().find(|r| r["threshold"] == "0").unwrap();
    for col in [
        "pi_full",
        "pi_without_political",
        "pi_without_media_journalist",
        "pi_without_influencers",
    ] {
        assert_eq!(zero[col], total[col], "{col}");
    }
    let labeled: Vec<u64> = sweep
        .iter()
        .map(|r| {
            r["n_left_users"].parse::<u64>().unwrap() + r["n_right_users"].parse::<u64>().unwrap()
        })
        .collect();
    assert!(labeled.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn pi_series_has_one_row_per_active_day() {
    let out = tempfile::tempdir().unwrap();
    let cfg = fixture_config(out.path());
    let s = Session::load(&cfg).unwrap();
    let days: BTreeSet<NaiveDate> = s.tweets.iter().map(|t| t.local_date(s.offset())).collect();
    run_all(&cfg).unwrap();
    let rows = csv_rows(&out.path().join("pi_series.csv"));
    assert_eq!(rows.len(), days.len());
    for r in &rows {
        let pi: f64 = r["pi"].parse().unwrap();
        assert!((0.0..=1.0).contains(&pi));
    }
}

#[test]
fn stance_user_shares_sum_to_hundred() {
    let out = tempfile::tempdir().unwrap();
    run_all(&fixture_config(out.path())).unwrap();
    for pop in ["tweets", "users"] {
        let sum: f64 = csv_rows(&out.path().join("stance_shares.csv"))
            .iter()
            .filter(|r| r["population"] == pop)
            .map(|r| r["percent_rounded"].parse::<f64>().unwrap())
            .sum();
        assert!((sum - 100.0).abs() < 1e-9, "{pop}: {sum}");
    }
}

#[test]
fn empty_corpus_gives_empty_valid_bundle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tweets.jsonl"), "").unwrap();
    fs::write(
        dir.path().join("annotations.csv"),
        "user_id,category,side\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("follows.csv"),
        "follower_id,followed_political_id\n",
    )
    .unwrap();
    let mut cfg = PipelineConfig::new("tweets.jsonl", "annotations.csv", "follows.csv");
    cfg.base_dir = dir.path().to_path_buf();
    let report = run_all(&cfg).unwrap();
    assert!(!report.warnings.is_empty());
    let out = dir.path().join("out");
    for name in BUNDLE {
        assert!(out.join(name).exists(), "missing {name}");
    }
    assert!(csv_rows(&out.join("pi_series.csv")).is_empty());
    assert!(csv_rows(&out.join("communities.csv")).is_empty());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("run_manifest.json")).unwrap()).unwrap();
    assert!(manifest["inputs"]["tweets"]["sha256"].is_string());
}

#[test]
fn failures_name_their_stage() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tweets.jsonl"), "").unwrap();
    fs::write(
        dir.path().join("annotations.csv"),
        "user_id,category,side\n",
    )
    .unwrap();
    let mut cfg = PipelineConfig::new("tweets.jsonl", "annotations.csv", "missing.csv");
    cfg.base_dir = dir.path().to_path_buf();
    let err = run_all(&cfg).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Load));

    // a follow to an account without annotation
    fs::write(
        dir.path().join("follows.csv"),
        "follower_id,followed_political_id\nu1,ghost\n",
    )
    .unwrap();
    cfg.follows = "follows.csv".into();
    let err = run_all(&cfg).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Stance));
    assert!(matches!(
        PipelineConfig::load(dir.path().join("nope.toml")),
        Err(PipelineError::Config(_))
    ));
}

fn tally_corpus() -> Vec<TweetRecord> {
    let mut ts = vec![
        post(
            "1",
            "a",
            (2022, 8, 1),
            PostKind::Original,
            &[],
            "Η κυβέρνηση #υποκλοπες",
            "el",
        ),
        post(
            "2",
            "b",
            (2022, 8, 1),
            PostKind::Retweet,
            &["a"],
            "Η κυβέρνηση #υποκλοπες",
            "el",
        ),
        post(
            "3",
            "c",
            (2022, 8, 1),
            PostKind::Reply,
            &["a", "b"],
            "ποια κυβέρνηση;",
            "el",
        ),
        post(
            "4",
            "a",
            (2022, 8, 2),
            PostKind::Quote,
            &["c"],
            "απάντηση #predatorgate",
            "el",
        ),
        post(
            "5",
            "d",
            (2022, 8, 2),
            PostKind::Original,
            &["a"],
            "@a η βουλή",
            "el",
        ),
        post(
            "6",
            "d",
            (2022, 8, 2),
            PostKind::Reply,
            &["c"],
            "η βουλή #υποκλοπες",
            "el",
        ),
        post(
            "7",
            "e",
            (2022, 8, 3),
            PostKind::Original,
            &[],
            "σκάνδαλο",
            "el",
        ),
        post(
            "8",
            "a",
            (2022, 8, 3),
            PostKind::Retweet,
            &["e"],
            "σκάνδαλο",
            "el",
        ),
        post(
            "9",
            "b",
            (2022, 8, 3),
            PostKind::Quote,
            &["e"],
            "Σκάνδαλο!",
            "el",
        ),
        post(
            "10",
            "c",
            (2022, 8, 3),
            PostKind::Original,
            &[],
            "τέλος",
            "el",
        ),
    ];
    for (i, t) in ts.iter_mut().enumerate() {
        t.like_count = (i as u64 * 7) % 5;
        t.urls = if i % 3 == 0 {
            vec![format!("https://x.example/{}", i % 2)]
        } else {
            vec![]
        };
    }
    ts
}

#[test]
fn stats_match_a_brute_force_recount() {
    let ts = tally_corpus();
    let rows = compute_stats(&ts, &StatsOptions::new(100));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let sel: Vec<&TweetRecord> = ts
            .iter()
            .filter(|t| row.date.is_none_or(|d| t.timestamp.date_naive() == d))
            .collect();
        let count = |k: PostKind| sel.iter().filter(|t| t.kind == k).count() as u64;
        assert_eq!(row.n_posts, sel.len() as u64);
        assert_eq!(row.n_original, count(PostKind::Original));
        assert_eq!(row.n_retweets, count(PostKind::Retweet));
        assert_eq!(row.n_quotes, count(PostKind::Quote));
        assert_eq!(row.n_replies, count(PostKind::Reply));
        let users: BTreeSet<&str> = sel.iter().map(|t| t.author_id.as_str()).collect();
        assert_eq!(row.n_users, users.len() as u64);
        let tags: BTreeSet<&String> = sel.iter().flat_map(|t| &t.hashtags).collect();
        assert_eq!(row.n_hashtags, tags.len() as u64);
        let urls: BTreeSet<&String> = sel.iter().flat_map(|t| &t.urls).collect();
        assert_eq!(row.n_urls, urls.len() as u64);
        for (_, list) in row.top.named() {
            assert!(list
                .windows(2)
                .all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
        }
    }
    let total = rows.last().unwrap();
    assert_eq!(total.n_users, 5);
    assert_eq!(total.top.most_active[0], ("a".to_string(), 3));
    assert_eq!(total.top.words[0], ("η".to_string(), 4));
    let filtered = compute_stats(&ts, &StatsOptions::new(100).with_stopwords(["Η"]));
    let words = &filtered.last().unwrap().top.words;
    // tie at 3 broken by key
    assert_eq!(words[0], ("κυβερνηση".to_string(), 3));
    assert_eq!(words[1], ("σκανδαλο".to_string(), 3));
    assert_eq!(total.top.hashtags[0], ("υποκλοπες".to_string(), 3));
    // a is referenced by posts 2, 3 and 5
    assert_eq!(total.top.most_mentioned[0], ("a".to_string(), 3));
}

fn stances(pairs: &[(&str, Stance)]) -> StanceMap {
    let mut m = StanceMap::new(0.0);
    for (u, s) in pairs {
        let mut a = StanceAssignment::neutral(*u, 0.0);
        a.stance = *s;
        m.insert(a);
    }
    m
}

#[test]
fn stance_shares_direct_count() {
    let ts = vec![
        post("1", "l", (2022, 8, 1), PostKind::Original, &[], "", "el"),
        post("2", "l", (2022, 8, 1), PostKind::Original, &[], "", "el"),
        post("3", "l", (2022, 8, 1), PostKind::Original, &[], "", "el"),
        post("4", "r", (2022, 8, 1), PostKind::Original, &[], "", "el"),
    ];
    let sh = stance_shares(&ts, &stances(&[("l", Stance::Left), ("r", Stance::Right)]));
    assert_eq!(sh.tweets.get(Stance::Left), 75.0);
    let only_left = stance_shares(&ts[..3], &stances(&[("l", Stance::Left)]));
    assert_eq!(
        (
            only_left.tweets.get(Stance::Left),
            only_left.users.get(Stance::Left)
        ),
        (100.0, 100.0)
    );
}

#[test]
fn daily_series_corner_cases() {
    let d1 = NaiveDate::from_ymd_opt(2022, 8, 1).unwrap();
    let d2 = d1.succ_opt().unwrap();
    // two cliques with opposite uniform opinions
    let cliques =
        InteractionGraph::from_index_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
    let map = stances(&[
        ("0", Stance::Left),
        ("1", Stance::Left),
        ("2", Stance::Left),
        ("3", Stance::Right),
        ("4", Stance::Right),
        ("5", Stance::Right),
    ]);
    let days = vec![(d1, cliques.clone()), (d2, cliques)];
    let rows = pi_series(&days, &map, PiOptions::default());
    assert_eq!(rows.len(), 2);
    assert!((rows[0].result.as_ref().unwrap().pi - 1.0).abs() < 1e-12);
    let neutral = pi_series(&days, &StanceMap::new(0.0), PiOptions::default());
    assert_eq!(neutral[1].result.as_ref().unwrap().pi, 0.0);
}
