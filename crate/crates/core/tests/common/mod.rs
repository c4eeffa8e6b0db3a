#![allow(dead_code)]

use std::path::PathBuf;

use chrono::{TimeZone, Utc};
use discourse_core::corpus::{PostKind, TweetRecord};
use discourse_core::graph::InteractionGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic")
}

/// A validated post at noon UTC of the given day.
pub fn post(
    id: &str,
    author: &str,
    (y, m, d): (i32, u32, u32),
    kind: PostKind,
    refs: &[&str],
    text: &str,
    lang: &str,
) -> TweetRecord {
    TweetRecord {
        tweet_id: id.into(),
        author_id: author.into(),
        timestamp: Utc.with_ymd_and_hms(y, m, d, 12, 0, 0).unwrap(),
        text: text.into(),
        lang: lang.into(),
        kind,
        hashtags: vec![],
        urls: vec![],
        media: vec![],
        referenced_user_ids: refs.iter().map(|s| s.to_string()).collect(),
        referenced_tweet_id: None,
        like_count: 0,
        retweet_count: 0,
        reply_count: 0,
    }
    .validate()
    .unwrap()
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> InteractionGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    InteractionGraph::from_index_edges(n, &edges)
}
