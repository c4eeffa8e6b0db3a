use std::collections::{BTreeMap, BTreeSet};

use chrono::{FixedOffset, NaiveDate};
use serde::Serialize;

use crate::corpus::{text, MediaKind, PostKind, TweetRecord};
use crate::stance::{Stance, StanceMap};

/// Ranked `(key, count)` pairs: count descending, key ascending on ties.
pub type TopList = Vec<(String, u64)>;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TopLists {
    pub most_liked: TopList,
    pub most_retweeted: TopList,
    pub most_replied: TopList,
    pub most_mentioned: TopList,
    pub most_active: TopList,
    pub urls: TopList,
    pub images: TopList,
    pub videos: TopList,
    pub words: TopList,
    pub phrases: TopList,
    pub hashtags: TopList,
}

impl TopLists {
    pub fn named(&self) -> [(&'static str, &TopList); 11] {
        [
            ("most_liked", &self.most_liked),
            ("most_retweeted", &self.most_retweeted),
            ("most_replied", &self.most_replied),
            ("most_mentioned", &self.most_mentioned),
            ("most_active", &self.most_active),
            ("urls", &self.urls),
            ("images", &self.images),
            ("videos", &self.videos),
            ("words", &self.words),
            ("phrases", &self.phrases),
            ("hashtags", &self.hashtags),
        ]
    }
}

/// Activity of one day, or of the whole window when `date` is `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DailyStats {
    pub date: Option<NaiveDate>,
    pub n_posts: u64,
    pub n_original: u64,
    pub n_retweets: u64,
    pub n_quotes: u64,
    pub n_replies: u64,
    pub n_users: u64,
    /// Distinct hashtags.
    pub n_hashtags: u64,
    /// Distinct URLs.
    pub n_urls: u64,
    pub top: TopLists,
}

#[derive(Debug, Clone)]
pub struct StatsOptions {
    pub top_k: usize,
    pub offset: FixedOffset,
    pub stopwords: BTreeSet<String>,
}

impl StatsOptions {
    pub fn new(top_k: usize) -> Self {
        StatsOptions {
            top_k,
            offset: FixedOffset::east_opt(0).expect("zero offset"),
            stopwords: BTreeSet::new(),
        }
    }

    /// Stopwords are folded like the tokens they are compared with.
    pub fn with_stopwords<'a>(mut self, words: impl IntoIterator<Item = &'a str>) -> Self {
        self.stopwords = words
            .into_iter()
            .map(|w| text::fold(w.trim()))
            .filter(|w| !w.is_empty())
            .collect();
        self
    }
}

pub(crate) fn top_k(counts: BTreeMap<String, u64>, k: usize) -> TopList {
    let mut v: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
    // keys arrive in ascending order and the sort is stable
    v.sort_by(|a, b| b.1.cmp(&a.1));
    v.truncate(k);
    v
}

fn bump(map: &mut BTreeMap<String, u64>, key: &str, by: u64) {
    if let Some(c) = map.get_mut(key) {
        *c += by;
    } else {
        map.insert(key.to_owned(), by);
    }
}

fn aggregate<'a>(
    date: Option<NaiveDate>,
    tweets: impl IntoIterator<Item = &'a TweetRecord>,
    opts: &StatsOptions,
) -> DailyStats {
    let mut s = DailyStats {
        date,
        ..Default::default()
    };
    let mut users = BTreeSet::new();
    let mut liked = BTreeMap::new();
    let mut retweeted = BTreeMap::new();
    let mut replied = BTreeMap::new();
    let mut mentioned = BTreeMap::new();
    let mut active = BTreeMap::new();
    let mut urls = BTreeMap::new();
    let mut images = BTreeMap::new();
    let mut videos = BTreeMap::new();
    let mut words = BTreeMap::new();
    let mut phrases = BTreeMap::new();
    let mut hashtags = BTreeMap::new();
    for t in tweets {
        s.n_posts += 1;
        match t.kind {
            PostKind::Original => s.n_original += 1,
            PostKind::Retweet => s.n_retweets += 1,
            PostKind::Quote => s.n_quotes += 1,
            PostKind::Reply => s.n_replies += 1,
        }
        users.insert(t.author_id.as_str());
        bump(&mut liked, &t.tweet_id, t.like_count);
        bump(&mut retweeted, &t.tweet_id, t.retweet_count);
        bump(&mut replied, &t.tweet_id, t.reply_count);
        bump(&mut active, &t.author_id, 1);
        let refs: BTreeSet<&str> = t.referenced_user_ids.iter().map(String::as_str).collect();
        for u in refs {
            bump(&mut mentioned, u, 1);
        }
        for u in &t.urls {
            bump(&mut urls, u, 1);
        }
        for m in &t.media {
            match m.kind {
                MediaKind::Image => bump(&mut images, &m.url, 1),
                MediaKind::Video => bump(&mut videos, &m.url, 1),
            }
        }
        for h in &t.hashtags {
            bump(&mut hashtags, h, 1);
        }
        let tokens = text::words(&t.text);
        let stop = |w: &String| opts.stopwords.contains(w);
        for w in tokens.iter().filter(|w| !stop(w)) {
            bump(&mut words, w, 1);
        }
        for pair in tokens.windows(2) {
            if !stop(&pair[0]) && !stop(&pair[1]) {
                bump(&mut phrases, &format!("{} {}", pair[0], pair[1]), 1);
            }
        }
    }
    s.n_users = users.len() as u64;
    s.n_hashtags = hashtags.len() as u64;
    s.n_urls = urls.len() as u64;
    let k = opts.top_k;
    s.top = TopLists {
        most_liked: top_k(liked, k),
        most_retweeted: top_k(retweeted, k),
        most_replied: top_k(replied, k),
        most_mentioned: top_k(mentioned, k),
        most_active: top_k(active, k),
        urls: top_k(urls, k),
        images: top_k(images, k),
        videos: top_k(videos, k),
        words: top_k(words, k),
        phrases: top_k(phrases, k),
        hashtags: top_k(hashtags, k),
    };
    s
}

/// One row per active day in date order, followed by the window total.
pub fn compute_stats(tweets: &[TweetRecord], opts: &StatsOptions) -> Vec<DailyStats> {
    let mut by_day: BTreeMap<NaiveDate, Vec<&TweetRecord>> = BTreeMap::new();
    for t in tweets {
        by_day.entry(t.local_date(opts.offset)).or_default().push(t);
    }
    let mut rows: Vec<DailyStats> = by_day
        .into_iter()
        .map(|(d, ts)| aggregate(Some(d), ts, opts))
        .collect();
    rows.push(aggregate(None, tweets, opts));
    rows
}

/// Shares in percent for Left, Right, Center and Neutral.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Shares {
    pub counts: [u64; 4],
    /// Exact percentages.
    pub percent: [f64; 4],
    /// Percentages rounded to one decimal that sum to exactly 100 whenever
    /// the total is positive.
    pub rounded: [f64; 4],
}

pub const SHARE_ORDER: [Stance; 4] = [Stance::Left, Stance::Right, Stance::Center, Stance::Neutral];

impl Shares {
    pub fn from_counts(counts: [u64; 4]) -> Self {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Shares {
                counts,
                ..Default::default()
            };
        }
        let percent = counts.map(|c| 100.0 * c as f64 / total as f64);
        // work in tenths of a percent to keep the sum exact
        let mut tenths = percent.map(|p| (p * 10.0).round_ties_even() as i64);
        let remainder = 1000 - tenths.iter().sum::<i64>();
        let mut largest = 0;
        for i in 1..4 {
            if percent[i] > percent[largest] {
                largest = i;
            }
        }
        tenths[largest] += remainder;
        Shares {
            counts,
            percent,
            rounded: tenths.map(|t| t as f64 / 10.0),
        }
    }

    pub fn get(&self, stance: Stance) -> f64 {
        self.percent[SHARE_ORDER
            .iter()
            .position(|s| *s == stance)
            .expect("all stances")]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StanceShares {
    /// Posts weighted by the stance of their author.
    pub tweets: Shares,
    /// Distinct authors.
    pub users: Shares,
}

pub fn stance_shares(tweets: &[TweetRecord], stances: &StanceMap) -> StanceShares {
    let idx = |s: Stance| {
        SHARE_ORDER
            .iter()
            .position(|x| *x == s)
            .expect("all stances")
    };
    let mut by_tweet = [0u64; 4];
    let mut authors = BTreeSet::new();
    for t in tweets {
        by_tweet[idx(stances.stance_of(&t.author_id))] += 1;
        authors.insert(t.author_id.as_str());
    }
    let mut by_user = [0u64; 4];
    for a in authors {
        by_user[idx(stances.stance_of(a))] += 1;
    }
    StanceShares {
        tweets: Shares::from_counts(by_tweet),
        users: Shares::from_counts(by_user),
    }
}
