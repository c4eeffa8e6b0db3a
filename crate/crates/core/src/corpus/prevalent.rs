use std::collections::{BTreeMap, BTreeSet};

use super::{CorpusError, PostKind, TweetRecord};

/// The five activity rankings and their union.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrevalentUsers {
    pub most_posts: Vec<(String, u64)>,
    pub most_replies: Vec<(String, u64)>,
    pub most_quotes: Vec<(String, u64)>,
    pub most_quoted: Vec<(String, u64)>,
    pub top_influencers: Vec<String>,
    pub union: BTreeSet<String>,
}

fn top(counts: BTreeMap<&str, u64>, k: usize) -> Vec<(String, u64)> {
    let mut v: Vec<(&str, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
    // BTreeMap order is ascending id, and the sort is stable
    v.sort_by(|a, b| b.1.cmp(&a.1));
    v.truncate(k);
    v.into_iter().map(|(u, c)| (u.to_string(), c)).collect()
}

/// Union of the top `top_k` users by posts, replies, quotes, times quoted by
/// others, and influencer rank. Ties go to the smaller user id.
pub fn prevalent_users(
    tweets: &[TweetRecord],
    influencer_ranking: &[String],
    top_k: usize,
) -> Result<PrevalentUsers, CorpusError> {
    if top_k == 0 {
        return Err(CorpusError::InvalidTopK(0));
    }
    let mut posts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut replies: BTreeMap<&str, u64> = BTreeMap::new();
    let mut quotes: BTreeMap<&str, u64> = BTreeMap::new();
    let mut quoted: BTreeMap<&str, u64> = BTreeMap::new();
    for t in tweets {
        *posts.entry(&t.author_id).or_default() += 1;
        match t.kind {
            PostKind::Reply => *replies.entry(&t.author_id).or_default() += 1,
            PostKind::Quote => {
                *quotes.entry(&t.author_id).or_default() += 1;
                if let Some(target) = t.referenced_user_ids.first() {
                    if *target != t.author_id {
                        *quoted.entry(target).or_default() += 1;
                    }
                }
            }
            _ => {}
        }
    }
    let mut out = PrevalentUsers {
        most_posts: top(posts, top_k),
        most_replies: top(replies, top_k),
        most_quotes: top(quotes, top_k),
        most_quoted: top(quoted, top_k),
        top_influencers: influencer_ranking.iter().take(top_k).cloned().collect(),
        union: BTreeSet::new(),
    };
    for list in [
        &out.most_posts,
        &out.most_replies,
        &out.most_quotes,
        &out.most_quoted,
    ] {
        out.union.extend(list.iter().map(|(u, _)| u.clone()));
    }
    out.union.extend(out.top_influencers.iter().cloned());
    Ok(out)
}
