//! Tweet corpus: record model, line-delimited archive loading, rule based
//! filtering and the companion account datasets.

mod annotations;
mod prevalent;
mod rules;
pub mod text;

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

pub use annotations::{
    load_annotations, load_follows, AccountAnnotation, Annotations, Category, Follows, Side,
};
pub use prevalent::{prevalent_users, PrevalentUsers};
pub use rules::{
    filter_corpus, matches, DateWindow, DropReason, FilterMode, FilterReport, FilterRule, RuleSet,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("invalid rule set: {0}")]
    RuleSet(String),
    #[error("invalid annotation for {user_id}: {reason}")]
    Annotation { user_id: String, reason: String },
    #[error("top_k must be positive, got {0}")]
    InvalidTopK(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PostKind {
    #[serde(alias = "original", alias = "tweet")]
    Original,
    #[serde(alias = "retweet")]
    Retweet,
    #[serde(alias = "quote")]
    Quote,
    #[serde(alias = "reply")]
    Reply,
}

impl PostKind {
    pub const ALL: [PostKind; 4] = [
        PostKind::Original,
        PostKind::Retweet,
        PostKind::Quote,
        PostKind::Reply,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MediaKind {
    #[serde(alias = "image", alias = "photo")]
    Image,
    #[serde(alias = "video")]
    Video,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Media {
    pub kind: MediaKind,
    pub url: String,
}

/// One post of the archive.
///
/// For retweets, quotes and replies the first entry of `referenced_user_ids`
/// is the author of the referenced tweet; any further entries are mentions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub author_id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub lang: String,
    pub kind: PostKind,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
    #[serde(default)]
    pub media: Vec<Media>,
    #[serde(default)]
    pub referenced_user_ids: Vec<String>,
    #[serde(default)]
    pub referenced_tweet_id: Option<String>,
    #[serde(default)]
    pub like_count: u64,
    #[serde(default)]
    pub retweet_count: u64,
    #[serde(default)]
    pub reply_count: u64,
}

impl TweetRecord {
    /// Checks the record invariants and normalizes hashtags in place.
    ///
    /// A record with an empty hashtag list gets the hashtags found in its
    /// text.
    pub fn validate(mut self) -> Result<Self, String> {
        if self.tweet_id.trim().is_empty() {
            return Err("empty tweet_id".into());
        }
        if self.author_id.trim().is_empty() {
            return Err("empty author_id".into());
        }
        if self.kind != PostKind::Original && self.referenced_user_ids.is_empty() {
            return Err(format!("{:?} without referenced users", self.kind));
        }
        if self.referenced_user_ids.iter().any(|u| u.trim().is_empty()) {
            return Err("empty referenced user id".into());
        }
        if self.hashtags.is_empty() {
            self.hashtags = text::extract_hashtags(&self.text);
        } else {
            let mut tags: Vec<String> = Vec::with_capacity(self.hashtags.len());
            for tag in &self.hashtags {
                let tag = text::normalize_hashtag(tag);
                if !tag.is_empty() && !tags.contains(&tag) {
                    tags.push(tag);
                }
            }
            self.hashtags = tags;
        }
        Ok(self)
    }

    /// Calendar date of the post at the given offset from UTC.
    pub fn local_date(&self, offset: FixedOffset) -> NaiveDate {
        self.timestamp.with_timezone(&offset).date_naive()
    }
}

/// Counters for a loading pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub records: usize,
    pub malformed: usize,
    pub warnings: Vec<String>,
}

/// Iterator over the records of a line-delimited archive.
///
/// In lenient mode malformed lines are skipped and recorded in
/// [`TweetStream::report`]; in strict mode the first one is yielded as an
/// error and the stream ends.
pub struct TweetStream<R> {
    reader: R,
    path: PathBuf,
    strict: bool,
    report: LoadReport,
    buf: String,
    done: bool,
}

impl<R: BufRead> TweetStream<R> {
    pub fn new(reader: R, path: impl Into<PathBuf>, strict: bool) -> Self {
        TweetStream {
            reader,
            path: path.into(),
            strict,
            report: LoadReport::default(),
            buf: String::new(),
            done: false,
        }
    }

    pub fn report(&self) -> &LoadReport {
        &self.report
    }

    pub fn into_report(self) -> LoadReport {
        self.report
    }
}

impl<R: BufRead> Iterator for TweetStream<R> {
    type Item = Result<TweetRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    self.report.lines += 1;
                    let line = self.buf.trim();
                    if line.is_empty() {
                        continue;
                    }
                    let parsed = serde_json::from_str::<TweetRecord>(line)
                        .map_err(|e| e.to_string())
                        .and_then(TweetRecord::validate);
                    match parsed {
                        Ok(record) => {
                            self.report.records += 1;
                            return Some(Ok(record));
                        }
                        Err(reason) => {
                            let err = CorpusError::Malformed {
                                path: self.path.clone(),
                                line: self.report.lines,
                                reason,
                            };
                            self.report.malformed += 1;
                            if self.strict {
                                self.done = true;
                                return Some(Err(err));
                            }
                            log::warn!("{err}");
                            self.report.warnings.push(err.to_string());
                        }
                    }
                }
                Err(source) => {
                    self.done = true;
                    return Some(Err(CorpusError::Io {
                        path: self.path.clone(),
                        source,
                    }));
                }
            }
        }
        None
    }
}

/// Opens a line-delimited tweet archive for streaming.
pub fn load_tweets(
    path: impl AsRef<Path>,
    schema_strict: bool,
) -> Result<TweetStream<BufReader<File>>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(TweetStream::new(BufReader::new(file), path, schema_strict))
}

/// Reads a whole archive into memory.
pub fn read_tweets(
    path: impl AsRef<Path>,
    schema_strict: bool,
) -> Result<(Vec<TweetRecord>, LoadReport), CorpusError> {
    let mut stream = load_tweets(path, schema_strict)?;
    let tweets = stream.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok((tweets, stream.into_report()))
}

/// Writes records back out in the archive format.
pub fn write_tweets<W: std::io::Write>(mut out: W, tweets: &[TweetRecord]) -> std::io::Result<()> {
    for t in tweets {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
