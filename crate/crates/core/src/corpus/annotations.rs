use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Individual,
    MediaJournalist,
    Political,
    Organization,
    Bot,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Individual => "Individual",
            Category::MediaJournalist => "MediaJournalist",
            Category::Political => "Political",
            Category::Organization => "Organization",
            Category::Bot => "Bot",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match key.as_str() {
            "individual" | "individuals" => Ok(Category::Individual),
            "mediajournalist" | "mediajournalists" | "media" | "journalist" => {
                Ok(Category::MediaJournalist)
            }
            "political" | "politicalaccount" | "politicalaccounts" | "politician" => {
                Ok(Category::Political)
            }
            "organization" | "organizations" | "organisation" => Ok(Category::Organization),
            "bot" | "bots" => Ok(Category::Bot),
            _ => Err(format!("unknown category {s:?}")),
        }
    }
}

/// Political side of an annotated party or politician account.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    Center,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Center => Side::Center,
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "center" | "centre" | "central" => Ok(Side::Center),
            _ => Err(format!("unknown side {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountAnnotation {
    pub user_id: String,
    pub category: Category,
    pub side: Option<Side>,
}

impl AccountAnnotation {
    pub fn new(
        user_id: impl Into<String>,
        category: Category,
        side: Option<Side>,
    ) -> Result<Self, CorpusError> {
        let user_id = user_id.into();
        match (category, side) {
            (Category::Political, None) => Err(CorpusError::Annotation {
                user_id,
                reason: "political account without side".into(),
            }),
            (c, Some(_)) if c != Category::Political => Err(CorpusError::Annotation {
                user_id,
                reason: format!("side given for {c} account"),
            }),
            _ => Ok(AccountAnnotation {
                user_id,
                category,
                side,
            }),
        }
    }

    pub fn political(user_id: impl Into<String>, side: Side) -> Self {
        AccountAnnotation {
            user_id: user_id.into(),
            category: Category::Political,
            side: Some(side),
        }
    }
}

/// One annotation per account, keyed by user id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Annotations {
    by_user: BTreeMap<String, AccountAnnotation>,
}

impl Annotations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: AccountAnnotation) -> Result<(), CorpusError> {
        if self.by_user.contains_key(&a.user_id) {
            return Err(CorpusError::Annotation {
                user_id: a.user_id,
                reason: "duplicate annotation".into(),
            });
        }
        self.by_user.insert(a.user_id.clone(), a);
        Ok(())
    }

    pub fn from_records(
        records: impl IntoIterator<Item = AccountAnnotation>,
    ) -> Result<Self, CorpusError> {
        let mut out = Self::new();
        for r in records {
            out.insert(r)?;
        }
        Ok(out)
    }

    pub fn get(&self, user_id: &str) -> Option<&AccountAnnotation> {
        self.by_user.get(user_id)
    }

    pub fn category_of(&self, user_id: &str) -> Option<Category> {
        self.get(user_id).map(|a| a.category)
    }

    pub fn members(&self, category: Category) -> BTreeSet<String> {
        self.by_user
            .values()
            .filter(|a| a.category == category)
            .map(|a| a.user_id.clone())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AccountAnnotation> {
        self.by_user.values()
    }

    pub fn len(&self) -> usize {
        self.by_user.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_user.is_empty()
    }

    /// Copy with every Left/Right side swapped.
    pub fn flipped(&self) -> Self {
        Annotations {
            by_user: self
                .by_user
                .iter()
                .map(|(k, a)| {
                    let mut a = a.clone();
                    a.side = a.side.map(Side::flipped);
                    (k.clone(), a)
                })
                .collect(),
        }
    }
}

/// Follow relations from corpus users to political accounts. Duplicate
/// pairs collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Follows {
    by_follower: BTreeMap<String, BTreeSet<String>>,
}

impl Follows {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the pair was already present.
    pub fn insert(&mut self, follower: impl Into<String>, followed: impl Into<String>) -> bool {
        self.by_follower
            .entry(follower.into())
            .or_default()
            .insert(followed.into())
    }

    pub fn followed_by(&self, follower: &str) -> Option<&BTreeSet<String>> {
        self.by_follower.get(follower)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.by_follower.iter()
    }

    pub fn followers(&self) -> impl Iterator<Item = &String> {
        self.by_follower.keys()
    }

    pub fn pair_count(&self) -> usize {
        self.by_follower.values().map(BTreeSet::len).sum()
    }
}

impl<F: Into<String>, P: Into<String>> FromIterator<(F, P)> for Follows {
    fn from_iter<T: IntoIterator<Item = (F, P)>>(iter: T) -> Self {
        let mut f = Follows::new();
        for (a, b) in iter {
            f.insert(a, b);
        }
        f
    }
}

fn sniff_delimiter(head: &str) -> u8 {
    let first = head.lines().next().unwrap_or("");
    if first.contains('\t') && !first.contains(',') {
        b'\t'
    } else if first.contains(';') && !first.contains(',') {
        b';'
    } else {
        b','
    }
}

fn read_table(path: &Path) -> Result<csv::Reader<std::io::Cursor<String>>, CorpusError> {
    let mut s = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let delim = sniff_delimiter(&s);
    Ok(csv::ReaderBuilder::new()
        .delimiter(delim)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(std::io::Cursor::new(s)))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize, CorpusError> {
    headers
        .iter()
        .position(|h| h.trim_start_matches('\u{feff}') == name)
        .ok_or_else(|| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("missing column {name}"),
        })
}

/// Reads a `user_id,category,side` table.
pub fn load_annotations(path: impl AsRef<Path>) -> Result<Annotations, CorpusError> {
    let path = path.as_ref();
    let mut rdr = read_table(path)?;
    let headers = rdr.headers().map_err(|e| malformed(path, 1, e))?.clone();
    let (iu, ic, is) = (
        column(&headers, "user_id", path)?,
        column(&headers, "category", path)?,
        column(&headers, "side", path)?,
    );
    let mut out = Annotations::new();
    for (n, rec) in rdr.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| malformed(path, line, e))?;
        let user_id = rec.get(iu).unwrap_or("").to_string();
        if user_id.is_empty() {
            return Err(malformed(path, line, "empty user_id"));
        }
        let category: Category = rec
            .get(ic)
            .unwrap_or("")
            .parse()
            .map_err(|e: String| malformed(path, line, e))?;
        let side = match rec.get(is).unwrap_or("") {
            "" => None,
            s => Some(s.parse::<Side>().map_err(|e| malformed(path, line, e))?),
        };
        out.insert(AccountAnnotation::new(user_id, category, side)?)?;
    }
    Ok(out)
}

/// Reads a `follower_id,followed_political_id` table.
pub fn load_follows(path: impl AsRef<Path>) -> Result<Follows, CorpusError> {
    let path = path.as_ref();
    let mut rdr = read_table(path)?;
    let headers = rdr.headers().map_err(|e| malformed(path, 1, e))?.clone();
    let (ia, ib) = (
        column(&headers, "follower_id", path)?,
        column(&headers, "followed_political_id", path)?,
    );
    let mut out = Follows::new();
    let mut duplicates = 0usize;
    for (n, rec) in rdr.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| malformed(path, line, e))?;
        let (a, b) = (rec.get(ia).unwrap_or(""), rec.get(ib).unwrap_or(""));
        if a.is_empty() || b.is_empty() {
            return Err(malformed(path, line, "empty id"));
        }
        if !out.insert(a, b) {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        log::warn!(
            "{}: {duplicates} duplicate follow pairs ignored",
            path.display()
        );
    }
    Ok(out)
}

fn malformed(path: &Path, line: usize, reason: impl fmt::Display) -> CorpusError {
    CorpusError::Malformed {
        path: path.to_path_buf(),
        line,
        reason: reason.to_string(),
    }
}
