use std::collections::{BTreeMap, BTreeSet};
use std::ops::AddAssign;
use std::path::Path;

use chrono::{FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};

use super::text::{fold, normalize_hashtag};
use super::{CorpusError, TweetRecord};

const DEFAULT_RULES: &str = include_str!("../../rules/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterMode {
    /// Term equals one of the post's normalized hashtags.
    HashtagExact,
    /// Term occurs in the post text, case-insensitive and accent-folded.
    KeywordSubstring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRule {
    pub term: String,
    pub mode: FilterMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_from: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_until: Option<NaiveDate>,
}

impl FilterRule {
    pub fn label(&self) -> String {
        match self.mode {
            FilterMode::HashtagExact => format!("#{}", self.term),
            FilterMode::KeywordSubstring => self.term.clone(),
        }
    }

    pub fn is_active_on(&self, date: NaiveDate) -> bool {
        self.active_from.map_or(true, |from| date >= from)
            && self.active_until.map_or(true, |until| date <= until)
    }
}

/// Inclusive range of calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "(NaiveDate, NaiveDate)", into = "(NaiveDate, NaiveDate)")]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, CorpusError> {
        if start > end {
            return Err(CorpusError::RuleSet(format!(
                "window start {start} is after end {end}"
            )));
        }
        Ok(DateWindow { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

impl TryFrom<(NaiveDate, NaiveDate)> for DateWindow {
    type Error = CorpusError;

    fn try_from((start, end): (NaiveDate, NaiveDate)) -> Result<Self, Self::Error> {
        DateWindow::new(start, end)
    }
}

impl From<DateWindow> for (NaiveDate, NaiveDate) {
    fn from(w: DateWindow) -> Self {
        (w.start, w.end)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RuleSetFile {
    rules: Vec<FilterRule>,
    #[serde(default = "default_languages")]
    language_whitelist: BTreeSet<String>,
    study_window: DateWindow,
    #[serde(default)]
    utc_offset_minutes: i32,
}

fn default_languages() -> BTreeSet<String> {
    BTreeSet::from(["el".to_string()])
}

/// Validated collection of filter rules plus the language and date gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSet {
    rules: Vec<FilterRule>,
    language_whitelist: BTreeSet<String>,
    study_window: DateWindow,
    utc_offset_minutes: i32,
    #[serde(skip)]
    folded_terms: Vec<String>,
}

impl RuleSet {
    pub fn new(
        rules: Vec<FilterRule>,
        language_whitelist: BTreeSet<String>,
        study_window: DateWindow,
    ) -> Result<Self, CorpusError> {
        if rules.is_empty() {
            return Err(CorpusError::RuleSet("no rules".into()));
        }
        let mut normalized = Vec::with_capacity(rules.len());
        for mut rule in rules {
            if let (Some(from), Some(until)) = (rule.active_from, rule.active_until) {
                if from > until {
                    return Err(CorpusError::RuleSet(format!(
                        "rule {:?}: active_from {from} after active_until {until}",
                        rule.term
                    )));
                }
            }
            rule.term = match rule.mode {
                FilterMode::HashtagExact => normalize_hashtag(&rule.term),
                FilterMode::KeywordSubstring => rule.term.trim().to_string(),
            };
            if rule.term.is_empty() {
                return Err(CorpusError::RuleSet("empty rule term".into()));
            }
            normalized.push(rule);
        }
        let folded_terms = normalized
            .iter()
            .map(|r| match r.mode {
                FilterMode::HashtagExact => r.term.clone(),
                FilterMode::KeywordSubstring => fold(&r.term),
            })
            .collect();
        Ok(RuleSet {
            rules: normalized,
            language_whitelist: language_whitelist
                .into_iter()
                .map(|l| l.to_lowercase())
                .collect(),
            study_window,
            utc_offset_minutes: 0,
            folded_terms,
        })
    }

    /// Sets the offset from UTC used to derive a post's calendar date.
    pub fn with_utc_offset_minutes(mut self, minutes: i32) -> Result<Self, CorpusError> {
        if minutes.abs() >= 24 * 60 {
            return Err(CorpusError::RuleSet(format!(
                "utc offset {minutes} out of range"
            )));
        }
        self.utc_offset_minutes = minutes;
        Ok(self)
    }

    pub fn from_toml_str(s: &str) -> Result<Self, CorpusError> {
        let file: RuleSetFile =
            toml::from_str(s).map_err(|e| CorpusError::RuleSet(e.to_string()))?;
        RuleSet::new(file.rules, file.language_whitelist, file.study_window)?
            .with_utc_offset_minutes(file.utc_offset_minutes)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&s)
    }

    /// The shipped keyword/hashtag list with its per-term date exceptions.
    pub fn default_rules() -> Self {
        Self::from_toml_str(DEFAULT_RULES).expect("bundled rule set is valid")
    }

    pub fn default_rules_toml() -> &'static str {
        DEFAULT_RULES
    }

    pub fn to_toml_string(&self) -> String {
        let file = RuleSetFile {
            rules: self.rules.clone(),
            language_whitelist: self.language_whitelist.clone(),
            study_window: self.study_window,
            utc_offset_minutes: self.utc_offset_minutes,
        };
        toml::to_string(&file).expect("rule set serializes")
    }

    pub fn rules(&self) -> &[FilterRule] {
        &self.rules
    }

    pub fn language_whitelist(&self) -> &BTreeSet<String> {
        &self.language_whitelist
    }

    pub fn study_window(&self) -> DateWindow {
        self.study_window
    }

    /// Narrows the study window, e.g. for `--from`/`--to` overrides.
    pub fn with_study_window(mut self, window: DateWindow) -> Self {
        self.study_window = window;
        self
    }

    pub fn utc_offset(&self) -> FixedOffset {
        FixedOffset::east_opt(self.utc_offset_minutes * 60).expect("offset validated")
    }

    fn language_ok(&self, lang: &str) -> bool {
        let lang = lang.to_lowercase();
        if self.language_whitelist.contains(&lang) {
            return true;
        }
        let primary = lang.split(['-', '_']).next().unwrap_or("");
        self.language_whitelist.contains(primary)
    }

    /// Indices of the rules that fire for `t`, ignoring language and study
    /// window.
    pub fn matching_rules(&self, t: &TweetRecord) -> Vec<usize> {
        let date = t.local_date(self.utc_offset());
        let mut folded_text: Option<String> = None;
        let mut hits = Vec::new();
        for (i, (rule, term)) in self.rules.iter().zip(&self.folded_terms).enumerate() {
            if !rule.is_active_on(date) {
                continue;
            }
            let hit = match rule.mode {
                FilterMode::HashtagExact => t.hashtags.iter().any(|h| h == term),
                FilterMode::KeywordSubstring => folded_text
                    .get_or_insert_with(|| fold(&t.text))
                    .contains(term.as_str()),
            };
            if hit {
                hits.push(i);
            }
        }
        hits
    }

    /// Full verdict for one record.
    pub fn evaluate(&self, t: &TweetRecord) -> Result<Vec<usize>, DropReason> {
        if !self.language_ok(&t.lang) {
            return Err(DropReason::Language);
        }
        if !self.study_window.contains(t.local_date(self.utc_offset())) {
            return Err(DropReason::OutsideWindow);
        }
        let hits = self.matching_rules(t);
        if hits.is_empty() {
            Err(DropReason::NoRuleMatch)
        } else {
            Ok(hits)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DropReason {
    Language,
    OutsideWindow,
    NoRuleMatch,
}

/// Whether `t` passes the language gate, the study window and at least one
/// date-active rule.
pub fn matches(rule_set: &RuleSet, t: &TweetRecord) -> bool {
    rule_set.evaluate(t).is_ok()
}

/// Counters of a filtering pass. Reports of disjoint shards add up to the
/// report of the whole.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub input: u64,
    pub kept: u64,
    pub dropped: BTreeMap<DropReason, u64>,
    /// Kept posts per rule label; a post matching several rules counts once
    /// for each.
    pub rule_hits: BTreeMap<String, u64>,
}

impl FilterReport {
    pub fn dropped_total(&self) -> u64 {
        self.dropped.values().sum()
    }

    pub fn merge(&mut self, other: &FilterReport) {
        self.input += other.input;
        self.kept += other.kept;
        for (reason, n) in &other.dropped {
            *self.dropped.entry(*reason).or_default() += n;
        }
        for (label, n) in &other.rule_hits {
            *self.rule_hits.entry(label.clone()).or_default() += n;
        }
    }
}

impl AddAssign<&FilterReport> for FilterReport {
    fn add_assign(&mut self, rhs: &FilterReport) {
        self.merge(rhs);
    }
}

/// Order-preserving filter of `tweets` by [`matches`].
pub fn filter_corpus<I>(rule_set: &RuleSet, tweets: I) -> (Vec<TweetRecord>, FilterReport)
where
    I: IntoIterator<Item = TweetRecord>,
{
    let labels: Vec<String> = rule_set.rules.iter().map(FilterRule::label).collect();
    let mut report = FilterReport::default();
    for label in &labels {
        report.rule_hits.insert(label.clone(), 0);
    }
    let mut kept = Vec::new();
    for t in tweets {
        report.input += 1;
        match rule_set.evaluate(&t) {
            Ok(hits) => {
                for i in hits {
                    *report.rule_hits.get_mut(&labels[i]).expect("label seeded") += 1;
                }
                report.kept += 1;
                kept.push(t);
            }
            Err(reason) => *report.dropped.entry(reason).or_default() += 1,
        }
    }
    (kept, report)
}
