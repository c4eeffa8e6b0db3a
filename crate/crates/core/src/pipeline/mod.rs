//! End-to-end analysis: load and filter the corpus, build graphs, infer
//! stances, run the experiments and write the report bundle.

mod config;
mod experiments;
mod report;
mod stats;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use chrono::{FixedOffset, NaiveDate};

pub use config::{PipelineConfig, SolverChoice};
pub use experiments::{
    ablation, daily_ablation, influencers, pi_series, threshold_sweep, AblationCategory,
    AblationResult, PiRow, SweepRow,
};
pub use report::{
    run_all, write_ablation, write_communities, write_filter_report, write_graph,
    write_influencers, write_manifest, write_pi_series, write_prevalent, write_report,
    write_stance_shares, write_stances, write_stats, write_summary, write_sweep, ReportData,
    ReportFile, RunReport,
};
pub use stats::{
    compute_stats, stance_shares, DailyStats, Shares, StanceShares, StatsOptions, TopList,
    TopLists, SHARE_ORDER,
};

use crate::corpus::{
    filter_corpus, load_annotations, load_follows, read_tweets, Annotations, DateWindow,
    FilterReport, Follows, LoadReport, RuleSet, TweetRecord,
};
use crate::graph::{build_graph, daily_graphs, GraphOptions, InteractionGraph, TimeWindow};
use crate::stance::{stance_map, StanceAssignment, StanceMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Filter,
    Graph,
    Stance,
    Stats,
    Polarization,
    Influencers,
    Ablation,
    Sweep,
    Communities,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Filter => "filter",
            Stage::Graph => "graph",
            Stage::Stance => "stance",
            Stage::Stats => "stats",
            Stage::Polarization => "polarization",
            Stage::Influencers => "influencers",
            Stage::Ablation => "ablation",
            Stage::Sweep => "sweep",
            Stage::Communities => "communities",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

impl PipelineError {
    pub fn at(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        PipelineError::Stage {
            stage,
            source: source.into(),
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Stage { stage, .. } => Some(*stage),
            PipelineError::Config(_) => None,
        }
    }
}

/// Inputs of a run after loading and filtering.
#[derive(Debug, Clone)]
pub struct Session {
    pub config: PipelineConfig,
    pub rules: RuleSet,
    pub tweets: Vec<TweetRecord>,
    pub load_report: LoadReport,
    pub filter_report: FilterReport,
    pub annotations: Annotations,
    pub follows: Follows,
    pub stances: StanceMap,
    pub stopwords: Vec<String>,
    pub warnings: Vec<String>,
}

impl Session {
    pub fn load(config: &PipelineConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let mut rules = match &config.rules {
            Some(p) => {
                RuleSet::load(config.resolve(p)).map_err(|e| PipelineError::at(Stage::Load, e))?
            }
            None => RuleSet::default_rules(),
        };
        if let Some(m) = config.utc_offset_minutes {
            rules = rules
                .with_utc_offset_minutes(m)
                .map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        let study = rules.study_window();
        let window = DateWindow::new(
            config.from.unwrap_or(study.start),
            config.to.unwrap_or(study.end),
        )
        .map_err(|e| PipelineError::Config(e.to_string()))?;
        let rules = rules.with_study_window(window);

        let (raw, load_report) = read_tweets(config.resolve(&config.tweets), config.schema_strict)
            .map_err(|e| PipelineError::at(Stage::Load, e))?;
        let annotations = load_annotations(config.resolve(&config.annotations))
            .map_err(|e| PipelineError::at(Stage::Load, e))?;
        let follows = load_follows(config.resolve(&config.follows))
            .map_err(|e| PipelineError::at(Stage::Load, e))?;
        let stopwords = match &config.stopwords {
            Some(p) => std::fs::read_to_string(config.resolve(p))
                .map_err(|e| PipelineError::at(Stage::Load, e))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_owned)
                .collect(),
            None => Vec::new(),
        };

        let (tweets, filter_report) = filter_corpus(&rules, raw);
        let mut warnings = load_report.warnings.clone();
        if tweets.is_empty() {
            let msg = "no posts left after filtering; the report will be empty".to_string();
            log::warn!("{msg}");
            warnings.push(msg);
        }
        let stances = stance_map(&follows, &annotations, config.threshold)
            .map_err(|e| PipelineError::at(Stage::Stance, e))?;
        Ok(Session {
            config: config.clone(),
            rules,
            tweets,
            load_report,
            filter_report,
            annotations,
            follows,
            stances,
            stopwords,
            warnings,
        })
    }

    pub fn offset(&self) -> FixedOffset {
        self.rules.utc_offset()
    }

    /// First and last analysed day.
    pub fn period(&self) -> (NaiveDate, NaiveDate) {
        let w = self.rules.study_window();
        (w.start, w.end)
    }

    pub fn window(&self) -> TimeWindow {
        let (a, b) = self.period();
        TimeWindow::days(a, b, self.offset())
    }

    /// File-name label of the analysed period.
    pub fn window_label(&self) -> String {
        let (a, b) = self.period();
        format!("{a}_{b}")
    }

    pub fn full_graph(&self) -> InteractionGraph {
        build_graph(&self.tweets, self.window())
    }

    pub fn daily_graphs(&self) -> Vec<(NaiveDate, InteractionGraph)> {
        daily_graphs(&self.tweets, self.offset(), GraphOptions::default())
    }

    pub fn stats_options(&self) -> StatsOptions {
        let mut o = StatsOptions::new(self.config.stats_top_k)
            .with_stopwords(self.stopwords.iter().map(String::as_str));
        o.offset = self.offset();
        o
    }

    /// Stances of every follower and every node of `g`.
    pub fn stances_covering(&self, g: &InteractionGraph) -> StanceMap {
        let mut map = self.stances.clone();
        let known: BTreeSet<String> = map.iter().map(|a| a.user_id.clone()).collect();
        for id in g.nodes() {
            if !known.contains(id) {
                map.insert(StanceAssignment::neutral(
                    id.as_str(),
                    self.config.threshold,
                ));
            }
        }
        map
    }
}

/// Loads `config_path` and runs everything.
pub fn run_config(config_path: impl AsRef<Path>) -> Result<RunReport, PipelineError> {
    let cfg = PipelineConfig::load(config_path)?;
    run_all(&cfg)
}
