//! Monitoring toolkit for political discussions on microblogging platforms.
//!
//! The crate follows the analysis from raw archive to report:
//!
//! * [`corpus`]: load line-delimited post archives, filter them by keyword
//!   and hashtag rules, and read account annotations and follow lists.
//! * [`graph`]: per-window user interaction graphs.
//! * [`stance`]: Left/Right/Center/Neutral attribution from follow relations.
//! * [`polarization`]: Friedkin–Johnsen equilibrium and polarization index.
//! * [`structure`]: NetShield influencer ranking and Louvain communities.
//! * [`pipeline`]: statistics, experiments and the report bundle.

pub mod corpus;
pub mod graph;
pub mod pipeline;
pub mod polarization;
pub mod stance;
pub mod structure;
