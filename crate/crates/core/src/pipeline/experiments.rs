use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Annotations, Category, Follows};
use crate::graph::{remove_nodes, InteractionGraph};
use crate::polarization::{compute_pi, PiOptions, PolarizationError, PolarizationResult};
use crate::stance::{stance_map_for, Stance, StanceError, StanceMap};
use crate::structure::{netshield, ShieldRanking, StructureError};

/// Node groups removed in the ablation experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AblationCategory {
    Political,
    MediaJournalist,
    Influencers,
}

impl AblationCategory {
    pub const ALL: [AblationCategory; 3] = [
        AblationCategory::Political,
        AblationCategory::MediaJournalist,
        AblationCategory::Influencers,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AblationCategory::Political => "political",
            AblationCategory::MediaJournalist => "media_journalist",
            AblationCategory::Influencers => "influencers",
        }
    }
}

impl fmt::Display for AblationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiRow {
    pub date: NaiveDate,
    /// A failed day stays in the series as a flagged gap.
    pub result: Result<PolarizationResult, PolarizationError>,
}

/// Polarization index of every daily graph, in input order.
pub fn pi_series(
    daily: &[(NaiveDate, InteractionGraph)],
    stances: &StanceMap,
    opts: PiOptions,
) -> Vec<PiRow> {
    daily
        .par_iter()
        .map(|(date, g)| {
            let result = compute_pi(g, stances, opts);
            if let Err(e) = &result {
                log::warn!("pi for {date}: {e}");
            }
            PiRow {
                date: *date,
                result,
            }
        })
        .collect()
}

/// NetShield top-`k` (capped at the node count). If power iteration does
/// not converge the last estimate is used and a warning logged.
pub fn influencers(g: &InteractionGraph, k: usize) -> ShieldRanking {
    let k = k.min(g.node_count());
    match netshield(g, k) {
        Ok(r) => r,
        Err(StructureError::NotConverged {
            iterations,
            residual,
            estimate,
        }) => {
            log::warn!(
                "leading eigenpair not converged after {iterations} iterations \
                 (residual {residual:.3e}); ranking from the last estimate"
            );
            crate::structure::netshield_from_eigenpair(g, k, &estimate).expect("k capped at n")
        }
        Err(e) => unreachable!("k capped at n on a non-empty graph: {e}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationResult {
    pub date: Option<NaiveDate>,
    pub pi_full: Result<f64, PolarizationError>,
    pub pi_without: BTreeMap<AblationCategory, Result<f64, PolarizationError>>,
    pub drop_isolated: bool,
}

/// Index of `g` before and after removing each node group.
pub fn ablation(
    g: &InteractionGraph,
    stances: &StanceMap,
    annotations: &Annotations,
    influencer_set: &BTreeSet<String>,
    drop_isolated: bool,
    opts: PiOptions,
) -> AblationResult {
    let pi_full = compute_pi(g, stances, opts).map(|r| r.pi);
    let pi_without = AblationCategory::ALL
        .iter()
        .map(|&cat| {
            let victims = match cat {
                AblationCategory::Political => annotations.members(Category::Political),
                AblationCategory::MediaJournalist => annotations.members(Category::MediaJournalist),
                AblationCategory::Influencers => influencer_set.clone(),
            };
            let reduced = remove_nodes(g, &victims, drop_isolated);
            (cat, compute_pi(&reduced, stances, opts).map(|r| r.pi))
        })
        .collect();
    AblationResult {
        date: None,
        pi_full,
        pi_without,
        drop_isolated,
    }
}

/// Ablation of every daily graph with that day's NetShield influencers.
pub fn daily_ablation(
    daily: &[(NaiveDate, InteractionGraph)],
    stances: &StanceMap,
    annotations: &Annotations,
    k: usize,
    drop_isolated: bool,
    opts: PiOptions,
) -> Vec<AblationResult> {
    daily
        .par_iter()
        .map(|(date, g)| {
            let infl: BTreeSet<String> = influencers(g, k).selected.into_iter().collect();
            let mut r = ablation(g, stances, annotations, &infl, drop_isolated, opts);
            r.date = Some(*date);
            r
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub threshold: f64,
    pub pi_full: Result<f64, PolarizationError>,
    pub pi_without: BTreeMap<AblationCategory, Result<f64, PolarizationError>>,
    /// Labeled users among the graph's nodes.
    pub n_left_users: usize,
    pub n_right_users: usize,
}

/// Stance and every ablation recomputed on `g` per threshold.
pub fn threshold_sweep(
    g: &InteractionGraph,
    follows: &Follows,
    annotations: &Annotations,
    thresholds: &[f64],
    influencer_set: &BTreeSet<String>,
    drop_isolated: bool,
    opts: PiOptions,
) -> Result<Vec<SweepRow>, StanceError> {
    thresholds
        .par_iter()
        .map(|&threshold| {
            let stances = stance_map_for(
                g.nodes().iter().map(String::as_str),
                follows,
                annotations,
                threshold,
            )?;
            let ab = ablation(
                g,
                &stances,
                annotations,
                influencer_set,
                drop_isolated,
                opts,
            );
            Ok(SweepRow {
                threshold,
                pi_full: ab.pi_full,
                pi_without: ab.pi_without,
                n_left_users: stances.count(Stance::Left),
                n_right_users: stances.count(Stance::Right),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AccountAnnotation, Side};
    use crate::stance::StanceAssignment;

    fn opinions(pairs: &[(&str, Stance)]) -> StanceMap {
        let mut m = StanceMap::new(0.0);
        for (u, s) in pairs {
            let mut a = StanceAssignment::neutral(*u, 0.0);
            a.stance = *s;
            m.insert(a);
        }
        m
    }

    fn bridged() -> (InteractionGraph, StanceMap, Annotations) {
        // triangles {0,1,2} Left and {4,5,6} Right joined through 3
        let g = InteractionGraph::from_index_edges(
            7,
            &[
                (0, 1),
                (1, 2),
                (0, 2),
                (4, 5),
                (5, 6),
                (4, 6),
                (2, 3),
                (3, 4),
            ],
        );
        let s = opinions(&[
            ("0", Stance::Left),
            ("1", Stance::Left),
            ("2", Stance::Left),
            ("4", Stance::Right),
            ("5", Stance::Right),
            ("6", Stance::Right),
        ]);
        let mut ann = Annotations::new();
        ann.insert(AccountAnnotation::new("3", Category::MediaJournalist, None).unwrap())
            .unwrap();
        (g, s, ann)
    }

    #[test]
    fn removing_the_bridge_gives_full_polarization() {
        let (g, s, ann) = bridged();
        let r = ablation(&g, &s, &ann, &BTreeSet::new(), true, PiOptions::default());
        let full = r.pi_full.unwrap();
        let without = *r.pi_without[&AblationCategory::MediaJournalist]
            .as_ref()
            .unwrap();
        assert!((without - 1.0).abs() < 1e-12);
        assert!(full < without);
        // nobody is Political: no-op removal
        assert_eq!(r.pi_without[&AblationCategory::Political], Ok(full));
        assert_eq!(r.pi_without[&AblationCategory::Influencers], Ok(full));
    }

    #[test]
    fn removing_everyone_is_reported_per_category() {
        let g = InteractionGraph::from_index_edges(2, &[(0, 1)]);
        let all: BTreeSet<String> = g.nodes().iter().cloned().collect();
        let r = ablation(
            &g,
            &StanceMap::new(0.0),
            &Annotations::new(),
            &all,
            true,
            PiOptions::default(),
        );
        assert!(r.pi_full.is_ok());
        assert_eq!(
            r.pi_without[&AblationCategory::Influencers],
            Err(PolarizationError::EmptyGraph)
        );
    }

    #[test]
    fn series_keeps_failed_days() {
        let d1 = NaiveDate::from_ymd_opt(2022, 8, 1).unwrap();
        let d2 = d1.succ_opt().unwrap();
        let days = vec![
            (d1, InteractionGraph::from_index_edges(2, &[(0, 1)])),
            (d2, InteractionGraph::from_index_edges(0, &[])),
        ];
        let rows = pi_series(&days, &StanceMap::new(0.0), PiOptions::default());
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].result.as_ref().unwrap().pi, 0.0);
        assert!(rows[1].result.is_err());
    }

    #[test]
    fn sweep_counts_do_not_increase() {
        let (g, _, mut ann) = bridged();
        for (p, side) in [("pL", Side::Left), ("pR", Side::Right)] {
            ann.insert(AccountAnnotation::political(p, side)).unwrap();
        }
        let mut follows = Follows::new();
        for (u, targets) in [
            ("0", vec!["pL"]),
            ("1", vec!["pL", "pR"]),
            ("5", vec!["pR"]),
        ] {
            for t in targets {
                follows.insert(u, t);
            }
        }
        let rows = threshold_sweep(
            &g,
            &follows,
            &ann,
            &[0.0, 0.5, 0.7],
            &BTreeSet::new(),
            true,
            PiOptions::default(),
        )
        .unwrap();
        let labeled: Vec<usize> = rows
            .iter()
            .map(|r| r.n_left_users + r.n_right_users)
            .collect();
        assert!(labeled.windows(2).all(|w| w[0] >= w[1]), "{labeled:?}");
    }

    #[test]
    fn influencers_cap_k() {
        let g = InteractionGraph::from_index_edges(3, &[(0, 1), (1, 2)]);
        let r = influencers(&g, 500);
        assert_eq!(r.selected.len(), 3);
        assert_eq!(r.selected[0], "1");
        assert!(influencers(&InteractionGraph::from_index_edges(0, &[]), 5)
            .selected
            .is_empty());
    }
}
