use serde::{Deserialize, Serialize};

use super::louvain::CommunityPartition;
use crate::stance::{Stance, StanceMap};

/// Sign convention of the community lean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeanOrientation {
    /// Left majority is positive.
    #[default]
    LeftPositive,
    RightPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityProfile {
    pub community_id: usize,
    pub size: usize,
    pub n_left: usize,
    pub n_right: usize,
    pub n_center: usize,
    pub n_neutral: usize,
    /// `(n_left - n_right) / (n_left + n_right)` under `LeftPositive`, 0
    /// when neither side is present.
    pub lean: f64,
}

/// Political make-up of the `top_n` largest communities. Nodes without a
/// stance count as Neutral.
pub fn decompose_communities(
    partition: &CommunityPartition,
    stances: &StanceMap,
    top_n: usize,
    orientation: LeanOrientation,
) -> Vec<CommunityProfile> {
    let mut profiles: Vec<CommunityProfile> = partition
        .sizes
        .iter()
        .enumerate()
        .map(|(community_id, &size)| CommunityProfile {
            community_id,
            size,
            n_left: 0,
            n_right: 0,
            n_center: 0,
            n_neutral: 0,
            lean: 0.0,
        })
        .collect();
    for (id, &c) in partition.node_ids.iter().zip(&partition.membership) {
        let p = &mut profiles[c];
        match stances.stance_of(id) {
            Stance::Left => p.n_left += 1,
            Stance::Right => p.n_right += 1,
            Stance::Center => p.n_center += 1,
            Stance::Neutral => p.n_neutral += 1,
        }
    }
    for p in &mut profiles {
        let sided = p.n_left + p.n_right;
        if sided > 0 {
            let lean = (p.n_left as f64 - p.n_right as f64) / sided as f64;
            p.lean = match orientation {
                LeanOrientation::LeftPositive => lean,
                LeanOrientation::RightPositive => -lean,
            };
        }
    }
    // community ids are already ordered by size
    profiles.truncate(top_n);
    profiles
}
