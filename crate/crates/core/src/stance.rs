//! Political stance of users, inferred from the annotated political accounts
//! they follow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::corpus::{Annotations, Category, Follows, Side};
use crate::graph::InteractionGraph;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StanceError {
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("followed account {0} has no annotation")]
    MissingAnnotation(String),
    #[error("followed account {0} is not annotated as a political account")]
    NotPolitical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Stance {
    Left,
    Right,
    Center,
    Neutral,
}

impl Stance {
    pub const ALL: [Stance; 4] = [Stance::Left, Stance::Right, Stance::Center, Stance::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Left => "Left",
            Stance::Right => "Right",
            Stance::Center => "Center",
            Stance::Neutral => "Neutral",
        }
    }

    /// Innate opinion: Right is +1, Left is -1, everything else 0.
    pub fn opinion(self) -> f64 {
        match self {
            Stance::Right => 1.0,
            Stance::Left => -1.0,
            Stance::Center | Stance::Neutral => 0.0,
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decision rule over follow tallies.
///
/// No political follows gives Neutral. A strict Center plurality gives
/// Center. Otherwise the side with strictly more follows wins, provided its
/// share of all political follows reaches `threshold`; anything else
/// (ties, or a majority below the threshold) is Center.
pub fn classify(n_left: u32, n_right: u32, n_center: u32, threshold: f64) -> Stance {
    let total = n_left + n_right + n_center;
    if total == 0 {
        return Stance::Neutral;
    }
    if n_center > n_left.max(n_right) {
        return Stance::Center;
    }
    let share = |n: u32| n as f64 / total as f64;
    if n_left > n_right && share(n_left) >= threshold {
        Stance::Left
    } else if n_right > n_left && share(n_right) >= threshold {
        Stance::Right
    } else {
        Stance::Center
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StanceAssignment {
    pub user_id: String,
    pub stance: Stance,
    pub n_left: u32,
    pub n_right: u32,
    pub n_center: u32,
    pub threshold: f64,
}

impl StanceAssignment {
    pub fn neutral(user_id: impl Into<String>, threshold: f64) -> Self {
        StanceAssignment {
            user_id: user_id.into(),
            stance: Stance::Neutral,
            n_left: 0,
            n_right: 0,
            n_center: 0,
            threshold,
        }
    }
}

fn check_threshold(threshold: f64) -> Result<(), StanceError> {
    if (0.0..=1.0).contains(&threshold) {
        Ok(())
    } else {
        Err(StanceError::InvalidThreshold(threshold))
    }
}

/// Stance of one user from the ids of the political accounts they follow.
pub fn infer_stance<'a>(
    user_id: &str,
    followed: impl IntoIterator<Item = &'a str>,
    annotations: &Annotations,
    threshold: f64,
) -> Result<StanceAssignment, StanceError> {
    check_threshold(threshold)?;
    let followed: BTreeSet<&str> = followed.into_iter().collect();
    let (mut n_left, mut n_right, mut n_center) = (0u32, 0u32, 0u32);
    for id in followed {
        let a = annotations
            .get(id)
            .ok_or_else(|| StanceError::MissingAnnotation(id.to_string()))?;
        match (a.category, a.side) {
            (Category::Political, Some(Side::Left)) => n_left += 1,
            (Category::Political, Some(Side::Right)) => n_right += 1,
            (Category::Political, Some(Side::Center)) => n_center += 1,
            _ => return Err(StanceError::NotPolitical(id.to_string())),
        }
    }
    Ok(StanceAssignment {
        user_id: user_id.to_string(),
        stance: classify(n_left, n_right, n_center, threshold),
        n_left,
        n_right,
        n_center,
        threshold,
    })
}

/// Stance per user. Users without an entry are Neutral.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StanceMap {
    by_user: BTreeMap<String, StanceAssignment>,
    threshold: f64,
}

impl StanceMap {
    pub fn new(threshold: f64) -> Self {
        StanceMap {
            by_user: BTreeMap::new(),
            threshold,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn get(&self, user_id: &str) -> Option<&StanceAssignment> {
        self.by_user.get(user_id)
    }

    pub fn stance_of(&self, user_id: &str) -> Stance {
        self.get(user_id).map_or(Stance::Neutral, |a| a.stance)
    }

    pub fn insert(&mut self, a: StanceAssignment) {
        self.by_user.insert(a.user_id.clone(), a);
    }

    pub fn iter(&self) -> impl Iterator<Item = &StanceAssignment> {
        self.by_user.values()
    }

    pub fn len(&self) -> usize {
        self.by_user.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_user.is_empty()
    }

    pub fn count(&self, stance: Stance) -> usize {
        self.by_user.values().filter(|a| a.stance == stance).count()
    }

    pub fn users_with(&self, stance: Stance) -> BTreeSet<&str> {
        self.by_user
            .values()
            .filter(|a| a.stance == stance)
            .map(|a| a.user_id.as_str())
            .collect()
    }
}

/// Applies [`infer_stance`] to every follower in `follows`.
pub fn stance_map(
    follows: &Follows,
    annotations: &Annotations,
    threshold: f64,
) -> Result<StanceMap, StanceError> {
    check_threshold(threshold)?;
    let mut map = StanceMap {
        by_user: BTreeMap::new(),
        threshold,
    };
    for (user, followed) in follows.iter() {
        map.insert(infer_stance(
            user,
            followed.iter().map(String::as_str),
            annotations,
            threshold,
        )?);
    }
    Ok(map)
}

/// Stance of exactly the given users; those absent from `follows` are
/// Neutral.
pub fn stance_map_for<'a>(
    users: impl IntoIterator<Item = &'a str>,
    follows: &Follows,
    annotations: &Annotations,
    threshold: f64,
) -> Result<StanceMap, StanceError> {
    check_threshold(threshold)?;
    let mut map = StanceMap {
        by_user: BTreeMap::new(),
        threshold,
    };
    for user in users {
        let a = match follows.followed_by(user) {
            Some(followed) => infer_stance(
                user,
                followed.iter().map(String::as_str),
                annotations,
                threshold,
            )?,
            None => StanceAssignment::neutral(user, threshold),
        };
        map.insert(a);
    }
    Ok(map)
}

/// Innate opinion per node, indexed like `g`.
pub fn opinion_vector(g: &InteractionGraph, stances: &StanceMap) -> Vec<f64> {
    g.nodes()
        .iter()
        .map(|id| stances.stance_of(id).opinion())
        .collect()
}
