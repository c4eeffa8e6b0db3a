use serde::Serialize;

use super::eigen::{leading_eigenpair, EigenOptions, EigenPair};
use super::StructureError;
use crate::graph::InteractionGraph;

/// Nodes chosen by NetShield, in selection order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShieldRanking {
    pub selected: Vec<String>,
    pub selected_indices: Vec<usize>,
    /// Marginal shield value of each pick at the time it was made.
    pub shield_scores: Vec<f64>,
    pub lambda: f64,
    pub eigvec: Vec<f64>,
}

impl ShieldRanking {
    /// Shield value of the whole selection (sum of the marginal gains).
    pub fn shield_value(&self) -> f64 {
        self.shield_scores.iter().sum()
    }
}

/// Greedy NetShield selection of `k` nodes on `g`.
pub fn netshield(g: &InteractionGraph, k: usize) -> Result<ShieldRanking, StructureError> {
    netshield_with(g, k, EigenOptions::default())
}

pub fn netshield_with(
    g: &InteractionGraph,
    k: usize,
    opts: EigenOptions,
) -> Result<ShieldRanking, StructureError> {
    if k > g.node_count() {
        return Err(StructureError::KTooLarge {
            k,
            n: g.node_count(),
        });
    }
    if k == 0 {
        return Ok(ShieldRanking {
            selected: vec![],
            selected_indices: vec![],
            shield_scores: vec![],
            lambda: 0.0,
            eigvec: vec![],
        });
    }
    let eig = leading_eigenpair(g, opts)?;
    netshield_from_eigenpair(g, k, &eig)
}

/// Greedy selection given a precomputed leading eigenpair.
///
/// Each round adds the node maximizing
/// `2 lambda u_i^2 - 2 u_i sum_{j in S} A_ij u_j`, the increase of
/// `Sv(S) = sum_{i in S} 2 lambda u_i^2 - sum_{i,j in S} A_ij u_i u_j`.
/// Near-ties (relative 1e-12) go to the lower index. Runs in `O(nk + m)`.
pub fn netshield_from_eigenpair(
    g: &InteractionGraph,
    k: usize,
    eig: &EigenPair,
) -> Result<ShieldRanking, StructureError> {
    let n = g.node_count();
    if k > n {
        return Err(StructureError::KTooLarge { k, n });
    }
    let u = &eig.vector;
    let lambda = eig.lambda;
    let base: Vec<f64> = u.iter().map(|x| 2.0 * lambda * x * x).collect();
    // acc[i] = sum over selected neighbors j of u_j
    let mut acc = vec![0.0; n];
    let mut taken = vec![false; n];
    let mut ranking = ShieldRanking {
        selected: Vec::with_capacity(k),
        selected_indices: Vec::with_capacity(k),
        shield_scores: Vec::with_capacity(k),
        lambda,
        eigvec: u.clone(),
    };
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !taken[i]) {
            let gain = base[i] - 2.0 * u[i] * acc[i];
            match best {
                Some((_, b)) if gain <= b + 1e-12 * b.abs().max(1.0) => {}
                _ => best = Some((i, gain)),
            }
        }
        let (pick, gain) = best.expect("k <= n leaves a candidate");
        taken[pick] = true;
        for &j in g.neighbors(pick) {
            acc[j] += u[pick];
        }
        ranking.selected.push(g.node_id(pick).to_string());
        ranking.selected_indices.push(pick);
        ranking.shield_scores.push(gain);
    }
    Ok(ranking)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(g: &InteractionGraph, eig: &EigenPair, set: &[usize]) -> f64 {
        let u = &eig.vector;
        let mut v: f64 = set.iter().map(|&i| 2.0 * eig.lambda * u[i] * u[i]).sum();
        for &i in set {
            for &j in set {
                if g.has_edge(i, j) {
                    v -= u[i] * u[j];
                }
            }
        }
        v
    }

    #[test]
    fn k_zero() {
        let g = InteractionGraph::from_index_edges(3, &[(0, 1)]);
        assert!(netshield(&g, 0).unwrap().selected.is_empty());
    }

    #[test]
    fn k_too_large() {
        let g = InteractionGraph::from_index_edges(2, &[(0, 1)]);
        assert!(matches!(
            netshield(&g, 3),
            Err(StructureError::KTooLarge { k: 3, n: 2 })
        ));
    }

    #[test]
    fn star_center_first() {
        let g = InteractionGraph::from_index_edges(5, &[(1, 0), (1, 2), (1, 3), (1, 4)]);
        let r = netshield(&g, 1).unwrap();
        assert_eq!(r.selected, vec!["1"]);
        // brute force over singletons
        let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
        let best = (0..5)
            .max_by(|&a, &b| sv(&g, &eig, &[a]).partial_cmp(&sv(&g, &eig, &[b])).unwrap())
            .unwrap();
        assert_eq!(best, 1);
    }

    #[test]
    fn triangle_with_pendant_matches_exhaustive_pairs() {
        // triangle 0-1-2 with pendant 3 on node 2
        let g = InteractionGraph::from_index_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let r = netshield(&g, 2).unwrap();
        let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
        let mut best = f64::MIN;
        for a in 0..4 {
            for b in a + 1..4 {
                best = best.max(sv(&g, &eig, &[a, b]));
            }
        }
        assert!((sv(&g, &eig, &r.selected_indices) - best).abs() < 1e-12);
        assert!((r.shield_value() - best).abs() < 1e-12);
        assert_eq!(r.selected_indices[0], 2);
    }

    #[test]
    fn gains_do_not_increase() {
        let g = InteractionGraph::from_index_edges(
            7,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (4, 6),
            ],
        );
        let r = netshield(&g, 7).unwrap();
        for w in r.shield_scores.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn symmetric_ties_go_to_lower_id() {
        let g = InteractionGraph::from_index_edges(4, &[(0, 1), (2, 3)]);
        let r = netshield(&g, 2).unwrap();
        assert_eq!(r.selected_indices, vec![0, 2]);
    }
}
