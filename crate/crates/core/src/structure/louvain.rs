use serde::Serialize;

use crate::graph::InteractionGraph;

const MIN_GAIN: f64 = 1e-12;

/// Community membership of every node of a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityPartition {
    pub node_ids: Vec<String>,
    /// Community of each node, indexed like the graph. Ids are dense,
    /// numbered by decreasing size (ties: smallest member first).
    pub membership: Vec<usize>,
    pub sizes: Vec<usize>,
    pub modularity: f64,
    /// Number of aggregation levels performed.
    pub levels: usize,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn community_of(&self, id: &str) -> Option<usize> {
        self.node_ids
            .binary_search_by(|n| n.as_str().cmp(id))
            .ok()
            .map(|i| self.membership[i])
    }

    pub fn members(&self, community: usize) -> impl Iterator<Item = &str> + '_ {
        self.membership
            .iter()
            .zip(&self.node_ids)
            .filter(move |(c, _)| **c == community)
            .map(|(_, id)| id.as_str())
    }
}

/// Newman modularity `sum_c [e_c / m - (d_c / 2m)^2]` of `membership` on
/// `g`; 0 for graphs without edges.
pub fn modularity(g: &InteractionGraph, membership: &[usize]) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let c = membership.iter().copied().max().map_or(0, |x| x + 1);
    let mut internal = vec![0.0; c];
    let mut degree = vec![0.0; c];
    for i in 0..g.node_count() {
        degree[membership[i]] += g.degree(i) as f64;
    }
    for (i, j) in g.edges() {
        if membership[i] == membership[j] {
            internal[membership[i]] += 1.0;
        }
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(e, d)| e / m - (d / (2.0 * m)).powi(2))
        .sum()
}

/// Weighted graph used between aggregation levels.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(g: &InteractionGraph) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = (0..g.node_count())
            .map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect())
            .collect();
        let strength = adj.iter().map(|a| a.len() as f64).collect();
        Level {
            adj,
            self_loop: vec![0.0; g.node_count()],
            strength,
            two_m: 2.0 * g.edge_count() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moving phase. Returns the community of each node (not yet
    /// renumbered) and whether anything moved.
    fn local_moves(&self, resolution: f64) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = self.strength.clone();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for i in 0..n {
                let ci = comm[i];
                let ki = self.strength[i];
                for &(j, w) in &self.adj[i] {
                    let cj = comm[j];
                    if link[cj] == 0.0 && !touched.contains(&cj) {
                        touched.push(cj);
                    }
                    link[cj] += w;
                }
                total[ci] -= ki;
                let gain = |c: usize, link_c: f64| link_c - resolution * total[c] * ki / self.two_m;
                let mut best = ci;
                let mut best_gain = gain(ci, link[ci]);
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += ki;
                if best != ci {
                    comm[i] = best;
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        (comm, moved_any)
    }

    /// Collapses each community into one node.
    fn aggregate(&self, dense: &[usize], count: usize) -> Level {
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![Default::default(); count];
        let mut self_loop = vec![0.0; count];
        for i in 0..self.len() {
            let ci = dense[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = dense[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_loop[ci] += w / 2.0;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = weights
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let strength = adj
            .iter()
            .zip(&self_loop)
            .map(|(a, l)| a.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * l)
            .collect();
        Level {
            adj,
            self_loop,
            strength,
            two_m: self.two_m,
        }
    }
}

/// Renumbers labels densely in order of first appearance.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![
        usize::MAX;
        labels
            .len()
            .max(labels.iter().copied().max().map_or(0, |x| x + 1))
    ];
    let mut next = 0;
    let dense = labels
        .iter()
        .map(|&l| {
            if map[l] == usize::MAX {
                map[l] = next;
                next += 1;
            }
            map[l]
        })
        .collect();
    (dense, next)
}

/// Louvain modularity optimization with a fixed ascending visiting order.
///
/// Each level moves nodes to the neighboring community of largest positive
/// modularity gain until no move gains more than 1e-12, then aggregates
/// communities into nodes. A graph without edges is left as singletons with
/// modularity 0.
pub fn louvain(g: &InteractionGraph) -> CommunityPartition {
    louvain_with_resolution(g, 1.0)
}

pub fn louvain_with_resolution(g: &InteractionGraph, resolution: f64) -> CommunityPartition {
    let n = g.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut levels = 0;
    if g.edge_count() > 0 {
        let mut level = Level::from_graph(g);
        loop {
            let (comm, moved) = level.local_moves(resolution);
            if !moved {
                break;
            }
            let (dense, count) = densify(&comm);
            for c in membership.iter_mut() {
                *c = dense[*c];
            }
            levels += 1;
            if count == level.len() {
                break;
            }
            level = level.aggregate(&dense, count);
        }
    }
    let (membership, sizes) = order_by_size(&membership);
    let modularity = modularity(g, &membership);
    CommunityPartition {
        node_ids: g.nodes().to_vec(),
        membership,
        sizes,
        modularity,
        levels,
    }
}

fn order_by_size(membership: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (dense, count) = densify(membership);
    let mut sizes = vec![0usize; count];
    for &c in &dense {
        sizes[c] += 1;
    }
    // dense ids already follow smallest-member order
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut rank = vec![0; count];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let membership = dense.iter().map(|&c| rank[c]).collect();
    let sizes = order.iter().map(|&c| sizes[c]).collect();
    (membership, sizes)
}
