//! Undirected, unweighted user interaction graphs.

mod export;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveTime, TimeZone, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::TweetRecord;

pub use export::{
    export_graph, read_graphml, read_graphml_file, write_edge_list, write_graphml, GraphmlError,
    ImportedGraph, NodeAttrs,
};

/// Half-open time interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Self {
        assert!(start <= end, "window start after end");
        TimeWindow { start, end }
    }

    /// Everything, for graphs that are not tied to a period.
    pub fn unbounded() -> Self {
        TimeWindow {
            start: DateTime::<Utc>::MIN_UTC,
            end: DateTime::<Utc>::MAX_UTC,
        }
    }

    /// The calendar day `date` at `offset`, as a UTC interval.
    pub fn day(date: NaiveDate, offset: FixedOffset) -> Self {
        Self::days(date, date, offset)
    }

    /// Calendar days `first..=last` at `offset`.
    pub fn days(first: NaiveDate, last: NaiveDate, offset: FixedOffset) -> Self {
        let start = offset
            .from_local_datetime(&first.and_time(NaiveTime::MIN))
            .single()
            .expect("fixed offsets are unambiguous");
        let next = last.succ_opt().expect("date in range");
        let end = offset
            .from_local_datetime(&next.and_time(NaiveTime::MIN))
            .single()
            .expect("fixed offsets are unambiguous");
        TimeWindow::new(start.with_timezone(&Utc), end.with_timezone(&Utc))
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t < self.end
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphOptions {
    /// Keep authors whose posts reference nobody else as isolated nodes.
    pub include_isolated_authors: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            include_isolated_authors: true,
        }
    }
}

/// Simple undirected graph over user ids.
///
/// Node indices follow ascending user id, so two graphs over the same user
/// set always agree on indices. Neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    window: TimeWindow,
    nodes: Vec<String>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl InteractionGraph {
    /// Builds a graph from explicit node ids and edges. Edge endpoints are
    /// added as nodes; self-loops and repeated edges are dropped.
    pub fn from_edges<S: AsRef<str>>(
        window: TimeWindow,
        nodes: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Self {
        let mut node_set: BTreeSet<String> =
            nodes.into_iter().map(|s| s.as_ref().to_string()).collect();
        let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            node_set.insert(a.to_string());
            node_set.insert(b.to_string());
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                pairs.insert((lo.to_string(), hi.to_string()));
            }
        }
        Self::from_sets(window, node_set, pairs)
    }

    /// `edges` hold ordered `(lo, hi)` pairs with `lo < hi`, all endpoints in
    /// `nodes`.
    fn from_sets(
        window: TimeWindow,
        nodes: BTreeSet<String>,
        edges: BTreeSet<(String, String)>,
    ) -> Self {
        let nodes: Vec<String> = nodes.into_iter().collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let index = |id: &str| nodes.binary_search_by(|n| n.as_str().cmp(id)).unwrap();
        for (a, b) in &edges {
            let (i, j) = (index(a), index(b));
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        InteractionGraph {
            window,
            nodes,
            adjacency,
            edge_count: edges.len(),
        }
    }

    /// Graph over dense indices `0..n` whose node ids are zero-padded
    /// numbers, so that index order and id order coincide.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let width = n.saturating_sub(1).to_string().len();
        let id = |i: usize| format!("{i:0width$}");
        Self::from_edges(
            TimeWindow::unbounded(),
            (0..n).map(id),
            edges.iter().map(|&(a, b)| (id(a), id(b))),
        )
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_id(&self, index: usize) -> &str {
        &self.nodes[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).ok()
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges as index pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Edges as id pairs with the smaller id first.
    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges()
            .map(|(i, j)| (self.nodes[i].as_str(), self.nodes[j].as_str()))
    }

    pub fn isolated_count(&self) -> usize {
        self.adjacency.iter().filter(|a| a.is_empty()).count()
    }

    /// Subgraph induced by `keep` (indices into this graph).
    pub fn induced(&self, keep: &[bool]) -> InteractionGraph {
        let nodes: BTreeSet<String> = self
            .nodes
            .iter()
            .zip(keep)
            .filter(|(_, k)| **k)
            .map(|(n, _)| n.clone())
            .collect();
        let edges: BTreeSet<(String, String)> = self
            .edges()
            .filter(|&(i, j)| keep[i] && keep[j])
            .map(|(i, j)| (self.nodes[i].clone(), self.nodes[j].clone()))
            .collect();
        Self::from_sets(self.window, nodes, edges)
    }

    /// The graph without its degree-0 nodes.
    pub fn without_isolated(&self) -> InteractionGraph {
        let keep: Vec<bool> = self.adjacency.iter().map(|a| !a.is_empty()).collect();
        self.induced(&keep)
    }
}

/// Interaction graph of the posts whose timestamp falls in `window`.
pub fn build_graph(tweets: &[TweetRecord], window: TimeWindow) -> InteractionGraph {
    build_graph_with(tweets, window, GraphOptions::default())
}

pub fn build_graph_with(
    tweets: &[TweetRecord],
    window: TimeWindow,
    opts: GraphOptions,
) -> InteractionGraph {
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut edges: BTreeSet<(String, String)> = BTreeSet::new();
    for t in tweets.iter().filter(|t| window.contains(t.timestamp)) {
        let author = t.author_id.as_str();
        let mut interacted = false;
        for other in &t.referenced_user_ids {
            let other = other.as_str();
            if other == author {
                continue;
            }
            interacted = true;
            nodes.insert(other.to_string());
            let (lo, hi) = if author < other {
                (author, other)
            } else {
                (other, author)
            };
            edges.insert((lo.to_string(), hi.to_string()));
        }
        if interacted || opts.include_isolated_authors {
            nodes.insert(author.to_string());
        }
    }
    InteractionGraph::from_sets(window, nodes, edges)
}

/// One graph per calendar date (at `offset`) that has at least one post,
/// in date order.
pub fn daily_graphs(
    tweets: &[TweetRecord],
    offset: FixedOffset,
    opts: GraphOptions,
) -> Vec<(NaiveDate, InteractionGraph)> {
    let mut by_day: BTreeMap<NaiveDate, Vec<TweetRecord>> = BTreeMap::new();
    for t in tweets {
        by_day
            .entry(t.local_date(offset))
            .or_default()
            .push(t.clone());
    }
    by_day
        .into_par_iter()
        .map(|(date, day)| {
            let g = build_graph_with(&day, TimeWindow::day(date, offset), opts);
            (date, g)
        })
        .collect()
}

/// Removes `victims` from `g`.
///
/// With `drop_isolated`, nodes whose every neighbor was removed are dropped
/// too; nodes that were already isolated stay.
pub fn remove_nodes(
    g: &InteractionGraph,
    victims: &BTreeSet<String>,
    drop_isolated: bool,
) -> InteractionGraph {
    let removed: Vec<bool> = g.nodes.iter().map(|n| victims.contains(n)).collect();
    let keep: Vec<bool> = (0..g.node_count())
        .map(|i| {
            if removed[i] {
                return false;
            }
            let ns = g.neighbors(i);
            !(drop_isolated && !ns.is_empty() && ns.iter().all(|&j| removed[j]))
        })
        .collect();
    g.induced(&keep)
}
