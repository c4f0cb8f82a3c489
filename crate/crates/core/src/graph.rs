//! Weighted undirected collaboration networks.
//!
//! Nodes are authors, institutions or countries; an edge joins two entities
//! that appear together on at least one paper and its weight counts those
//! papers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::normalize::PaperRecord;

/// Which entity a collaboration graph connects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Author,
    Institution,
    Country,
}

impl EntityKind {
    pub const ALL: [EntityKind; 3] = [EntityKind::Author, EntityKind::Institution, EntityKind::Country];

    pub fn as_str(&self) -> &'static str {
        match self {
            EntityKind::Author => "author",
            EntityKind::Institution => "institution",
            EntityKind::Country => "country",
        }
    }

    /// Distinct entities of this kind on one paper, first appearance first.
    pub fn entities<'a>(&self, paper: &'a PaperRecord) -> Vec<&'a str> {
        match self {
            EntityKind::Author => {
                let mut out: Vec<&str> = Vec::new();
                for a in &paper.authors {
                    if !out.contains(&a.as_str()) {
                        out.push(a);
                    }
                }
                out
            }
            EntityKind::Institution => paper.institutions(),
            EntityKind::Country => paper.countries(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub label: String,
    /// Papers listing the entity.
    pub papers: u64,
    /// Sum of citation counts over those papers.
    pub citations: u64,
}

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollaborationGraph {
    pub entity_kind: EntityKind,
    pub nodes: Vec<Node>,
    /// Sorted by `(u, v)`.
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub degree: usize,
    pub weighted_degree: u64,
}

impl CollaborationGraph {
    /// Node count.
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Edge count.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    /// Neighbour lists `(neighbour, weight)`, each sorted by neighbour index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Node indices ordered by label.
    pub fn label_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| self.nodes[a].label.cmp(&self.nodes[b].label));
        order
    }

    /// Builds a graph directly from labelled nodes and weighted edges.
    /// Edges are normalized to `u < v`, merged and sorted; self-loops and
    /// zero weights are dropped.
    pub fn from_parts(entity_kind: EntityKind, nodes: Vec<Node>, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut merged: HashMap<(usize, usize), u64> = HashMap::new();
        for e in edges {
            if e.u == e.v || e.weight == 0 {
                continue;
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            *merged.entry(key).or_default() += e.weight;
        }
        let mut edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        edges.sort_unstable_by_key(|e| (e.u, e.v));
        CollaborationGraph {
            entity_kind,
            nodes,
            edges,
        }
    }
}

/// Builds the collaboration graph of `kind` over `records`.
///
/// Each paper contributes its distinct entity set: every entity gains one
/// paper and the paper's citations, and every unordered pair gains one unit
/// of edge weight. Nodes are indexed in label order, so the result does not
/// depend on the order of `records`.
pub fn build_graph(records: &[PaperRecord], kind: EntityKind) -> CollaborationGraph {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut weights: HashMap<(usize, usize), u64> = HashMap::new();

    for paper in records {
        let ids: Vec<usize> = kind
            .entities(paper)
            .into_iter()
            .map(|label| {
                *index.entry(label).or_insert_with(|| {
                    nodes.push(Node {
                        label: label.to_owned(),
                        papers: 0,
                        citations: 0,
                    });
                    nodes.len() - 1
                })
            })
            .collect();
        for &i in &ids {
            nodes[i].papers += 1;
            nodes[i].citations += paper.times_cited;
        }
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                *weights.entry((i.min(j), i.max(j))).or_default() += 1;
            }
        }
    }

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].label.cmp(&nodes[b].label));
    let mut rank = vec![0; nodes.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut slots: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
    let nodes: Vec<Node> = order
        .iter()
        .map(|&i| slots[i].take().expect("each node once"))
        .collect();

    let mut edges: Vec<Edge> = weights
        .into_iter()
        .map(|((u, v), weight)| {
            let (u, v) = (rank[u], rank[v]);
            Edge {
                u: u.min(v),
                v: u.max(v),
                weight,
            }
        })
        .collect();
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    CollaborationGraph {
        entity_kind: kind,
        nodes,
        edges,
    }
}

/// Degree and weighted degree of every node, by node index.
pub fn degree_stats(g: &CollaborationGraph) -> Vec<DegreeStats> {
    let mut stats = vec![
        DegreeStats {
            degree: 0,
            weighted_degree: 0
        };
        g.n()
    ];
    for e in &g.edges {
        for end in [e.u, e.v] {
            stats[end].degree += 1;
            stats[end].weighted_degree += e.weight;
        }
    }
    stats
}
