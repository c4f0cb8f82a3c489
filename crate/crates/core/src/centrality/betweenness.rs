use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CentralityKind, CentralityParams, CentralityResult};
use crate::graph::CollaborationGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetweennessParams {
    pub normalized: bool,
    /// Use `1 / weight` as edge length instead of hop count.
    pub weighted: bool,
}

impl Default for BetweennessParams {
    fn default() -> Self {
        BetweennessParams {
            normalized: true,
            weighted: false,
        }
    }
}

/// Sources are split into this many fixed blocks, so the order of the final
/// additions never depends on the thread count.
const SOURCE_BLOCKS: usize = 64;

/// Betweenness centrality over unordered source/target pairs.
///
/// Pairs in different components contribute nothing. With `normalized`
/// the sums are scaled by `2 / ((n-1)(n-2))`; graphs with fewer than three
/// nodes then score zero everywhere.
pub fn betweenness<T: Scalar>(g: &CollaborationGraph, params: BetweennessParams) -> CentralityResult<T> {
    let n = g.n();
    let adj: Vec<Vec<(usize, T)>> = g
        .adjacency()
        .into_iter()
        .map(|list| {
            list.into_iter()
                .map(|(w, weight)| {
                    let len = if params.weighted {
                        T::one() / T::from_u64(weight).expect("weight as float")
                    } else {
                        T::one()
                    };
                    (w, len)
                })
                .collect()
        })
        .collect();

    let block = n.div_ceil(SOURCE_BLOCKS).max(1);
    let partials: Vec<Vec<T>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(block)
        .map(|sources| {
            let mut acc = vec![T::zero(); n];
            let mut work = Workspace::new(n);
            for &s in sources {
                if params.weighted {
                    work.dijkstra(&adj, s);
                } else {
                    work.bfs(&adj, s);
                }
                work.accumulate(s, &mut acc);
            }
            acc
        })
        .collect();

    let mut scores = vec![T::zero(); n];
    for part in &partials {
        for (s, p) in scores.iter_mut().zip(part) {
            *s += *p;
        }
    }
    // every unordered pair was counted from both ends
    let half = T::lit(0.5);
    for s in &mut scores {
        *s *= half;
    }
    if params.normalized {
        if n < 3 {
            scores.iter_mut().for_each(|s| *s = T::zero());
        } else {
            let scale = T::lit(2.0) / (T::from_count(n - 1) * T::from_count(n - 2));
            scores.iter_mut().for_each(|s| *s *= scale);
        }
    }

    CentralityResult {
        kind: CentralityKind::Betweenness,
        labels: g.nodes.iter().map(|n| n.label.clone()).collect(),
        scores,
        normalized: params.normalized,
        params: CentralityParams::Betweenness(params),
        convergence: None,
        warning: None,
    }
}

struct Workspace<T> {
    sigma: Vec<T>,
    dist: Vec<Option<T>>,
    delta: Vec<T>,
    preds: Vec<Vec<usize>>,
    stack: Vec<usize>,
    settled: Vec<bool>,
}

#[derive(PartialEq)]
struct HeapItem<T> {
    dist: T,
    node: usize,
}

impl<T: Scalar> Eq for HeapItem<T> {}

impl<T: Scalar> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for HeapItem<T> {
    // min-heap on distance, then node index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl<T: Scalar> Workspace<T> {
    fn new(n: usize) -> Self {
        Workspace {
            sigma: vec![T::zero(); n],
            dist: vec![None; n],
            delta: vec![T::zero(); n],
            preds: vec![Vec::new(); n],
            stack: Vec::with_capacity(n),
            settled: vec![false; n],
        }
    }

    fn reset(&mut self, s: usize) {
        self.sigma.iter_mut().for_each(|x| *x = T::zero());
        self.dist.iter_mut().for_each(|x| *x = None);
        self.delta.iter_mut().for_each(|x| *x = T::zero());
        self.preds.iter_mut().for_each(Vec::clear);
        self.settled.iter_mut().for_each(|x| *x = false);
        self.stack.clear();
        self.sigma[s] = T::one();
        self.dist[s] = Some(T::zero());
    }

    fn bfs(&mut self, adj: &[Vec<(usize, T)>], s: usize) {
        self.reset(s);
        let mut hops = vec![usize::MAX; adj.len()];
        hops[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            self.stack.push(v);
            for &(w, _) in &adj[v] {
                if hops[w] == usize::MAX {
                    hops[w] = hops[v] + 1;
                    queue.push_back(w);
                }
                if hops[w] == hops[v] + 1 {
                    let sv = self.sigma[v];
                    self.sigma[w] += sv;
                    self.preds[w].push(v);
                }
            }
        }
    }

    fn dijkstra(&mut self, adj: &[Vec<(usize, T)>], s: usize) {
        self.reset(s);
        let mut heap = BinaryHeap::from([HeapItem {
            dist: T::zero(),
            node: s,
        }]);
        while let Some(HeapItem { dist, node: v }) = heap.pop() {
            if self.settled[v] || self.dist[v].is_some_and(|d| dist > d) {
                continue;
            }
            self.settled[v] = true;
            self.stack.push(v);
            for &(w, len) in &adj[v] {
                if self.settled[w] {
                    continue;
                }
                let candidate = dist + len;
                match self.dist[w] {
                    Some(current) if (candidate - current).abs() <= T::tie_tolerance(current) => {
                        let sv = self.sigma[v];
                        self.sigma[w] += sv;
                        self.preds[w].push(v);
                    }
                    Some(current) if candidate > current => {}
                    _ => {
                        self.dist[w] = Some(candidate);
                        self.sigma[w] = self.sigma[v];
                        self.preds[w].clear();
                        self.preds[w].push(v);
                        heap.push(HeapItem {
                            dist: candidate,
                            node: w,
                        });
                    }
                }
            }
        }
    }

    fn accumulate(&mut self, s: usize, acc: &mut [T]) {
        while let Some(w) = self.stack.pop() {
            let coeff = (T::one() + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                let add = self.sigma[v] * coeff;
                self.delta[v] += add;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}
