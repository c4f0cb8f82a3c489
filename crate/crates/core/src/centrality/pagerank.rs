use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CentralityError, CentralityKind, CentralityParams, CentralityResult, Convergence};
use crate::graph::CollaborationGraph;
use crate::scalar::{compensated_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(serialize = "T: Serialize", deserialize = "T: Scalar")
)]
pub struct PageRankParams<T> {
    /// Damping factor in `(0, 1]`; `1` gives the undamped update.
    pub damping: T,
    /// Stop once the L1 change between iterates drops below this.
    pub tol: T,
    pub max_iter: usize,
    /// Split a node's rank in proportion to edge weight instead of evenly.
    pub weighted: bool,
}

impl<T: Scalar> Default for PageRankParams<T> {
    fn default() -> Self {
        PageRankParams {
            damping: T::lit(0.85),
            tol: T::lit(1e-10),
            max_iter: 200,
            weighted: false,
        }
    }
}

impl<T: Scalar> PageRankParams<T> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
    pub fn validate(&self) -> Result<(), CentralityError> {
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(CentralityError::InvalidParameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.tol > T::zero()) {
            return Err(CentralityError::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(CentralityError::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// PageRank scores summing to one.
///
/// Iterates `PR_i = (1-d)/n + d * (D/n + sum_j PR_j * a_ji / k_j)` from the
/// uniform vector, where `k_j` is the degree (or weighted degree) of `j`
/// and `D` the rank held by isolated nodes. Hitting `max_iter` is not an
/// error: scores are returned with [`CentralityResult::warning`] set.
pub fn pagerank<T: Scalar>(
    g: &CollaborationGraph,
    params: PageRankParams<T>,
) -> Result<CentralityResult<T>, CentralityError> {
    pagerank_observed(g, params, |_, _| {})
}

/// [`pagerank`] that hands every iterate to `observer(iteration, scores)`.
pub fn pagerank_observed<T, F>(
    g: &CollaborationGraph,
    params: PageRankParams<T>,
    mut observer: F,
) -> Result<CentralityResult<T>, CentralityError>
where
    T: Scalar,
    F: FnMut(usize, &[T]),
{
    params.validate()?;
    let n = g.n();
    let labels: Vec<String> = g.nodes.iter().map(|n| n.label.clone()).collect();
    if n == 0 {
        return Ok(CentralityResult {
            kind: CentralityKind::PageRank,
            labels,
            scores: Vec::new(),
            normalized: true,
            params: CentralityParams::PageRank(params),
            convergence: Some(Convergence {
                iterations: 0,
                residual: T::zero(),
                converged: true,
            }),
            warning: None,
        });
    }

    let adj = g.adjacency();
    let link = |w: u64| {
        if params.weighted {
            T::from_u64(w).expect("weight as float")
        } else {
            T::one()
        }
    };
    let out: Vec<T> = adj.iter().map(|l| l.iter().map(|&(_, w)| link(w)).sum()).collect();
    let dangling: Vec<usize> = (0..n).filter(|&i| adj[i].is_empty()).collect();

    let n_t = T::from_count(n);
    let d = params.damping;
    let teleport = (T::one() - d) / n_t;
    let mut rank = vec![T::one() / n_t; n];
    let mut residual = T::infinity();
    let mut iterations = 0;

    while iterations < params.max_iter {
        iterations += 1;
        let dangling_mass = compensated_sum(dangling.iter().map(|&j| rank[j]));
        let base = teleport + d * dangling_mass / n_t;
        let next: Vec<T> = adj
            .par_iter()
            .map(|neighbours| {
                let inflow = compensated_sum(neighbours.iter().map(|&(j, w)| rank[j] * link(w) / out[j]));
                base + d * inflow
            })
            .collect();
        residual = compensated_sum(next.iter().zip(&rank).map(|(a, b)| (*a - *b).abs()));
        rank = next;
        observer(iterations, &rank);
        if residual < params.tol {
            break;
        }
    }

    let converged = residual < params.tol;
    let warning = (!converged).then(|| {
        format!(
            "pagerank did not converge within {} iterations (residual {})",
            params.max_iter, residual
        )
    });
    if let Some(w) = &warning {
        log::warn!("{w}");
    }

    Ok(CentralityResult {
        kind: CentralityKind::PageRank,
        labels,
        scores: rank,
        normalized: true,
        params: CentralityParams::PageRank(params),
        convergence: Some(Convergence {
            iterations,
            residual,
            converged,
        }),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, EntityKind, Node};

    fn graph(n: usize, edges: &[(usize, usize, u64)]) -> CollaborationGraph {
        let nodes = (0..n)
            .map(|i| Node {
                label: format!("v{i}"),
                papers: 1,
                citations: 0,
            })
            .collect();
        CollaborationGraph::from_parts(
            EntityKind::Author,
            nodes,
            edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }),
        )
    }

    #[test]
    fn pair_is_even() {
        for d in [0.5, 0.85, 1.0] {
            let params = PageRankParams {
                damping: d,
                ..Default::default()
            };
            let r = pagerank::<f64>(&graph(2, &[(0, 1, 7)]), params).unwrap();
            assert_eq!(r.scores, vec![0.5, 0.5]);
        }
    }

    #[test]
    fn triangle_is_uniform() {
        let r = pagerank::<f64>(&graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]), Default::default()).unwrap();
        assert!(r.scores.iter().all(|&s| s == 1.0 / 3.0));
    }

    #[test]
    fn path_of_three() {
        // stationary system: x = 0.05 + 0.425 y, y = 0.05 + 1.7 x, 2x + y = 1
        let r = pagerank::<f64>(&graph(3, &[(0, 1, 1), (1, 2, 1)]), Default::default()).unwrap();
        let x = 0.475 / 1.85;
        assert!((r.scores[0] - x).abs() < 1e-9);
        assert!((r.scores[1] - (1.0 - 2.0 * x)).abs() < 1e-9);
        assert!((r.scores[0] - 0.256757).abs() < 1e-6);
        assert!((r.scores[1] - 0.486486).abs() < 1e-6);
        assert!(r.convergence.unwrap().converged);
    }

    #[test]
    fn isolated_nodes_keep_mass() {
        let g = graph(4, &[(0, 1, 1)]);
        let mut sums = Vec::new();
        let r = pagerank_observed::<f64, _>(&g, Default::default(), |_, s| sums.push(s.iter().sum::<f64>())).unwrap();
        assert!(sums.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r.scores[2] - r.scores[3]).abs() < 1e-15);
    }

    #[test]
    fn undamped_bipartite_oscillation_warns() {
        // star: undamped mass flips between the centre and the leaves
        let g = graph(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]);
        let params = PageRankParams {
            damping: 1.0,
            max_iter: 50,
            ..Default::default()
        };
        let r = pagerank::<f64>(&g, params).unwrap();
        assert!(r.warning.is_some());
        assert_eq!(r.convergence.unwrap().iterations, 50);
        assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_split_follows_weights() {
        let g = graph(3, &[(0, 1, 3), (0, 2, 1)]);
        let params = PageRankParams {
            weighted: true,
            ..Default::default()
        };
        let r = pagerank::<f64>(&g, params).unwrap();
        assert!(r.scores[1] > r.scores[2]);
        let even = pagerank::<f64>(&g, Default::default()).unwrap();
        assert!((even.scores[1] - even.scores[2]).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = graph(2, &[(0, 1, 1)]);
        for params in [
            PageRankParams {
                damping: 0.0,
                ..Default::default()
            },
            PageRankParams {
                damping: 1.5,
                ..Default::default()
            },
            PageRankParams {
                tol: 0.0,
                ..Default::default()
            },
            PageRankParams {
                max_iter: 0,
                ..Default::default()
            },
        ] {
            assert!(pagerank::<f64>(&g, params).is_err());
        }
    }

    #[test]
    fn empty_graph() {
        let r = pagerank::<f64>(&graph(0, &[]), Default::default()).unwrap();
        assert!(r.scores.is_empty());
    }
}
