//! Shortest-path closure of customer–facility graphs.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Undirected edge between a customer and a facility.
#[derive(Debug, Clone)]
pub struct Edge<S> {
    pub customer: usize,
    pub facility: usize,
    pub length: S,
}

struct Entry<S> {
    dist: S,
    node: usize,
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.node.cmp(&other.node))
    }
}

/// Customer-to-facility shortest-path distances in the bipartite graph given
/// by `edges`. Nodes `0..n_customers` are customers, the rest facilities.
pub fn bipartite_closure<S: Scalar>(
    n_customers: usize,
    n_facilities: usize,
    edges: &[Edge<S>],
) -> Result<Vec<Vec<S>>> {
    let n = n_customers + n_facilities;
    let mut adj: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
    for e in edges {
        if e.customer >= n_customers || e.facility >= n_facilities {
            return Err(Error::InvalidArgument(format!(
                "edge ({}, {}) outside {}x{} graph",
                e.customer, e.facility, n_customers, n_facilities
            )));
        }
        if e.length < S::zero() {
            return Err(Error::InvalidArgument("negative edge length".into()));
        }
        let fnode = n_customers + e.facility;
        adj[e.customer].push((fnode, e.length.clone()));
        adj[fnode].push((e.customer, e.length.clone()));
    }

    let mut out = vec![Vec::with_capacity(n_facilities); n_customers];
    for f in 0..n_facilities {
        let source = n_customers + f;
        let mut dist: Vec<Option<S>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(S::zero());
        heap.push(Reverse(Entry { dist: S::zero(), node: source }));
        while let Some(Reverse(Entry { dist: d, node })) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            for (next, len) in &adj[node] {
                if done[*next] {
                    continue;
                }
                let cand = d.clone() + len.clone();
                if dist[*next].as_ref().is_none_or(|cur| cand < *cur) {
                    dist[*next] = Some(cand.clone());
                    heap.push(Reverse(Entry { dist: cand, node: *next }));
                }
            }
        }
        for (u, row) in out.iter_mut().enumerate() {
            let d = dist[u].clone().ok_or_else(|| {
                Error::InvalidArgument(format!("customer {u} is disconnected from facility {f}"))
            })?;
            row.push(d);
        }
    }
    Ok(out)
}

/// Closure of a complete bipartite distance matrix: every entry is replaced by
/// the shortest customer–facility path, which restores the relaxed triangle
/// inequality with λ = 1.
pub fn metric_closure<S: Scalar>(dist: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n_c = dist.len();
    let n_f = dist.first().map_or(0, Vec::len);
    let edges: Vec<Edge<S>> = dist
        .iter()
        .enumerate()
        .flat_map(|(u, row)| {
            row.iter().enumerate().map(move |(f, d)| Edge {
                customer: u,
                facility: f,
                length: d.clone(),
            })
        })
        .collect();
    bipartite_closure(n_c, n_f, &edges)
}
