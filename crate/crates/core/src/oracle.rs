//! Sequential core decomposition by min-degree peeling (Batagelj–Zaversnik).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Graph, VertexId};
use crate::kcore::CoreResult;

/// Peeling bookkeeping: vertices kept sorted by remaining degree in `order`,
/// with `bin[d]` the first position holding degree `d`.
struct PeelState {
    degree: Vec<usize>,
    order: Vec<VertexId>,
    pos: Vec<usize>,
    bin: Vec<usize>,
}

impl PeelState {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let degree: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
        let max = degree.iter().copied().max().unwrap_or(0);

        let mut bin = vec![0usize; max + 2];
        for &d in &degree {
            bin[d + 1] += 1;
        }
        for d in 1..bin.len() {
            bin[d] += bin[d - 1];
        }
        // Counting sort is stable, so ties start out in ascending id order.
        let mut next = bin.clone();
        let mut order = vec![0; n];
        let mut pos = vec![0; n];
        for v in 0..n {
            let d = degree[v];
            pos[v] = next[d];
            order[next[d]] = v as VertexId;
            next[d] += 1;
        }
        Self {
            degree,
            order,
            pos,
            bin,
        }
    }

    /// Moves `u` from degree bucket `d` to `d - 1`.
    fn decrement(&mut self, u: usize) {
        let d = self.degree[u];
        let first = self.bin[d];
        let w = self.order[first] as usize;
        if w != u {
            let pu = self.pos[u];
            self.order.swap(first, pu);
            self.pos[w] = pu;
            self.pos[u] = first;
        }
        self.bin[d] += 1;
        self.degree[u] -= 1;
    }
}

/// Exact coreness of every vertex in `O(n + m)`.
pub fn peel(g: &Graph) -> CoreResult {
    peel_with_order(g).0
}

/// Coreness together with the removal order. The order is deterministic for
/// a given graph.
pub fn peel_with_order(g: &Graph) -> (CoreResult, Vec<VertexId>) {
    let n = g.n();
    let mut st = PeelState::new(g);
    for i in 0..n {
        let v = st.order[i];
        let dv = st.degree[v as usize];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if st.degree[u] > dv {
                st.decrement(u);
            }
        }
    }
    let core = st.degree.iter().map(|&d| d as u32).collect();
    (CoreResult { core }, st.order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyResult;

impl fmt::Display for EmptyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cannot summarise an empty core result")
    }
}

impl core::error::Error for EmptyResult {}

/// Maximum and mean core number. The mean is rounded half-up to three
/// decimals.
pub fn summarize(result: &CoreResult) -> Result<(u32, f64), EmptyResult> {
    let k_max = result.core.iter().copied().max().ok_or(EmptyResult)?;
    let sum: u64 = result.core.iter().map(|&c| u64::from(c)).sum();
    Ok((k_max, mean_milli(sum, result.core.len() as u64)))
}

/// `sum / n` rounded half-up to three decimals, computed in integers.
pub(crate) fn mean_milli(sum: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let num = u128::from(sum) * 2000 + u128::from(n);
    let milli = num / (2 * u128::from(n));
    milli as f64 / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{normalize, EdgeList};

    fn graph(edges: &[(u64, u64)]) -> Graph {
        normalize(&EdgeList::new(edges.to_vec()))
    }

    fn clique(k: u64) -> Vec<(u64, u64)> {
        let mut e = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                e.push((a, b));
            }
        }
        e
    }

    #[test]
    fn small_shapes() {
        assert_eq!(peel(&graph(&[(0, 1), (1, 2), (2, 0)])).core, vec![2, 2, 2]);
        assert_eq!(peel(&graph(&[(0, 1), (1, 2), (2, 3)])).core, vec![1; 4]);

        let mut k5p = clique(5);
        k5p.push((4, 5));
        let cores = peel(&graph(&k5p));
        assert_eq!(cores.core, vec![4, 4, 4, 4, 4, 1]);
        assert_eq!(summarize(&cores).unwrap(), (4, 3.5));
    }

    #[test]
    fn summary_of_triangle_and_empty() {
        assert_eq!(
            summarize(&CoreResult::from(vec![2, 2, 2])).unwrap(),
            (2, 2.0)
        );
        assert_eq!(summarize(&CoreResult::default()), Err(EmptyResult));
    }

    #[test]
    fn mean_rounds_half_up() {
        assert_eq!(mean_milli(1, 3), 0.333);
        assert_eq!(mean_milli(2, 3), 0.667);
        assert_eq!(mean_milli(1, 2000), 0.001);
        assert_eq!(mean_milli(1, 2001), 0.0);
    }

    #[test]
    fn removal_order_is_a_permutation() {
        let g = graph(&clique(6));
        let (_, order) = peel_with_order(&g);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        assert_eq!(order, peel_with_order(&g).1);
    }

    #[test]
    fn isolated_vertices_have_core_zero() {
        let g = Graph::from_pairs(4, &[(0, 1)], vec![0, 1, 2, 3]);
        assert_eq!(peel(&g).core, vec![1, 1, 0, 0]);
    }
}
