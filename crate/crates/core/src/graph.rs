//! Undirected simple graphs with dense internal ids.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Dense internal vertex id in `[0, n)`.
pub type VertexId = u32;

/// Raw `(u, v)` pairs exactly as they appeared in the input, in file order.
///
/// Duplicates, self-loops and both orientations of an edge are kept; they are
/// only resolved by [`normalize`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: Vec<(u64, u64)>,
}

impl EdgeList {
    pub fn new(edges: Vec<(u64, u64)>) -> Self {
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl From<Vec<(u64, u64)>> for EdgeList {
    fn from(edges: Vec<(u64, u64)>) -> Self {
        Self { edges }
    }
}

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Neighbour lists are sorted and duplicate free, adjacency is symmetric and
/// there are no self-loops.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    id_map: Vec<u64>,
}

impl Graph {
    /// Builds a graph over `n` vertices from undirected pairs of internal ids.
    ///
    /// Pairs may repeat and appear in either orientation; self-loops are
    /// dropped. `id_map` must have length `n`.
    ///
    /// # Panics
    ///
    /// Panics if an endpoint is `>= n` or `id_map.len() != n`.
    pub fn from_pairs(n: usize, pairs: &[(VertexId, VertexId)], id_map: Vec<u64>) -> Self {
        assert_eq!(id_map.len(), n, "id_map must name every vertex");
        let mut degree = alloc::vec![0usize; n];
        for &(u, v) in pairs {
            if u != v {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = alloc::vec![0; offsets[n]];
        for &(u, v) in pairs {
            if u != v {
                targets[fill[u as usize]] = v;
                fill[u as usize] += 1;
                targets[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }

        // Sort and dedup each list in place, then compact.
        let mut write = 0;
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        for u in 0..n {
            let (start, end) = (offsets[u], offsets[u + 1]);
            targets[start..end].sort_unstable();
            let mut last = None;
            for i in start..end {
                let t = targets[i];
                if last != Some(t) {
                    targets[write] = t;
                    write += 1;
                    last = Some(t);
                }
            }
            new_offsets.push(write);
        }
        targets.truncate(write);
        targets.shrink_to_fit();

        Graph {
            offsets: new_offsets,
            targets,
            id_map,
        }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.id_map.len()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Position of `w` in the neighbour list of `v`, if they are adjacent.
    pub fn neighbor_index(&self, v: VertexId, w: VertexId) -> Option<usize> {
        self.neighbors(v).binary_search(&w).ok()
    }

    pub fn original_id(&self, v: VertexId) -> u64 {
        self.id_map[v as usize]
    }

    pub fn id_map(&self) -> &[u64] {
        &self.id_map
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        0..self.n() as VertexId
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }
}

/// Turns a raw edge list into an undirected simple graph.
///
/// Self-loops are discarded before ids are assigned, and ids are handed out
/// densely in order of first appearance. Every vertex of the result therefore
/// has degree at least one; a raw id that only ever occurs in self-loops does
/// not appear in the graph at all.
pub fn normalize(el: &EdgeList) -> Graph {
    let mut ids: BTreeMap<u64, VertexId> = BTreeMap::new();
    let mut id_map = Vec::new();
    let mut intern = |raw: u64| -> VertexId {
        *ids.entry(raw).or_insert_with(|| {
            id_map.push(raw);
            (id_map.len() - 1) as VertexId
        })
    };
    let pairs: Vec<(VertexId, VertexId)> = el
        .edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (intern(u), intern(v)))
        .collect();
    Graph::from_pairs(id_map.len(), &pairs, id_map)
}
