//! Immutable sparse graph storage.
//!
//! A [`Graph`] keeps its edges twice: as a canonical sorted edge list (the
//! on-disk and hashing form) and as a compressed row index used by every
//! kernel that walks neighborhoods. Undirected graphs store each edge once in
//! the list as `(i, j)` with `i < j` and twice in the row index.

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// Counters reported while building a graph from raw pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<(u32, u32)>,
    weights: Option<Vec<f64>>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a binary graph. Self-loops are dropped and duplicates collapse.
    pub fn from_edges<I>(n: usize, edges: I, directed: bool) -> Result<(Graph, BuildStats)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut stats = BuildStats::default();
        let mut list = Vec::new();
        for (i, j) in edges {
            check_vertex(i, n)?;
            check_vertex(j, n)?;
            if i == j {
                stats.self_loops_dropped += 1;
                continue;
            }
            list.push(canonical(i, j, directed));
        }
        let before = list.len();
        if !list.is_sorted() {
            list.sort_unstable();
        }
        list.dedup();
        stats.duplicates_dropped = before - list.len();
        Ok((Self::from_canonical(n, list, None, directed), stats))
    }

    /// Builds a graph carrying an edge weight. The first weight seen for a
    /// duplicated pair wins. Weights are stored but the embedding pipeline
    /// treats every present edge as 1.
    pub fn from_weighted_edges<I>(n: usize, edges: I, directed: bool) -> Result<(Graph, BuildStats)>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut stats = BuildStats::default();
        let mut list: Vec<((u32, u32), f64, usize)> = Vec::new();
        for (order, (i, j, w)) in edges.into_iter().enumerate() {
            check_vertex(i, n)?;
            check_vertex(j, n)?;
            if i == j {
                stats.self_loops_dropped += 1;
                continue;
            }
            list.push((canonical(i, j, directed), w, order));
        }
        let before = list.len();
        list.sort_by(|a, b| a.0.cmp(&b.0).then(a.2.cmp(&b.2)));
        list.dedup_by(|next, kept| next.0 == kept.0);
        stats.duplicates_dropped = before - list.len();
        let weights = list.iter().map(|e| e.1).collect();
        let edges = list.into_iter().map(|e| e.0).collect();
        Ok((
            Self::from_canonical(n, edges, Some(weights), directed),
            stats,
        ))
    }

    /// `edges` must already be canonical: sorted, deduplicated, loop-free and
    /// with `i < j` when undirected.
    pub(crate) fn from_canonical(
        n: usize,
        edges: Vec<(u32, u32)>,
        weights: Option<Vec<f64>>,
        directed: bool,
    ) -> Graph {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut counts = vec![0usize; n + 1];
        for &(i, j) in &edges {
            counts[i as usize + 1] += 1;
            if !directed {
                counts[j as usize + 1] += 1;
            }
        }
        for v in 0..n {
            counts[v + 1] += counts[v];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(i, j) in &edges {
            neighbors[cursor[i as usize]] = j;
            cursor[i as usize] += 1;
            if !directed {
                neighbors[cursor[j as usize]] = i;
                cursor[j as usize] += 1;
            }
        }
        Graph {
            n,
            directed,
            edges,
            weights,
            offsets,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored edges (unordered pairs when undirected).
    pub fn s(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Out-neighbors of `v` (all neighbors when undirected), ascending.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Total length of the row index (2s when undirected).
    pub fn nnz(&self) -> usize {
        self.neighbors.len()
    }

    pub(crate) fn row_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn row_neighbors(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Same edges on `n` vertices; new vertices are isolated.
    pub fn with_vertex_count(&self, n: usize) -> Result<Graph> {
        if n < self.n {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink a graph from {} to {n} vertices",
                self.n
            )));
        }
        Ok(Self::from_canonical(
            n,
            self.edges.clone(),
            self.weights.clone(),
            self.directed,
        ))
    }

    /// Undirected copy; directed pairs in both directions collapse to one edge.
    pub fn to_undirected(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let pairs = self.edges.iter().map(|&(i, j)| (i as usize, j as usize));
        Self::from_edges(self.n, pairs, false)
            .expect("edges of a valid graph stay valid")
            .0
    }

    /// Indices of vertices with at least one incident edge (in either direction).
    pub fn non_isolated(&self) -> Vec<usize> {
        let mut touched = vec![false; self.n];
        for &(i, j) in &self.edges {
            touched[i as usize] = true;
            touched[j as usize] = true;
        }
        (0..self.n).filter(|&v| touched[v]).collect()
    }

    /// Induced subgraph on `keep` (ascending), relabeled to `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut map = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            check_vertex(old, self.n)?;
            map[old] = new as u32;
        }
        let mut edges = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for (idx, &(i, j)) in self.edges.iter().enumerate() {
            let (a, b) = (map[i as usize], map[j as usize]);
            if a == u32::MAX || b == u32::MAX {
                continue;
            }
            edges.push(canonical(a as usize, b as usize, self.directed));
            if let (Some(out), Some(w)) = (weights.as_mut(), self.weights.as_ref()) {
                out.push(w[idx]);
            }
        }
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_unstable_by_key(|&k| edges[k]);
        let sorted = order.iter().map(|&k| edges[k]).collect();
        let weights = weights.map(|w| order.iter().map(|&k| w[k]).collect());
        Ok(Self::from_canonical(
            keep.len(),
            sorted,
            weights,
            self.directed,
        ))
    }
}

fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v >= n || v > u32::MAX as usize {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    Ok(())
}

fn canonical(i: usize, j: usize, directed: bool) -> (u32, u32) {
    if directed || i < j {
        (i as u32, j as u32)
    } else {
        (j as u32, i as u32)
    }
}

/// Checks that `perm` is a bijection on `0..n`.
pub fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotAPermutation(n));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation given as `perm[old] = new`.
pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    validate_permutation(perm, perm.len())?;
    let mut inv = vec![0; perm.len()];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    Ok(inv)
}

/// Relabels vertices so that old vertex `v` becomes `perm[v]`.
pub fn permute_vertices(
    g: &Graph,
    y: &LabelVector,
    perm: &[usize],
) -> Result<(Graph, LabelVector)> {
    let n = g.n();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: n,
        });
    }
    validate_permutation(perm, n)?;
    let graph = match g.weights() {
        Some(w) => {
            let triples = g
                .edges()
                .iter()
                .zip(w)
                .map(|(&(i, j), &w)| (perm[i as usize], perm[j as usize], w));
            Graph::from_weighted_edges(n, triples, g.is_directed())?.0
        }
        None => {
            let pairs = g
                .edges()
                .iter()
                .map(|&(i, j)| (perm[i as usize], perm[j as usize]));
            Graph::from_edges(n, pairs, g.is_directed())?.0
        }
    };
    let mut labels = vec![0usize; n];
    for (old, &new) in perm.iter().enumerate() {
        labels[new] = y.get(old);
    }
    let labels = LabelVector::with_num_classes(labels, y.num_classes())?;
    Ok((graph, labels))
}
