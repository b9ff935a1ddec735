//! Directed graphs and the position-pair basis of `H_V ⊗ H_V`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Vertex label. Signed so that line vertices can run through negative
/// positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub i64);

impl From<i64> for VertexId {
    fn from(id: i64) -> Self {
        VertexId(id)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedEdge {
    pub from: VertexId,
    pub to: VertexId,
}

impl DirectedEdge {
    pub fn new(from: impl Into<VertexId>, to: impl Into<VertexId>) -> Self {
        DirectedEdge {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.from, self.to)
    }
}

/// A basis ket `|j,k⟩` of the two position registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub first: VertexId,
    pub second: VertexId,
}

impl Pair {
    pub fn new(first: impl Into<VertexId>, second: impl Into<VertexId>) -> Self {
        Pair {
            first: first.into(),
            second: second.into(),
        }
    }

    /// The pair with its registers exchanged.
    pub fn swapped(self) -> Self {
        Pair {
            first: self.second,
            second: self.first,
        }
    }
}

impl From<DirectedEdge> for Pair {
    fn from(e: DirectedEdge) -> Self {
        Pair {
            first: e.from,
            second: e.to,
        }
    }
}

impl From<(i64, i64)> for Pair {
    fn from((j, k): (i64, i64)) -> Self {
        Pair::new(j, k)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.first, self.second)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} refers to a vertex that is not in the graph")]
    UnknownVertex(DirectedEdge),
    #[error("edge {0} appears more than once")]
    DuplicateEdge(DirectedEdge),
    #[error("vertex {0} appears more than once")]
    DuplicateVertex(VertexId),
}

/// The finite carrier of the position registers: every edge together with
/// its reverse, sorted lexicographically. Pairs outside this set never
/// receive amplitude because `S` permutes it onto itself and `2Π − I` acts
/// as `−I` off `span{ψ_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairBasis {
    pairs: Vec<Pair>,
    index: BTreeMap<Pair, usize>,
}

impl PairBasis {
    /// Swap closure of `pairs`, deduplicated and sorted.
    pub fn swap_closure(pairs: impl IntoIterator<Item = Pair>) -> Self {
        let mut set = BTreeSet::new();
        for p in pairs {
            set.insert(p);
            set.insert(p.swapped());
        }
        let pairs: Vec<Pair> = set.into_iter().collect();
        let index = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        PairBasis { pairs, index }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> Pair {
        self.pairs[index]
    }

    pub fn index_of(&self, pair: Pair) -> Option<usize> {
        self.index.get(&pair).copied()
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.index.contains_key(&pair)
    }

    /// Index of the swapped partner of the pair at `index`.
    pub fn swap_index(&self, index: usize) -> usize {
        self.index[&self.pairs[index].swapped()]
    }
}

/// A directed graph with insertion-ordered vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<VertexId>,
    edges: Vec<DirectedEdge>,
    out_edges: BTreeMap<VertexId, Vec<DirectedEdge>>,
    basis: Arc<PairBasis>,
}

impl DirectedGraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = (i64, i64)>,
    {
        let vertices: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        let edges = edges.into_iter().map(|(j, k)| DirectedEdge::new(j, k));
        Self::from_parts(vertices, edges)
    }

    pub fn from_parts(
        vertices: Vec<VertexId>,
        edges: impl IntoIterator<Item = DirectedEdge>,
    ) -> Result<Self, GraphError> {
        let mut out_edges: BTreeMap<VertexId, Vec<DirectedEdge>> = BTreeMap::new();
        for &v in &vertices {
            if out_edges.insert(v, Vec::new()).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
        }

        let mut seen = BTreeSet::new();
        let mut ordered = Vec::new();
        for e in edges {
            if !out_edges.contains_key(&e.to) {
                return Err(GraphError::UnknownVertex(e));
            }
            let Some(out) = out_edges.get_mut(&e.from) else {
                return Err(GraphError::UnknownVertex(e));
            };
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e));
            }
            out.push(e);
            ordered.push(e);
        }

        let basis = Arc::new(PairBasis::swap_closure(
            ordered.iter().map(|&e| Pair::from(e)),
        ));
        Ok(DirectedGraph {
            vertices,
            edges: ordered,
            out_edges,
            basis,
        })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.out_edges.contains_key(&v)
    }

    pub fn contains_edge(&self, e: DirectedEdge) -> bool {
        self.out_edges
            .get(&e.from)
            .is_some_and(|out| out.contains(&e))
    }

    /// Outgoing edges of `v` in insertion order; empty for unknown vertices.
    pub fn out_edges(&self, v: VertexId) -> &[DirectedEdge] {
        self.out_edges.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges(v).len()
    }

    /// Active pair basis: the swap closure of the edge set.
    pub fn pair_basis(&self) -> Arc<PairBasis> {
        Arc::clone(&self.basis)
    }
}

/// The line segment `−radius ..= radius` with edges `(j, j+1)` and
/// `(j, j−1)` wherever both ends are inside the window. Each vertex lists
/// its rightward edge first.
pub fn line_window(radius: u32) -> DirectedGraph {
    let r = i64::from(radius);
    let mut edges = Vec::with_capacity(4 * radius as usize);
    for j in -r..=r {
        if j < r {
            edges.push((j, j + 1));
        }
        if j > -r {
            edges.push((j, j - 1));
        }
    }
    DirectedGraph::new(-r..=r, edges).expect("line window is well formed")
}
