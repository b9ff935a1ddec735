//! Coin families and the operators `ψ_j`, `Π`, `S` and `U = S(2Π − I)`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};
use thiserror::Error;

use crate::block::{Block, BlockOperator};
use crate::graph::{DirectedEdge, DirectedGraph, Pair, PairBasis, VertexId};
use crate::{within, C64, DROP_TOLERANCE, UNITARITY_TOLERANCE};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OperatorError {
    #[error("coin dimension must be positive")]
    ZeroCoinDimension,
    #[error("edge {0} has no coin vector")]
    MissingEdgeAssignment(DirectedEdge),
    #[error("coin vector on edge {edge} has length {found}, expected {expected}")]
    WrongCoinDimension {
        edge: DirectedEdge,
        expected: usize,
        found: usize,
    },
    #[error("coin vector on edge {0} has a non-finite entry")]
    NonFiniteCoin(DirectedEdge),
    #[error("coin vector assigned to {0}, which is not an edge of the graph")]
    UnknownEdge(DirectedEdge),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("vertex {0} has no outgoing edges")]
    IsolatedVertex(VertexId),
    #[error("pair {0} is outside the active pair basis")]
    PairOutsideBasis(Pair),
    #[error("walk operator is not unitary: max |U†U − I| = {residual:e}")]
    UnitarityCheckFailed { residual: f64 },
}

/// A column vector `v_j^k` in the coin space `H_C`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinVector(Vec<C64>);

impl CoinVector {
    pub fn new(entries: Vec<C64>) -> Self {
        CoinVector(entries)
    }

    /// Vector with real entries.
    pub fn real(entries: &[f64]) -> Self {
        CoinVector(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Basis vector `e_index` of length `dim`.
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = vec![C64::zero(); dim];
        v[index] = C64::new(1.0, 0.0);
        CoinVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    /// `v† v`.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(C64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        Float::sqrt(self.norm_sqr())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// The vector divided by its norm.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        CoinVector(self.0.iter().map(|z| z / n).collect())
    }
}

/// Assignment of a coin vector to every directed edge of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinFamily {
    coin_dim: usize,
    assign: BTreeMap<DirectedEdge, CoinVector>,
}

impl CoinFamily {
    pub fn new(coin_dim: usize) -> Result<Self, OperatorError> {
        if coin_dim == 0 {
            return Err(OperatorError::ZeroCoinDimension);
        }
        Ok(CoinFamily {
            coin_dim,
            assign: BTreeMap::new(),
        })
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Assign `v` to `edge`, replacing any previous vector. No normalization
    /// is applied.
    pub fn insert(&mut self, edge: DirectedEdge, v: CoinVector) -> Result<(), OperatorError> {
        if v.len() != self.coin_dim {
            return Err(OperatorError::WrongCoinDimension {
                edge,
                expected: self.coin_dim,
                found: v.len(),
            });
        }
        if !v.is_finite() {
            return Err(OperatorError::NonFiniteCoin(edge));
        }
        self.assign.insert(edge, v);
        Ok(())
    }

    pub fn get(&self, edge: DirectedEdge) -> Option<&CoinVector> {
        self.assign.get(&edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = (DirectedEdge, &CoinVector)> {
        self.assign.iter().map(|(&e, v)| (e, v))
    }

    /// Checks that the family fits the graph: every edge assigned, no
    /// foreign edges, every vector the right length and finite.
    pub fn check_structure(&self, g: &DirectedGraph) -> Result<(), OperatorError> {
        for (&edge, v) in &self.assign {
            if !g.contains_edge(edge) {
                return Err(OperatorError::UnknownEdge(edge));
            }
            if v.len() != self.coin_dim {
                return Err(OperatorError::WrongCoinDimension {
                    edge,
                    expected: self.coin_dim,
                    found: v.len(),
                });
            }
            if !v.is_finite() {
                return Err(OperatorError::NonFiniteCoin(edge));
            }
        }
        for &edge in g.edges() {
            if !self.assign.contains_key(&edge) {
                return Err(OperatorError::MissingEdgeAssignment(edge));
            }
        }
        Ok(())
    }

    fn vector(&self, edge: DirectedEdge) -> Result<&CoinVector, OperatorError> {
        self.assign
            .get(&edge)
            .ok_or(OperatorError::MissingEdgeAssignment(edge))
    }
}

/// Per-vertex residuals of the unital condition `Σ_k ‖v_j^k‖² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitalReport {
    pub tolerance: f64,
    /// `(vertex, Σ_k ‖v_j^k‖² − 1)` for every vertex with outgoing edges.
    pub residuals: Vec<(VertexId, f64)>,
}

impl UnitalReport {
    pub fn violations(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.residuals
            .iter()
            .copied()
            .filter(|&(_, r)| !within(r, self.tolerance))
    }

    pub fn is_ok(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|(_, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

/// Check the structure of `f` against `g` and compute the unital residual
/// at every vertex with outgoing edges.
pub fn validate_coin_family(
    g: &DirectedGraph,
    f: &CoinFamily,
    tol: f64,
) -> Result<UnitalReport, OperatorError> {
    f.check_structure(g)?;
    let mut residuals = Vec::new();
    for &v in g.vertices() {
        let out = g.out_edges(v);
        if out.is_empty() {
            continue;
        }
        let mut total = 0.0;
        for &e in out {
            total += f.vector(e)?.norm_sqr();
        }
        residuals.push((v, total - 1.0));
    }
    Ok(UnitalReport {
        tolerance: tol,
        residuals,
    })
}

/// A vector in `H_C ⊗ (pair basis)`, flattened pair-major:
/// index `pair_index · n + coin_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    coin_dim: usize,
    basis: Arc<PairBasis>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn zeros(basis: Arc<PairBasis>, coin_dim: usize) -> Self {
        let len = coin_dim * basis.len();
        StateVector {
            coin_dim,
            basis,
            amplitudes: vec![C64::zero(); len],
        }
    }

    /// `u ⊗ |pair⟩`.
    pub fn product(
        basis: Arc<PairBasis>,
        u: &CoinVector,
        pair: Pair,
    ) -> Result<Self, OperatorError> {
        let idx = basis
            .index_of(pair)
            .ok_or(OperatorError::PairOutsideBasis(pair))?;
        let n = u.len();
        let mut v = Self::zeros(basis, n);
        v.amplitudes[idx * n..(idx + 1) * n].copy_from_slice(u.as_slice());
        Ok(v)
    }

    /// Wrap a flattened amplitude vector. Panics on a length mismatch.
    pub fn from_amplitudes(basis: Arc<PairBasis>, coin_dim: usize, amplitudes: Vec<C64>) -> Self {
        assert_eq!(
            amplitudes.len(),
            coin_dim * basis.len(),
            "amplitude vector has wrong length"
        );
        StateVector {
            coin_dim,
            basis,
            amplitudes,
        }
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn basis(&self) -> &Arc<PairBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Coin amplitudes on the pair with basis index `pair_index`.
    pub fn coin_part(&self, pair_index: usize) -> &[C64] {
        let n = self.coin_dim;
        &self.amplitudes[pair_index * n..(pair_index + 1) * n]
    }

    pub fn norm(&self) -> f64 {
        Float::sqrt(self.amplitudes.iter().map(C64::norm_sqr).sum::<f64>())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Indices of pairs carrying a nonzero coin part.
    pub fn support(&self) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.coin_part(i).iter().any(|z| !z.is_zero()))
            .collect()
    }

    /// `|self⟩⟨self|` as a block operator.
    pub fn outer(&self) -> BlockOperator {
        let mut op = BlockOperator::zeros(Arc::clone(&self.basis), self.coin_dim);
        let support = self.support();
        for &k in &support {
            for &b in &support {
                op.set_block(k, b, Block::outer(self.coin_part(k), self.coin_part(b)));
            }
        }
        op
    }
}

/// `ψ_j = Σ_k v_j^k ⊗ |j,k⟩` over the outgoing edges of `j`.
pub fn build_psi(
    g: &DirectedGraph,
    f: &CoinFamily,
    j: VertexId,
) -> Result<StateVector, OperatorError> {
    if !g.contains_vertex(j) {
        return Err(OperatorError::UnknownVertex(j));
    }
    let out = g.out_edges(j);
    if out.is_empty() {
        return Err(OperatorError::IsolatedVertex(j));
    }
    let basis = g.pair_basis();
    let n = f.coin_dim();
    let mut psi = StateVector::zeros(Arc::clone(&basis), n);
    for &e in out {
        let v = f.vector(e)?;
        if v.len() != n {
            return Err(OperatorError::WrongCoinDimension {
                edge: e,
                expected: n,
                found: v.len(),
            });
        }
        let idx = basis
            .index_of(e.into())
            .expect("edges belong to the pair basis");
        psi.amplitudes[idx * n..(idx + 1) * n].copy_from_slice(v.as_slice());
    }
    Ok(psi)
}

/// `Π = Σ_j |ψ_j⟩⟨ψ_j|` over vertices with outgoing edges. Vertices
/// without outgoing edges contribute nothing.
pub fn build_projector(g: &DirectedGraph, f: &CoinFamily) -> Result<BlockOperator, OperatorError> {
    f.check_structure(g)?;
    let basis = g.pair_basis();
    let mut pi = BlockOperator::zeros(Arc::clone(&basis), f.coin_dim());
    let one = C64::new(1.0, 0.0);
    for &j in g.vertices() {
        let out = g.out_edges(j);
        for &ket in out {
            let vk = f.vector(ket)?;
            let ki = basis
                .index_of(ket.into())
                .expect("edges belong to the pair basis");
            for &bra in out {
                let vb = f.vector(bra)?;
                let bi = basis
                    .index_of(bra.into())
                    .expect("edges belong to the pair basis");
                pi.accumulate(ki, bi, one, &Block::outer(vk.as_slice(), vb.as_slice()));
            }
        }
    }
    pi.prune(DROP_TOLERANCE);
    Ok(pi)
}

/// `2Π − I`.
pub fn build_reflection(g: &DirectedGraph, f: &CoinFamily) -> Result<BlockOperator, OperatorError> {
    let pi = build_projector(g, f)?;
    let id = BlockOperator::identity(Arc::clone(pi.basis()), f.coin_dim());
    let mut r = pi.linear_combination(C64::new(2.0, 0.0), &id, C64::new(-1.0, 0.0));
    r.prune(DROP_TOLERANCE);
    Ok(r)
}

/// `S = I_c ⊗ Σ |j,k⟩⟨k,j|` on a swap-closed basis.
pub fn build_swap(basis: Arc<PairBasis>, coin_dim: usize) -> BlockOperator {
    let mut s = BlockOperator::zeros(Arc::clone(&basis), coin_dim);
    for i in 0..basis.len() {
        s.set_block(basis.swap_index(i), i, Block::identity(coin_dim));
    }
    s
}

/// `max(|Π² − Π|, |Π† − Π|)`.
pub fn projection_residual(op: &BlockOperator) -> f64 {
    op.mul(op).max_abs_diff(op).max(op.hermiticity_residual())
}

/// `max(|U†U − I|, |UU† − I|)`.
pub fn unitarity_residual(op: &BlockOperator) -> f64 {
    let id = BlockOperator::identity(Arc::clone(op.basis()), op.coin_dim());
    let adj = op.adjoint();
    adj.mul(op)
        .max_abs_diff(&id)
        .max(op.mul(&adj).max_abs_diff(&id))
}

/// `max(|R² − I|, |R† − R|)`.
pub fn reflection_residual(op: &BlockOperator) -> f64 {
    let id = BlockOperator::identity(Arc::clone(op.basis()), op.coin_dim());
    op.mul(op).max_abs_diff(&id).max(op.hermiticity_residual())
}

pub fn is_projection(op: &BlockOperator, tol: f64) -> bool {
    projection_residual(op) <= tol
}

pub fn is_unitary(op: &BlockOperator, tol: f64) -> bool {
    unitarity_residual(op) <= tol
}

pub fn is_reflection(op: &BlockOperator, tol: f64) -> bool {
    reflection_residual(op) <= tol
}

/// The walk unitary `U = S(2Π − I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkOperator {
    u: BlockOperator,
    u_adj: BlockOperator,
    residual: f64,
}

impl WalkOperator {
    /// Wrap an arbitrary operator after checking unitarity to `tol`.
    pub fn new(u: BlockOperator, tol: f64) -> Result<Self, OperatorError> {
        let residual = unitarity_residual(&u);
        if !within(residual, tol) {
            return Err(OperatorError::UnitarityCheckFailed { residual });
        }
        let u_adj = u.adjoint();
        Ok(WalkOperator { u, u_adj, residual })
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.u
    }

    /// `U†`.
    pub fn adjoint(&self) -> &BlockOperator {
        &self.u_adj
    }

    pub fn into_operator(self) -> BlockOperator {
        self.u
    }

    /// Unitarity residual measured at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn coin_dim(&self) -> usize {
        self.u.coin_dim()
    }

    pub fn basis(&self) -> &Arc<PairBasis> {
        self.u.basis()
    }
}

/// Build `U = S(2Π − I)` and reject it if `|U†U − I|` exceeds
/// [`UNITARITY_TOLERANCE`].
pub fn build_walk_unitary(
    g: &DirectedGraph,
    f: &CoinFamily,
) -> Result<WalkOperator, OperatorError> {
    let reflection = build_reflection(g, f)?;
    let swap = build_swap(g.pair_basis(), f.coin_dim());
    WalkOperator::new(swap.mul(&reflection), UNITARITY_TOLERANCE)
}
