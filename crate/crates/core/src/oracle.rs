//! Dense reference implementation.
//!
//! Rebuilds `Π`, `S` and `U` as full matrices over the flattened space
//! (index `pair_index · n + coin_index`) straight from the graph and coin
//! vectors, and evolves states by plain matrix multiplication. Nothing here
//! goes through [`crate::block`] arithmetic, so agreement with the
//! block-sparse engine is an independent check.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::block::BlockOperator;
use crate::density::DensityOperator;
use crate::graph::{DirectedEdge, DirectedGraph};
use crate::operator::{CoinFamily, StateVector};
use crate::C64;

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("dense dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("operands have different dimensions ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("edge {0} has no coin vector of the family's dimension")]
    MissingCoin(DirectedEdge),
}

/// A square dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<C64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            entries: vec![C64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Dense copy of a block-sparse operator.
    pub fn from_blocks(op: &BlockOperator) -> Self {
        let n = op.coin_dim();
        let dim = op.dim();
        let mut m = Self::zeros(dim);
        for ((k, b), blk) in op.blocks() {
            for r in 0..n {
                for c in 0..n {
                    m.entries[(k * n + r) * dim + b * n + c] = blk[(r, c)];
                }
            }
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.entries[r * dim + c] = v[r] * v[c].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.dim + c]
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        let d = self.dim;
        (0..d)
            .map(|r| (0..d).map(|c| self.entries[r * d + c] * v[c]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        out
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: C64, other: &DenseOperator, beta: C64) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        DenseOperator {
            dim: self.dim,
            entries,
        }
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// `|U†U − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }
}

/// Dense `Π`, `S` and `U` for one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseWalk {
    pub projector: DenseOperator,
    pub swap: DenseOperator,
    pub unitary: DenseOperator,
}

/// Build dense `Π = Σ_j ψ_j ψ_j†`, `S` and `U = S(2Π − I)`.
pub fn dense_build(
    g: &DirectedGraph,
    f: &CoinFamily,
    cap: usize,
) -> Result<DenseWalk, OracleError> {
    let basis = g.pair_basis();
    let n = f.coin_dim();
    let dim = n * basis.len();
    if dim > cap {
        return Err(OracleError::DimensionTooLarge { dim, cap });
    }

    let mut projector = DenseOperator::zeros(dim);
    for &j in g.vertices() {
        let out = g.out_edges(j);
        if out.is_empty() {
            continue;
        }
        let mut psi = vec![C64::zero(); dim];
        for &e in out {
            let v = f
                .get(e)
                .filter(|v| v.len() == n)
                .ok_or(OracleError::MissingCoin(e))?;
            let p = basis.index_of(e.into()).expect("edge in basis");
            for (c, z) in v.as_slice().iter().enumerate() {
                psi[p * n + c] = *z;
            }
        }
        let term = DenseOperator::outer(&psi);
        projector = projector.combine(C64::new(1.0, 0.0), &term, C64::new(1.0, 0.0));
    }

    let mut swap = DenseOperator::zeros(dim);
    for (p, pair) in basis.pairs().iter().enumerate() {
        let q = basis
            .index_of(pair.swapped())
            .expect("basis is swap-closed");
        for c in 0..n {
            swap.entries[(q * n + c) * dim + p * n + c] = C64::new(1.0, 0.0);
        }
    }

    let reflection = projector.combine(
        C64::new(2.0, 0.0),
        &DenseOperator::identity(dim),
        C64::new(-1.0, 0.0),
    );
    let unitary = swap.matmul(&reflection);
    Ok(DenseWalk {
        projector,
        swap,
        unitary,
    })
}

/// `t`-fold conjugation `U^t ρ U†^t`.
pub fn dense_evolve(
    u: &DenseOperator,
    rho: &DenseOperator,
    steps: usize,
) -> Result<DenseOperator, OracleError> {
    if u.dim != rho.dim {
        return Err(OracleError::DimensionMismatch {
            left: u.dim,
            right: rho.dim,
        });
    }
    let u_adj = u.adjoint();
    let mut state = rho.clone();
    for _ in 0..steps {
        state = u.matmul(&state).matmul(&u_adj);
    }
    Ok(state)
}

/// `U^t v`.
pub fn dense_pure_evolve(
    u: &DenseOperator,
    v: &[C64],
    steps: usize,
) -> Result<Vec<C64>, OracleError> {
    if u.dim != v.len() {
        return Err(OracleError::DimensionMismatch {
            left: u.dim,
            right: v.len(),
        });
    }
    let mut state = v.to_vec();
    for _ in 0..steps {
        state = u.matvec(&state);
    }
    Ok(state)
}

/// Anything with a canonical flattened entry list.
pub trait Flatten {
    fn flatten(&self) -> Vec<C64>;
}

impl Flatten for DenseOperator {
    fn flatten(&self) -> Vec<C64> {
        self.entries.clone()
    }
}

impl Flatten for BlockOperator {
    fn flatten(&self) -> Vec<C64> {
        DenseOperator::from_blocks(self).entries
    }
}

impl Flatten for DensityOperator {
    fn flatten(&self) -> Vec<C64> {
        self.operator().flatten()
    }
}

impl Flatten for StateVector {
    fn flatten(&self) -> Vec<C64> {
        self.amplitudes().to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// Largest entrywise deviation between two flattened objects.
pub fn compare<A: Flatten + ?Sized, B: Flatten + ?Sized>(
    a: &A,
    b: &B,
    tol: f64,
) -> Result<Comparison, OracleError> {
    let (a, b) = (a.flatten(), b.flatten());
    if a.len() != b.len() {
        return Err(OracleError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let max_deviation = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    Ok(Comparison {
        max_deviation,
        tolerance: tol,
    })
}
