//! Dense coin blocks and block-sparse operators on `H_C ⊗ (pair basis)`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::graph::{Pair, PairBasis};
use crate::{C64, DROP_TOLERANCE};

/// A dense square `n × n` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    dim: usize,
    data: Vec<C64>,
}

impl Block {
    pub fn zeros(dim: usize) -> Self {
        Block {
            dim,
            data: vec![C64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut b = Self::zeros(dim);
        for i in 0..dim {
            b[(i, i)] = C64::new(1.0, 0.0);
        }
        b
    }

    /// Build from rows; panics unless the rows form a square matrix.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), dim, "block rows must form a square matrix");
            data.extend_from_slice(r);
        }
        Block { dim, data }
    }

    /// `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len());
        let dim = u.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Block { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim.max(1))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    /// `self += a * b`, summing over the inner index in increasing order.
    pub fn add_product(&mut self, a: &Block, b: &Block) {
        let n = self.dim;
        debug_assert!(a.dim == n && b.dim == n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = self[(r, c)];
                for k in 0..n {
                    acc += a[(r, k)] * b[(k, c)];
                }
                self[(r, c)] = acc;
            }
        }
    }

    pub fn mul(&self, other: &Block) -> Block {
        let mut out = Block::zeros(self.dim);
        out.add_product(self, other);
        out
    }

    pub fn add_scaled(&mut self, alpha: C64, other: &Block) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += alpha * y;
        }
    }

    pub fn scale(&mut self, alpha: C64) {
        for x in &mut self.data {
            *x *= alpha;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Block) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `out += self * x`.
    pub fn mul_vec_into(&self, x: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            let mut acc = *o;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = acc;
        }
    }
}

impl Index<(usize, usize)> for Block {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Block {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// An operator in `B(H_C) ⊗ B(H_V ⊗ H_V)` stored as coin blocks keyed by
/// `(ket pair index, bra pair index)`. Absent blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    coin_dim: usize,
    basis: Arc<PairBasis>,
    blocks: BTreeMap<(usize, usize), Block>,
}

impl BlockOperator {
    pub fn zeros(basis: Arc<PairBasis>, coin_dim: usize) -> Self {
        BlockOperator {
            coin_dim,
            basis,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(basis: Arc<PairBasis>, coin_dim: usize) -> Self {
        let mut op = Self::zeros(basis, coin_dim);
        for i in 0..op.basis.len() {
            op.blocks.insert((i, i), Block::identity(coin_dim));
        }
        op
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn basis(&self) -> &Arc<PairBasis> {
        &self.basis
    }

    /// Dimension of the flattened space, `n · |basis|`.
    pub fn dim(&self) -> usize {
        self.coin_dim * self.basis.len()
    }

    /// Whether `other` acts on the same coin and pair space.
    pub fn same_space(&self, other: &BlockOperator) -> bool {
        self.coin_dim == other.coin_dim
            && (Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, ket: usize, bra: usize) -> Option<&Block> {
        self.blocks.get(&(ket, bra))
    }

    /// Block at `(ket, bra)` addressed by pairs; `None` if either pair is
    /// outside the basis or the block is zero.
    pub fn block_at(&self, ket: Pair, bra: Pair) -> Option<&Block> {
        let k = self.basis.index_of(ket)?;
        let b = self.basis.index_of(bra)?;
        self.block(k, b)
    }

    /// Stored blocks in `(ket, bra)` index order.
    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &Block)> {
        self.blocks.iter().map(|(&k, b)| (k, b))
    }

    /// Replace a block. Panics on a dimension mismatch or an index outside
    /// the basis.
    pub fn set_block(&mut self, ket: usize, bra: usize, block: Block) {
        assert_eq!(
            block.dim(),
            self.coin_dim,
            "block dimension must equal coin dimension"
        );
        assert!(
            ket < self.basis.len() && bra < self.basis.len(),
            "pair index out of range"
        );
        self.blocks.insert((ket, bra), block);
    }

    /// Add `alpha * block` into the block at `(ket, bra)`.
    pub fn accumulate(&mut self, ket: usize, bra: usize, alpha: C64, block: &Block) {
        assert_eq!(
            block.dim(),
            self.coin_dim,
            "block dimension must equal coin dimension"
        );
        assert!(
            ket < self.basis.len() && bra < self.basis.len(),
            "pair index out of range"
        );
        self.blocks
            .entry((ket, bra))
            .or_insert_with(|| Block::zeros(self.coin_dim))
            .add_scaled(alpha, block);
    }

    pub fn remove_block(&mut self, ket: usize, bra: usize) -> Option<Block> {
        self.blocks.remove(&(ket, bra))
    }

    /// Drop blocks whose largest entry is at most `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.blocks.retain(|_, b| b.max_abs() > tol);
    }

    pub fn adjoint(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(&(k, b), blk)| ((b, k), blk.adjoint()))
            .collect();
        BlockOperator {
            coin_dim: self.coin_dim,
            basis: Arc::clone(&self.basis),
            blocks,
        }
    }

    /// Block-sparse product `self · other`.
    ///
    /// Each output block sums its contributions in increasing order of the
    /// inner pair index, so results do not depend on anything but the
    /// operands. Blocks at or below [`DROP_TOLERANCE`] are discarded.
    pub fn mul(&self, other: &BlockOperator) -> BlockOperator {
        assert!(self.same_space(other), "operators act on different spaces");
        let mut out: BTreeMap<(usize, usize), Block> = BTreeMap::new();
        for (&(i, k), a) in &self.blocks {
            for (&(_, j), b) in other.blocks.range((k, 0)..=(k, usize::MAX)) {
                out.entry((i, j))
                    .or_insert_with(|| Block::zeros(self.coin_dim))
                    .add_product(a, b);
            }
        }
        out.retain(|_, b| b.max_abs() > DROP_TOLERANCE);
        BlockOperator {
            coin_dim: self.coin_dim,
            basis: Arc::clone(&self.basis),
            blocks: out,
        }
    }

    /// `alpha · self + beta · other`.
    pub fn linear_combination(&self, alpha: C64, other: &BlockOperator, beta: C64) -> Self {
        assert!(self.same_space(other), "operators act on different spaces");
        let mut out = self.clone();
        for blk in out.blocks.values_mut() {
            blk.scale(alpha);
        }
        for (&(k, b), blk) in &other.blocks {
            out.accumulate(k, b, beta, blk);
        }
        out
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        let mut out = self.clone();
        for blk in out.blocks.values_mut() {
            blk.scale(alpha);
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.blocks.values().map(Block::max_abs).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation `max |self − other|`, treating absent
    /// blocks as zero.
    pub fn max_abs_diff(&self, other: &BlockOperator) -> f64 {
        assert!(self.same_space(other), "operators act on different spaces");
        let mut worst: f64 = 0.0;
        for (key, a) in &self.blocks {
            let d = match other.blocks.get(key) {
                Some(b) => a.max_abs_diff(b),
                None => a.max_abs(),
            };
            worst = worst.max(d);
        }
        for (key, b) in &other.blocks {
            if !self.blocks.contains_key(key) {
                worst = worst.max(b.max_abs());
            }
        }
        worst
    }

    /// `max |A − A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(k, b), blk) in &self.blocks {
            let partner = self.blocks.get(&(b, k));
            for r in 0..self.coin_dim {
                for c in 0..self.coin_dim {
                    let mirror = partner.map_or(C64::zero(), |p| p[(c, r)].conj());
                    worst = worst.max((blk[(r, c)] - mirror).norm());
                }
            }
        }
        worst
    }

    /// Sum of the traces of the diagonal blocks.
    pub fn trace(&self) -> C64 {
        self.blocks
            .iter()
            .filter(|((k, b), _)| k == b)
            .map(|(_, blk)| blk.trace())
            .sum()
    }

    /// Matrix-vector product on the flattened, pair-major vector.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim(), "vector length does not match operator");
        let n = self.coin_dim;
        let mut out = vec![C64::zero(); x.len()];
        for (&(k, b), blk) in &self.blocks {
            blk.mul_vec_into(&x[b * n..(b + 1) * n], &mut out[k * n..(k + 1) * n]);
        }
        out
    }
}
