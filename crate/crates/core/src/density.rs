//! Density operators and the unitary channel `Φ(ρ) = UρU†`.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::block::{Block, BlockOperator};
use crate::eigen::hermitian_eigenvalues;
use crate::graph::{Pair, PairBasis};
use crate::operator::{CoinVector, StateVector, WalkOperator};
use crate::{within, C64};

/// Tolerance on `|‖u‖ − 1|` for coin and state vectors used as pure states.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Tolerance on `|tr ρ − 1|` accepted by [`evolve`].
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Most negative eigenvalue still reported as positive semidefinite.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DensityError {
    #[error("pair {0} is outside the active pair basis")]
    PairOutsideBasis(Pair),
    #[error("coin vector has norm {norm}, expected 1")]
    NonUnitCoinVector { norm: f64 },
    #[error("state vector has norm {norm}, expected 1")]
    NonUnitStateVector { norm: f64 },
    #[error("operands act on different spaces")]
    DimensionMismatch,
    #[error("initial state has trace {trace}, expected 1")]
    NotNormalized { trace: f64 },
}

/// An operator on `H_C ⊗ (pair basis)` intended as a density operator.
///
/// Construction through [`pure_density`] or [`DensityOperator::maximally_mixed`]
/// yields valid states; [`DensityOperator::from_operator`] accepts any
/// operator so the channel can be probed on non-states. Use
/// [`check_state`] for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: BlockOperator,
}

impl DensityOperator {
    pub fn from_operator(op: BlockOperator) -> Self {
        DensityOperator { op }
    }

    /// `|v⟩⟨v|`.
    pub fn from_pure(v: &StateVector) -> Self {
        DensityOperator { op: v.outer() }
    }

    /// `I / (n · |basis|)`.
    pub fn maximally_mixed(basis: Arc<PairBasis>, coin_dim: usize) -> Self {
        let d = (coin_dim * basis.len()) as f64;
        let op = BlockOperator::identity(basis, coin_dim).scaled(C64::new(1.0 / d, 0.0));
        DensityOperator { op }
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.op
    }

    pub fn into_operator(self) -> BlockOperator {
        self.op
    }

    pub fn coin_dim(&self) -> usize {
        self.op.coin_dim()
    }

    pub fn basis(&self) -> &Arc<PairBasis> {
        self.op.basis()
    }

    pub fn block_at(&self, ket: Pair, bra: Pair) -> Option<&Block> {
        self.op.block_at(ket, bra)
    }

    /// `α·self + β·other`.
    pub fn linear_combination(
        &self,
        alpha: C64,
        other: &DensityOperator,
        beta: C64,
    ) -> Result<Self, DensityError> {
        if !self.op.same_space(&other.op) {
            return Err(DensityError::DimensionMismatch);
        }
        Ok(DensityOperator {
            op: self.op.linear_combination(alpha, &other.op, beta),
        })
    }
}

/// `ρ = uu† ⊗ |pair⟩⟨pair|`.
pub fn pure_density(
    u: &CoinVector,
    pair: Pair,
    basis: Arc<PairBasis>,
) -> Result<DensityOperator, DensityError> {
    let norm = u.norm();
    if !within(norm - 1.0, NORM_TOLERANCE) {
        return Err(DensityError::NonUnitCoinVector { norm });
    }
    let idx = basis
        .index_of(pair)
        .ok_or(DensityError::PairOutsideBasis(pair))?;
    let mut op = BlockOperator::zeros(basis, u.len());
    op.set_block(idx, idx, Block::outer(u.as_slice(), u.as_slice()));
    Ok(DensityOperator { op })
}

fn conjugate(u: &WalkOperator, rho: &BlockOperator) -> BlockOperator {
    u.operator().mul(rho).mul(u.adjoint())
}

/// One step of the walk: `UρU†`, evaluated as `(Uρ)U†`.
pub fn step(u: &WalkOperator, rho: &DensityOperator) -> Result<DensityOperator, DensityError> {
    if !u.operator().same_space(&rho.op) {
        return Err(DensityError::DimensionMismatch);
    }
    Ok(DensityOperator {
        op: conjugate(u, &rho.op),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Retention {
    /// Keep `ρ_0 … ρ_T`.
    #[default]
    All,
    /// Keep only `ρ_T`.
    FinalOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub retention: Retention,
    /// Reject initial states whose trace differs from 1 by more than
    /// [`TRACE_TOLERANCE`].
    pub require_unit_trace: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            retention: Retention::All,
            require_unit_trace: true,
        }
    }
}

/// The states `ρ_t = Φ^t(ρ_0)` of a walk.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrajectory {
    states: Vec<DensityOperator>,
    step_count: usize,
    retention: Retention,
}

impl WalkTrajectory {
    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// `ρ_t`, if it was retained.
    pub fn state(&self, t: usize) -> Option<&DensityOperator> {
        match self.retention {
            Retention::All => self.states.get(t),
            Retention::FinalOnly if t == self.step_count => self.states.last(),
            Retention::FinalOnly => None,
        }
    }

    pub fn final_state(&self) -> &DensityOperator {
        self.states
            .last()
            .expect("trajectory holds at least one state")
    }

    /// Retained states in time order.
    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn into_states(self) -> Vec<DensityOperator> {
        self.states
    }
}

/// Iterate the channel `steps` times starting from `rho0`.
pub fn evolve(
    u: &WalkOperator,
    rho0: &DensityOperator,
    steps: usize,
    options: EvolveOptions,
) -> Result<WalkTrajectory, DensityError> {
    if !u.operator().same_space(&rho0.op) {
        return Err(DensityError::DimensionMismatch);
    }
    if options.require_unit_trace {
        let tr = trace(rho0);
        if !within(tr - 1.0, TRACE_TOLERANCE) {
            return Err(DensityError::NotNormalized { trace: tr });
        }
    }
    let mut states = vec![rho0.clone()];
    for _ in 0..steps {
        let next = DensityOperator {
            op: conjugate(u, &states.last().unwrap().op),
        };
        if options.retention == Retention::FinalOnly {
            states.clear();
        }
        states.push(next);
    }
    Ok(WalkTrajectory {
        states,
        step_count: steps,
        retention: options.retention,
    })
}

/// `U^t v` by repeated matrix-vector products.
pub fn pure_evolve(
    u: &WalkOperator,
    v: &StateVector,
    steps: usize,
) -> Result<StateVector, DensityError> {
    if u.coin_dim() != v.coin_dim() || **u.basis() != **v.basis() {
        return Err(DensityError::DimensionMismatch);
    }
    let norm = v.norm();
    if !within(norm - 1.0, NORM_TOLERANCE) {
        return Err(DensityError::NonUnitStateVector { norm });
    }
    let mut amps = v.amplitudes().to_vec();
    for _ in 0..steps {
        amps = u.operator().apply(&amps);
    }
    Ok(StateVector::from_amplitudes(
        Arc::clone(v.basis()),
        v.coin_dim(),
        amps,
    ))
}

/// Real part of `tr ρ`.
pub fn trace(rho: &DensityOperator) -> f64 {
    rho.op.trace().re
}

/// Hilbert–Schmidt inner product `⟨A, B⟩ = tr(A†B)`, conjugate-linear in `A`.
pub fn hs_inner(a: &DensityOperator, b: &DensityOperator) -> Result<C64, DensityError> {
    if !a.op.same_space(&b.op) {
        return Err(DensityError::DimensionMismatch);
    }
    let mut acc = C64::zero();
    for ((k, br), blk) in a.op.blocks() {
        if let Some(other) = b.op.block(k, br) {
            for (x, y) in blk.as_slice().iter().zip(other.as_slice()) {
                acc += x.conj() * y;
            }
        }
    }
    Ok(acc)
}

/// `tr ρ²`, computed as `Re⟨ρ, ρ⟩`.
pub fn purity(rho: &DensityOperator) -> f64 {
    hs_inner(rho, rho).expect("same operand").re
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    /// `max |ρ − ρ†|`.
    pub hermiticity_residual: f64,
    /// `|tr ρ − 1|`.
    pub trace_residual: f64,
    /// Smallest eigenvalue of the Hermitian part of `ρ`.
    pub min_eigenvalue: f64,
    pub tolerance: f64,
}

impl StateDiagnostics {
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual <= self.tolerance
    }

    pub fn is_normalized(&self) -> bool {
        self.trace_residual <= self.tolerance
    }

    pub fn is_positive(&self) -> bool {
        self.min_eigenvalue >= -POSITIVITY_TOLERANCE
    }

    pub fn is_valid(&self) -> bool {
        self.is_hermitian() && self.is_normalized() && self.is_positive()
    }
}

/// Residuals of the density-operator conditions. The eigenvalue estimate
/// runs on the pairs that carry stored blocks; the rest of the space
/// contributes eigenvalue zero.
pub fn check_state(rho: &DensityOperator, tol: f64) -> StateDiagnostics {
    let op = &rho.op;
    let mut support = BTreeSet::new();
    for ((k, b), _) in op.blocks() {
        support.insert(k);
        support.insert(b);
    }
    let support: Vec<usize> = support.into_iter().collect();
    let n = op.coin_dim();
    let m = n * support.len();
    let mut dense = vec![C64::zero(); m * m];
    for (si, &k) in support.iter().enumerate() {
        for (sj, &b) in support.iter().enumerate() {
            if let Some(blk) = op.block(k, b) {
                for r in 0..n {
                    for c in 0..n {
                        dense[(si * n + r) * m + sj * n + c] = blk[(r, c)];
                    }
                }
            }
        }
    }
    let mut min_eigenvalue = hermitian_eigenvalues(&dense, m)
        .first()
        .copied()
        .unwrap_or(0.0);
    if support.len() < op.basis().len() {
        min_eigenvalue = min_eigenvalue.min(0.0);
    }
    StateDiagnostics {
        hermiticity_residual: op.hermiticity_residual(),
        trace_residual: (op.trace() - C64::new(1.0, 0.0)).norm(),
        min_eigenvalue,
        tolerance: tol,
    }
}
