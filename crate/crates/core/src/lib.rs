//! Discrete-time quantum walks on directed graphs, evolved as density
//! operators.
//!
//! A walk lives on the space `H_C ⊗ H_V ⊗ H_V`: an `n`-dimensional coin
//! register and two position registers. Each vertex `j` with outgoing edges
//! defines a unit vector `ψ_j = Σ_k v_j^k ⊗ |j,k⟩` from its coin family; the
//! projector onto their span, `Π`, gives the reflection `2Π − I`, and the
//! register swap `S` completes the walk unitary `U = S(2Π − I)`. One step of
//! the walk is the unitary channel `ρ ↦ UρU†`, and positions are read out
//! with the effects `E_jk = I ⊗ |j,k⟩⟨j,k|`.
//!
//! Operators are stored block-sparse over the swap closure of the edge set
//! (see [`graph::PairBasis`]); every block is a dense `n × n` coin matrix.
//! The [`oracle`] module rebuilds everything as flat dense matrices for
//! cross-checking.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod block;
pub mod density;
pub mod graph;
pub mod line;
pub mod measurement;
pub mod operator;
pub mod oracle;

mod eigen;

pub use num_complex::Complex64 as C64;

pub use block::{Block, BlockOperator};
pub use density::{
    check_state, evolve, hs_inner, pure_density, pure_evolve, purity, step, trace, DensityError,
    DensityOperator, EvolveOptions, Retention, StateDiagnostics, WalkTrajectory,
};
pub use graph::{line_window, DirectedEdge, DirectedGraph, GraphError, Pair, PairBasis, VertexId};
pub use line::{
    paper_coin_family, paper_initial_state, required_radius, run_paper_example, LineWalkConfig,
    LineWalkRun,
};
pub use measurement::{
    collapse, effect_probability, vertex_distribution, Effect, MeasurementError, VertexDistribution,
};
pub use operator::{
    build_projector, build_psi, build_reflection, build_swap, build_walk_unitary, is_projection,
    is_reflection, is_unitary, validate_coin_family, CoinFamily, CoinVector, OperatorError,
    StateVector, UnitalReport, WalkOperator,
};

/// `|x| ≤ tol`, false for NaN.
pub(crate) fn within(x: f64, tol: f64) -> bool {
    x.abs() <= tol
}

/// Default tolerance for the unital condition on coin families.
pub const UNITAL_TOLERANCE: f64 = 1e-10;

/// Residual allowed on `U†U − I` before a built walk operator is rejected.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Blocks whose largest entry does not exceed this are dropped from products.
pub const DROP_TOLERANCE: f64 = 1e-15;
