//! The walk on the integer line with coins `[−i/2, 1/2]ᵀ` (rightward) and
//! `[1/2, 1/2]ᵀ` (leftward), started from `ρ_0 = ½[[1,1],[1,1]] ⊗ |0,1⟩⟨0,1|`.
//!
//! The infinite line is simulated on a finite window. Starting from pairs
//! within distance one of the origin, after `t` steps the state only
//! involves vertices with `|j| ≤ t + 1`, so any window of radius
//! `t + 1 + margin` reproduces the infinite-line walk exactly. Vertices on
//! the window edge have a single outgoing edge; their lone coin vector is
//! renormalized to keep the family unital, which cannot influence the
//! result because the walk never reaches them.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::block::{Block, BlockOperator};
use crate::density::{evolve, DensityError, DensityOperator, EvolveOptions, WalkTrajectory};
use crate::graph::{line_window, DirectedGraph, Pair, PairBasis};
use crate::measurement::{vertex_distribution, MeasurementError, VertexDistribution};
use crate::operator::{
    build_walk_unitary, CoinFamily, CoinVector, OperatorError, StateVector, WalkOperator,
};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineWalkConfig {
    pub steps: usize,
    /// Extra window radius beyond the light cone.
    pub window_margin: usize,
}

impl LineWalkConfig {
    pub fn new(steps: usize) -> Self {
        LineWalkConfig {
            steps,
            window_margin: 1,
        }
    }

    pub fn with_margin(steps: usize, window_margin: usize) -> Self {
        LineWalkConfig {
            steps,
            window_margin,
        }
    }

    pub fn radius(&self) -> u32 {
        required_radius(self.steps, self.window_margin)
    }
}

/// Window radius `t + 1 + margin` that contains the light cone after `t`
/// steps.
pub fn required_radius(steps: usize, margin: usize) -> u32 {
    u32::try_from(steps + 1 + margin).expect("window radius fits in u32")
}

/// Rightward coin vector `[−i/2, 1/2]ᵀ`.
pub fn right_coin() -> CoinVector {
    CoinVector::new(vec![C64::new(0.0, -0.5), C64::new(0.5, 0.0)])
}

/// Leftward coin vector `[1/2, 1/2]ᵀ`.
pub fn left_coin() -> CoinVector {
    CoinVector::real(&[0.5, 0.5])
}

/// Coin family for a graph produced by [`line_window`].
pub fn paper_coin_family(g: &DirectedGraph) -> CoinFamily {
    let mut f = CoinFamily::new(2).expect("positive coin dimension");
    for &v in g.vertices() {
        let out = g.out_edges(v);
        for &e in out {
            let coin = if e.to.0 > e.from.0 {
                right_coin()
            } else {
                left_coin()
            };
            let coin = if out.len() == 1 {
                coin.normalized()
            } else {
                coin
            };
            f.insert(e, coin).expect("coin vectors have length 2");
        }
    }
    f
}

/// `ρ_0 = [[1/2, 1/2], [1/2, 1/2]] ⊗ |0,1⟩⟨0,1|`.
pub fn paper_initial_state(basis: Arc<PairBasis>) -> Result<DensityOperator, DensityError> {
    let pair = Pair::new(0, 1);
    let idx = basis
        .index_of(pair)
        .ok_or(DensityError::PairOutsideBasis(pair))?;
    let half = C64::new(0.5, 0.0);
    let mut op = BlockOperator::zeros(basis, 2);
    op.set_block(idx, idx, Block::from_rows(&[[half, half], [half, half]]));
    Ok(DensityOperator::from_operator(op))
}

/// `[1/√2, 1/√2]ᵀ ⊗ |0,1⟩`, whose projector is the initial state.
pub fn paper_initial_vector(basis: Arc<PairBasis>) -> Result<StateVector, OperatorError> {
    StateVector::product(
        basis,
        &CoinVector::real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        Pair::new(0, 1),
    )
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LineWalkError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
}

/// Everything produced by one run of the line walk.
#[derive(Clone, Debug)]
pub struct LineWalkRun {
    pub graph: DirectedGraph,
    pub coins: CoinFamily,
    pub walk: WalkOperator,
    pub trajectory: WalkTrajectory,
    /// `P_t(j)` for `t = 0 ..= steps`.
    pub distributions: Vec<VertexDistribution>,
}

/// Build the window for `config`, evolve the initial state and measure
/// every intermediate state.
pub fn run_paper_example(config: LineWalkConfig) -> Result<LineWalkRun, LineWalkError> {
    let graph = line_window(config.radius());
    let coins = paper_coin_family(&graph);
    let walk = build_walk_unitary(&graph, &coins)?;
    let rho0 = paper_initial_state(graph.pair_basis())?;
    let trajectory = evolve(&walk, &rho0, config.steps, EvolveOptions::default())?;
    let distributions = trajectory
        .states()
        .iter()
        .map(vertex_distribution)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LineWalkRun {
        graph,
        coins,
        walk,
        trajectory,
        distributions,
    })
}
