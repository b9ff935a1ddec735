//! Position measurement with the effects `E_jk = I_c ⊗ |j,k⟩⟨j,k|`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;

use thiserror::Error;

use crate::block::BlockOperator;
use crate::density::DensityOperator;
use crate::graph::{Pair, PairBasis, VertexId};
use crate::C64;

/// Outcomes with probability at or below this cannot be collapsed onto.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

/// Roundoff allowance below zero before a probability is treated as an error.
pub const NEGATIVE_PROBABILITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MeasurementError {
    #[error("pair {0} is outside the active pair basis")]
    PairOutsideBasis(Pair),
    #[error("outcome {pair} has probability {probability:e}")]
    ZeroProbabilityOutcome { pair: Pair, probability: f64 },
    #[error("vertex {vertex} has negative probability {probability:e}")]
    NegativeProbability { vertex: VertexId, probability: f64 },
}

/// The effect `E_jk` for one pair of the active basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Effect {
    pair: Pair,
    index: usize,
}

impl Effect {
    pub fn new(pair: Pair, basis: &PairBasis) -> Result<Self, MeasurementError> {
        let index = basis
            .index_of(pair)
            .ok_or(MeasurementError::PairOutsideBasis(pair))?;
        Ok(Effect { pair, index })
    }

    /// One effect per basis pair; together they sum to the identity.
    pub fn all(basis: &PairBasis) -> impl Iterator<Item = Effect> + '_ {
        basis
            .pairs()
            .iter()
            .enumerate()
            .map(|(index, &pair)| Effect { pair, index })
    }

    pub fn pair(&self) -> Pair {
        self.pair
    }

    /// `tr(E_jk ρ)`: the trace of the diagonal block at `(pair, pair)`.
    pub fn probability(&self, rho: &DensityOperator) -> f64 {
        rho.operator()
            .block(self.index, self.index)
            .map_or(0.0, |b| b.trace().re)
    }
}

/// `P(E_jk) = tr(E_jk ρ)`.
pub fn effect_probability(rho: &DensityOperator, pair: Pair) -> Result<f64, MeasurementError> {
    Ok(Effect::new(pair, rho.basis())?.probability(rho))
}

/// `E_jk ρ E_jk / tr(E_jk ρ E_jk)`.
pub fn collapse(rho: &DensityOperator, pair: Pair) -> Result<DensityOperator, MeasurementError> {
    let effect = Effect::new(pair, rho.basis())?;
    let probability = effect.probability(rho);
    if probability.is_nan() || probability <= MIN_OUTCOME_PROBABILITY {
        return Err(MeasurementError::ZeroProbabilityOutcome { pair, probability });
    }
    let i = effect.index;
    let mut block = rho
        .operator()
        .block(i, i)
        .expect("positive probability")
        .clone();
    block.scale(C64::new(1.0 / probability, 0.0));
    let mut op = BlockOperator::zeros(Arc::clone(rho.basis()), rho.coin_dim());
    op.set_block(i, i, block);
    Ok(DensityOperator::from_operator(op))
}

/// `P(j) = Σ_k P(E_jk)`, keyed by vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexDistribution {
    probs: BTreeMap<VertexId, f64>,
}

impl VertexDistribution {
    /// Probability of `v`; zero for vertices the walk cannot occupy.
    pub fn get(&self, v: VertexId) -> f64 {
        self.probs.get(&v).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.probs.iter().map(|(&v, &p)| (v, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Vertices with probability above `tol`.
    pub fn support(&self, tol: f64) -> impl Iterator<Item = VertexId> + '_ {
        self.iter().filter(move |&(_, p)| p > tol).map(|(v, _)| v)
    }

    /// Largest `|P(j) − Q(j)|` over both supports.
    pub fn max_abs_diff(&self, other: &VertexDistribution) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, p) in self.iter() {
            worst = worst.max((p - other.get(v)).abs());
        }
        for (v, q) in other.iter() {
            worst = worst.max((q - self.get(v)).abs());
        }
        worst
    }
}

/// Marginal over the first position register. Every vertex that appears
/// as the first entry of a basis pair gets an entry. Values within
/// roundoff of `[0, 1]` are clamped into it.
pub fn vertex_distribution(rho: &DensityOperator) -> Result<VertexDistribution, MeasurementError> {
    let mut probs: BTreeMap<VertexId, f64> = BTreeMap::new();
    for effect in Effect::all(rho.basis()) {
        *probs.entry(effect.pair.first).or_insert(0.0) += effect.probability(rho);
    }
    for (&vertex, p) in probs.iter_mut() {
        if *p < -NEGATIVE_PROBABILITY_TOLERANCE {
            return Err(MeasurementError::NegativeProbability {
                vertex,
                probability: *p,
            });
        }
        *p = p.clamp(0.0, 1.0);
    }
    Ok(VertexDistribution { probs })
}
