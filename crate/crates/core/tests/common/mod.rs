//! Random instances shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use dopwalk_core::{
    Block, BlockOperator, CoinFamily, CoinVector, DensityOperator, DirectedEdge, DirectedGraph,
    PairBasis, StateVector, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub graph: DirectedGraph,
    pub coins: CoinFamily,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random graph on at most `max_vertices` vertices; every vertex gets at
/// least one outgoing edge unless `allow_isolated`.
pub fn random_graph(
    rng: &mut impl Rng,
    max_vertices: usize,
    allow_isolated: bool,
) -> DirectedGraph {
    let nv = rng.gen_range(1..=max_vertices) as i64;
    let density: f64 = rng.gen_range(0.15..0.7);
    let mut edges = BTreeSet::new();
    for j in 0..nv {
        for k in 0..nv {
            if rng.gen_bool(density) {
                edges.insert((j, k));
            }
        }
        if !allow_isolated && !edges.iter().any(|&(a, _)| a == j) {
            edges.insert((j, rng.gen_range(0..nv)));
        }
    }
    if edges.is_empty() {
        edges.insert((0, rng.gen_range(0..nv)));
    }
    DirectedGraph::new(0..nv, edges).unwrap()
}

/// Random unital coin family: per vertex, independent complex vectors
/// scaled jointly so that their squared norms sum to one.
pub fn random_family(rng: &mut impl Rng, g: &DirectedGraph, coin_dim: usize) -> CoinFamily {
    let mut f = CoinFamily::new(coin_dim).unwrap();
    for &v in g.vertices() {
        let out = g.out_edges(v);
        let raw: Vec<Vec<C64>> = out
            .iter()
            .map(|_| (0..coin_dim).map(|_| random_complex(rng)).collect())
            .collect();
        let total: f64 = raw.iter().flatten().map(|z| z.norm_sqr()).sum();
        let scale = 1.0 / total.sqrt();
        for (&e, vec) in out.iter().zip(raw) {
            f.insert(
                e,
                CoinVector::new(vec.into_iter().map(|z| z * scale).collect()),
            )
            .unwrap();
        }
    }
    f
}

pub fn random_instance(seed: u64, max_vertices: usize, max_coin: usize) -> Instance {
    let mut r = rng(seed);
    let graph = random_graph(&mut r, max_vertices, seed.is_multiple_of(5));
    let coin_dim = r.gen_range(1..=max_coin);
    let coins = random_family(&mut r, &graph, coin_dim);
    Instance { graph, coins }
}

pub fn four_cycle() -> DirectedGraph {
    let edges = (0..4).flat_map(|j| [(j, (j + 1) % 4), (j, (j + 3) % 4)]);
    DirectedGraph::new(0..4, edges).unwrap()
}

/// 4-cycle with `[1/2, 1/2]ᵀ` clockwise and `[1/2, −1/2]ᵀ` counter-clockwise.
pub fn four_cycle_family(g: &DirectedGraph) -> CoinFamily {
    let mut f = CoinFamily::new(2).unwrap();
    for &e in g.edges() {
        let v = if e.to.0 == (e.from.0 + 1) % 4 {
            [0.5, 0.5]
        } else {
            [0.5, -0.5]
        };
        f.insert(e, CoinVector::real(&v)).unwrap();
    }
    f
}

pub fn random_unit_vector(
    rng: &mut impl Rng,
    basis: Arc<PairBasis>,
    coin_dim: usize,
) -> StateVector {
    let len = coin_dim * basis.len();
    let raw: Vec<C64> = (0..len).map(|_| random_complex(rng)).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(basis, coin_dim, raw.into_iter().map(|z| z / norm).collect())
}

/// Convex mixture of `terms` random pure states.
pub fn random_mixed_state(
    rng: &mut impl Rng,
    basis: Arc<PairBasis>,
    coin_dim: usize,
    terms: usize,
) -> DensityOperator {
    let weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut op = BlockOperator::zeros(basis.clone(), coin_dim);
    for w in weights {
        let v = random_unit_vector(rng, basis.clone(), coin_dim);
        let outer = v.outer();
        op = op.linear_combination(C64::new(1.0, 0.0), &outer, C64::new(w / total, 0.0));
    }
    DensityOperator::from_operator(op)
}

/// Random Hermitian operator, not normalized.
pub fn random_hermitian(
    rng: &mut impl Rng,
    basis: Arc<PairBasis>,
    coin_dim: usize,
) -> DensityOperator {
    let m = basis.len();
    let mut op = BlockOperator::zeros(basis, coin_dim);
    for k in 0..m {
        for b in k..m {
            let mut blk = Block::zeros(coin_dim);
            for r in 0..coin_dim {
                for c in 0..coin_dim {
                    blk[(r, c)] = random_complex(rng);
                }
            }
            if k == b {
                let herm = blk.adjoint();
                blk.add_scaled(C64::new(1.0, 0.0), &herm);
                op.set_block(k, k, blk);
            } else {
                op.set_block(b, k, blk.adjoint());
                op.set_block(k, b, blk);
            }
        }
    }
    DensityOperator::from_operator(op)
}

pub fn edge(j: i64, k: i64) -> DirectedEdge {
    DirectedEdge::new(j, k)
}
