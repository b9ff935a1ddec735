//! JSON file formats: graphs, coin families, operator and state dumps,
//! and distribution records.

use std::collections::BTreeMap;
use std::sync::Arc;

use dopwalk_core::{
    hs_inner, trace, Block, BlockOperator, CoinFamily, CoinVector, DensityOperator, DirectedEdge,
    DirectedGraph, GraphError, OperatorError, Pair, PairBasis, VertexDistribution, C64,
};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coin(#[from] OperatorError),
    #[error("coin on edge ({from}, {to}): `re` has {re} entries but `im` has {im}")]
    RealImagLength {
        from: i64,
        to: i64,
        re: usize,
        im: usize,
    },
    #[error("block at ket {ket:?}, bra {bra:?} is not {dim}x{dim}")]
    BlockShape {
        ket: [i64; 2],
        bra: [i64; 2],
        dim: usize,
    },
    #[error("pair {0} is outside the active pair basis")]
    PairOutsideBasis(Pair),
}

/// `{"vertices": [int…], "edges": [[int, int]…]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<i64>,
    pub edges: Vec<[i64; 2]>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<DirectedGraph, GraphError> {
        DirectedGraph::new(
            self.vertices.iter().copied(),
            self.edges.iter().map(|&[j, k]| (j, k)),
        )
    }
}

/// A complex vector split into real and imaginary parts. A missing `im`
/// means a real vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVectorSpec {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

impl ComplexVectorSpec {
    fn entries(&self) -> Option<Vec<C64>> {
        if self.im.is_empty() {
            return Some(self.re.iter().map(|&x| C64::new(x, 0.0)).collect());
        }
        if self.im.len() != self.re.len() {
            return None;
        }
        Some(
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&a, &b)| C64::new(a, b))
                .collect(),
        )
    }

    pub fn to_coin(&self) -> Option<CoinVector> {
        self.entries().map(CoinVector::new)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinSpec {
    pub from: i64,
    pub to: i64,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

/// `{"coin_dim": n, "coins": [{"from": j, "to": k, "re": [..], "im": [..]}…]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinFamilySpec {
    pub coin_dim: usize,
    pub coins: Vec<CoinSpec>,
}

impl CoinFamilySpec {
    pub fn build(&self) -> Result<CoinFamily, SchemaError> {
        let mut family = CoinFamily::new(self.coin_dim)?;
        for c in &self.coins {
            let v = ComplexVectorSpec {
                re: c.re.clone(),
                im: c.im.clone(),
            };
            let v = v.to_coin().ok_or(SchemaError::RealImagLength {
                from: c.from,
                to: c.to,
                re: c.re.len(),
                im: c.im.len(),
            })?;
            family.insert(DirectedEdge::new(c.from, c.to), v)?;
        }
        Ok(family)
    }

    pub fn from_family(family: &CoinFamily) -> Self {
        let coins = family
            .iter()
            .map(|(e, v)| CoinSpec {
                from: e.from.0,
                to: e.to.0,
                re: v.as_slice().iter().map(|z| z.re).collect(),
                im: v.as_slice().iter().map(|z| z.im).collect(),
            })
            .collect();
        CoinFamilySpec {
            coin_dim: family.coin_dim(),
            coins,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for C64 {
    fn from(z: ComplexValue) -> Self {
        C64::new(z.re, z.im)
    }
}

/// One stored block: `{"ket": [j,k], "bra": [l,m], "block": [[{"re","im"}…]…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub ket: [i64; 2],
    pub bra: [i64; 2],
    pub block: Vec<Vec<ComplexValue>>,
}

fn pair_array(p: Pair) -> [i64; 2] {
    [p.first.0, p.second.0]
}

/// Blocks of `op` in `(ket, bra)` basis-index order.
pub fn dump_operator(op: &BlockOperator) -> Vec<BlockEntry> {
    let basis = op.basis();
    op.blocks()
        .map(|((k, b), blk)| BlockEntry {
            ket: pair_array(basis.pair(k)),
            bra: pair_array(basis.pair(b)),
            block: blk
                .rows()
                .map(|row| row.iter().map(|&z| z.into()).collect())
                .collect(),
        })
        .collect()
}

/// Rebuild an operator from dumped blocks. Repeated entries overwrite.
pub fn load_operator(
    entries: &[BlockEntry],
    basis: Arc<PairBasis>,
    coin_dim: usize,
) -> Result<BlockOperator, SchemaError> {
    let mut op = BlockOperator::zeros(Arc::clone(&basis), coin_dim);
    for e in entries {
        let ket = Pair::new(e.ket[0], e.ket[1]);
        let bra = Pair::new(e.bra[0], e.bra[1]);
        let k = basis
            .index_of(ket)
            .ok_or(SchemaError::PairOutsideBasis(ket))?;
        let b = basis
            .index_of(bra)
            .ok_or(SchemaError::PairOutsideBasis(bra))?;
        if e.block.len() != coin_dim || e.block.iter().any(|r| r.len() != coin_dim) {
            return Err(SchemaError::BlockShape {
                ket: e.ket,
                bra: e.bra,
                dim: coin_dim,
            });
        }
        let rows: Vec<Vec<C64>> = e
            .block
            .iter()
            .map(|r| r.iter().map(|&z| z.into()).collect())
            .collect();
        op.set_block(k, b, Block::from_rows(&rows));
    }
    Ok(op)
}

/// `{"t": .., "trace": .., "purity": .., "blocks": [...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub t: usize,
    pub trace: f64,
    pub purity: f64,
    pub blocks: Vec<BlockEntry>,
}

impl StateDump {
    pub fn new(t: usize, rho: &DensityOperator) -> Self {
        StateDump {
            t,
            trace: trace(rho),
            purity: hs_inner(rho, rho).map(|z| z.re).unwrap_or(f64::NAN),
            blocks: dump_operator(rho.operator()),
        }
    }
}

/// File written by `--dump-states`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatesFile {
    pub coin_dim: usize,
    pub basis: Vec<[i64; 2]>,
    pub states: Vec<StateDump>,
}

/// File written by `--dump-operator`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub operator: String,
    pub coin_dim: usize,
    pub basis: Vec<[i64; 2]>,
    pub blocks: Vec<BlockEntry>,
}

/// Basis pairs in index order.
pub fn basis_pairs(basis: &PairBasis) -> Vec<[i64; 2]> {
    basis.pairs().iter().map(|&p| pair_array(p)).collect()
}

/// Vertex probabilities serialized as a JSON object keyed by vertex label,
/// in increasing vertex order.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(transparent)]
pub struct Probabilities(pub BTreeMap<String, f64>);

#[derive(Clone, Debug, PartialEq)]
pub struct OrderedProbabilities(pub Vec<(i64, f64)>);

impl Serialize for OrderedProbabilities {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (v, p) in &self.0 {
            map.serialize_entry(&v.to_string(), p)?;
        }
        map.end()
    }
}

/// `{"t": step, "P": {"vertex": prob…}}`, plus the sampled outcome when
/// measuring at every step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionRecord {
    pub t: usize,
    #[serde(rename = "P")]
    pub probabilities: OrderedProbabilities,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<[i64; 2]>,
}

impl DistributionRecord {
    pub fn new(t: usize, dist: &VertexDistribution, outcome: Option<Pair>) -> Self {
        DistributionRecord {
            t,
            probabilities: OrderedProbabilities(dist.iter().map(|(v, p)| (v.0, p)).collect()),
            outcome: outcome.map(pair_array),
        }
    }
}

/// Parsed form of a distribution record, for reading outputs back.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ParsedRecord {
    pub t: usize,
    #[serde(rename = "P")]
    pub probabilities: Probabilities,
    #[serde(default)]
    pub outcome: Option<[i64; 2]>,
}
