//! Exact densities `d₁ = e/(v−1)`, `d₂ = e/(v−2)`, their maxima over
//! subgraphs, and log-space moment functionals for labelled patterns.
//!
//! For a fixed vertex set, both densities are maximised by keeping every
//! available edge (multiplicities included), so maximising over subgraphs
//! reduces to maximising over vertex subsets of the induced multigraph.

mod exhaustive;
mod flow;
pub mod moments;
mod parametric;

use num::{BigInt, BigRational};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::SimpleGraph;
use crate::multigraph::LabeledMultigraph;

pub use moments::{
    expected_good_copies, expected_sub, log_psi, phi, psi_of, MomentModel, PhiVariant, SubPattern, LOG_TOLERANCE,
};

/// Largest vertex count accepted by exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Anything with a vertex count and per-pair edge multiplicities.
pub trait WeightedGraph {
    fn vertex_count(&self) -> usize;
    /// Distinct pairs `(u, v, multiplicity)` with `u < v`.
    fn weighted_pairs(&self) -> Vec<(usize, usize, u64)>;
}

impl WeightedGraph for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn weighted_pairs(&self) -> Vec<(usize, usize, u64)> {
        self.edges().map(|(u, v)| (u, v, 1)).collect()
    }
}

impl WeightedGraph for LabeledMultigraph {
    fn vertex_count(&self) -> usize {
        LabeledMultigraph::vertex_count(self)
    }

    fn weighted_pairs(&self) -> Vec<(usize, usize, u64)> {
        let mut m = std::collections::BTreeMap::new();
        for e in self.edges() {
            *m.entry((e.u, e.v)).or_insert(0u64) += 1;
        }
        m.into_iter().map(|((u, v), w)| (u, v, w)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Parametric,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Method::Exhaustive),
            "parametric" => Ok(Method::Parametric),
            other => Err(invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// A maximum density and a vertex set whose induced subgraph attains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityResult {
    pub value: BigRational,
    pub witness: Vec<usize>,
}

fn ratio(e: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(e), BigInt::from(d))
}

fn total_weight(h: &impl WeightedGraph) -> u64 {
    h.weighted_pairs().iter().map(|p| p.2).sum()
}

pub fn d1(h: &impl WeightedGraph) -> Result<BigRational> {
    let v = h.vertex_count();
    if v < 2 {
        return Err(invalid(format!("d1 needs at least 2 vertices, got {v}")));
    }
    Ok(ratio(total_weight(h), v as u64 - 1))
}

pub fn d2(h: &impl WeightedGraph) -> Result<BigRational> {
    let v = h.vertex_count();
    if v < 3 {
        return Err(invalid(format!("d2 needs at least 3 vertices, got {v}")));
    }
    Ok(ratio(total_weight(h), v as u64 - 2))
}

/// Max of `e(S)/(|S|−1)` over `|S| ≥ 2`.
pub fn d1_max(h: &impl WeightedGraph, method: Method) -> Result<DensityResult> {
    max_density(h, method, 1)
}

/// Max of `e(S)/(|S|−2)` over `|S| ≥ 3`.
pub fn d2_max(h: &impl WeightedGraph, method: Method) -> Result<DensityResult> {
    max_density(h, method, 2)
}

fn max_density(h: &impl WeightedGraph, method: Method, shift: usize) -> Result<DensityResult> {
    let v = h.vertex_count();
    if v < shift + 1 {
        return Err(invalid(format!(
            "d{shift}_max needs at least {} vertices, got {v}",
            shift + 1
        )));
    }
    let pairs = h.weighted_pairs();
    match method {
        Method::Exhaustive => {
            if v > EXHAUSTIVE_LIMIT {
                return Err(Error::SizeLimit {
                    what: "exhaustive density",
                    actual: v,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            Ok(exhaustive::max_density(v, &pairs, shift))
        }
        Method::Parametric => Ok(parametric::max_density(v, &pairs, shift)),
    }
}
