//! Seeded sampling of `G(n,p)`, exact multi-round exposure, and the
//! labelled multipartite model.
//!
//! Every pair's coin is `pair_uniform(seed, u, v) < p`, so a sample depends
//! only on `(n, p, seed)` and never on thread count or evaluation order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::MomentModel;
use crate::error::{invalid, Result};
use crate::graph::SimpleGraph;
use crate::multigraph::{Label, LabeledMultigraph, PLAIN};
use crate::seed::{derive, pair_uniform};

const ROUND_TAG: u64 = 0x72_6f75_6e64;
const LABEL_TAG: u64 = 0x6c_6162_656c;

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} is not a probability")));
    }
    Ok(())
}

pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<SimpleGraph> {
    check_p(p)?;
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| (u + 1..n).filter(|&v| pair_uniform(seed, u, v) < p).collect())
        .collect();
    let mut g = SimpleGraph::new(n);
    for (u, row) in rows.into_iter().enumerate() {
        for v in row {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// `r` independent rounds with `1 − (1 − p_r)^r = p`, so their union is
/// distributed exactly as `G(n,p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExposurePlan {
    pub p: f64,
    pub rounds: usize,
    pub per_round_p: f64,
}

pub fn split_rounds(p: f64, r: usize) -> Result<ExposurePlan> {
    check_p(p)?;
    if r == 0 {
        return Err(invalid("need at least one round"));
    }
    let per_round_p = if r == 1 {
        p
    } else {
        -((-p).ln_1p() / r as f64).exp_m1()
    };
    Ok(ExposurePlan {
        p,
        rounds: r,
        per_round_p: per_round_p.clamp(0.0, 1.0),
    })
}

impl ExposurePlan {
    /// Seed of round `i` (0-based) under a base seed.
    pub fn round_seed(&self, base: u64, i: usize) -> u64 {
        derive(&[base, ROUND_TAG, i as u64])
    }

    pub fn sample_round(&self, n: usize, base: u64, i: usize) -> Result<SimpleGraph> {
        sample_gnp(n, self.per_round_p, self.round_seed(base, i))
    }

    pub fn sample_all(&self, n: usize, base: u64) -> Result<Vec<SimpleGraph>> {
        (0..self.rounds).map(|i| self.sample_round(n, base, i)).collect()
    }
}

pub fn union_of(rounds: &[SimpleGraph]) -> Result<SimpleGraph> {
    let mut it = rounds.iter();
    let first = it.next().ok_or_else(|| invalid("no rounds to unite"))?.clone();
    it.try_fold(first, |acc, g| acc.union(g))
}

/// Random subgraph of the complete host `K`: vertices of `V_0` are
/// `0..n0`, then `V_1..V_t` follow in blocks of `n`. Each of the `2k`
/// labelled edges of a `V_0`–`V_i` pair and each plain cross edge is kept
/// independently with probability `p`.
pub fn sample_multipartite(model: &MomentModel, k: usize, seed: u64) -> Result<LabeledMultigraph> {
    model.validate()?;
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let mut sizes = vec![model.n0];
    sizes.extend(std::iter::repeat_n(model.n, model.t));
    let mut g = LabeledMultigraph::with_class_sizes(k, &sizes)?;
    let total = model.n0 + model.t * model.n;
    let labels: Vec<Label> = (1..=k as Label).flat_map(|l| [l, -l]).collect();
    let label_seeds: Vec<u64> = labels.iter().map(|&l| derive(&[seed, LABEL_TAG, l as i64 as u64])).collect();
    for x in 0..model.n0 {
        for y in model.n0..total {
            for (&l, &s) in labels.iter().zip(&label_seeds) {
                if pair_uniform(s, x, y) < model.p {
                    g.add_edge(x, y, l)?;
                }
            }
        }
    }
    let plain_seed = derive(&[seed, LABEL_TAG, 0]);
    for x in model.n0..total {
        for y in x + 1..total {
            if g.class_of(x) != g.class_of(y) && pair_uniform(plain_seed, x, y) < model.p {
                g.add_edge(x, y, PLAIN)?;
            }
        }
    }
    Ok(g)
}
