//! Moment functionals of labelled patterns in the model `𝒢(n₀, n, t, k, p)`.
//!
//! All values are natural logarithms; `f64::NEG_INFINITY` stands for an
//! exact zero. Comparisons between log-values use a tolerance of `1e−9`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::multigraph::LabeledMultigraph;

use super::EXHAUSTIVE_LIMIT;

pub const LOG_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentModel {
    pub n0: usize,
    pub n: usize,
    pub t: usize,
    pub p: f64,
}

impl MomentModel {
    pub fn new(n0: usize, n: usize, t: usize, p: f64) -> Result<Self> {
        let m = MomentModel { n0, n, t, p };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 < 1 || self.n < 1 {
            return Err(invalid("model needs n0 >= 1 and n >= 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(invalid(format!("p = {} is not a probability", self.p)));
        }
        Ok(())
    }

    /// Size of host class `i`.
    pub fn class_size(&self, i: usize) -> usize {
        match i {
            0 => self.n0,
            i if i <= self.t => self.n,
            _ => 0,
        }
    }

    fn log_p_pow(&self, e: usize) -> f64 {
        if e == 0 {
            0.0
        } else if self.p == 0.0 {
            f64::NEG_INFINITY
        } else {
            e as f64 * self.p.ln()
        }
    }
}

/// A subpattern: a vertex set and a set of edge indices whose endpoints lie
/// in it. Both lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubPattern {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl SubPattern {
    pub fn new(pattern: &LabeledMultigraph, mut vertices: Vec<usize>, mut edges: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_unstable();
        edges.dedup();
        let all = pattern.edges();
        for &i in &edges {
            let e = all
                .get(i)
                .ok_or_else(|| invalid(format!("edge index {i} out of range")))?;
            if vertices.binary_search(&e.u).is_err() || vertices.binary_search(&e.v).is_err() {
                return Err(invalid(format!("edge {i} has an endpoint outside the subpattern")));
            }
        }
        if let Some(&v) = vertices.last() {
            if v >= pattern.vertex_count() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: pattern.vertex_count(),
                });
            }
        }
        Ok(SubPattern { vertices, edges })
    }

    pub fn whole(pattern: &LabeledMultigraph) -> Self {
        SubPattern {
            vertices: (0..pattern.vertex_count()).collect(),
            edges: (0..pattern.edge_count()).collect(),
        }
    }

    /// The subpattern spanned by `vertices` with every edge inside it.
    pub fn induced(pattern: &LabeledMultigraph, vertices: &[usize]) -> Self {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let edges = pattern
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| vs.binary_search(&e.u).is_ok() && vs.binary_search(&e.v).is_ok())
            .map(|(i, _)| i)
            .collect();
        SubPattern { vertices: vs, edges }
    }

    pub fn union(&self, other: &SubPattern) -> SubPattern {
        SubPattern {
            vertices: merge_sorted(&self.vertices, &other.vertices, true),
            edges: merge_sorted(&self.edges, &other.edges, true),
        }
    }

    pub fn intersection(&self, other: &SubPattern) -> SubPattern {
        SubPattern {
            vertices: merge_sorted(&self.vertices, &other.vertices, false),
            edges: merge_sorted(&self.edges, &other.edges, false),
        }
    }
}

fn merge_sorted(a: &[usize], b: &[usize], union: bool) -> Vec<usize> {
    let sb: std::collections::BTreeSet<usize> = b.iter().copied().collect();
    let sa: std::collections::BTreeSet<usize> = a.iter().copied().collect();
    if union {
        sa.union(&sb).copied().collect()
    } else {
        sa.intersection(&sb).copied().collect()
    }
}

/// `log Ψ = e·log p + |Y₀|·log n₀ + (v − |Y₀|)·log n` for a subpattern.
pub fn psi_of(pattern: &LabeledMultigraph, sub: &SubPattern, model: &MomentModel) -> f64 {
    let y0 = sub.vertices.iter().filter(|&&v| pattern.class_of(v) == 0).count();
    model.log_p_pow(sub.edges.len())
        + y0 as f64 * (model.n0 as f64).ln()
        + (sub.vertices.len() - y0) as f64 * (model.n as f64).ln()
}

pub fn log_psi(pattern: &LabeledMultigraph, model: &MomentModel) -> f64 {
    psi_of(pattern, &SubPattern::whole(pattern), model)
}

fn log_falling(size: usize, c: usize) -> f64 {
    if c > size {
        return f64::NEG_INFINITY;
    }
    (0..c).map(|i| ((size - i) as f64).ln()).sum()
}

/// Exact `log E[X]` for a subpattern: `p^e` times, for every class, the
/// falling factorial of the host class size at the pattern class size.
pub fn expected_sub(pattern: &LabeledMultigraph, sub: &SubPattern, model: &MomentModel) -> f64 {
    let mut counts = vec![0usize; pattern.class_count()];
    for &v in &sub.vertices {
        counts[pattern.class_of(v)] += 1;
    }
    let classes: f64 = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| log_falling(model.class_size(i), c))
        .sum();
    model.log_p_pow(sub.edges.len()) + classes
}

/// `log E[X_H]` for the number `X_H` of good copies of the whole pattern.
pub fn expected_good_copies(pattern: &LabeledMultigraph, model: &MomentModel) -> f64 {
    expected_sub(pattern, &SubPattern::whole(pattern), model)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiVariant {
    /// Minimum over subpatterns with at least one edge.
    Edge,
    /// Minimum over subpatterns with at least one vertex.
    Vertex,
}

#[derive(Clone, Copy)]
struct Cand {
    value: f64,
    size: u32,
    mask: u64,
}

fn pick(a: Option<Cand>, b: Option<Cand>) -> Option<Cand> {
    match (a, b) {
        (Some(x), Some(y)) => {
            let ord = x
                .value
                .total_cmp(&y.value)
                .then(x.size.cmp(&y.size))
                .then(x.mask.cmp(&y.mask));
            Some(if ord.is_le() { x } else { y })
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// `Φ` (edge variant) or `Φᵛ` (vertex variant) and a minimising subpattern.
///
/// For a fixed vertex set, `E[X]` only falls as edges are added (`p ≤ 1`),
/// so the minimum over subpatterns on that vertex set is attained by taking
/// every induced edge; the search is over vertex subsets only.
pub fn phi(pattern: &LabeledMultigraph, model: &MomentModel, variant: PhiVariant) -> Result<(f64, SubPattern)> {
    model.validate()?;
    let v = pattern.vertex_count();
    if v > EXHAUSTIVE_LIMIT {
        return Err(Error::SizeLimit {
            what: "phi enumeration",
            actual: v,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if v == 0 || (variant == PhiVariant::Edge && pattern.edge_count() == 0) {
        return Err(invalid("pattern has no subpattern of the requested kind"));
    }
    let classes: Vec<usize> = pattern.classes().to_vec();
    let sizes = pattern.class_sizes();
    let table: Vec<Vec<f64>> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| (0..=s).map(|c| log_falling(model.class_size(i), c)).collect())
        .collect();
    let mut adj = vec![Vec::new(); v];
    for e in pattern.edges() {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let low = v.min(14);
    let need_edge = variant == PhiVariant::Edge;

    let scan = |high: u64| -> Option<Cand> {
        let into = |x: usize, mask: u64| adj[x].iter().filter(|&&y| (mask >> y) & 1 == 1).count();
        let mut mask = high << low;
        let mut counts = vec![0usize; sizes.len()];
        let mut e = 0usize;
        let mut seen = 0u64;
        for x in 0..v {
            if (mask >> x) & 1 == 1 {
                e += into(x, seen);
                seen |= 1 << x;
                counts[classes[x]] += 1;
            }
        }
        let mut best = None;
        for i in 0u64..1 << low {
            if i > 0 {
                let x = i.trailing_zeros() as usize;
                let bit = 1u64 << x;
                if mask & bit == 0 {
                    e += into(x, mask);
                    mask |= bit;
                    counts[classes[x]] += 1;
                } else {
                    mask &= !bit;
                    e -= into(x, mask);
                    counts[classes[x]] -= 1;
                }
            }
            if mask == 0 || (need_edge && e == 0) {
                continue;
            }
            let value = model.log_p_pow(e) + counts.iter().enumerate().map(|(c, &k)| table[c][k]).sum::<f64>();
            best = pick(
                best,
                Some(Cand {
                    value,
                    size: mask.count_ones(),
                    mask,
                }),
            );
        }
        best
    };
    let best = (0..1u64 << (v - low))
        .into_par_iter()
        .map(scan)
        .reduce(|| None, pick)
        .ok_or_else(|| invalid("no admissible subpattern"))?;
    let vertices: Vec<usize> = (0..v).filter(|&x| (best.mask >> x) & 1 == 1).collect();
    Ok((best.value, SubPattern::induced(pattern, &vertices)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::{build_contracted_q, PLAIN};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= LOG_TOLERANCE * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn single_vertex_and_edge() {
        let m = MomentModel::new(7, 100, 3, 0.3).unwrap();
        let one = LabeledMultigraph::new(2, 1, vec![0]).unwrap();
        assert!(close(log_psi(&one, &m), 7f64.ln()));
        assert!(close(expected_good_copies(&one, &m), 7f64.ln()));
        let (val, sub) = phi(&one, &m, PhiVariant::Vertex).unwrap();
        assert!(close(val, 7f64.ln()));
        assert_eq!(sub.vertices, vec![0]);

        let mut edge = LabeledMultigraph::new(2, 3, vec![1, 2]).unwrap();
        edge.add_edge(0, 1, PLAIN).unwrap();
        assert!(close(expected_good_copies(&edge, &m), (0.3f64 * 100.0 * 100.0).ln()));

        let full = MomentModel::new(7, 100, 3, 1.0).unwrap();
        assert!(close(log_psi(&edge, &full), (100f64 * 100.0).ln()));
    }

    #[test]
    fn zero_probability_is_explicit() {
        let m = MomentModel::new(2, 5, 2, 0.0).unwrap();
        let mut edge = LabeledMultigraph::new(1, 3, vec![1, 2]).unwrap();
        edge.add_edge(0, 1, PLAIN).unwrap();
        assert_eq!(log_psi(&edge, &m), f64::NEG_INFINITY);
    }

    #[test]
    fn class_overflow_gives_zero() {
        let m = MomentModel::new(1, 5, 2, 0.5).unwrap();
        let two = LabeledMultigraph::new(1, 1, vec![0, 0]).unwrap();
        assert_eq!(expected_good_copies(&two, &m), f64::NEG_INFINITY);
        let beyond = LabeledMultigraph::new(1, 5, vec![4]).unwrap();
        assert_eq!(expected_good_copies(&beyond, &m), f64::NEG_INFINITY);
    }

    #[test]
    fn q_expectation_tracks_psi() {
        let q = build_contracted_q(10, 2).unwrap();
        for n in [1000usize, 10000] {
            let m = MomentModel::new(n / 10, n, q.t(), 0.2).unwrap();
            let gap = log_psi(&q, &m) - expected_good_copies(&q, &m);
            assert!(gap.abs() < 1e-6, "{gap}");
        }
    }

    #[test]
    fn vertex_variant_below_edge_variant() {
        let q = build_contracted_q(12, 2).unwrap();
        let m = MomentModel::new(50, 1000, q.t(), 0.1).unwrap();
        let (pe, se) = phi(&q, &m, PhiVariant::Edge).unwrap();
        let (pv, _) = phi(&q, &m, PhiVariant::Vertex).unwrap();
        assert!(pv <= pe + LOG_TOLERANCE);
        assert!(!se.edges.is_empty());
        assert!(close(expected_sub(&q, &se, &m), pe));
    }
}
