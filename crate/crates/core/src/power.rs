//! Powers of paths and cycles, endsequences, linkages and the join rule.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::SimpleGraph;

/// The kth power of the path `0, 1, …, n−1`.
pub fn make_path_power(n: usize, k: usize) -> Result<SimpleGraph> {
    if n == 0 || k == 0 {
        return Err(invalid(format!("path power needs n >= 1 and k >= 1, got n={n}, k={k}")));
    }
    let mut g = SimpleGraph::new(n);
    for u in 0..n {
        for v in u + 1..(u + k + 1).min(n) {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// The kth power of the cycle `0, 1, …, n−1, 0`.
pub fn make_cycle_power(n: usize, k: usize) -> Result<SimpleGraph> {
    if n < 3 || k == 0 {
        return Err(invalid(format!("cycle power needs n >= 3 and k >= 1, got n={n}, k={k}")));
    }
    let mut g = SimpleGraph::new(n);
    for u in 0..n {
        for d in 1..=k.min(n / 2) {
            g.add_edge(u, (u + d) % n)?;
        }
    }
    Ok(g)
}

pub(crate) fn ensure_distinct(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::DuplicateVertex(v));
        }
    }
    Ok(())
}

/// Whether `order` witnesses a kth power of a path in `host`: every pair at
/// positions `i < j` with `j − i ≤ k` must be adjacent.
pub fn verify_path_power_in(host: &SimpleGraph, order: &[usize], k: usize) -> Result<bool> {
    ensure_distinct(order, host.n())?;
    Ok(path_power_holds(host, order, k, |_, _| false))
}

/// Like [`verify_path_power_in`] but pairs accepted by `free(i, j)` need no
/// host edge.
pub(crate) fn path_power_holds(
    host: &SimpleGraph,
    order: &[usize],
    k: usize,
    free: impl Fn(usize, usize) -> bool,
) -> bool {
    for j in 1..order.len() {
        for i in j.saturating_sub(k)..j {
            if !free(i, j) && !host.has_edge(order[i], order[j]) {
                return false;
            }
        }
    }
    true
}

/// An ordered sequence of exactly `k` distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSeq(Vec<usize>);

impl VertexSeq {
    pub fn new(vertices: Vec<usize>, k: usize) -> Result<Self> {
        if vertices.len() != k {
            return Err(invalid(format!("sequence of length {} but k = {k}", vertices.len())));
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::DuplicateVertex(*v));
            }
        }
        Ok(VertexSeq(vertices))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }
}

/// The kth power of a path, stored as its underlying vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPower {
    order: Vec<usize>,
    k: usize,
}

impl PathPower {
    pub fn new(order: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if order.len() < k {
            return Err(invalid(format!(
                "path power of {} vertices has no endsequence of length {k}",
                order.len()
            )));
        }
        let n = order.iter().copied().max().map_or(0, |m| m + 1);
        ensure_distinct(&order, n)?;
        Ok(PathPower { order, k })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn initial(&self) -> &[usize] {
        &self.order[..self.k]
    }

    pub fn final_seq(&self) -> &[usize] {
        &self.order[self.order.len() - self.k..]
    }

    pub fn initial_seq(&self) -> VertexSeq {
        VertexSeq(self.initial().to_vec())
    }

    pub fn final_endsequence(&self) -> VertexSeq {
        VertexSeq(self.final_seq().to_vec())
    }

    pub fn verify_in(&self, host: &SimpleGraph) -> Result<bool> {
        verify_path_power_in(host, &self.order, self.k)
    }
}

/// An (A,B)-linkage: the order of the underlying power-path R′ whose first
/// `k` entries are `A` and whose last `k` entries are `B`. Edges inside `A`
/// and inside `B` are not part of the linkage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linkage {
    order: Vec<usize>,
    k: usize,
}

impl Linkage {
    pub fn new(order: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 || order.len() < 2 * k {
            return Err(invalid(format!(
                "linkage needs at least 2k = {} vertices, got {}",
                2 * k,
                order.len()
            )));
        }
        let n = order.iter().copied().max().map_or(0, |m| m + 1);
        ensure_distinct(&order, n)?;
        Ok(Linkage { order, k })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total number of vertices, endsequences included.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn start(&self) -> &[usize] {
        &self.order[..self.k]
    }

    pub fn end(&self) -> &[usize] {
        &self.order[self.order.len() - self.k..]
    }

    pub fn interior(&self) -> &[usize] {
        &self.order[self.k..self.order.len() - self.k]
    }

    /// Whether every pair of the power-path except those inside `A` or inside
    /// `B` is an edge of `host`.
    pub fn verify_in(&self, host: &SimpleGraph) -> bool {
        let (k, len) = (self.k, self.order.len());
        self.order.iter().all(|&v| v < host.n())
            && path_power_holds(host, &self.order, k, |i, j| j < k || i >= len - k)
    }

    /// The linkage edges R (pairs required from the host).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let (k, len) = (self.k, self.order.len());
        let mut out = Vec::new();
        for j in 1..len {
            for i in j.saturating_sub(k)..j {
                if !(j < k || i >= len - k) {
                    out.push((self.order[i], self.order[j]));
                }
            }
        }
        out
    }
}

/// Concatenate `left`, the interior of `link`, and `right`.
///
/// The link must start with the final endsequence of `left`, end with the
/// initial endsequence of `right`, and meet `left ∪ right` nowhere else.
pub fn join(left: &PathPower, link: &Linkage, right: &PathPower) -> Result<PathPower> {
    let k = left.k;
    if right.k != k || link.k != k {
        return Err(Error::EndsequenceMismatch(format!(
            "power parameters differ: {}, {}, {}",
            left.k, link.k, right.k
        )));
    }
    if link.start() != left.final_seq() {
        return Err(Error::EndsequenceMismatch(
            "linkage start differs from final endsequence of the left path".into(),
        ));
    }
    if link.end() != right.initial() {
        return Err(Error::EndsequenceMismatch(
            "linkage end differs from initial endsequence of the right path".into(),
        ));
    }
    let mut order = Vec::with_capacity(left.len() + link.interior().len() + right.len());
    order.extend_from_slice(&left.order);
    order.extend_from_slice(link.interior());
    order.extend_from_slice(&right.order);
    let n = order.iter().copied().max().map_or(0, |m| m + 1);
    match ensure_distinct(&order, n) {
        Err(Error::DuplicateVertex(v)) => Err(Error::VertexOverlap(v)),
        Err(e) => Err(e),
        Ok(()) => Ok(PathPower { order, k }),
    }
}

/// A cyclic vertex ordering claimed to witness the kth power of a Hamilton
/// cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonPowerCertificate {
    pub cyclic_order: Vec<usize>,
    pub k: usize,
}

impl HamiltonPowerCertificate {
    /// One line of space-separated vertex ids.
    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self.cyclic_order.iter().map(|v| v.to_string()).collect();
        parts.join(" ")
    }

    pub fn from_line(line: &str, k: usize) -> Result<Self> {
        let cyclic_order = crate::graph::parse_usizes(1, line)?;
        Ok(HamiltonPowerCertificate { cyclic_order, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_within(n: usize, k: usize) -> usize {
        let mut c = 0;
        for u in 0..n {
            for v in u + 1..n {
                if v - u <= k {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn path_power_examples() {
        assert_eq!(make_path_power(5, 2).unwrap().edge_count(), 7);
        assert_eq!(make_path_power(9, 1).unwrap().edge_count(), 8);
        assert_eq!(make_path_power(4, 3).unwrap().edge_count(), 6);
        assert!(make_path_power(0, 2).is_err());
        assert!(make_path_power(3, 0).is_err());
        assert_eq!(pairs_within(5, 2), 7);
    }

    #[test]
    fn cycle_power_examples() {
        let g = make_cycle_power(7, 2).unwrap();
        assert_eq!(g.edge_count(), 14);
        assert!((0..7).all(|v| g.degree(v) == 4));
        assert_eq!(make_cycle_power(9, 1).unwrap().edge_count(), 9);
        assert_eq!(make_cycle_power(5, 2).unwrap().edge_count(), 10);
        assert!(make_cycle_power(2, 1).is_err());
    }

    #[test]
    fn verify_examples() {
        let mut host = make_path_power(8, 2).unwrap();
        let order: Vec<usize> = (0..8).collect();
        assert!(verify_path_power_in(&host, &order, 2).unwrap());
        host.remove_edge(0, 1);
        assert!(!verify_path_power_in(&host, &order, 2).unwrap());
        let k6 = SimpleGraph::complete(6);
        assert!(verify_path_power_in(&k6, &[3, 1, 5, 0, 2, 4], 2).unwrap());
        assert!(matches!(
            verify_path_power_in(&k6, &[0, 1, 0], 2),
            Err(Error::DuplicateVertex(0))
        ));
    }

    #[test]
    fn join_with_empty_interior() {
        let k = 2;
        let left = PathPower::new(vec![0, 1, 2, 3], k).unwrap();
        let right = PathPower::new(vec![4, 5, 6, 7], k).unwrap();
        let link = Linkage::new(vec![2, 3, 4, 5], k).unwrap();
        let joined = join(&left, &link, &right).unwrap();
        assert_eq!(joined.order(), &[0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn join_rejects_overlap_and_mismatch() {
        let k = 2;
        let left = PathPower::new(vec![0, 1, 2, 3], k).unwrap();
        let right = PathPower::new(vec![4, 5, 6, 7], k).unwrap();
        let overlap = Linkage::new(vec![2, 3, 0, 4, 5], k).unwrap();
        assert!(matches!(join(&left, &overlap, &right), Err(Error::VertexOverlap(0))));
        let wrong = Linkage::new(vec![3, 2, 8, 9, 4, 5], k).unwrap();
        assert!(matches!(join(&left, &wrong, &right), Err(Error::EndsequenceMismatch(_))));
        let wrong_end = Linkage::new(vec![2, 3, 8, 9, 5, 4], k).unwrap();
        assert!(matches!(join(&left, &wrong_end, &right), Err(Error::EndsequenceMismatch(_))));
    }

    #[test]
    fn linkage_verification_ignores_inner_endsequence_edges() {
        // P^2 on 0..8 without the edges inside {0,1} and inside {6,7}.
        let mut host = make_path_power(8, 2).unwrap();
        host.remove_edge(0, 1);
        host.remove_edge(6, 7);
        let link = Linkage::new((0..8).collect(), 2).unwrap();
        assert!(link.verify_in(&host));
        assert_eq!(link.edges().len(), 11);
        host.remove_edge(1, 2);
        assert!(!link.verify_in(&host));
    }
}
